#pragma once

#include "ecve/ensembles.hpp"
#include "ecve/objective.hpp"
#include "ecve/optimizer.hpp"
#include "ecve/stiefel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ecve {

/// Columnwise centering and scaling applied to the predictors before fitting.
/// Standard deviations use the 1/n normalization, so the standardized
/// predictors have tr(Sigma_x) = p exactly.
struct StandardizationParams {
  Vector means;
  Vector sds;

  /// Throws DegenerateData if any column is constant.
  static StandardizationParams fit(const Matrix &x);
  Matrix apply(const Matrix &x) const;
};

/// Provenance of a fit: everything needed to reproduce it.
struct FitConfig {
  EnsembleSpec ensemble;
  int m = 1; ///< resolved ensemble size
  Weighting weighting = Weighting::uniform;
  std::string kernel = "gaussian";
  double bandwidth = 0.0;
  OptimizerConfig optimizer;
  Index n = 0;
};

/// A fitted sufficient reduction. `b_hat` (p x k) spans the estimated central
/// subspace in the original predictor coordinates; `v_hat` (p x q) is the
/// objective minimizer in standardized coordinates, and
/// `b_hat_standardized` its orthogonal complement.
struct EcveFit {
  Index p = 0;
  Index k = 0;
  Index q = 0;
  Matrix b_hat;
  Matrix b_hat_standardized;
  StiefelPoint v_hat;
  double objective_value = 0.0;
  bool converged = false;
  std::vector<double> attempt_values;
  FitConfig config;
  StandardizationParams standardization;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
  /// Column labels, filled in by callers that know them (the CLI).
  std::vector<std::string> predictor_names;
  std::string response_name;
};

/// Fits an ECVE reduction of dimension k. X is standardized columnwise, the
/// ensemble is built from Y (m = auto resolves to default_m(n)), the
/// bandwidth rule is applied with q = p - k, and the ensemble objective is
/// minimized over S(p, q). The reduction basis is the complement of the
/// minimizer, mapped back to the original coordinates and orthonormalized.
EcveFit fit(const Matrix &x, const Vector &y, Index k, const EnsembleSpec &ensemble,
            Weighting weighting, const OptimizerConfig &opt);

/// Conditional variance estimation: fit with the identity ensemble.
EcveFit fit_cve(const Matrix &x, const Vector &y, Index k, const OptimizerConfig &opt);

/// X_new * B_hat.
Matrix reduce(const EcveFit &fit, const Matrix &x_new);

} // namespace ecve
