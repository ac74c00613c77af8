#pragma once

#include "ecve/ensembles.hpp"
#include "ecve/kernel.hpp"
#include "ecve/stiefel.hpp"
#include "ecve/types.hpp"

#include <optional>
#include <string>
#include <utility>

namespace ecve {

/// Predictors X (n x p), responses Y (n) and transformed responses FY (n x m).
class Sample {
public:
  /// Throws DegenerateData for n < 2 or non-finite entries and
  /// InvalidDimension for inconsistent shapes.
  Sample(Matrix x, Vector y, Matrix fy);

  /// FY computed from Y by the ensemble described by `spec`.
  static Sample with_ensemble(Matrix x, Vector y, const EnsembleSpec &spec);

  const Matrix &x() const noexcept { return x_; }
  const Vector &y() const noexcept { return y_; }
  const Matrix &fy() const noexcept { return fy_; }
  Index n() const noexcept { return x_.rows(); }
  Index p() const noexcept { return x_.cols(); }
  Index m() const noexcept { return fy_.cols(); }

private:
  Matrix x_;
  Vector y_;
  Matrix fy_;
};

/// How slice-level variances are averaged over the shifting points:
/// `uniform` uses 1/n, `weighted` weights each slice by its kernel mass.
enum class Weighting { uniform, weighted };

std::string to_string(Weighting w);
Weighting parse_weighting(const std::string &text);

struct ObjectiveConfig {
  Bandwidth h;
  Weighting weighting = Weighting::uniform;
  KernelSpec kernel{};
};

struct ObjectiveValue {
  double value = 0.0;  ///< mean of per_function
  Vector per_function; ///< L*_n(V, f_j), j = 1..m
};

/// Squared distances d_i = ||(I - V V^T)(X_i - s0)||^2, computed as
/// ||X_i - s0||^2 - ||V^T (X_i - s0)||^2 and clamped at 0.
Vector distances(const StiefelPoint &v, const Vector &s0, const Matrix &x);

/// Within-slice weights w_i = K(d_i / h) / sum_j K(d_j / h).
Vector slice_weights(const StiefelPoint &v, const Vector &s0,
                     const Sample &sample, const ObjectiveConfig &cfg);

/// (sum_i w_i f_i, sum_i w_i f_i^2).
std::pair<double, double> slice_moments(const Vector &weights, const Vector &fy);

/// ybar2 - ybar1^2 for the slice anchored at s0 and transform f_index.
double local_variance(const StiefelPoint &v, const Vector &s0,
                      const Sample &sample, const ObjectiveConfig &cfg,
                      Index f_index);

/// L*_n(V, f) (uniform) or L^(w)_n(V, f) (weighted) for a single transform.
double objective_single(const StiefelPoint &v, const Sample &sample,
                        const ObjectiveConfig &cfg, Index f_index);

/// Slice weights proportional to the kernel mass of the other n - 1 points.
Vector between_slice_weights(const StiefelPoint &v, const Sample &sample,
                             const ObjectiveConfig &cfg);

ObjectiveValue objective_ensemble(const StiefelPoint &v, const Sample &sample,
                                  const ObjectiveConfig &cfg);

/// Euclidean gradient of objective_ensemble with respect to V.
Matrix gradient_ensemble(const StiefelPoint &v, const Sample &sample,
                         const ObjectiveConfig &cfg);

/// Central finite-difference approximation of gradient_ensemble.
Matrix gradient_fd(const StiefelPoint &v, const Sample &sample,
                   const ObjectiveConfig &cfg, double eps);

/// Repeated objective/gradient evaluation on one sample. Pairwise predictor
/// distances are computed once at construction; evaluation costs
/// O(n^2 (q + m)). The evaluator holds references: `sample` must outlive it.
///
/// Evaluation accepts any p x q matrix. Off the Stiefel manifold the objective
/// is extended through d = ||x||^2 - ||V^T x||^2, which is the extension the
/// analytic gradient differentiates.
class EnsembleObjective {
public:
  EnsembleObjective(const Sample &sample, ObjectiveConfig cfg);

  ObjectiveValue value(const Matrix &v) const;
  std::pair<ObjectiveValue, Matrix> value_and_gradient(const Matrix &v) const;

  /// n x n matrix whose (i, j) entry is d_j(V, X_i).
  Matrix slice_distances(const Matrix &v) const;

  const Sample &sample() const noexcept { return sample_; }
  const ObjectiveConfig &config() const noexcept { return cfg_; }

private:
  std::pair<ObjectiveValue, std::optional<Matrix>>
  evaluate(const Matrix &v, bool with_gradient) const;

  const Sample &sample_;
  ObjectiveConfig cfg_;
  Matrix pair_sq_; ///< ||X_i - X_j||^2
};

} // namespace ecve
