#pragma once

#include "ecve/ensembles.hpp"
#include "ecve/estimator.hpp"
#include "ecve/objective.hpp"
#include "ecve/optimizer.hpp"
#include "ecve/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ecve {

enum class ModelId { M1, M2, M3, M4, M5, M6, M7 };
enum class DistId { I, II, III };

std::string to_string(ModelId id);
std::string to_string(DistId id);
/// Throws UsageError listing the valid identifiers.
ModelId parse_model(const std::string &text);
DistId parse_dist(const std::string &text);

/// Simulation model: Y = g(b_1^T X, ..., b_k^T X, eps) with B the first k
/// columns of I_p.
struct ModelSpec {
  ModelId id = ModelId::M1;
  Index k = 1;
  Matrix b_true;

  static ModelSpec make(ModelId id, Index p = 10);
  /// Response for one predictor row and one standard normal draw.
  double response(const Eigen::Ref<const Eigen::RowVectorXd> &x, double eps) const;
};

/// Predictor distribution X = Sigma^{1/2} Z with Sigma_ij = 0.5^|i-j|.
///  I:   Z ~ N(0, I_p)
///  II:  Z_j i.i.d. uniform on [-sqrt 3, sqrt 3]
///  III: Z ~ N(0, I_p) + 2 e_J with J uniform on {1..p}, drawn per observation
struct PredictorDist {
  DistId id = DistId::I;
  Index p = 10;
  Matrix sigma;
  Matrix sigma_sqrt; ///< symmetric square root of sigma

  static PredictorDist make(DistId id, Index p = 10);
  /// n x p matrix of Z rows.
  Matrix draw_z(Index n, Rng &rng) const;
};

struct GeneratedData {
  Matrix x;
  Vector y;
  Matrix b_true;
};

/// Draws n observations. With `noise` false, eps is frozen at 0.
GeneratedData generate(const ModelSpec &model, const PredictorDist &dist, Index n,
                       std::uint64_t seed, bool noise = true);

/// An estimation method: ensemble plus between-slice weighting. Parsed from
/// `<ensemble_spec>[+weighted]`; the table-style alias `<kind>_weighted` is
/// accepted too.
struct MethodSpec {
  EnsembleSpec ensemble;
  Weighting weighting = Weighting::uniform;

  static MethodSpec parse(const std::string &text);
  std::string to_string() const;
};

struct StudyResult {
  ModelId model = ModelId::M1;
  DistId dist = DistId::I;
  Index n = 0;
  std::string method;
  int replicates = 0;
  std::vector<double> errors;
  double mean = 0.0;
  double sd = 0.0;           ///< sample sd (denominator r - 1); 0 when r = 1
  bool sd_degenerate = false; ///< true when r = 1
};

/// Mean and sample standard deviation with compensated summation.
void summarize(StudyResult &result);

/// r replicates of: generate data, fit with `method` at the model's k,
/// record subspace_error(B_true, B_hat). Replicate i uses data and
/// optimizer seeds derived from (seed, i), so the result does not depend on
/// `threads`. opt.seed and opt.threads are overridden per replicate.
StudyResult run_study(ModelId model, DistId dist, Index n, const MethodSpec &method,
                      int r, std::uint64_t seed, const OptimizerConfig &opt,
                      std::size_t threads = 1);

/// One StudyResult per entry of the increasing list `ns`.
std::vector<StudyResult> consistency_sweep(ModelId model, DistId dist,
                                           const std::vector<Index> &ns,
                                           const MethodSpec &method, int r,
                                           std::uint64_t seed,
                                           const OptimizerConfig &opt,
                                           std::size_t threads = 1);

/// `model,dist,n,method,replicates,mean_err,sd_err`
void write_summary_csv(std::ostream &out, const std::vector<StudyResult> &results);
/// `model,dist,n,method,rep,err`
void write_long_csv(std::ostream &out, const std::vector<StudyResult> &results);
/// Aligned table with mean and (sd) rows per (dist, n), one column per method.
void write_table(std::ostream &out, const std::vector<StudyResult> &results);

} // namespace ecve
