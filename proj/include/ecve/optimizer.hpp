#pragma once

#include "ecve/objective.hpp"
#include "ecve/stiefel.hpp"

#include <cstdint>
#include <vector>

namespace ecve {

struct OptimizerConfig {
  int attempts = 10;            ///< random restarts
  int max_iter = 50;            ///< descent steps per attempt
  double tol_rel = 1e-4;        ///< stop when the relative decrease falls below this
  double armijo_c = 1e-4;       ///< sufficient-decrease constant
  double backtrack_factor = 0.5;
  double initial_step = 1.0;    ///< first trial step of every attempt
  int max_backtracks = 50;
  std::uint64_t seed = 0;
  std::size_t threads = 1;      ///< workers for concurrent attempts

  /// Throws InvalidConfig when a field is outside its documented range.
  void validate() const;
};

/// One descent attempt from a fixed starting point.
struct AttemptResult {
  StiefelPoint v;
  double value;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace; ///< objective at every accepted iterate, starting point first
};

struct OptimizationResult {
  StiefelPoint v;
  double value;
  int iterations = 0;
  std::vector<double> attempt_values;
  bool converged = false;
  int best_attempt = 0;
  std::vector<double> trace; ///< trace of the winning attempt
};

struct DescentStep {
  StiefelPoint v;
  double value;
  double step = 0.0;     ///< accepted step length, 0 when no step was taken
  bool accepted = false;
};

/// One Riemannian gradient step with Armijo backtracking from `trial_step`:
/// xi = -tangent_project(V, grad), accepted when
/// L(retract(V, xi, t)) <= L(V) - armijo_c * t * ||xi||^2. Returns V
/// unchanged when the gradient vanishes or the step underflows.
DescentStep descend_once(const EnsembleObjective &objective, const StiefelPoint &v,
                         double value, const Matrix &gradient,
                         const OptimizerConfig &opt, double trial_step);

/// Convenience form that evaluates the objective and gradient at V and uses
/// opt.initial_step as the trial step.
DescentStep descend_once(const StiefelPoint &v, const Sample &sample,
                         const ObjectiveConfig &cfg, const OptimizerConfig &opt);

/// Runs a single attempt from `start`. After an accepted step t the next
/// trial step is t / backtrack_factor, so the step length adapts upward as
/// well as down.
AttemptResult descend_from(const EnsembleObjective &objective,
                           const StiefelPoint &start, const OptimizerConfig &opt);

/// Minimizes the ensemble objective over S(p, q) from opt.attempts random
/// starting points. Attempt a starts from a point drawn with a seed derived
/// from (opt.seed, a), so results do not depend on opt.threads. The lowest
/// final value wins; ties within 1e-12 go to the lowest attempt index.
OptimizationResult minimize(const Sample &sample, const ObjectiveConfig &cfg,
                            const OptimizerConfig &opt, Index q);

} // namespace ecve
