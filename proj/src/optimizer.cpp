#include "ecve/optimizer.hpp"

#include "ecve/errors.hpp"
#include "ecve/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace ecve {

void OptimizerConfig::validate() const {
  if (attempts < 1)
    throw InvalidConfig("optimizer: attempts must be >= 1");
  if (max_iter < 0)
    throw InvalidConfig("optimizer: max_iter must be >= 0");
  if (!(tol_rel > 0.0))
    throw InvalidConfig("optimizer: tol_rel must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0))
    throw InvalidConfig("optimizer: armijo_c must lie in (0, 1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
    throw InvalidConfig("optimizer: backtrack_factor must lie in (0, 1)");
  if (!(initial_step > 0.0))
    throw InvalidConfig("optimizer: initial_step must be positive");
  if (max_backtracks < 1)
    throw InvalidConfig("optimizer: max_backtracks must be >= 1");
}

DescentStep descend_once(const EnsembleObjective &objective, const StiefelPoint &v,
                         double value, const Matrix &gradient,
                         const OptimizerConfig &opt, double trial_step) {
  const TangentVector direction = tangent_project(v, -gradient);
  const double slope = direction.matrix().squaredNorm();
  if (!(slope > 0.0))
    return {v, value, 0.0, false};

  double step = trial_step;
  for (int b = 0; b < opt.max_backtracks; ++b, step *= opt.backtrack_factor) {
    StiefelPoint candidate = retract(v, direction, step);
    const double candidate_value = objective.value(candidate.matrix()).value;
    if (candidate_value <= value - opt.armijo_c * step * slope)
      return {std::move(candidate), candidate_value, step, true};
  }
  return {v, value, 0.0, false};
}

DescentStep descend_once(const StiefelPoint &v, const Sample &sample,
                         const ObjectiveConfig &cfg, const OptimizerConfig &opt) {
  opt.validate();
  const EnsembleObjective objective(sample, cfg);
  const auto [value, gradient] = objective.value_and_gradient(v.matrix());
  return descend_once(objective, v, value.value, gradient, opt, opt.initial_step);
}

AttemptResult descend_from(const EnsembleObjective &objective,
                           const StiefelPoint &start, const OptimizerConfig &opt) {
  auto [value, gradient] = objective.value_and_gradient(start.matrix());
  AttemptResult result{start, value.value, 0, false, {value.value}};

  double trial = opt.initial_step;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    DescentStep step =
        descend_once(objective, result.v, result.value, gradient, opt, trial);
    if (!step.accepted) {
      // zero gradient counts as convergence; a failed line search does not
      result.converged = step.step == 0.0 &&
                         tangent_project(result.v, gradient).norm() == 0.0;
      break;
    }
    const double previous = result.value;
    result.v = std::move(step.v);
    result.value = step.value;
    result.trace.push_back(result.value);
    ++result.iterations;

    const double decrease = (previous - result.value) / std::max(previous, 1e-12);
    if (std::abs(decrease) < opt.tol_rel) {
      result.converged = true;
      break;
    }
    trial = step.step / opt.backtrack_factor;
    gradient = objective.value_and_gradient(result.v.matrix()).second;
  }
  return result;
}

OptimizationResult minimize(const Sample &sample, const ObjectiveConfig &cfg,
                            const OptimizerConfig &opt, Index q) {
  opt.validate();
  const Index p = sample.p();
  if (q < 1 || q >= p)
    throw InvalidDimension("minimize: need 1 <= q < p");

  const EnsembleObjective objective(sample, cfg);
  const auto attempts = static_cast<std::size_t>(opt.attempts);
  std::vector<std::optional<AttemptResult>> results(attempts);

  parallel_for(attempts, opt.threads, [&](std::size_t a) {
    Rng rng = make_rng(opt.seed, streams::kOptimizerRestarts, a);
    const StiefelPoint start = random_stiefel(p, q, rng);
    results[a] = descend_from(objective, start, opt);
  });

  std::size_t best = 0;
  std::vector<double> values;
  values.reserve(attempts);
  for (std::size_t a = 0; a < attempts; ++a) {
    values.push_back(results[a]->value);
    if (results[a]->value < results[best]->value - 1e-12)
      best = a;
  }

  AttemptResult &winner = *results[best];
  return OptimizationResult{std::move(winner.v),
                            winner.value,
                            winner.iterations,
                            std::move(values),
                            winner.converged,
                            static_cast<int>(best),
                            std::move(winner.trace)};
}

} // namespace ecve
