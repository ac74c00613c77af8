#include "doctest.h"

#include "ecve/errors.hpp"
#include "ecve/optimizer.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>

using namespace ecve;
using ecve::test::random_instance;

namespace {

OptimizerConfig small_config(std::uint64_t seed, int attempts = 3) {
  OptimizerConfig opt;
  opt.attempts = attempts;
  opt.max_iter = 30;
  opt.seed = seed;
  return opt;
}

} // namespace

TEST_CASE("OptimizerConfig validation") {
  OptimizerConfig opt;
  CHECK_NOTHROW(opt.validate());
  opt.attempts = 0;
  CHECK_THROWS_AS(opt.validate(), InvalidConfig);
  opt = {};
  opt.armijo_c = 1.0;
  CHECK_THROWS_AS(opt.validate(), InvalidConfig);
  opt = {};
  opt.backtrack_factor = 0.0;
  CHECK_THROWS_AS(opt.validate(), InvalidConfig);
  opt = {};
  opt.tol_rel = 0.0;
  CHECK_THROWS_AS(opt.validate(), InvalidConfig);
  opt = {};
  opt.initial_step = -1.0;
  CHECK_THROWS_AS(opt.validate(), InvalidConfig);
}

TEST_CASE("descend_once") {
  SUBCASE("constant response leaves V unchanged") {
    Rng rng(1);
    const Matrix x = ecve::test::gaussian_matrix(20, 4, rng);
    const Sample sample(x, Vector::Ones(20), Matrix::Ones(20, 1));
    const ObjectiveConfig cfg{Bandwidth(1.0), Weighting::uniform, KernelSpec{}};
    const StiefelPoint v = random_stiefel(4, 2, rng);
    const DescentStep step = descend_once(v, sample, cfg, OptimizerConfig{});
    CHECK_FALSE(step.accepted);
    CHECK(step.v.matrix() == v.matrix());
  }

  SUBCASE("accepted steps decrease the objective and stay feasible") {
    for (int seed = 0; seed < 10; ++seed) {
      const auto inst = random_instance(30, 5, 3, ecve::test::mixed_ensemble(seed), seed);
      const DescentStep step = descend_once(inst.v, inst.sample, inst.cfg, OptimizerConfig{});
      const double before = objective_ensemble(inst.v, inst.sample, inst.cfg).value;
      REQUIRE(step.accepted);
      CHECK(step.value < before);
      CHECK(step.value ==
            doctest::Approx(objective_ensemble(step.v, inst.sample, inst.cfg).value)
                .epsilon(1e-12));
      CHECK(step.v.orthonormality_defect() <= 1e-10);
    }
  }
}

TEST_CASE("descend_from produces a monotone feasible trace") {
  for (int seed = 0; seed < 5; ++seed) {
    const auto inst = random_instance(40, 6, 4, "fourier:4", seed);
    const EnsembleObjective objective(inst.sample, inst.cfg);
    OptimizerConfig opt;
    opt.max_iter = 40;
    const AttemptResult r = descend_from(objective, inst.v, opt);
    REQUIRE(r.trace.size() == static_cast<std::size_t>(r.iterations) + 1);
    for (std::size_t i = 1; i < r.trace.size(); ++i)
      CHECK(r.trace[i] <= r.trace[i - 1]);
    CHECK(r.v.orthonormality_defect() <= 1e-10);
    CHECK(r.value == r.trace.back());
  }
}

TEST_CASE("descend_from ignores the basis of the starting point") {
  const auto inst = random_instance(40, 6, 3, "indicator:4", 3);
  const EnsembleObjective objective(inst.sample, inst.cfg);
  Rng rng(77);
  const Matrix o = ecve::test::random_orthogonal(3, rng);
  const StiefelPoint rotated(Matrix(inst.v.matrix() * o));
  OptimizerConfig opt;
  opt.max_iter = 25;
  const AttemptResult a = descend_from(objective, inst.v, opt);
  const AttemptResult b = descend_from(objective, rotated, opt);
  CHECK(std::abs(a.value - b.value) <= 1e-8);
  CHECK((a.v.projector() - b.v.projector()).norm() <= 1e-6);
}

TEST_CASE("minimize") {
  SUBCASE("recovers a noiseless single index in the plane") {
    Rng rng(12);
    const Index n = 200;
    const Matrix x = ecve::test::gaussian_matrix(n, 2, rng);
    Vector b(2);
    b << 0.6, 0.8;
    const Vector y = x * b;
    const Sample sample = Sample::with_ensemble(x, y, EnsembleSpec::parse("identity"));
    const ObjectiveConfig cfg{bandwidth_rule(sample.x(), 1), Weighting::uniform, KernelSpec{}};
    const OptimizationResult r = minimize(sample, cfg, small_config(5), 1);
    CHECK(subspace_error(b, complement_basis(r.v).matrix()) < 0.1);
  }

  SUBCASE("beats random feasible points") {
    const auto inst = random_instance(40, 5, 3, "fourier:4", 21);
    const OptimizationResult r = minimize(inst.sample, inst.cfg, small_config(9), 3);
    Rng rng(4);
    for (int i = 0; i < 50; ++i)
      CHECK(r.value <= objective_ensemble(random_stiefel(5, 3, rng), inst.sample, inst.cfg).value);
  }

  SUBCASE("result bookkeeping") {
    const auto inst = random_instance(30, 5, 2, "indicator:4", 8);
    const OptimizationResult r = minimize(inst.sample, inst.cfg, small_config(2, 4), 2);
    REQUIRE(r.attempt_values.size() == 4);
    CHECK(r.value == *std::min_element(r.attempt_values.begin(), r.attempt_values.end()));
    CHECK(r.value == r.attempt_values[static_cast<std::size_t>(r.best_attempt)]);
    CHECK(r.value == doctest::Approx(objective_ensemble(r.v, inst.sample, inst.cfg).value)
                         .epsilon(1e-12));
    CHECK(r.v.orthonormality_defect() <= 1e-10);
  }

  SUBCASE("deterministic under a fixed seed and thread count independent") {
    const auto inst = random_instance(30, 5, 3, "boxcox:4", 4);
    OptimizerConfig opt = small_config(31, 4);
    const OptimizationResult a = minimize(inst.sample, inst.cfg, opt, 3);
    const OptimizationResult b = minimize(inst.sample, inst.cfg, opt, 3);
    opt.threads = 3;
    const OptimizationResult c = minimize(inst.sample, inst.cfg, opt, 3);
    CHECK(a.attempt_values == b.attempt_values);
    CHECK(a.attempt_values == c.attempt_values);
    CHECK(a.v.matrix() == c.v.matrix());
  }

  SUBCASE("more attempts never hurt") {
    const auto inst = random_instance(30, 6, 4, "fourier:4", 17);
    const OptimizationResult few = minimize(inst.sample, inst.cfg, small_config(6, 2), 4);
    const OptimizationResult many = minimize(inst.sample, inst.cfg, small_config(6, 6), 4);
    CHECK(many.value <= few.value);
  }

  SUBCASE("weighted objective") {
    const auto inst = random_instance(30, 5, 3, "indicator:4", 5, Weighting::weighted);
    const OptimizationResult r = minimize(inst.sample, inst.cfg, small_config(3), 3);
    CHECK(r.value <= objective_ensemble(inst.v, inst.sample, inst.cfg).value);
  }

  SUBCASE("dimension checks") {
    const auto inst = random_instance(20, 4, 2, "fourier:4", 1);
    CHECK_THROWS_AS(minimize(inst.sample, inst.cfg, OptimizerConfig{}, 0), InvalidDimension);
    CHECK_THROWS_AS(minimize(inst.sample, inst.cfg, OptimizerConfig{}, 4), InvalidDimension);
  }
}
