#include "doctest.h"

#include "ecve/errors.hpp"
#include "ecve/estimator.hpp"
#include "ecve/fit_io.hpp"
#include "ecve/simulation.hpp"
#include "test_support.hpp"

#include <Eigen/QR>

#include <cmath>
#include <filesystem>
#include <numeric>

using namespace ecve;
using ecve::test::gaussian_matrix;

namespace {

OptimizerConfig quick(std::uint64_t seed) {
  OptimizerConfig opt;
  opt.attempts = 4;
  opt.seed = seed;
  return opt;
}

struct Linear {
  Matrix x;
  Vector y;
  Vector b;
};

Linear noiseless_linear(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  Linear d;
  d.x = gaussian_matrix(n, p, rng);
  d.b = Vector::Zero(p);
  d.b(0) = 1.0;
  d.b(1) = -0.5;
  d.b.normalize();
  d.y = d.x * d.b;
  return d;
}

} // namespace

TEST_CASE("StandardizationParams") {
  Matrix x(4, 2);
  x << 1, 10, 2, 20, 3, 30, 4, 40;
  const StandardizationParams s = StandardizationParams::fit(x);
  CHECK(s.means(0) == doctest::Approx(2.5));
  CHECK(s.sds(0) == doctest::Approx(std::sqrt(1.25))); // 1/n normalization
  const Matrix z = s.apply(x);
  CHECK(z.colwise().mean().norm() <= 1e-14);
  CHECK((z.transpose() * z / 4.0).trace() == doctest::Approx(2.0));

  Matrix constant = x;
  constant.col(1).setConstant(3.0);
  CHECK_THROWS_AS(StandardizationParams::fit(constant), DegenerateData);
  CHECK_THROWS_AS(s.apply(Matrix::Zero(2, 3)), InvalidDimension);
}

TEST_CASE("fit recovers a noiseless linear reduction") {
  const Linear d = noiseless_linear(200, 5, 1);
  const EcveFit f = fit(d.x, d.y, 1, EnsembleSpec::parse("identity"), Weighting::uniform,
                        quick(3));
  CHECK(f.p == 5);
  CHECK(f.k == 1);
  CHECK(f.q == 4);
  CHECK(f.b_hat.rows() == 5);
  CHECK(f.b_hat.cols() == 1);
  CHECK(subspace_error(d.b, f.b_hat) < 0.1);
  CHECK((f.b_hat.transpose() * f.b_hat - Matrix::Identity(1, 1)).norm() <= 1e-10);
  CHECK(f.config.bandwidth == doctest::Approx(1.44 * 2.0 * std::pow(200.0, -2.0 / 5.0)));
  CHECK(f.warnings.empty());
}

TEST_CASE("fit structure") {
  const Linear d = noiseless_linear(60, 6, 2);
  Vector y = d.y;
  for (Index i = 0; i < y.size(); ++i)
    y(i) += 0.3 * std::sin(3.0 * d.x(i, 2));
  const EcveFit f =
      fit(d.x, y, 2, EnsembleSpec::parse("fourier:4"), Weighting::weighted, quick(5));

  SUBCASE("B_hat and V_hat are complements in standardized coordinates") {
    const Matrix sum = f.v_hat.projector() +
                       f.b_hat_standardized * f.b_hat_standardized.transpose();
    CHECK((sum - Matrix::Identity(6, 6)).norm() <= 1e-8);
  }
  SUBCASE("original-coordinate basis is the rescaled standardized basis") {
    const Matrix rescaled =
        f.b_hat_standardized.array().colwise() / f.standardization.sds.array();
    CHECK(subspace_error(rescaled, f.b_hat) <= 1e-10);
  }
  SUBCASE("basis freedom") {
    Matrix mix(2, 2);
    mix << 2.0, 1.0, -0.5, 3.0;
    CHECK(subspace_error(f.b_hat, f.b_hat * mix) <= 1e-10);
  }
  SUBCASE("provenance") {
    CHECK(f.config.m == 4);
    CHECK(f.config.weighting == Weighting::weighted);
    CHECK(f.attempt_values.size() == 4);
    CHECK(f.objective_value ==
          *std::min_element(f.attempt_values.begin(), f.attempt_values.end()));
  }
}

TEST_CASE("fit is deterministic and fit_cve is the identity special case") {
  const Linear d = noiseless_linear(50, 4, 3);
  const EcveFit a = fit_cve(d.x, d.y, 1, quick(11));
  const EcveFit b = fit(d.x, d.y, 1, EnsembleSpec::parse("identity"), Weighting::uniform,
                        quick(11));
  CHECK(a.b_hat == b.b_hat);
  CHECK(a.objective_value == b.objective_value);
  CHECK(a.attempt_values == b.attempt_values);
}

TEST_CASE("fit is equivariant under column scaling and permutation") {
  ModelSpec model = ModelSpec::make(ModelId::M1, 5);
  const PredictorDist dist = PredictorDist::make(DistId::I, 5);
  const GeneratedData d = generate(model, dist, 120, 42);
  OptimizerConfig opt = quick(8);
  const EcveFit base = fit(d.x, d.y, 1, EnsembleSpec::parse("fourier"), Weighting::uniform, opt);

  SUBCASE("scaling a column by c > 0") {
    Matrix scaled = d.x;
    scaled.col(2) *= 7.5;
    const EcveFit f = fit(scaled, d.y, 1, EnsembleSpec::parse("fourier"), Weighting::uniform, opt);
    CHECK(std::abs(f.objective_value - base.objective_value) <= 1e-8);
    Matrix b = f.b_hat;
    b.row(2) *= 7.5; // back to the unscaled coordinates
    CHECK(subspace_error(b, base.b_hat) <= 1e-6);
  }

  SUBCASE("permuting columns permutes rows") {
    // a tight tolerance drives every attempt close to the same minimizer
    opt.tol_rel = 1e-12;
    opt.max_iter = 3000;
    const EcveFit ref = fit(d.x, d.y, 1, EnsembleSpec::parse("fourier"), Weighting::uniform, opt);
    const std::vector<Index> perm = {3, 0, 4, 1, 2};
    Matrix permuted(d.x.rows(), 5);
    for (Index j = 0; j < 5; ++j)
      permuted.col(j) = d.x.col(perm[static_cast<std::size_t>(j)]);
    const EcveFit f =
        fit(permuted, d.y, 1, EnsembleSpec::parse("fourier"), Weighting::uniform, opt);
    Matrix unpermuted(5, 1);
    for (Index j = 0; j < 5; ++j)
      unpermuted.row(perm[static_cast<std::size_t>(j)]) = f.b_hat.row(j);
    const Matrix pa = unpermuted * unpermuted.transpose();
    const Matrix pb = ref.b_hat * ref.b_hat.transpose();
    CHECK((pa - pb).norm() <= 1e-5);
    CHECK(std::abs(f.objective_value - ref.objective_value) <= 1e-10);
  }
}

TEST_CASE("fit preconditions") {
  const Linear d = noiseless_linear(30, 4, 4);
  CHECK_THROWS_AS(fit_cve(d.x, d.y, 4, quick(0)), InvalidDimension);
  CHECK_THROWS_AS(fit_cve(d.x, d.y, 0, quick(0)), InvalidDimension);
  Matrix constant = d.x;
  constant.col(3).setZero();
  CHECK_THROWS_AS(fit_cve(constant, d.y, 1, quick(0)), DegenerateData);
  CHECK_THROWS_AS(fit_cve(d.x, Vector(d.y.head(10)), 1, quick(0)), InvalidDimension);

  const Linear small = noiseless_linear(4, 5, 5);
  const EcveFit f = fit_cve(small.x, small.y, 1, quick(0));
  CHECK_FALSE(f.warnings.empty());
}

TEST_CASE("reduce") {
  const Linear d = noiseless_linear(40, 4, 6);
  EcveFit f = fit_cve(d.x, d.y, 2, quick(1));

  const Matrix r = reduce(f, d.x);
  CHECK(r.rows() == 40);
  CHECK(r.cols() == 2);
  CHECK((r - d.x * f.b_hat).norm() == 0.0);
  CHECK(Eigen::ColPivHouseholderQR<Matrix>(r).rank() == 2);
  CHECK_THROWS_AS(reduce(f, Matrix::Zero(3, 5)), InvalidDimension);

  f.b_hat = Matrix::Identity(4, 2);
  CHECK(reduce(f, d.x) == d.x.leftCols(2));
}

TEST_CASE("fit JSON round trip is lossless") {
  const Linear d = noiseless_linear(40, 5, 7);
  EcveFit f = fit(d.x, d.y, 2, EnsembleSpec::parse("indicator"), Weighting::weighted, quick(99));
  f.predictor_names = {"a", "b", "c", "d", "e"};
  f.response_name = "y";
  const std::string text = fit_to_json(f);
  const EcveFit g = fit_from_json(text);
  CHECK(g.b_hat == f.b_hat);
  CHECK(g.b_hat_standardized == f.b_hat_standardized);
  CHECK(g.v_hat.matrix() == f.v_hat.matrix());
  CHECK(g.objective_value == f.objective_value);
  CHECK(g.standardization.means == f.standardization.means);
  CHECK(g.standardization.sds == f.standardization.sds);
  CHECK(g.config.bandwidth == f.config.bandwidth);
  CHECK(g.config.ensemble == f.config.ensemble);
  CHECK(g.config.weighting == Weighting::weighted);
  CHECK(g.config.optimizer.seed == 99);
  CHECK(g.seed == f.seed);
  CHECK(g.predictor_names == f.predictor_names);
  CHECK(fit_to_json(g) == text);

  const auto path = std::filesystem::temp_directory_path() / "ecve_roundtrip.json";
  save_fit(path.string(), f);
  CHECK(load_fit(path.string()).b_hat == f.b_hat);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(fit_from_json("{"), ParseError);
  CHECK_THROWS_AS(fit_from_json("{\"p\": 3}"), ParseError);
}
