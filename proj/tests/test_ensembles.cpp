#include "doctest.h"

#include "ecve/ensembles.hpp"
#include "ecve/errors.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace ecve;

TEST_CASE("default_m") {
  CHECK(default_m(300) == 6); // ceil(5.704) = 6
  CHECK(default_m(100) == 6); // ceil(4.605) = 5 -> 6
  CHECK(default_m(400) == 6);
  CHECK(default_m(2) == 2);
  int prev = default_m(2);
  for (Index n = 2; n < 5000; n += 7) {
    const int m = default_m(n);
    CHECK(m % 2 == 0);
    CHECK(m >= prev);
    prev = m;
  }
  CHECK_THROWS_AS(default_m(1), DegenerateData);
}

TEST_CASE("EnsembleSpec grammar") {
  CHECK(EnsembleSpec::parse("identity").kind == EnsembleKind::identity);
  const auto fourier = EnsembleSpec::parse("fourier:4");
  CHECK(fourier.kind == EnsembleKind::fourier);
  CHECK(fourier.m == 4);
  const auto automatic = EnsembleSpec::parse("indicator:auto");
  CHECK_FALSE(automatic.m.has_value());
  CHECK(automatic.resolve_m(100) == 6);
  CHECK(EnsembleSpec::parse("boxcox") == EnsembleSpec::parse("boxcox:auto"));
  CHECK(EnsembleSpec::parse("monomial:3").to_string() == "monomial:3");
  CHECK(EnsembleSpec::parse(fourier.to_string()) == fourier);

  CHECK_THROWS_AS(EnsembleSpec::parse("wavelet:4"), InvalidConfig);
  CHECK_THROWS_AS(EnsembleSpec::parse("fourier:0"), InvalidConfig);
  CHECK_THROWS_AS(EnsembleSpec::parse("fourier:x"), InvalidConfig);
  CHECK_THROWS_AS(EnsembleSpec::parse("identity:3"), InvalidConfig);
}

TEST_CASE("empirical_quantile uses linear interpolation") {
  Vector y(3);
  y << 3, 1, 2;
  CHECK(empirical_quantile(y, 0.5) == 2.0);
  CHECK(empirical_quantile(y, 0.25) == 1.5);
  CHECK(empirical_quantile(y, 0.0) == 1.0);
  CHECK(empirical_quantile(y, 1.0) == 3.0);
}

TEST_CASE("indicator ensemble") {
  Vector y(3);
  y << 1, 2, 3;
  const Ensemble e = build_ensemble(EnsembleKind::indicator, 1, y);
  REQUIRE(e.thresholds().size() == 1);
  CHECK(e.thresholds()[0] == 2.0);
  const Matrix fy = apply_ensemble(e, fit_scaler(e, y), y);
  CHECK(fy(0, 0) == 0.0);
  CHECK(fy(1, 0) == 1.0);
  CHECK(fy(2, 0) == 1.0);

  SUBCASE("columns are monotone in Y and thresholds increase") {
    Rng rng(5);
    const Vector z = ecve::test::gaussian_vector(200, rng);
    const Ensemble big = build_ensemble(EnsembleKind::indicator, 8, z);
    CHECK(big.m() == 8);
    for (std::size_t j = 1; j < big.thresholds().size(); ++j)
      CHECK(big.thresholds()[j] > big.thresholds()[j - 1]);
    const Matrix f = apply_ensemble(big, fit_scaler(big, z), z);
    std::vector<Index> order(200);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return z(a) < z(b); });
    for (Index j = 0; j < f.cols(); ++j)
      for (std::size_t r = 1; r < order.size(); ++r)
        CHECK(f(order[r], j) >= f(order[r - 1], j));
  }

  SUBCASE("tied quantiles are merged") {
    Vector ties = Vector::Zero(20);
    ties.tail(2).setConstant(1.0);
    const Ensemble e2 = build_ensemble(EnsembleKind::indicator, 4, ties);
    CHECK(e2.m() == 1);
  }
}

TEST_CASE("fourier ensemble") {
  Rng rng(6);
  const Vector y = 5.0 * ecve::test::gaussian_vector(50, rng).array() + 3.0;
  const Ensemble e = build_ensemble(EnsembleKind::fourier, 4, y);
  const ResponseScaler scaler = fit_scaler(e, y);
  const Matrix fy = apply_ensemble(e, scaler, y);
  CHECK(fy.cols() == 4);
  CHECK(fy.cwiseAbs().maxCoeff() <= 1.0);
  // median / normal-consistent MAD, computed here by sorting
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end());
  const double med = 0.5 * (sorted[24] + sorted[25]);
  std::vector<double> dev;
  for (double v : sorted)
    dev.push_back(std::abs(v - med));
  std::sort(dev.begin(), dev.end());
  const double mad = 1.4826 * 0.5 * (dev[24] + dev[25]);
  CHECK(scaler.center == doctest::Approx(med));
  CHECK(scaler.scale == doctest::Approx(mad).epsilon(1e-4));
  const double z0 = (y(0) - med) / scaler.scale;
  CHECK(fy(0, 0) == doctest::Approx(std::sin(z0)));
  CHECK(fy(0, 1) == doctest::Approx(std::sin(2 * z0)));
  CHECK(fy(0, 2) == doctest::Approx(std::cos(z0)));
  CHECK(fy(0, 3) == doctest::Approx(std::cos(2 * z0)));
  CHECK_THROWS_AS(build_ensemble(EnsembleKind::fourier, 3, y), InvalidConfig);
}

TEST_CASE("fourier scaling ignores outliers") {
  Vector y(9);
  y << -2, -1, -0.5, 0, 0.5, 1, 2, 3, 1e6;
  const Ensemble e = build_ensemble(EnsembleKind::fourier, 2, y);
  const ResponseScaler scaler = fit_scaler(e, y);
  CHECK(scaler.center == 0.5);
  // |y - 0.5| sorted: 0, 0.5, 0.5, 1, 1.5, 1.5, 2.5, 2.5, ... -> median 1.5
  CHECK(scaler.scale == doctest::Approx(1.4826 * 1.5).epsilon(1e-4));

  Vector flat(4);
  flat << 1, 1, 1, 5;
  const ResponseScaler fallback = fit_scaler(e, flat);
  CHECK(fallback.scale == doctest::Approx(2.0)); // MAD is 0, sample sd is 2
}

TEST_CASE("monomial ensemble on standardized responses") {
  Vector y(3);
  y << -1, 0, 1;
  const Ensemble e = build_ensemble(EnsembleKind::monomial, 2, y);
  const ResponseScaler scaler = fit_scaler(e, y);
  CHECK(scaler.center == 0.0);
  CHECK(scaler.scale == doctest::Approx(1.0)); // sample sd of (-1, 0, 1)
  const Matrix fy = apply_ensemble(e, scaler, y);
  CHECK(fy(0, 1) == doctest::Approx(1.0));
  CHECK(fy(1, 1) == 0.0);
  CHECK(fy(2, 1) == doctest::Approx(1.0));
}

TEST_CASE("boxcox ensemble") {
  Vector y(5);
  y << -3, -1, 0, 2, 7;
  const Ensemble e = build_ensemble(EnsembleKind::boxcox, 4, y);
  REQUIRE(e.boxcox_exponents().size() == 3);
  CHECK(e.boxcox_exponents()[0] == doctest::Approx(0.1));
  CHECK(e.boxcox_exponents()[1] == doctest::Approx(0.7666666667));
  CHECK(e.boxcox_exponents()[2] == doctest::Approx(1.4333333333));

  const ResponseScaler scaler = fit_scaler(e, y);
  REQUIRE(scaler.shift_to_positive.has_value());
  const double range = (7.0 - -3.0) / scaler.scale;
  CHECK(scaler(-3.0) == doctest::Approx(0.1 * range));

  const Matrix fy = apply_ensemble(e, scaler, y);
  CHECK(fy.cols() == 4);
  CHECK(fy.allFinite());
  const double z = scaler(7.0);
  CHECK(fy(4, 0) == doctest::Approx((std::pow(z, 0.1) - 1.0) / 0.1));
  CHECK(fy(4, 3) == doctest::Approx(std::log(z)));

  Vector outside(1);
  outside << -100.0;
  CHECK_THROWS_AS(apply_ensemble(e, scaler, outside), DomainError);
  CHECK_THROWS_AS(build_ensemble(EnsembleKind::boxcox, 1, y), InvalidConfig);
}

TEST_CASE("identity ensemble leaves Y untouched") {
  Rng rng(10);
  const Vector y = ecve::test::gaussian_vector(30, rng);
  const TransformedResponse t = transform_response(EnsembleSpec::parse("identity"), y);
  CHECK(t.fy.cols() == 1);
  CHECK(t.fy.col(0) == y);
}
