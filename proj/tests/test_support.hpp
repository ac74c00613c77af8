#pragma once

#include "ecve/random.hpp"
#include "ecve/stiefel.hpp"
#include "ecve/types.hpp"

#include <random>

namespace ecve::test {

inline Matrix gaussian_matrix(Index rows, Index cols, Rng &rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      m(i, j) = normal(rng);
  return m;
}

inline Vector gaussian_vector(Index n, Rng &rng) {
  return gaussian_matrix(n, 1, rng).col(0);
}

/// Random q x q orthogonal matrix.
inline Matrix random_orthogonal(Index q, Rng &rng) {
  return random_stiefel(q, q, rng).matrix();
}

/// Classical Gram-Schmidt, used as an independent orthonormalization oracle.
inline Matrix gram_schmidt(const Matrix &m) {
  Matrix q = m;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index k = 0; k < j; ++k)
      q.col(j) -= q.col(k).dot(m.col(j)) * q.col(k);
    q.col(j).normalize();
  }
  return q;
}

inline Vector unit(Index p, Index i) {
  Vector e = Vector::Zero(p);
  e(i) = 1.0;
  return e;
}

inline double relative_error(const Matrix &a, const Matrix &b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

} // namespace ecve::test

#include "ecve/ensembles.hpp"
#include "ecve/kernel.hpp"
#include "ecve/objective.hpp"

#include <array>
#include <cmath>
#include <string>

namespace ecve::test {

/// Smooth random regression instance with a two-index link and noise.
struct Instance {
  Sample sample;
  ObjectiveConfig cfg;
  StiefelPoint v;
};

inline Instance random_instance(Index n, Index p, Index q, const std::string &ensemble,
                                std::uint64_t seed,
                                Weighting weighting = Weighting::uniform) {
  Rng rng(derive_seed(seed, 99));
  Matrix x = gaussian_matrix(n, p, rng);
  const Vector noise = gaussian_vector(n, rng);
  Vector y(n);
  for (Index i = 0; i < n; ++i)
    y(i) = std::sin(x(i, 0)) + 0.5 * x(i, 1) * x(i, 1) + 0.3 * noise(i);
  Sample sample = Sample::with_ensemble(x, y, EnsembleSpec::parse(ensemble));
  ObjectiveConfig cfg{bandwidth_rule(sample.x(), q), weighting, KernelSpec{}};
  StiefelPoint v = random_stiefel(p, q, rng);
  return {std::move(sample), cfg, std::move(v)};
}

/// Ensemble specs with m = 4 cycled through by seeded property tests.
inline std::string mixed_ensemble(int index) {
  static const std::array<std::string, 4> specs = {"fourier:4", "indicator:4",
                                                   "monomial:4", "boxcox:4"};
  return specs[static_cast<std::size_t>(index) % specs.size()];
}

} // namespace ecve::test
