#pragma once

#include "ecve/random.hpp"
#include "ecve/types.hpp"

namespace ecve {

/// Tolerance on ||V^T V - I||_F accepted for a Stiefel point.
inline constexpr double kOrthonormalTol = 1e-10;

/// A p x q matrix with orthonormal columns, an element of the Stiefel
/// manifold S(p, q). Immutable once constructed.
class StiefelPoint {
public:
  /// Wraps `values` after checking orthonormality; throws ContractViolation
  /// if ||V^T V - I||_F exceeds kOrthonormalTol.
  explicit StiefelPoint(Matrix values);

  const Matrix &matrix() const noexcept { return values_; }
  Index p() const noexcept { return values_.rows(); }
  Index q() const noexcept { return values_.cols(); }

  /// V V^T.
  Matrix projector() const { return values_ * values_.transpose(); }

  /// ||V^T V - I||_F.
  double orthonormality_defect() const;

private:
  Matrix values_;
};

/// Orthogonal projector onto the column space of a full-rank matrix.
class SubspaceProjector {
public:
  explicit SubspaceProjector(const StiefelPoint &basis);
  /// Projector onto span(M); throws DegenerateBasis if M is rank deficient.
  static SubspaceProjector of(const Matrix &m);

  const Matrix &matrix() const noexcept { return values_; }
  Index rank() const noexcept { return rank_; }

private:
  Matrix values_;
  Index rank_;
};

/// A direction in the tangent space of the Stiefel manifold at `base`.
class TangentVector {
public:
  const Matrix &matrix() const noexcept { return values_; }
  const StiefelPoint &base() const noexcept { return base_; }
  double norm() const { return values_.norm(); }

private:
  TangentVector(Matrix values, StiefelPoint base)
      : values_(std::move(values)), base_(std::move(base)) {}
  friend TangentVector tangent_project(const StiefelPoint &, const Matrix &);

  Matrix values_;
  StiefelPoint base_;
};

/// Uniformly distributed (orthogonally invariant) Stiefel point: the
/// orthonormalized p x q standard normal matrix.
StiefelPoint random_stiefel(Index p, Index q, Rng &rng);

/// Orthonormal basis of span(M) via Householder QR with the diagonal of R
/// forced positive. Throws DegenerateBasis if M is numerically rank deficient.
StiefelPoint orthonormalize(const Matrix &m);

/// Orthonormal basis U (p x (p-q)) of span(V)^perp.
StiefelPoint complement_basis(const StiefelPoint &v);

/// G - V sym(V^T G).
TangentVector tangent_project(const StiefelPoint &v, const Matrix &g);

/// QR retraction: orthonormalize(V + step * xi).
StiefelPoint retract(const StiefelPoint &v, const TangentVector &xi,
                     double step);

/// ||P_B - P_Bhat||_F / sqrt(2k), in [0, 1].
double subspace_error(const Matrix &b, const Matrix &b_hat);

} // namespace ecve
