#include "ecve/stiefel.hpp"

#include "ecve/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ecve {

namespace {

// Relative size of a diagonal entry of R below which M is treated as rank deficient.
constexpr double kRankTol = 1e-10;

std::string shape(const Matrix &m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

} // namespace

StiefelPoint::StiefelPoint(Matrix values) : values_(std::move(values)) {
  if (values_.cols() < 1 || values_.cols() > values_.rows())
    throw InvalidDimension("StiefelPoint: need 1 <= q <= p, got " +
                           shape(values_));
  if (orthonormality_defect() > kOrthonormalTol)
    throw ContractViolation("StiefelPoint: columns are not orthonormal");
}

double StiefelPoint::orthonormality_defect() const {
  const Index q = values_.cols();
  return (values_.transpose() * values_ - Matrix::Identity(q, q)).norm();
}

SubspaceProjector::SubspaceProjector(const StiefelPoint &basis)
    : values_(basis.projector()), rank_(basis.q()) {}

SubspaceProjector SubspaceProjector::of(const Matrix &m) {
  return SubspaceProjector(orthonormalize(m));
}

StiefelPoint random_stiefel(Index p, Index q, Rng &rng) {
  if (q < 1 || q > p)
    throw InvalidDimension("random_stiefel: need 1 <= q <= p, got p=" +
                           std::to_string(p) + " q=" + std::to_string(q));
  std::normal_distribution<double> normal;
  Matrix m(p, q);
  for (Index j = 0; j < q; ++j)
    for (Index i = 0; i < p; ++i)
      m(i, j) = normal(rng);
  return orthonormalize(m);
}

StiefelPoint orthonormalize(const Matrix &m) {
  const Index p = m.rows();
  const Index q = m.cols();
  if (q < 1 || q > p)
    throw InvalidDimension("orthonormalize: need 1 <= q <= p, got " + shape(m));
  if (!m.allFinite())
    throw DegenerateBasis("orthonormalize: non-finite entries");

  Eigen::HouseholderQR<Matrix> qr(m);
  const Matrix &packed = qr.matrixQR();
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  Matrix basis = qr.householderQ() * Matrix::Identity(p, q);
  for (Index j = 0; j < q; ++j) {
    const double r = packed(j, j);
    if (!(std::abs(r) > kRankTol * scale))
      throw DegenerateBasis("orthonormalize: matrix is rank deficient");
    if (r < 0)
      basis.col(j) = -basis.col(j);
  }
  return StiefelPoint(std::move(basis));
}

StiefelPoint complement_basis(const StiefelPoint &v) {
  const Index p = v.p();
  const Index q = v.q();
  if (q >= p)
    throw EmptyComplement("complement_basis: q = p leaves no complement");
  Eigen::HouseholderQR<Matrix> qr(v.matrix());
  Matrix full = qr.householderQ();
  Matrix u = full.rightCols(p - q);
  // Q's trailing columns are orthogonal to span(V) by construction; one
  // projection sweep removes the residual rounding.
  u -= v.matrix() * (v.matrix().transpose() * u);
  return orthonormalize(u);
}

TangentVector tangent_project(const StiefelPoint &v, const Matrix &g) {
  if (g.rows() != v.p() || g.cols() != v.q())
    throw InvalidDimension("tangent_project: G is " + shape(g) +
                           ", base is " + shape(v.matrix()));
  const Matrix vtg = v.matrix().transpose() * g;
  Matrix xi = g - v.matrix() * (0.5 * (vtg + vtg.transpose()));
  return TangentVector(std::move(xi), v);
}

StiefelPoint retract(const StiefelPoint &v, const TangentVector &xi,
                     double step) {
  if (xi.matrix().rows() != v.p() || xi.matrix().cols() != v.q())
    throw InvalidDimension("retract: tangent shape does not match base");
  if ((xi.base().matrix() - v.matrix()).norm() > 1e-12)
    throw ContractViolation("retract: tangent vector is based at another point");
  if (step == 0.0)
    return v;
  return orthonormalize(v.matrix() + step * xi.matrix());
}

double subspace_error(const Matrix &b, const Matrix &b_hat) {
  if (b.rows() != b_hat.rows() || b.cols() != b_hat.cols())
    throw InvalidDimension("subspace_error: shapes " + shape(b) + " and " +
                           shape(b_hat) + " differ");
  const SubspaceProjector pb = SubspaceProjector::of(b);
  const SubspaceProjector pbh = SubspaceProjector::of(b_hat);
  const double k = static_cast<double>(b.cols());
  const double err = (pb.matrix() - pbh.matrix()).norm() / std::sqrt(2.0 * k);
  return std::clamp(err, 0.0, 1.0);
}

} // namespace ecve
