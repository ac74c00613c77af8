#include "ecve/kernel.hpp"

#include "ecve/errors.hpp"

#include <cmath>

namespace ecve {

Bandwidth::Bandwidth(double h) : h_(h) {
  if (!std::isfinite(h) || h <= 0.0)
    throw InvalidConfig("bandwidth must be finite and positive, got " +
                        std::to_string(h));
}

double kernel_eval(const KernelSpec &spec, double z) {
  if (!(z >= 0.0))
    throw ContractViolation("kernel_eval: argument must be nonnegative");
  switch (spec.kind) {
  case KernelKind::gaussian:
    return std::exp(-z * z);
  }
  throw UnsupportedKernel("kernel_eval: unknown kernel");
}

Bandwidth bandwidth_rule(const Matrix &x, Index q) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (n < 2)
    throw DegenerateData("bandwidth_rule: need at least 2 observations");
  if (q < 1 || q >= p)
    throw InvalidDimension("bandwidth_rule: need 1 <= q < p");

  const Eigen::RowVectorXd mean = x.colwise().mean();
  const double trace =
      (x.rowwise() - mean).squaredNorm() / static_cast<double>(n);
  if (!(trace > 0.0))
    throw DegenerateData("bandwidth_rule: predictors have zero total variance");

  const double dn = static_cast<double>(n);
  const double exponent = -1.0 / static_cast<double>(4 + p - q);
  const double width = std::pow(dn, exponent);
  return Bandwidth(1.2 * 1.2 * (2.0 * trace / static_cast<double>(p)) *
                   width * width);
}

} // namespace ecve
