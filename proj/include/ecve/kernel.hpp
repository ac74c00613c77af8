#pragma once

#include "ecve/types.hpp"

#include <string>

namespace ecve {

enum class KernelKind { gaussian };

/// Smoothing kernel K: [0, inf) -> [0, 1], nonincreasing, K(0) = 1.
struct KernelSpec {
  KernelKind kind = KernelKind::gaussian;

  std::string name() const { return "gaussian"; }
};

/// Squared slice width h > 0, in squared-distance units of the predictors.
class Bandwidth {
public:
  /// Throws InvalidConfig unless h is finite and positive.
  explicit Bandwidth(double h);
  double value() const noexcept { return h_; }

private:
  double h_;
};

/// K(z); throws ContractViolation for z < 0 or NaN.
double kernel_eval(const KernelSpec &spec, double z);

/// h = 1.2^2 * (2 tr(Sigma_x) / p) * n^(-2 / (4 + p - q)), with Sigma_x the
/// 1/n-normalized sample covariance of X.
Bandwidth bandwidth_rule(const Matrix &x, Index q);

} // namespace ecve
