#include "ecve/estimator.hpp"

#include "ecve/errors.hpp"

#include <cmath>

namespace ecve {

StandardizationParams StandardizationParams::fit(const Matrix &x) {
  const Index n = x.rows();
  if (n < 2)
    throw DegenerateData("standardization: need at least 2 observations");
  StandardizationParams params;
  params.means = x.colwise().mean().transpose();
  params.sds.resize(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double var =
        (x.col(j).array() - params.means(j)).square().sum() / static_cast<double>(n);
    if (!(var > 0.0))
      throw DegenerateData("predictor column " + std::to_string(j + 1) +
                           " is constant");
    params.sds(j) = std::sqrt(var);
  }
  return params;
}

Matrix StandardizationParams::apply(const Matrix &x) const {
  if (x.cols() != means.size())
    throw InvalidDimension("standardization: column count mismatch");
  return (x.rowwise() - means.transpose()).array().rowwise() /
         sds.transpose().array();
}

EcveFit fit(const Matrix &x, const Vector &y, Index k, const EnsembleSpec &ensemble,
            Weighting weighting, const OptimizerConfig &opt) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (k < 1 || k >= p)
    throw InvalidDimension("fit: need 1 <= k < p, got k=" + std::to_string(k) +
                           " p=" + std::to_string(p));
  if (y.size() != n)
    throw InvalidDimension("fit: X and Y have different numbers of rows");
  opt.validate();

  std::vector<std::string> warnings;
  if (n <= p)
    warnings.push_back("n = " + std::to_string(n) + " does not exceed p = " +
                       std::to_string(p) + "; the estimate may be unreliable");

  StandardizationParams standardization = StandardizationParams::fit(x);
  Matrix z = standardization.apply(x);
  const Index q = p - k;

  TransformedResponse response = transform_response(ensemble, y);
  const int m = response.ensemble.m();
  const Sample sample(std::move(z), y, std::move(response.fy));
  const ObjectiveConfig cfg{bandwidth_rule(sample.x(), q), weighting, KernelSpec{}};

  OptimizationResult best = minimize(sample, cfg, opt, q);

  const StiefelPoint complement = complement_basis(best.v);
  Matrix original = complement.matrix().array().colwise() /
                    standardization.sds.array();

  EcveFit result{p,
                 k,
                 q,
                 orthonormalize(original).matrix(),
                 complement.matrix(),
                 std::move(best.v),
                 best.value,
                 best.converged,
                 std::move(best.attempt_values),
                 FitConfig{ensemble, m, weighting, cfg.kernel.name(), cfg.h.value(), opt, n},
                 std::move(standardization),
                 opt.seed,
                 std::move(warnings),
                 {},
                 {}};
  return result;
}

EcveFit fit_cve(const Matrix &x, const Vector &y, Index k, const OptimizerConfig &opt) {
  return fit(x, y, k, EnsembleSpec{EnsembleKind::identity, std::nullopt},
             Weighting::uniform, opt);
}

Matrix reduce(const EcveFit &fit, const Matrix &x_new) {
  if (x_new.cols() != fit.b_hat.rows())
    throw InvalidDimension("reduce: expected " + std::to_string(fit.b_hat.rows()) +
                           " columns, got " + std::to_string(x_new.cols()));
  return x_new * fit.b_hat;
}

} // namespace ecve
