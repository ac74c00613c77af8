#include "ecve/objective.hpp"

#include "ecve/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ecve {

Sample::Sample(Matrix x, Vector y, Matrix fy)
    : x_(std::move(x)), y_(std::move(y)), fy_(std::move(fy)) {
  if (x_.rows() < 2)
    throw DegenerateData("Sample: need at least 2 observations");
  if (y_.size() != x_.rows() || fy_.rows() != x_.rows())
    throw InvalidDimension("Sample: X, Y and FY must have the same number of rows");
  if (x_.cols() < 1 || fy_.cols() < 1)
    throw InvalidDimension("Sample: X and FY need at least one column");
  if (!x_.allFinite() || !y_.allFinite() || !fy_.allFinite())
    throw DegenerateData("Sample: entries must be finite");
}

Sample Sample::with_ensemble(Matrix x, Vector y, const EnsembleSpec &spec) {
  Matrix fy = transform_response(spec, y).fy;
  return Sample(std::move(x), std::move(y), std::move(fy));
}

std::string to_string(Weighting w) {
  return w == Weighting::uniform ? "uniform" : "weighted";
}

Weighting parse_weighting(const std::string &text) {
  if (text == "uniform")
    return Weighting::uniform;
  if (text == "weighted")
    return Weighting::weighted;
  throw InvalidConfig("unknown weighting '" + text +
                      "' (expected uniform or weighted)");
}

Vector distances(const StiefelPoint &v, const Vector &s0, const Matrix &x) {
  if (s0.size() != v.p() || x.cols() != v.p())
    throw InvalidDimension("distances: dimension mismatch");
  const Matrix centered = x.rowwise() - s0.transpose();
  const Vector full = centered.rowwise().squaredNorm();
  const Vector proj = (centered * v.matrix()).rowwise().squaredNorm();
  return (full - proj).cwiseMax(0.0);
}

Vector slice_weights(const StiefelPoint &v, const Vector &s0,
                     const Sample &sample, const ObjectiveConfig &cfg) {
  const double h = cfg.h.value();
  const Vector d = distances(v, s0, sample.x());
  Vector k = d.unaryExpr([&](double di) { return kernel_eval(cfg.kernel, di / h); });
  const double total = k.sum();
  if (!(total > 0.0))
    throw DegenerateData("slice_weights: all kernel values vanish");
  return k / total;
}

std::pair<double, double> slice_moments(const Vector &weights, const Vector &fy) {
  if (weights.size() != fy.size())
    throw InvalidDimension("slice_moments: length mismatch");
  return {weights.dot(fy), weights.dot(fy.cwiseProduct(fy))};
}

double local_variance(const StiefelPoint &v, const Vector &s0,
                      const Sample &sample, const ObjectiveConfig &cfg,
                      Index f_index) {
  if (f_index < 0 || f_index >= sample.m())
    throw InvalidDimension("local_variance: f_index out of range");
  const Vector w = slice_weights(v, s0, sample, cfg);
  const auto [y1, y2] = slice_moments(w, sample.fy().col(f_index));
  return y2 - y1 * y1;
}

double objective_single(const StiefelPoint &v, const Sample &sample,
                        const ObjectiveConfig &cfg, Index f_index) {
  if (f_index < 0 || f_index >= sample.m())
    throw InvalidDimension("objective_single: f_index out of range");
  return EnsembleObjective(sample, cfg).value(v.matrix()).per_function(f_index);
}

Vector between_slice_weights(const StiefelPoint &v, const Sample &sample,
                             const ObjectiveConfig &cfg) {
  const Index n = sample.n();
  if (n < 2)
    throw DegenerateData("between_slice_weights: need n >= 2");
  const double h = cfg.h.value();
  const Matrix d = EnsembleObjective(sample, cfg).slice_distances(v.matrix());
  const double k0 = kernel_eval(cfg.kernel, 0.0);
  Vector mass(n);
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index j = 0; j < n; ++j)
      s += kernel_eval(cfg.kernel, d(i, j) / h);
    mass(i) = s - k0;
  }
  const double total = mass.sum();
  if (!(total > 0.0))
    throw DegenerateData("between_slice_weights: no slice contains another point");
  return mass / total;
}

ObjectiveValue objective_ensemble(const StiefelPoint &v, const Sample &sample,
                                  const ObjectiveConfig &cfg) {
  return EnsembleObjective(sample, cfg).value(v.matrix());
}

Matrix gradient_ensemble(const StiefelPoint &v, const Sample &sample,
                         const ObjectiveConfig &cfg) {
  return EnsembleObjective(sample, cfg).value_and_gradient(v.matrix()).second;
}

Matrix gradient_fd(const StiefelPoint &v, const Sample &sample,
                   const ObjectiveConfig &cfg, double eps) {
  if (!(eps > 0.0))
    throw InvalidConfig("gradient_fd: eps must be positive");
  const EnsembleObjective objective(sample, cfg);
  Matrix grad(v.p(), v.q());
  Matrix probe = v.matrix();
  for (Index j = 0; j < v.q(); ++j) {
    for (Index i = 0; i < v.p(); ++i) {
      const double orig = probe(i, j);
      probe(i, j) = orig + eps;
      const double up = objective.value(probe).value;
      probe(i, j) = orig - eps;
      const double down = objective.value(probe).value;
      probe(i, j) = orig;
      grad(i, j) = (up - down) / (2.0 * eps);
    }
  }
  return grad;
}

EnsembleObjective::EnsembleObjective(const Sample &sample, ObjectiveConfig cfg)
    : sample_(sample), cfg_(cfg) {
  const Matrix &x = sample_.x();
  const Index n = x.rows();
  pair_sq_.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    pair_sq_(j, j) = 0.0;
    for (Index i = j + 1; i < n; ++i) {
      const double d = (x.row(i) - x.row(j)).squaredNorm();
      pair_sq_(i, j) = d;
      pair_sq_(j, i) = d;
    }
  }
}

Matrix EnsembleObjective::slice_distances(const Matrix &v) const {
  const Matrix &x = sample_.x();
  if (v.rows() != x.cols() || v.cols() < 1)
    throw InvalidDimension("EnsembleObjective: V has the wrong number of rows");
  const Index n = x.rows();
  const Matrix xv = x * v;
  Matrix d(n, n);
  for (Index j = 0; j < n; ++j) {
    d(j, j) = 0.0;
    for (Index i = j + 1; i < n; ++i) {
      const double value =
          std::max(pair_sq_(i, j) - (xv.row(i) - xv.row(j)).squaredNorm(), 0.0);
      d(i, j) = value;
      d(j, i) = value;
    }
  }
  return d;
}

ObjectiveValue EnsembleObjective::value(const Matrix &v) const {
  return evaluate(v, false).first;
}

std::pair<ObjectiveValue, Matrix>
EnsembleObjective::value_and_gradient(const Matrix &v) const {
  if (cfg_.kernel.kind != KernelKind::gaussian)
    throw UnsupportedKernel("analytic gradient requires the Gaussian kernel");
  auto [value, grad] = evaluate(v, true);
  return {std::move(value), std::move(*grad)};
}

std::pair<ObjectiveValue, std::optional<Matrix>>
EnsembleObjective::evaluate(const Matrix &v, bool with_gradient) const {
  const Matrix &x = sample_.x();
  const Matrix &fy = sample_.fy();
  const Index n = x.rows();
  const Index m = fy.cols();
  const double h = cfg_.h.value();
  const double k0 = kernel_eval(cfg_.kernel, 0.0);

  // Row i is the slice anchored at X_i; column j is data point X_j. Both the
  // distance and kernel matrices are symmetric.
  const Matrix d = slice_distances(v);
  Matrix k(n, n);
  for (Index j = 0; j < n; ++j) {
    k(j, j) = k0;
    for (Index i = j + 1; i < n; ++i) {
      const double value = kernel_eval(cfg_.kernel, d(i, j) / h);
      k(i, j) = value;
      k(j, i) = value;
    }
  }

  const Vector mass = k.rowwise().sum();
  const Matrix w = mass.cwiseInverse().asDiagonal() * k;
  const Matrix fy2 = fy.array().square().matrix();
  const Matrix ybar1 = w * fy;
  const Matrix ybar2 = w * fy2;
  const Matrix local = ybar2 - ybar1.cwiseProduct(ybar1);

  ObjectiveValue result;
  Vector slice_weight;
  double weight_norm = 0.0;
  if (cfg_.weighting == Weighting::uniform) {
    result.per_function = local.colwise().mean().transpose();
  } else {
    weight_norm = mass.sum() - static_cast<double>(n) * k0;
    if (!(weight_norm > 0.0))
      throw DegenerateData("weighted objective: no slice contains another point");
    slice_weight = (mass.array() - k0) / weight_norm;
    result.per_function = local.transpose() * slice_weight;
  }
  result.value = result.per_function.mean();

  if (!with_gradient)
    return {std::move(result), std::nullopt};

  // coef(i, j) multiplies grad_V d_j(V, X_i) = -2 (X_j - X_i)(X_j - X_i)^T V.
  // The (L~ - (f - ybar1)^2) factor, summed over the ensemble, expands to
  // sum_t L~_it - sum_t ybar1_it^2 - sum_t f_jt^2 + 2 (ybar1 F^T)_ij.
  const Vector local_sum = local.rowwise().sum();
  const Vector ybar1_sq = ybar1.rowwise().squaredNorm();
  const Vector fy2_sum = fy2.rowwise().sum();
  Matrix coef = 2.0 * ybar1 * fy.transpose();
  coef.colwise() += local_sum - ybar1_sq;
  coef.rowwise() -= fy2_sum.transpose();
  coef = coef.cwiseProduct(w).cwiseProduct(d);

  // d/dd K(d/h) = -(2/h^2) d K for K(z) = exp(-z^2).
  const double dk = 2.0 / (h * h);
  const double dm = static_cast<double>(m);
  if (cfg_.weighting == Weighting::uniform) {
    coef *= dk / (static_cast<double>(n) * dm);
  } else {
    const Vector slice_mean = local_sum / dm;
    const Vector mass_coef = (slice_mean.array() - result.value) / weight_norm;
    coef = dk * ((slice_weight / dm).asDiagonal() * coef -
                 mass_coef.asDiagonal() * k.cwiseProduct(d));
  }

  const Matrix xv = x * v;
  Matrix laplacian = -(coef + coef.transpose());
  laplacian.diagonal() += coef.rowwise().sum() + coef.colwise().sum().transpose();
  Matrix grad = -2.0 * (x.transpose() * (laplacian * xv));
  return {std::move(result), std::move(grad)};
}

} // namespace ecve
