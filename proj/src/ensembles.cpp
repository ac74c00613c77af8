#include "ecve/ensembles.hpp"

#include "ecve/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace ecve {

std::string to_string(EnsembleKind kind) {
  switch (kind) {
  case EnsembleKind::identity:
    return "identity";
  case EnsembleKind::fourier:
    return "fourier";
  case EnsembleKind::indicator:
    return "indicator";
  case EnsembleKind::monomial:
    return "monomial";
  case EnsembleKind::boxcox:
    return "boxcox";
  }
  return "unknown";
}

EnsembleSpec EnsembleSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);

  EnsembleSpec spec;
  if (name == "identity")
    spec.kind = EnsembleKind::identity;
  else if (name == "fourier")
    spec.kind = EnsembleKind::fourier;
  else if (name == "indicator")
    spec.kind = EnsembleKind::indicator;
  else if (name == "monomial")
    spec.kind = EnsembleKind::monomial;
  else if (name == "boxcox")
    spec.kind = EnsembleKind::boxcox;
  else
    throw InvalidConfig("unknown ensemble '" + std::string(name) +
                        "' (expected identity, fourier, indicator, monomial "
                        "or boxcox)");

  if (colon == std::string_view::npos)
    return spec;

  const std::string_view size = text.substr(colon + 1);
  if (size == "auto")
    return spec;
  int m = 0;
  const auto [ptr, ec] = std::from_chars(size.data(), size.data() + size.size(), m);
  if (ec != std::errc() || ptr != size.data() + size.size() || m < 1)
    throw InvalidConfig("ensemble size must be a positive integer or 'auto', got '" +
                        std::string(size) + "'");
  if (spec.kind == EnsembleKind::identity && m != 1)
    throw InvalidConfig("identity ensemble has m = 1");
  spec.m = m;
  return spec;
}

std::string EnsembleSpec::to_string() const {
  if (kind == EnsembleKind::identity)
    return "identity";
  return ecve::to_string(kind) + ":" + (m ? std::to_string(*m) : "auto");
}

int EnsembleSpec::resolve_m(Index n) const {
  if (kind == EnsembleKind::identity)
    return 1;
  return m ? *m : default_m(n);
}

int default_m(Index n) {
  if (n < 2)
    throw DegenerateData("default_m: need n >= 2");
  const int m = static_cast<int>(std::ceil(std::log(static_cast<double>(n))));
  return m % 2 == 0 ? m : m + 1;
}

double empirical_quantile(const Vector &y, double prob) {
  if (y.size() == 0)
    throw DegenerateData("empirical_quantile: empty sample");
  if (!(prob >= 0.0 && prob <= 1.0))
    throw InvalidConfig("empirical_quantile: probability outside [0, 1]");
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Ensemble build_ensemble(EnsembleKind kind, int m, const Vector &y) {
  if (m < 1)
    throw InvalidConfig("ensemble size must be positive");
  if (!y.allFinite())
    throw DegenerateData("responses must be finite");

  switch (kind) {
  case EnsembleKind::identity:
    if (m != 1)
      throw InvalidConfig("identity ensemble has m = 1");
    return Ensemble(kind, 1);

  case EnsembleKind::fourier:
    if (m % 2 != 0)
      throw InvalidConfig("fourier ensemble needs an even m, got " +
                          std::to_string(m));
    return Ensemble(kind, m);

  case EnsembleKind::monomial:
    return Ensemble(kind, m);

  case EnsembleKind::indicator: {
    Ensemble e(kind, m);
    for (int j = 1; j <= m; ++j) {
      const double q = empirical_quantile(y, static_cast<double>(j) / (m + 1));
      if (e.thresholds_.empty() || q > e.thresholds_.back())
        e.thresholds_.push_back(q);
    }
    e.m_ = static_cast<int>(e.thresholds_.size());
    return e;
  }

  case EnsembleKind::boxcox: {
    if (m < 2)
      throw InvalidConfig("boxcox ensemble needs m >= 2");
    Ensemble e(kind, m);
    for (int j = 1; j <= m - 1; ++j)
      e.exponents_.push_back(0.1 + 2.0 * (j - 1) / (m - 1));
    return e;
  }
  }
  throw InvalidConfig("unknown ensemble kind");
}

ResponseScaler fit_scaler(const Ensemble &e, const Vector &y) {
  ResponseScaler scaler;
  if (e.kind() == EnsembleKind::identity || e.kind() == EnsembleKind::indicator)
    return scaler;

  const Index n = y.size();
  if (n < 2)
    throw DegenerateData("fit_scaler: need at least 2 responses");
  const double mean = y.mean();
  const double sd = std::sqrt((y.array() - mean).square().sum() / (n - 1));
  scaler.center = mean;
  // A constant response has nothing to standardize.
  scaler.scale = sd > 0.0 ? sd : 1.0;

  if (e.kind() == EnsembleKind::fourier) {
    // Frequencies act on the bulk of Y. With heavy tails the sd is driven by
    // a few outliers and sin/cos collapse to near-linear functions, so the
    // fourier scaler uses the median and the normal-consistent MAD.
    const double med = empirical_quantile(y, 0.5);
    const Vector dev = (y.array() - med).abs();
    const double mad = 1.482602218505602 * empirical_quantile(dev, 0.5);
    scaler.center = med;
    if (mad > 0.0)
      scaler.scale = mad;
  }

  if (e.kind() == EnsembleKind::boxcox) {
    const double lo = (y.minCoeff() - scaler.center) / scaler.scale;
    const double hi = (y.maxCoeff() - scaler.center) / scaler.scale;
    const double range = hi - lo;
    const double offset = range > 0.0 ? 0.1 * range : 1.0;
    scaler.shift_to_positive = offset - lo;
  }
  return scaler;
}

Matrix apply_ensemble(const Ensemble &e, const ResponseScaler &scaler,
                      const Vector &y) {
  const Index n = y.size();
  const Vector z = y.unaryExpr([&](double v) { return scaler(v); });
  Matrix fy(n, e.m());

  switch (e.kind()) {
  case EnsembleKind::identity:
    fy.col(0) = z;
    break;

  case EnsembleKind::fourier: {
    const int half = e.m() / 2;
    for (int j = 1; j <= half; ++j) {
      fy.col(j - 1) = (static_cast<double>(j) * z.array()).sin();
      fy.col(half + j - 1) = (static_cast<double>(j) * z.array()).cos();
    }
    break;
  }

  case EnsembleKind::indicator:
    for (int j = 0; j < e.m(); ++j) {
      const double t = e.thresholds()[static_cast<std::size_t>(j)];
      fy.col(j) = z.unaryExpr([t](double v) { return v >= t ? 1.0 : 0.0; });
    }
    break;

  case EnsembleKind::monomial:
    for (int j = 1; j <= e.m(); ++j)
      fy.col(j - 1) = z.array().pow(static_cast<double>(j));
    break;

  case EnsembleKind::boxcox: {
    if (!(z.minCoeff() > 0.0))
      throw DomainError("boxcox: shifted response must be positive");
    const auto &ts = e.boxcox_exponents();
    for (std::size_t j = 0; j < ts.size(); ++j)
      fy.col(static_cast<Index>(j)) = (z.array().pow(ts[j]) - 1.0) / ts[j];
    fy.col(e.m() - 1) = z.array().log();
    break;
  }
  }
  return fy;
}

TransformedResponse transform_response(const EnsembleSpec &spec,
                                       const Vector &y) {
  Ensemble e = build_ensemble(spec.kind, spec.resolve_m(y.size()), y);
  ResponseScaler scaler = fit_scaler(e, y);
  Matrix fy = apply_ensemble(e, scaler, y);
  return {std::move(e), scaler, std::move(fy)};
}

} // namespace ecve
