#pragma once

#include "ecve/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecve {

enum class EnsembleKind { identity, fourier, indicator, monomial, boxcox };

std::string to_string(EnsembleKind kind);

/// Parsed form of the ensemble grammar
///   identity | fourier:m | indicator:m | monomial:m | boxcox:m
/// where m is a positive integer or `auto` (a bare kind also means auto).
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::identity;
  std::optional<int> m; ///< nullopt selects default_m(n)

  static EnsembleSpec parse(std::string_view text);
  std::string to_string() const;
  /// Ensemble size for a sample of n observations.
  int resolve_m(Index n) const;

  bool operator==(const EnsembleSpec &) const = default;
};

/// Affine map applied to Y before the transforms: z = (y - center) / scale,
/// plus `shift_to_positive` when the ensemble needs positive arguments.
struct ResponseScaler {
  double center = 0.0;
  double scale = 1.0;
  std::optional<double> shift_to_positive;

  double operator()(double y) const {
    return (y - center) / scale + shift_to_positive.value_or(0.0);
  }
};

/// A finite, ordered family of scalar response transforms f_1..f_m.
class Ensemble {
public:
  EnsembleKind kind() const noexcept { return kind_; }
  int m() const noexcept { return m_; }
  const std::vector<double> &thresholds() const noexcept { return thresholds_; }
  const std::vector<double> &boxcox_exponents() const noexcept {
    return exponents_;
  }

private:
  friend Ensemble build_ensemble(EnsembleKind, int, const Vector &);
  Ensemble(EnsembleKind kind, int m) : kind_(kind), m_(m) {}

  EnsembleKind kind_;
  int m_;
  std::vector<double> thresholds_;
  std::vector<double> exponents_;
};

/// ceil(log n), bumped to the next even integer when odd.
int default_m(Index n);

/// Type-7 empirical quantile (linear interpolation of order statistics).
double empirical_quantile(const Vector &y, double prob);

/// Builds an ensemble of size m from the training responses. Indicator
/// thresholds are the j/(m+1) quantiles of Y; duplicate thresholds (ties in
/// Y) are merged, so the resulting m can be smaller than requested.
Ensemble build_ensemble(EnsembleKind kind, int m, const Vector &y);

/// Scaling convention for `e`, fit on training responses: fourier and
/// monomial standardize Y; boxcox standardizes and then shifts so the
/// minimum sits at 0.1 * range; identity and indicator use Y unchanged.
ResponseScaler fit_scaler(const Ensemble &e, const Vector &y);

/// n x m matrix whose column j is f_j applied to the scaled responses.
Matrix apply_ensemble(const Ensemble &e, const ResponseScaler &scaler,
                      const Vector &y);

/// Everything needed to evaluate the objective for one response vector.
struct TransformedResponse {
  Ensemble ensemble;
  ResponseScaler scaler;
  Matrix fy;
};

TransformedResponse transform_response(const EnsembleSpec &spec,
                                       const Vector &y);

} // namespace ecve
