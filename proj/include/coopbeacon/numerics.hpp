#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace coopbeacon {

/// A probability in [0, 1].
///
/// Construction rejects NaN and values outside [0, 1] by more than a few
/// ulps; sub-1e-12 overshoot produced by floating-point evaluation of an
/// expansion is clamped back into range.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value);

  [[nodiscard]] double value() const noexcept { return value_; }
  [[nodiscard]] Probability complement() const noexcept;

  friend Probability operator*(Probability a, Probability b) noexcept;
  friend bool operator==(Probability a, Probability b) noexcept = default;
  friend auto operator<=>(Probability a, Probability b) noexcept = default;

 private:
  double value_ = 0.0;
};

/// Standard normal upper tail Q(x) = P(Z > x).
/// Throws std::domain_error on NaN.
Probability gaussian_q(double x);

/// Neumaier-compensated running sum. Merging two sums in a fixed order is
/// deterministic, which the parallel reductions rely on.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  void merge(const CompensatedSum& other) noexcept;
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
  bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
/// The interval with the largest error estimate is bisected until the total
/// estimated error is below max(abs_tol, rel_tol * |I|) or max_intervals is hit.
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                double abs_tol, double rel_tol, int max_intervals = 4000);

/// Integral over [0, inf) of prod_i (1 - exp(-k_i v^2 / rho)) * phi(v) dv, with phi the
/// standard normal density. Values are resolved to 1e-12 relative accuracy so that the
/// rho^-M decay stays measurable at large rho.
Probability lemma1_integral(std::span<const double> k, double rho);

using WideInt = __int128;

/// A(M, n) = sum_{m=0}^{M} C(M, m) m^n (-1)^m, exact for 0 <= M, n <= 20.
/// Throws std::range_error outside that range.
WideInt alternating_moment(int M, int n);

struct SlopeFit {
  double slope = 0.0;  ///< diversity order (negated log-log slope)
  double intercept = 0.0;
  std::vector<std::pair<double, double>> points;  ///< (log rho, log P)
  double residual = 0.0;                          ///< RMS of the log-domain fit error
};

/// Ordinary least squares of log P against log rho.
/// Requires at least three points, strictly increasing rho and P > 0.
SlopeFit fit_diversity_slope(std::span<const std::pair<double, double>> points);

[[nodiscard]] inline double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

}  // namespace coopbeacon
