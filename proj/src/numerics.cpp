#include "coopbeacon/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>

namespace coopbeacon {

namespace {
constexpr double kProbabilitySlack = 1e-12;
}

Probability::Probability(double value) {
  if (std::isnan(value) || value < -kProbabilitySlack || value > 1.0 + kProbabilitySlack) {
    throw std::domain_error("probability out of [0,1]: " + std::to_string(value));
  }
  value_ = std::clamp(value, 0.0, 1.0);
}

Probability Probability::complement() const noexcept {
  Probability p;
  p.value_ = 1.0 - value_;
  return p;
}

Probability operator*(Probability a, Probability b) noexcept {
  Probability p;
  p.value_ = a.value_ * b.value_;
  return p;
}

Probability gaussian_q(double x) {
  if (std::isnan(x)) {
    throw std::domain_error("gaussian_q: NaN argument");
  }
  // erfc keeps full relative accuracy in the upper tail, unlike 1 - Phi(x).
  return Probability(0.5 * std::erfc(x / std::numbers::sqrt2));
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

void CompensatedSum::merge(const CompensatedSum& other) noexcept {
  add(other.sum_);
  add(other.comp_);
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7/15

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  friend bool operator<(const Panel& x, const Panel& y) { return x.error < y.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) {
      resg += kWg[j / 2] * sum;
    }
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
  }
  const double scale = std::abs(half);
  resasc *= scale;
  resabs *= scale;

  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double underflow_floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  if (resabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon())) {
    err = std::max(err, underflow_floor);
  }
  return {a, b, resk * half, err};
}

}  // namespace

QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                double abs_tol, double rel_tol, int max_intervals) {
  std::priority_queue<Panel> panels;
  Panel first = gk15(f, a, b);
  panels.push(first);
  CompensatedSum total;
  total.add(first.value);
  double total_error = first.error;
  int count = 1;

  while (total_error > std::max(abs_tol, rel_tol * std::abs(total.value()))) {
    if (count >= max_intervals) {
      break;
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    total.add(-worst.value);
    total.add(left.value);
    total.add(right.value);
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }

  // Recompute the error from scratch; the running value drifts with cancellation.
  double err = 0.0;
  CompensatedSum value;
  while (!panels.empty()) {
    value.add(panels.top().value);
    err += panels.top().error;
    panels.pop();
  }
  QuadratureResult out;
  out.value = value.value();
  out.abs_error = err;
  out.intervals = count;
  out.converged = err <= std::max(abs_tol, rel_tol * std::abs(out.value));
  return out;
}

Probability lemma1_integral(std::span<const double> k, double rho) {
  if (k.empty()) {
    throw std::domain_error("lemma1_integral: empty coefficient list");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::domain_error("lemma1_integral: rho must be positive and finite");
  }
  for (double ki : k) {
    if (!(ki > 0.0) || !std::isfinite(ki)) {
      throw std::domain_error("lemma1_integral: coefficients must be positive and finite");
    }
  }
  const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  auto integrand = [&](double v) {
    const double v2 = v * v;
    double prod = 1.0;
    for (double ki : k) {
      prod *= -std::expm1(-ki * v2 / rho);
    }
    return prod * inv_sqrt_2pi * std::exp(-0.5 * v2);
  };
  // The weight is negligible beyond v = 40 (exp(-800)).
  const QuadratureResult r = integrate_gk15(integrand, 0.0, 40.0, 0.0, 1e-12);
  return Probability(r.value);
}

WideInt alternating_moment(int M, int n) {
  if (M < 0 || n < 0 || M > 20 || n > 20) {
    throw std::range_error("alternating_moment: arguments must lie in [0, 20]");
  }
  WideInt total = 0;
  WideInt binom = 1;  // C(M, m)
  for (int m = 0; m <= M; ++m) {
    WideInt power = 1;
    for (int i = 0; i < n; ++i) {
      power *= m;
    }
    // 0^0 = 1, matching the binomial-theorem convention used for A(M, 0).
    const WideInt term = binom * power;
    total += (m % 2 == 0) ? term : -term;
    binom = binom * (M - m) / (m + 1);
  }
  return total;
}

SlopeFit fit_diversity_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) {
    throw std::domain_error("fit_diversity_slope: need at least three points");
  }
  SlopeFit fit;
  fit.points.reserve(points.size());
  double prev_rho = -std::numeric_limits<double>::infinity();
  for (const auto& [rho, p] : points) {
    if (!(rho > 0.0) || !(rho > prev_rho)) {
      throw std::domain_error("fit_diversity_slope: rho values must be positive and strictly increasing");
    }
    if (!(p > 0.0)) {
      throw std::domain_error(
          "fit_diversity_slope: nonpositive probability; increase the number of trials "
          "or use the analytic-conditional estimator");
    }
    prev_rho = rho;
    fit.points.emplace_back(std::log(rho), std::log(p));
  }
  const auto n = static_cast<double>(fit.points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : fit.points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : fit.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  const double beta = sxy / sxx;
  fit.slope = -beta;
  fit.intercept = my - beta * mx;
  double ss = 0.0;
  for (const auto& [x, y] : fit.points) {
    const double r = y - (fit.intercept + beta * x);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace coopbeacon
