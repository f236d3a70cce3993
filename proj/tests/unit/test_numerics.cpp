#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "coopbeacon/numerics.hpp"
#include "oracles.hpp"

using namespace coopbeacon;

TEST_CASE("Probability rejects out-of-range values") {
  CHECK_THROWS_AS(Probability(-0.1), std::domain_error);
  CHECK_THROWS_AS(Probability(1.5), std::domain_error);
  CHECK_THROWS_AS(Probability(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  CHECK(Probability(0.25).complement().value() == 0.75);
  CHECK((Probability(0.5) * Probability(0.5)).value() == 0.25);
  CHECK(Probability(1.0 + 1e-15).value() == 1.0);
}

TEST_CASE("gaussian_q limits and symmetry point") {
  CHECK(gaussian_q(0.0).value() == 0.5);
  CHECK(gaussian_q(std::numeric_limits<double>::infinity()).value() == 0.0);
  CHECK(gaussian_q(-std::numeric_limits<double>::infinity()).value() == 1.0);
  CHECK_THROWS_AS(gaussian_q(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST_CASE("gaussian_q against frozen high-precision values") {
  struct Case {
    double x;
    double q;
  };
  // 30-digit reference evaluations of the normal tail, rounded to double.
  const Case cases[] = {
      {1.0, 0.158655253931457051},
      {std::sqrt(8.0), 0.00233886749052363292},
      {5.0, 2.86651571879193912e-7},
      {8.0, 6.22096057427178412e-16},
      {-2.0, 0.977249868051820793},
  };
  for (const auto& c : cases) {
    CAPTURE(c.x);
    CHECK(std::abs(gaussian_q(c.x).value() - c.q) <= 1e-10 * c.q);
  }
  CHECK(std::abs(gaussian_q(20.0).value() - 2.7536241186062337e-89) <= 1e-16);
}

TEST_CASE("gaussian_q agrees with Craig-form quadrature") {
  for (double x = -8.0; x <= 8.0; x += 0.37) {
    CAPTURE(x);
    const double ref = oracle::craig_q(x);
    CHECK(std::abs(gaussian_q(x).value() - ref) <= 1e-10 * ref + 1e-15);
  }
}

TEST_CASE("gaussian_q is strictly decreasing and Q(x) + Q(-x) = 1") {
  double prev = 1.0;
  for (double x = -8.0; x <= 8.0; x += 0.01) {
    const double q = gaussian_q(x).value();
    // Below -5 successive values differ by less than the spacing of doubles near 1.
    if (x > -5.0) {
      CHECK(q < prev);
    } else {
      CHECK(q <= prev);
    }
    prev = q;
    CHECK(std::abs(q + gaussian_q(-x).value() - 1.0) <= 1e-12);
  }
}

TEST_CASE("CompensatedSum recovers cancelled low-order terms") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) {
    s.add(1e-16);
  }
  s.add(-1.0);
  CHECK(std::abs(s.value() - 1e-13) < 1e-20);

  CompensatedSum a;
  CompensatedSum b;
  a.add(1e20);
  b.add(3.0);
  b.add(-1e20);
  a.merge(b);
  CHECK(a.value() == 3.0);
}

TEST_CASE("integrate_gk15 on smooth integrands") {
  const auto r = integrate_gk15([](double x) { return std::exp(-x); }, 0.0, 40.0, 1e-14, 1e-13);
  CHECK(r.converged);
  CHECK(std::abs(r.value - (1.0 - std::exp(-40.0))) < 1e-13);
  const auto s = integrate_gk15([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-12, 1e-12);
  CHECK(std::abs(s.value - 2.0 / 3.0) < 1e-11);
}

TEST_CASE("lemma1_integral single factor matches the Gaussian-moment closed form") {
  for (double rho : {0.5, 1.0, 10.0, 1e3, 1e6}) {
    const std::vector<double> k{1.0};
    const double closed = 0.5 * (1.0 - 1.0 / std::sqrt(1.0 + 2.0 / rho));
    CAPTURE(rho);
    CHECK(std::abs(lemma1_integral(k, rho).value() - closed) <= 1e-12 * closed + 1e-15);
  }
}

TEST_CASE("lemma1_integral against frozen reference values") {
  struct Case {
    std::vector<double> k;
    double rho;
    double value;
  };
  const Case cases[] = {
      {{1.0}, 10.0, 0.0435645354123615721},
      {{1.0, 1.0}, 10.0, 0.00970619818898143299},
      {{1.0, 1.0}, 100.0, 0.000142794868785770657},
      {{0.5, 2.0, 3.0}, 30.0, 0.000475399545627170608},
      {{1.0, 1.0, 1.0}, 1e4, 7.49213090235429471e-12},
  };
  for (const auto& c : cases) {
    CAPTURE(c.rho);
    CHECK(std::abs(lemma1_integral(c.k, c.rho).value() - c.value) <= 1e-9 * c.value);
  }
}

TEST_CASE("lemma1_integral agrees with inclusion-exclusion") {
  const std::vector<std::vector<double>> ks{{2.0}, {1.0, 3.0}, {0.5, 1.0, 1.5}, {1.0, 2.0, 3.0, 4.0}};
  for (const auto& k : ks) {
    for (double rho : {1.0, 5.0, 50.0}) {
      const double ref = oracle::fading_integral(k, rho);
      CAPTURE(rho);
      CAPTURE(k.size());
      CHECK(std::abs(lemma1_integral(k, rho).value() - ref) <= 1e-12);
    }
  }
}

TEST_CASE("lemma1_integral decays as rho^-M") {
  const std::vector<double> k{1.0, 1.0};
  auto slope = [&](double a, double b) {
    return std::log(lemma1_integral(k, b).value() / lemma1_integral(k, a).value()) / std::log(b / a);
  };
  // Still pre-asymptotic between 10 and 100; the exact value there is about -1.832.
  const double ref = std::log(oracle::fading_integral(k, 100.0) / oracle::fading_integral(k, 10.0)) / std::log(10.0);
  CHECK(std::abs(slope(10.0, 100.0) - ref) < 1e-9);
  CHECK(std::abs(slope(1e3, 1e4) + 2.0) < 0.1);
  CHECK(std::abs(slope(1e4, 1e6) + 2.0) < 0.01);
  CHECK(lemma1_integral(std::vector<double>{1.0}, 1e300).value() < 1e-299);
}

TEST_CASE("lemma1_integral preconditions") {
  CHECK_THROWS_AS(lemma1_integral(std::vector<double>{}, 1.0), std::domain_error);
  CHECK_THROWS_AS(lemma1_integral(std::vector<double>{1.0, 0.0}, 1.0), std::domain_error);
  CHECK_THROWS_AS(lemma1_integral(std::vector<double>{1.0}, -1.0), std::domain_error);
}

TEST_CASE("alternating_moment base cases") {
  CHECK(alternating_moment(1, 1) == -1);
  CHECK(alternating_moment(3, 0) == 0);
  CHECK(alternating_moment(2, 2) == 2);
  CHECK(alternating_moment(0, 0) == 1);
}

TEST_CASE("alternating_moment matches the Stirling-number identity") {
  for (int M = 0; M <= 20; ++M) {
    for (int n = 0; n <= 20; ++n) {
      CAPTURE(M);
      CAPTURE(n);
      CHECK(alternating_moment(M, n) == oracle::alternating_moment_via_stirling(M, n));
    }
  }
}

TEST_CASE("alternating_moment vanishes for n < M") {
  for (int M = 1; M <= 20; ++M) {
    for (int n = 0; n < M; ++n) {
      CHECK(alternating_moment(M, n) == 0);
    }
    CHECK(alternating_moment(M, M) != 0);
  }
}

TEST_CASE("alternating_moment range") {
  CHECK_THROWS_AS(alternating_moment(21, 0), std::range_error);
  CHECK_THROWS_AS(alternating_moment(0, 21), std::range_error);
  CHECK_THROWS_AS(alternating_moment(-1, 0), std::range_error);
}

TEST_CASE("fit_diversity_slope recovers exact power laws") {
  std::vector<std::pair<double, double>> one;
  std::vector<std::pair<double, double>> two;
  for (double db = 20.0; db <= 40.0; db += 2.0) {
    const double rho = db_to_linear(db);
    one.emplace_back(rho, 1.0 / rho);
    two.emplace_back(rho, 7.0 / (rho * rho));
  }
  const SlopeFit f1 = fit_diversity_slope(one);
  CHECK(std::abs(f1.slope - 1.0) < 1e-12);
  CHECK(f1.residual < 1e-12);
  const SlopeFit f2 = fit_diversity_slope(two);
  CHECK(std::abs(f2.slope - 2.0) < 1e-12);
  CHECK(std::abs(f2.intercept - std::log(7.0)) < 1e-10);
  CHECK(f2.points.size() == two.size());
}

TEST_CASE("fit_diversity_slope preconditions") {
  const std::vector<std::pair<double, double>> short_list{{1.0, 1.0}, {2.0, 0.5}};
  CHECK_THROWS_AS(fit_diversity_slope(short_list), std::domain_error);
  const std::vector<std::pair<double, double>> zero{{1.0, 1.0}, {2.0, 0.0}, {3.0, 0.1}};
  CHECK_THROWS_AS(fit_diversity_slope(zero), std::domain_error);
  const std::vector<std::pair<double, double>> unordered{{1.0, 1.0}, {3.0, 0.5}, {2.0, 0.1}};
  CHECK_THROWS_AS(fit_diversity_slope(unordered), std::domain_error);
}

TEST_CASE("db_to_linear") {
  CHECK(db_to_linear(0.0) == 1.0);
  CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(db_to_linear(30.0) == doctest::Approx(1000.0).epsilon(1e-15));
}
