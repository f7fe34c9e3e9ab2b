#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "htp/error.hpp"
#include "htp/specfun.hpp"

namespace {

// Ascending series for J_nu, summed in long double. Accurate for x up to ~20.
double bessel_series(double nu, double x) {
  long double half = x / 2.0L;
  long double term = std::pow(half, static_cast<long double>(nu)) / std::tgamma(static_cast<long double>(nu) + 1.0L);
  long double sum = term;
  for (int m = 1; m < 200; ++m) {
    term *= -half * half / (m * (m + static_cast<long double>(nu)));
    sum += term;
    if (std::abs(term) < 1e-22L * std::abs(sum)) break;
  }
  return static_cast<double>(sum);
}

// Plain Gauss series in long double; valid oracle for z <= 0.9 and modest parameters.
double hyp2f1_series(double p, double q, double r, double z) {
  long double sum = 1.0L;
  long double term = 1.0L;
  for (int n = 0; n < 100000; ++n) {
    term *= (p + n) * (q + n) / ((r + n) * (n + 1.0L)) * z;
    sum += term;
    if (std::abs(term) < 1e-20L * std::abs(sum) && n > 10) break;
  }
  return static_cast<double>(sum);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("gamma anchors and recurrence") {
  CHECK(htp::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rel(htp::gamma(0.5), std::sqrt(std::numbers::pi)) < 1e-14);
  CHECK(rel(htp::gamma(6.0), 120.0) < 1e-14);
  for (double x = 0.1; x <= 50.0; x += 0.37) {
    CHECK(rel(htp::gamma(x + 1.0), x * htp::gamma(x)) < 1e-13);
  }
  CHECK_THROWS_AS(htp::gamma(180.0), htp::OverflowError);
  CHECK_THROWS_AS(htp::gamma(-1.5), htp::DomainError);
}

TEST_CASE("recip_gamma at poles and by reflection") {
  CHECK(htp::recip_gamma(1.0) == doctest::Approx(1.0));
  for (double x : {0.0, -1.0, -2.0, -7.0}) CHECK(htp::recip_gamma(x) == 0.0);
  CHECK(rel(htp::recip_gamma(0.5), 1.0 / std::sqrt(std::numbers::pi)) < 1e-14);
  // Gamma(-1/2) = -2 sqrt(pi).
  CHECK(rel(htp::recip_gamma(-0.5), -1.0 / (2.0 * std::sqrt(std::numbers::pi))) < 1e-14);
  for (double x = -5.3; x < 5.0; x += 0.41) {
    CHECK(std::abs(htp::recip_gamma(x + 1.0) * x - htp::recip_gamma(x)) <=
          1e-13 * std::max(1.0, std::abs(htp::recip_gamma(x))));
  }
}

TEST_CASE("bessel half-integer closed forms") {
  CHECK(rel(htp::bessel_j(0.5, std::numbers::pi / 2), 2.0 / std::numbers::pi) < 1e-14);
  CHECK(rel(htp::bessel_j(-0.5, std::numbers::pi), -std::sqrt(2.0) / std::numbers::pi) < 1e-14);
  for (double x = 0.1; x <= 100.0; x *= 1.07) {
    const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
    CHECK(std::abs(htp::bessel_j(0.5, x) - amp * std::sin(x)) <= 1e-12);
    CHECK(std::abs(htp::bessel_j(-0.5, x) - amp * std::cos(x)) <= 1e-12);
  }
}

TEST_CASE("bessel first zero of J0 located on the series oracle") {
  double lo = 2.0;
  double hi = 3.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bessel_series(0.0, lo) * bessel_series(0.0, mid) <= 0.0 ? hi : lo) = mid;
  }
  CHECK(std::abs(0.5 * (lo + hi) - 2.404825557695773) < 1e-12);
  CHECK(std::abs(htp::bessel_j(0.0, 2.404825557695773)) < 1e-10);
}

TEST_CASE("bessel against series oracle and frozen high-precision values") {
  for (double nu : {-0.5, 0.0, 0.3, 1.0, 2.5, 5.5, 12.0, 30.0}) {
    for (double x = 0.05; x <= 15.0; x *= 1.3) {
      CHECK(std::abs(htp::bessel_j(nu, x) - bessel_series(nu, x)) <= 1e-12);
    }
  }
  // Reference values computed once at 30 digits.
  CHECK(std::abs(htp::bessel_j(0.0, 1.0) - 0.765197686557966551449717526103) < 1e-14);
  CHECK(std::abs(htp::bessel_j(5.5, 3.0) - 0.0226609349454613247534686175141) < 1e-14);
  CHECK(std::abs(htp::bessel_j(50.3, 70.0) - -0.111591385082287869402862374486) < 1e-12);
  CHECK(std::abs(htp::bessel_j(2.0, 500.0) - 0.0341424473346134874365029288309) < 1e-12);
  CHECK(std::abs(htp::bessel_j(0.3, 2000.0) - 0.0137554961727005052021501967497) < 1e-12);
  CHECK(std::abs(htp::bessel_j(60.0, 100.0) - 0.00106315630422770308131637902435) < 1e-12);
}

TEST_CASE("bessel three-term recurrence residual") {
  for (double nu = 0.5; nu <= 50.0; nu += 3.7) {
    for (double x = 0.2; x <= 800.0; x *= 1.9) {
      const double res = htp::bessel_j(nu - 1, x) + htp::bessel_j(nu + 1, x) -
                         (2 * nu / x) * htp::bessel_j(nu, x);
      CHECK(std::abs(res) <= 1e-9);
    }
  }
}

TEST_CASE("bessel domain errors") {
  CHECK_THROWS_AS(htp::bessel_j(-0.7, 1.0), htp::DomainError);
  CHECK_THROWS_AS(htp::bessel_j(1.0, -1.0), htp::DomainError);
  CHECK_THROWS_AS(htp::bessel_j(1.0, 2e7), htp::DomainError);
  CHECK(htp::bessel_j(0.0, 0.0) == 1.0);
}

TEST_CASE("hyp2f1 anchors") {
  CHECK(htp::hyp2f1({2.0, 3.0, 4.0, 0.0}) == 1.0);
  CHECK(rel(htp::hyp2f1({1.0, 0.5, 0.5, 0.75}), 4.0) < 1e-14);
  CHECK(rel(htp::hyp2f1({1.0, 1.0, 2.0, 0.5}), 1.3862943611198906) < 1e-13);
  // Euler-integral region, 30-digit references.
  CHECK(rel(htp::hyp2f1({0.3, 0.7, 1.9, 0.8}), 1.14072581430877866888928928677) < 1e-11);
  CHECK(rel(htp::hyp2f1({1.35, 0.65, 1.3, 0.9}), 4.81839298351500634067412990152) < 1e-11);
  CHECK(rel(htp::hyp2f1({51.35, 0.65, 51.0, 0.9025}), 4.7138694145445314899718013905) < 1e-11);
  CHECK(rel(htp::hyp2f1({0.5, 0.5, 1.5, 0.99}), 1.47803766237477476430867915631) < 1e-11);
  // No Euler representation: series fallback.
  CHECK(rel(htp::hyp2f1({2.5, 1.5, 0.7, 0.95}), 56279.0858306549278370960644063) < 1e-10);
  // Terminating series.
  CHECK(rel(htp::hyp2f1({-3.0, 2.0, 1.5, 0.9}), -0.0450285714285714242066660517594) < 1e-12);
  CHECK_THROWS_AS(htp::hyp2f1({1.0, 1.0, 2.0, 1.0}), htp::DomainError);
  CHECK_THROWS_AS(htp::hyp2f1({1.0, 1.0, -2.0, 0.3}), htp::DomainError);
}

TEST_CASE("hyp2f1 matches series oracle on both sides of the path switch") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> up(0.1, 3.0);
  for (int i = 0; i < 40; ++i) {
    const double q = up(rng);
    const double r = q + up(rng);
    const double p = up(rng);
    for (double z : {0.2, 0.49, 0.51, 0.7, 0.85}) {
      CHECK(rel(htp::hyp2f1({p, q, r, z}), hyp2f1_series(p, q, r, z)) < 1e-10);
    }
  }
}

TEST_CASE("hyp2f1_dz anchors and finite differences") {
  CHECK(rel(htp::hyp2f1_dz({2.0, 3.0, 4.0, 0.0}), 1.5) < 1e-15);
  CHECK(rel(htp::hyp2f1_dz({1.0, 0.5, 0.5, 0.5}), 4.0) < 1e-13);
  const double h = 1e-5;
  auto fd = [h](double p, double q, double r, double z) {
    return (htp::hyp2f1({p, q, r, z + h}) - htp::hyp2f1({p, q, r, z - h})) / (2 * h);
  };
  CHECK(rel(htp::hyp2f1_dz({0.7, 0.4, 1.3, 0.3}), fd(0.7, 0.4, 1.3, 0.3)) < 1e-6);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> up(0.1, 2.5);
  std::uniform_real_distribution<double> zd(0.05, 0.9);
  for (int i = 0; i < 50; ++i) {
    const double q = up(rng);
    const double r = q + up(rng);
    const double p = up(rng);
    const double z = zd(rng);
    CHECK(rel(htp::hyp2f1_dz({p, q, r, z}), fd(p, q, r, z)) < 1e-6);
  }
}

TEST_CASE("fixed-order Bessel evaluator agrees with the general routine") {
  for (double nu : {-0.5, 0.0, 0.5, 1.0, 2.0, 3.5, 5.5, 10.7, 20.0, 25.5}) {
    htp::BesselJFixedOrder j(nu);
    double worst = 0.0;
    for (double x = 0.05; x < 2e4; x *= 1.013) worst = std::max(worst, std::abs(j(x) - htp::bessel_j(nu, x)));
    CHECK(worst < 5e-15);
  }
}
