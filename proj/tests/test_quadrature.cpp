#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "htp/error.hpp"
#include "htp/quadrature.hpp"
#include "htp/specfun.hpp"

using namespace htp::quad;

TEST_CASE("integrate polynomials exactly") {
  for (int deg = 0; deg <= 20; ++deg) {
    QuadResult r = integrate([deg](double x) { return std::pow(x, deg); }, 0.0, 1.0, {.abs_tol = 1e-13});
    CHECK(std::abs(r.value - 1.0 / (deg + 1)) <= 1e-13);
  }
  CHECK(std::abs(integrate([](double x) { return x * x; }, 0.0, 1.0).value - 1.0 / 3.0) < 1e-10);
}

TEST_CASE("declared endpoint singularities") {
  QuadOptions o{.abs_tol = 1e-8};
  o.left_exponent = -0.5;
  QuadResult r = integrate([](double s) { return 1.0 / std::sqrt(s); }, 0.0, 1.0, o);
  CHECK(std::abs(r.value - 2.0) < 1e-8);
  CHECK(r.error_estimate < 1e-8);

  // Both ends singular: Beta(0.3, 0.2).
  QuadOptions both{.abs_tol = 1e-10};
  both.left_exponent = -0.7;
  both.right_exponent = -0.8;
  OffsetIntegrand g = [](double, double a, double b) { return std::pow(a, -0.7) * std::pow(b, -0.8); };
  const double beta = htp::gamma(0.3) * htp::gamma(0.2) / htp::gamma(0.5);
  CHECK(std::abs(integrate(g, 0.0, 1.0, both).value - beta) < 1e-9);
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, QuadOptions{.left_exponent = -1.0}),
                  htp::DomainError);
}

TEST_CASE("budget exhaustion carries the best estimate") {
  QuadOptions o{.abs_tol = 1e-14, .max_evaluations = 500};
  try {
    integrate([](double x) { return std::sin(1.0 / x); }, 1e-4, 1.0, o);
    FAIL("expected ConvergenceError");
  } catch (const htp::ConvergenceError& e) {
    CHECK(std::isfinite(e.best_estimate()));
    CHECK(e.error_estimate() > 0.0);
  }
}

TEST_CASE("breakpoint integration") {
  std::vector<double> pts = {0.0, 1.0, 2.0, 3.0};
  QuadResult r = integrate([](double x) { return std::abs(x - 1.0) + std::abs(x - 2.0); }, pts,
                           {.abs_tol = 1e-12});
  CHECK(std::abs(r.value - 5.0) < 1e-12);
}

TEST_CASE("half-line integrals") {
  CHECK(std::abs(integrate_halfline([](double y) { return std::exp(-y); }, DecayHint::fast(),
                                    {.quad = {.abs_tol = 1e-9}}).value - 1.0) < 1e-9);
  CHECK(std::abs(integrate_halfline([](double y) { return std::exp(-y * y); }, DecayHint::fast()).value -
                 std::sqrt(std::numbers::pi) / 2) < 1e-9);
  CHECK(std::abs(integrate_halfline([](double y) { return y * std::exp(-y); }, DecayHint::fast()).value -
                 1.0) < 1e-9);
  // 1/(1+y)^3 integrates to 1/2; the algebraic hint supplies the remainder.
  QuadResult alg = integrate_halfline([](double y) { return std::pow(1.0 + y, -3.0); },
                                      DecayHint::power(3.0), {.quad = {.abs_tol = 1e-8}});
  CHECK(std::abs(alg.value - 0.5) < 1e-8);
}

TEST_CASE("half-line Hankel-type tail") {
  // Reference from 30-digit quadrature.
  const double ref = 0.826423150350024543952474013795;
  QuadResult r = integrate_halfline(
      [](double y) {
        const double j = htp::bessel_j(0.0, y);
        return j * j / (1.0 + y * y * y);
      },
      DecayHint::power(4.0), {.quad = {.abs_tol = 1e-8}});
  CHECK(std::abs(r.value - ref) < 1e-8);
  CHECK(r.error_estimate < 1e-8);
}

TEST_CASE("half-line truncation failure") {
  CHECK_THROWS_AS(integrate_halfline([](double) { return 1.0; }, DecayHint::fast()), htp::ConvergenceError);
}

TEST_CASE("principal values") {
  PrincipalValueOptions o{.quad = {.abs_tol = 1e-10}};
  CHECK(std::abs(principal_value([](double t) { return 1.0 / t; }, 0.0, -1.0, 1.0, o).value) < 1e-10);
  CHECK(std::abs(principal_value([](double y) { return 1.0 / (1.0 - y); }, 1.0, 0.0, 2.0, o).value) < 1e-10);
  PrincipalValueResult r = principal_value([](double y) { return y / (1.0 - y); }, 1.0, 0.0, 2.0, o);
  CHECK(std::abs(r.value + 2.0) < 1e-10);
  CHECK(std::abs(r.extrapolated + 2.0) < 1e-6);
  // Asymmetric interval: PV int_0^3 dy/(y-1) = ln 2.
  CHECK(std::abs(principal_value([](double y) { return 1.0 / (y - 1.0); }, 1.0, 0.0, 3.0, o).value -
                 std::log(2.0)) < 1e-10);
  CHECK_THROWS_AS(principal_value([](double y) { return y; }, 3.0, 0.0, 2.0), htp::DomainError);
}

TEST_CASE("principal value rejects a non-cancelling singularity") {
  CHECK_THROWS_AS(principal_value([](double y) { return 1.0 / std::abs(y - 1.0); }, 1.0, 0.0, 2.0),
                  htp::ConvergenceError);
}

TEST_CASE("principal value with exact offsets") {
  using htp::quad::PoleIntegrand;
  // The folded integrand 2 sin(150 t)/t changes sign inside the excision
  // slices; PV int_0^2 sin(150(y-1))/(y-1) dy = 2 Si(150).
  const PoleIntegrand osc = [](double, double off) { return std::sin(150.0 * off) / off; };
  PrincipalValueOptions o{.quad = {.abs_tol = 1e-11}};
  CHECK(std::abs(principal_value(osc, 1.0, 0.0, 2.0, o).value - 3.132333665445041675) < 1e-9);
  // A non-cancelling pole is caught by the graded levels even with the
  // cancellation probe switched off.
  const PoleIntegrand bad = [](double, double off) { return 1.0 / std::abs(off); };
  o.check_cancellation = false;
  CHECK_THROWS_AS(principal_value(bad, 1.0, 0.0, 2.0, o), htp::ConvergenceError);
}

TEST_CASE("principal value linearity and consistency with integrate") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double tol = 1e-10;
  PrincipalValueOptions o{.quad = {.abs_tol = tol}};
  for (int i = 0; i < 10; ++i) {
    const double a1 = u(rng), a2 = u(rng), b1 = u(rng), b2 = u(rng);
    auto f = [=](double y) { return (a1 + a2 * y * y) / (y - 0.7); };
    auto g = [=](double y) { return (b1 * std::cos(y) + b2) / (y - 0.7); };
    const double pf = principal_value(f, 0.7, 0.0, 2.0, o).value;
    const double pg = principal_value(g, 0.7, 0.0, 2.0, o).value;
    const double pfg = principal_value([&](double y) { return f(y) + g(y); }, 0.7, 0.0, 2.0, o).value;
    CHECK(std::abs(pfg - pf - pg) <= 2 * tol);
    auto smooth = [=](double y) { return a1 * std::exp(b1 * y / 4); };
    CHECK(std::abs(principal_value(smooth, 0.7, 0.0, 2.0, o).value - integrate(smooth, 0.0, 2.0, o.quad).value) <=
          2 * tol);
  }
}

TEST_CASE("gauss-legendre rules") {
  for (int n : {1, 2, 5, 24, 64}) {
    const GaussRule& g = gauss_legendre(n);
    for (int deg = 0; deg < 2 * n; ++deg) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(std::abs(s - exact) < 1e-13);
    }
  }
  PanelRule pr;
  pr.append_graded_panel(0.0, 1.0, gauss_legendre(24), 40);
  std::vector<double> v;
  for (double x : pr.nodes) v.push_back(std::pow(x, -0.5));
  CHECK(std::abs(pr.sum(v) - 2.0) < 1e-6);
}
