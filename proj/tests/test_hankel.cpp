#include <doctest.h>

#include <cmath>
#include <numbers>

#include "htp/error.hpp"
#include "htp/hankel.hpp"

namespace {

double worst_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
  return w;
}

}  // namespace

TEST_CASE("bessel_power_tail against frozen high-precision values") {
  struct Case {
    double nu, b, U, value;
  };
  const Case cases[] = {
      {2.3, 0.7, 3.0, 0.209234756139603365573038193641},
      {2.3, 0.7, 30.0, -0.00662316219265321439079297443627},
      {2.3, 0.7, 300.0, -0.000248307738329552552356381461095},
      {0.0, 1.5, 2.0, -0.0734321174303962840881614834683},
      {0.0, 1.5, 20.0, -0.000508795259427712205145370570485},
      {0.5, 0.5, 10.0, -0.0698558045563144447430773914266},
      {7.5, 2.0, 5.0, 0.0169037559381600288030549291637},
      {12.0, 0.25, 60.0, 0.0249308322066073042396960450278},
  };
  for (const Case& c : cases) {
    CAPTURE(c.nu);
    CAPTURE(c.U);
    CHECK(std::abs(htp::bessel_power_tail(c.nu, c.b, c.U) - c.value) < 1e-12);
  }
  CHECK_THROWS_AS(htp::bessel_power_tail(1.0, -0.6, 3.0), htp::DomainError);
}

TEST_CASE("Gaussian family is self-reciprocal") {
  // y^{nu+1/2} e^{-y^2/2} maps to x^{nu+1/2} e^{-x^2/2}.
  for (double nu : {0.0, 0.5, 2.3, 7.0}) {
    const htp::SampledFunction f = htp::parse_function("gauss:" + std::to_string(nu));
    const std::vector<double> xs = htp::linspace(0.05, 6.0, 40);
    const std::vector<double> got = htp::hankel_transform(nu, f, xs);
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(got[i] - f(xs[i])));
    CAPTURE(nu);
    CHECK(worst < 1e-11);
  }
  const htp::SampledFunction g = htp::parse_function("gauss:0");
  const std::vector<double> one{1.0};
  CHECK(std::abs(htp::hankel_transform(0.0, g, one)[0] - 0.6065306597126334) < 1e-13);
}

TEST_CASE("order 1/2 reduces to a sine transform") {
  // sqrt(2/pi) int_0^inf e^{-y} sin(xy) dy = sqrt(2/pi) x / (1 + x^2).
  const htp::SampledFunction f =
      htp::SampledFunction::from_rule("exp", [](double y) { return std::exp(-y); }, 0.0, INFINITY);
  const std::vector<double> xs = htp::logspace(0.01, 50.0, 30);
  const std::vector<double> got = htp::hankel_transform(0.5, f, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double want = std::sqrt(2.0 / std::numbers::pi) * xs[i] / (1.0 + xs[i] * xs[i]);
    CHECK(std::abs(got[i] - want) < 1e-11);
  }
  const htp::SampledFunction t = htp::tabulate_transform(0.5, f);
  CHECK(!t.tail().empty());
  CHECK(std::abs(t.tail().leading_exponent() - 1.0) < 1e-12);
  for (double x : {0.3, 5.0, 40.0, 500.0, 1e4}) {
    const double want = std::sqrt(2.0 / std::numbers::pi) * x / (1.0 + x * x);
    CAPTURE(x);
    CHECK(std::abs(t(x) - want) < 1e-9);
  }
}

TEST_CASE("parallel transform matches the serial reference") {
  const htp::SampledFunction f = htp::SampledFunction::bump(2.0, 0.8);
  const std::vector<double> xs = htp::linspace(0.0, 30.0, 25);
  for (double nu : {-0.5, 0.0, 1.7, 9.5}) {
    CAPTURE(nu);
    CHECK(worst_gap(htp::hankel_transform(nu, f, xs), htp::hankel_transform_reference(nu, f, xs)) < 1e-10);
  }
}

TEST_CASE("transform is an involution and an isometry") {
  for (double nu : {0.0, 2.3}) {
    const htp::SampledFunction f = htp::SampledFunction::bump(1.0, 0.4);
    const htp::SampledFunction g = htp::tabulate_transform(nu, f);
    const std::vector<double> xs = htp::linspace(0.62, 1.38, 30);
    const std::vector<double> back = htp::hankel_transform(nu, g, xs);
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(back[i] - f(xs[i])));
    CAPTURE(nu);
    CHECK(worst < 1e-7);
    CHECK(htp::plancherel_defect(nu, f) < 1e-8);
  }
}

TEST_CASE("tabulated transform of a power-tailed function") {
  // H_1(H_0 f) for a bump: the intermediate has a power tail and the
  // outer transform has to integrate it analytically.
  const htp::SampledFunction f = htp::SampledFunction::bump(2.0, 0.8);
  const htp::SampledFunction g = htp::tabulate_transform(0.0, f);
  const htp::SampledFunction h = htp::tabulate_transform(1.0, g);
  const std::vector<double> xs = htp::linspace(0.3, 8.0, 20);
  std::vector<double> from_table(xs.size());
  const std::vector<double> point = htp::hankel_transform(1.0, g, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) from_table[i] = h(xs[i]);
  CHECK(worst_gap(point, from_table) < 1e-9);
  CHECK(std::abs(htp::l2_norm(h) - htp::l2_norm(f)) < 1e-8);
}

TEST_CASE("linearity") {
  const htp::SampledFunction a = htp::SampledFunction::bump(1.0, 0.4);
  const htp::SampledFunction b = htp::SampledFunction::bump(4.0, 3.6);
  const htp::SampledFunction sum = htp::SampledFunction::from_panels(
      "a+2b", [&](double y) { return a(y) + 2.0 * b(y); }, htp::linspace(0.0, 8.0, 65), 0.0);
  const std::vector<double> xs = htp::linspace(0.1, 20.0, 21);
  const auto ta = htp::hankel_transform(1.5, a, xs);
  const auto tb = htp::hankel_transform(1.5, b, xs);
  const auto ts = htp::hankel_transform(1.5, sum, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(ts[i] - ta[i] - 2.0 * tb[i]) < 1e-11);
}

TEST_CASE("trivial multipliers") {
  const htp::SampledFunction f = htp::SampledFunction::bump(2.0, 0.8);
  const std::vector<double> xs = htp::linspace(1.3, 2.7, 15);
  const auto id = htp::multiplier_apply(3.0, htp::make_multiplier("one"), f, xs);
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(id[i] - f(xs[i])));
  CHECK(worst < 1e-8);
  const auto zero = htp::multiplier_apply(3.0, htp::make_multiplier("zero"), f, xs);
  for (double v : zero) CHECK(v == 0.0);
  CHECK_THROWS_AS(htp::make_multiplier("bogus"), htp::DomainError);
  CHECK_THROWS_AS(htp::make_multiplier("chi:2,1"), htp::DomainError);
  CHECK_THROWS_AS(htp::tabulate_multiplier(1.0, htp::make_multiplier("chi"), f), htp::DomainError);
}

TEST_CASE("sharp cutoff applied pointwise") {
  // chi_[1,2] keeps the part of the spectrum in [1,2]; splitting [0,4] at
  // 1 and 2 and adding the three pieces gives chi_[0,4], which for this
  // bump is the identity up to the spectrum beyond 4.
  const htp::SampledFunction f = htp::SampledFunction::bump(4.0, 3.6);
  const std::vector<double> xs = htp::linspace(1.0, 7.0, 13);
  std::vector<double> sum(xs.size(), 0.0);
  for (const char* m : {"chi:0,1", "chi:1,2", "chi:2,4"}) {
    const auto part = htp::multiplier_apply(0.5, htp::make_multiplier(m), f, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) sum[i] += part[i];
  }
  const auto whole = htp::multiplier_apply(0.5, htp::make_multiplier("chi:0,4"), f, xs);
  CHECK(worst_gap(sum, whole) < 1e-8);
}

TEST_CASE("resolvent multiplier inverts 1 + L") {
  // H_nu diagonalizes L = -d^2/dy^2 + (nu^2 - 1/4)/y^2 with symbol s^2, so
  // u = H(m H f) with m = 1/(1+s^2) satisfies u + L u = f.
  const double nu = 1.0;
  const htp::SampledFunction f = htp::SampledFunction::bump(2.0, 0.8);
  const htp::SampledFunction u = htp::tabulate_multiplier(nu, htp::make_multiplier("resolvent"), f);
  const double h = 0.02;
  for (double y = 1.375; y <= 2.625; y += 0.125) {
    const double upp = (2 * (u(y + 3 * h) + u(y - 3 * h)) - 27 * (u(y + 2 * h) + u(y - 2 * h)) +
                        270 * (u(y + h) + u(y - h)) - 490 * u(y)) /
                       (180 * h * h);
    const double lhs = u(y) - upp + (nu * nu - 0.25) / (y * y) * u(y);
    CAPTURE(y);
    CHECK(std::abs(lhs - f(y)) < 1e-5);
  }
}
