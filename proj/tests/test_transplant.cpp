#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "htp/error.hpp"
#include "htp/transplant.hpp"

using htp::KernelMethod;
using htp::TransplantParams;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double closed_kernel(double x, double y) { return 2.0 / std::numbers::pi * x / (x * x - y * y); }

}  // namespace

TEST_CASE("Euler integral against closed form and frozen values") {
  // g = 0, m = 1, l = 1: int (A - Bs)^-2 ds = 1 / (A (A - B)).
  CHECK(rel(std::exp(htp::log_euler_integral(0.0, 1.0, 1.0, 3.0, 2.0, 1.0)), 1.0 / 3.0) < 1e-13);
  CHECK(rel(std::exp(htp::log_euler_integral(-0.3, 2.7, 1.0, 4.0, 3.9, 0.1)), 0.0942886064257370216365383326809) <
        1e-11);
  CHECK(rel(std::exp(htp::log_euler_integral(0.4, 0.35, 2.0, 1.0, 0.2, 0.8)), 3.74660441238729300523567054727) <
        1e-11);
  CHECK(rel(std::exp(htp::log_euler_integral(0.2, 60.5, 1.0, 1.0, 0.98, 0.02)), 0.649538236668529127715013124331) <
        1e-11);
}

TEST_CASE("closed-form kernel for orders -1/2 and 1/2") {
  const auto p = TransplantParams::orders(-0.5, 0.5);
  const auto q = TransplantParams::orders(0.5, -0.5);
  CHECK(rel(htp::kernel_eval(p, 2.0, 1.0).value, 4.0 / (3.0 * std::numbers::pi)) < 1e-12);
  CHECK(rel(htp::kernel_eval(q, 1.0, 2.0).value, 4.0 / (3.0 * std::numbers::pi)) < 1e-12);
  CHECK(htp::kernel_eval(q, 1.0, 2.0).branch == htp::KernelBranch::above_diagonal);
  for (double x : {0.3, 1.0, 7.0}) {
    for (double t = 0.05; t <= 0.95 + 1e-12; t += 0.05) {
      CHECK(rel(htp::kernel_eval(p, x, t * x).value, closed_kernel(x, t * x)) < 1e-10);
      CHECK(rel(htp::kernel_eval(p, t * x, x).value, closed_kernel(t * x, x)) < 1e-10);
      // Mirrored orders: K_{1/2}^{-1/2}(x, y) = K_{-1/2}^{1/2}(y, x).
      CHECK(rel(htp::kernel_eval(q, t * x, x).value, closed_kernel(x, t * x)) < 1e-10);
    }
  }
  CHECK(rel(htp::kernel_dx(p, 2.0, 1.0), -(10.0 / 9.0) / std::numbers::pi) < 1e-10);
}

TEST_CASE("branch symmetry and method agreement") {
  const auto p = TransplantParams::orders(0.3, 1.1);
  const auto q = TransplantParams::orders(1.1, 0.3);
  for (KernelMethod m : {KernelMethod::hypergeometric, KernelMethod::stabilized_euler}) {
    const auto v = htp::kernel_eval(p, 3.0, 1.2, m);
    CHECK(v.method == m);
    CHECK(rel(v.value, htp::kernel_eval(q, 1.2, 3.0, m).value) < 1e-9);
  }
  for (auto [a, b] : {std::pair{-0.5, 0.5}, {0.0, 0.7}, {0.3, 1.1}, {1.0, 0.25}}) {
    for (int k : {0, 1, 5, 10, 20, 50}) {
      const auto s = TransplantParams::shifted(a, b, k);
      for (double t = 0.05; t <= 0.95 + 1e-12; t += 0.15) {
        for (auto [x, y] : {std::pair{2.0, 2.0 * t}, {2.0 * t, 2.0}}) {
          const double h = htp::kernel_eval(s, x, y, KernelMethod::hypergeometric).value;
          const double e = htp::kernel_eval(s, x, y, KernelMethod::stabilized_euler).value;
          CAPTURE(a);
          CAPTURE(k);
          CAPTURE(t);
          CHECK(rel(e, h) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("kernel derivatives against central differences") {
  const double h = 1e-5;
  auto check_at = [&](const TransplantParams& p, double x, double y) {
    const double fdx = (htp::kernel_eval(p, x + h, y).value - htp::kernel_eval(p, x - h, y).value) / (2 * h);
    const double fdy = (htp::kernel_eval(p, x, y + h).value - htp::kernel_eval(p, x, y - h).value) / (2 * h);
    CAPTURE(p.label());
    CAPTURE(x);
    CAPTURE(y);
    CHECK(rel(htp::kernel_dx(p, x, y), fdx) < 1e-5);
    CHECK(rel(htp::kernel_dy(p, x, y), fdy) < 1e-5);
  };
  check_at(TransplantParams::orders(0.3, 1.1), 3.0, 1.2);
  check_at(TransplantParams::orders(0.3, 1.1), 1.2, 3.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0.2, 5.0);
  for (auto [a, b] : {std::pair{-0.5, 0.5}, {0.0, 0.7}, {0.3, 1.1}}) {
    for (int k : {0, 3, 12, 30}) {
      for (int i = 0; i < 6; ++i) {
        const double x = pos(rng);
        const double y = pos(rng);
        if (std::abs(x - y) < 0.1 * std::max(x, y)) continue;
        check_at(TransplantParams::shifted(a, b, k), x, y);
        // Both methods give the same derivatives.
        const auto s = TransplantParams::shifted(a, b, k);
        CHECK(rel(htp::kernel_dx(s, x, y, KernelMethod::hypergeometric),
                  htp::kernel_dx(s, x, y, KernelMethod::stabilized_euler)) < 1e-8);
      }
    }
  }
  // Just below the diagonal the kernel decreases in x like 1/(x - y).
  CHECK(htp::kernel_dx(TransplantParams::shifted(0.0, 0.7, 4), 2.0, 1.99) < 0.0);
}

TEST_CASE("vanishing reciprocal gamma gives an exact-zero branch") {
  // (beta - alpha)/2 = -1.
  const auto p = TransplantParams::orders(2.5, 0.5);
  CHECK(htp::kernel_eval(p, 2.0, 1.0).value == 0.0);
  CHECK(htp::kernel_eval(p, 1.0, 2.0).value != 0.0);
}

TEST_CASE("kernel domain errors") {
  CHECK_THROWS_AS(htp::kernel_eval(TransplantParams::orders(1.0, 1.0), 2.0, 1.0), htp::DomainError);
  CHECK_THROWS_AS(htp::kernel_eval(TransplantParams::orders(0.0, 1.0), 1.0, 1.0), htp::DomainError);
  CHECK_THROWS_AS(htp::kernel_eval(TransplantParams::orders(-0.7, 1.0), 2.0, 1.0), htp::DomainError);
  CHECK_THROWS_AS(htp::parse_kernel_method("fast"), htp::DomainError);
}

TEST_CASE("chain decomposition") {
  auto c = htp::chain_decompose(0.0, 2.5, 7);
  REQUIRE(c.size() == 3);
  CHECK(c[0].a == 0.0);
  CHECK(c[0].b == 1.0);
  CHECK(c[1].a == 1.0);
  CHECK(c[1].b == 2.0);
  CHECK(c[2].a == 2.0);
  CHECK(c[2].b == 2.5);
  for (const auto& f : c) CHECK(f.k == 7);
  c = htp::chain_decompose(0.0, 2.0, 3);
  REQUIRE(c.size() == 2);
  CHECK(c[1].b == 2.0);
  c = htp::chain_decompose(1.0, 0.25, 0);
  REQUIRE(c.size() == 1);
  CHECK(c[0].a == 1.0);
  CHECK(c[0].b == 0.25);
  c = htp::chain_decompose(3.0, 0.5, 1);
  REQUIRE(c.size() == 3);
  CHECK(c[2].a == 1.0);
  CHECK(c[2].b == 0.5);
  CHECK_THROWS_AS(htp::chain_decompose(1.0, 1.0, 0), htp::DomainError);
}

TEST_CASE("cosine-to-sine transplantation of e^-y") {
  // H_{1/2} H_{-1/2} e^{-y} = (1/pi) (e^{-x} Ei(x) - e^{x} Ei(-x)).
  const htp::SampledFunction f =
      htp::SampledFunction::from_rule("exp", [](double y) { return std::exp(-y); }, 0.0, INFINITY);
  const std::vector<double> xs{0.5, 1.0, 3.0};
  const double want[] = {0.381465410439389326895188811689, 0.411740918759851114670785562306,
                         0.240852403553767354743683371058};
  const auto got = htp::transplant_composition(TransplantParams::orders(-0.5, 0.5), f, xs);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-6);
}

TEST_CASE("kernel form agrees with the composition and inverts") {
  const htp::SampledFunction f = htp::SampledFunction::bump(2.0, 0.8);
  const std::vector<double> xs{0.6, 1.5, 2.0, 2.45, 3.5};
  for (auto p : {TransplantParams::shifted(0.0, 0.7, 1), TransplantParams::shifted(-0.5, 0.5, 0)}) {
    const auto comp = htp::transplant_composition(p, f, xs);
    double sup = 0.0;
    for (double v : comp) sup = std::max(sup, std::abs(v));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CAPTURE(xs[i]);
      CHECK(std::abs(htp::transplant_kernel_form(p, f, xs[i]) - comp[i]) < 1e-5 * sup);
    }
  }
  const auto p = TransplantParams::shifted(0.3, 1.1, 2);
  const htp::SampledFunction t = htp::tabulate_transform(p.beta(), htp::tabulate_transform(p.alpha(), f));
  const auto back = htp::transplant_composition(TransplantParams::shifted(1.1, 0.3, 2), t, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(back[i] - f(xs[i])) < 1e-6);
}
