#include <doctest.h>

#include <cmath>

#include "htp/error.hpp"
#include "htp/hankel.hpp"
#include "htp/weights.hpp"

namespace {

// Closed-form A_2 expression of x^delta on (a, b), |delta| < 1.
double power_a2(double delta, double a, double b) {
  const double len = b - a;
  const double mean = (std::pow(b, delta + 1) - std::pow(a, delta + 1)) / ((delta + 1) * len);
  const double dual = (std::pow(b, 1 - delta) - std::pow(a, 1 - delta)) / ((1 - delta) * len);
  return mean * dual;
}

}  // namespace

TEST_CASE("weight evaluation and parsing") {
  CHECK(htp::parse_weight("one")(3.7) == 1.0);
  CHECK(std::abs(htp::parse_weight("pow:0.25")(16.0) - 2.0) < 1e-15);
  const auto m = htp::parse_weight("minpow:0.5");
  CHECK(std::abs(m(0.25) - 0.5) < 1e-15);
  CHECK(m(9.0) == 1.0);
  const auto t = htp::WeightSpec::tabulated({1.0, 4.0}, {1.0, 2.0});
  CHECK(std::abs(t(2.0) - std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(t(16.0) - 4.0) < 1e-13);
  CHECK(std::abs(htp::parse_weight("pow:0.5", 3.0).q() - 1.5) < 1e-15);
  CHECK_THROWS_AS(htp::parse_weight("exp:1"), htp::DomainError);
  CHECK_THROWS_AS(htp::parse_weight("pow:x"), htp::DomainError);
  CHECK_THROWS_AS(htp::parse_weight("one", 1.0), htp::DomainError);
  CHECK_THROWS_AS(htp::parse_family("dyadic:3,1"), htp::DomainError);
}

TEST_CASE("A_p expression matches closed forms interval by interval") {
  const double delta = 0.3;
  const auto r = htp::ap_characteristic(htp::WeightSpec::power(delta), htp::dyadic_family(-3, 3));
  CHECK(!r.divergent);
  double best = 0.0;
  for (const auto& iv : r.intervals) {
    const double want = power_a2(delta, iv.lo, iv.hi);
    CAPTURE(iv.lo);
    CAPTURE(iv.hi);
    CHECK(std::abs(iv.value - want) < 1e-10 * want);
    best = std::max(best, want);
  }
  CHECK(std::abs(r.characteristic - best) < 1e-10 * best);
  // p = 3: (mean u)(mean u^{-1/2})^2 for u = x on (1, 4).
  htp::IntervalFamily one;
  one.intervals = {{1.0, 4.0}};
  const auto r3 = htp::ap_characteristic(htp::WeightSpec::power(1.0, 3.0), one);
  const double mean = 7.5 / 3.0;
  const double dual = 2.0 * (2.0 - 1.0) / 3.0;
  CHECK(std::abs(r3.characteristic - mean * dual * dual) < 1e-12);
}

TEST_CASE("A_p characteristic examples") {
  CHECK(std::abs(htp::ap_characteristic(htp::parse_weight("one")).characteristic - 1.0) < 1e-12);
  CHECK(std::abs(htp::ap_characteristic(htp::parse_weight("one", 4.0)).characteristic - 1.0) < 1e-12);
  // x^{1/2}, p = 2: (2/3 b^{1/2}) (2 b^{-1/2}) = 4/3 on (0, b).
  const auto r = htp::ap_characteristic(htp::parse_weight("pow:0.5"));
  CHECK(!r.divergent);
  CHECK(std::abs(r.characteristic - 4.0 / 3.0) < 1e-3);
  CHECK(r.characteristic <= 4.0 / 3.0 + 1e-12);
  CHECK(htp::ap_characteristic(htp::parse_weight("pow:-1.5")).divergent);
  CHECK(htp::ap_characteristic(htp::parse_weight("pow:1.5")).divergent);
  for (double d : {-0.5, -0.25, 0.25, 0.5, 0.9}) {
    CAPTURE(d);
    const auto f = htp::ap_characteristic(htp::WeightSpec::power(d));
    CHECK(!f.divergent);
    CHECK(std::isfinite(f.characteristic));
  }
}

TEST_CASE("A_p characteristic is at least one and monotone in the family") {
  for (const auto& w : htp::weight_bank()) {
    CAPTURE(w.label());
    const auto small = htp::ap_characteristic(w, htp::dyadic_family(-4, 4));
    const auto large = htp::ap_characteristic(w, htp::dyadic_family(-8, 8));
    for (const auto& iv : large.intervals) CHECK(iv.value >= 1.0 - 1e-12);
    CHECK(large.characteristic >= small.characteristic - 1e-12);
  }
}

TEST_CASE("weighted L^p norms") {
  const htp::SampledFunction one = htp::SampledFunction::from_grid({0.0, 0.25, 0.5, 0.75, 1.0}, {1.0, 1.0, 1.0, 1.0, 1.0});
  CHECK(std::abs(htp::weighted_lp_norm(one, htp::parse_weight("pow:1")) - std::sqrt(0.5)) < 1e-12);

  const htp::SampledFunction f = htp::SampledFunction::bump(2.0, 0.8);
  const auto w = htp::parse_weight("pow:0.25");
  CHECK(std::abs(htp::weighted_lp_norm(f.scaled(3.0), w) - 3.0 * htp::weighted_lp_norm(f, w)) <
        1e-12 * htp::weighted_lp_norm(f, w));
  CHECK(std::abs(htp::weighted_lp_norm(f, htp::parse_weight("one")) - htp::l2_norm(f)) < 1e-10);

  // int_0^inf e^{-2x} x^{1/2} dx = Gamma(3/2) / 2^{3/2}.
  const htp::SampledFunction e =
      htp::SampledFunction::from_rule("exp", [](double y) { return std::exp(-y); }, 0.0, INFINITY);
  CHECK(std::abs(htp::weighted_lp_norm(e, htp::parse_weight("pow:0.5")) - std::sqrt(0.313328534328875)) < 1e-10);

  // 1/x on [1, inf) with a power-law tail past 2: int x^{-2} x^{1/4} = 4/3.
  htp::PowerTail tail;
  tail.terms = {{1.0, 1.0}};
  const htp::SampledFunction inv =
      htp::SampledFunction::from_panels("inv", [](double y) { return 1.0 / y; }, {1.0, 1.5, 2.0}, 0.0, tail);
  CHECK(std::abs(htp::weighted_lp_norm(inv, w) - std::sqrt(4.0 / 3.0)) < 1e-10);
  // p = 3 on the same function: int x^{-3} x^{1/4} = 1/1.75.
  CHECK(std::abs(htp::weighted_lp_norm(inv, w.with_p(3.0)) - std::cbrt(1.0 / 1.75)) < 1e-10);
}
