#include <doctest.h>

#include <cmath>
#include <numbers>

#include "htp/error.hpp"
#include "htp/verify.hpp"

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("uniformity ratio") {
  CHECK(htp::uniformity({2.0, 3.0, 1.0}) == 1.5);
  CHECK(htp::uniformity({2.0, 1.0}) == 1.0);
  CHECK(std::isnan(htp::uniformity({0.0, 1.0})));
}

TEST_CASE("size scan on the closed-form kernel") {
  // (2/pi) x |x-y| / (x^2-y^2) = (2/pi) / (1 + y/x) below the diagonal,
  // (2/pi) t / (1 + t) above it: the sup sits at the smallest ratio.
  const auto r = htp::cz_size_scan(-0.5, 0.5, 0, 2);
  REQUIRE(r.rows.size() == 3);
  CHECK(rel(r.rows[0].ratio, 2.0 / std::numbers::pi / 1.01) < 1e-9);
  CHECK(r.rows[0].axis[2] < r.rows[0].axis[1]);
  CHECK(r.passed);
  // Degree -1 homogeneity: the product is invariant under dilation.
  const auto p = htp::TransplantParams::shifted(0.0, 0.7, 12);
  const double base = htp::kernel_eval(p, 1.3, 0.4).value * 0.9;
  CHECK(rel(htp::kernel_eval(p, 6.5, 2.0).value * 4.5, base) < 1e-9);
}

TEST_CASE("smooth scan at a single grid point") {
  htp::CzOptions o;
  o.grid.x = {2.0};
  o.grid.ratios = {0.5};
  const auto r = htp::cz_smooth_scan(-0.5, 0.5, 0, 0, o);
  CHECK(rel(r.rows[0].ratio, 10.0 / (9.0 * std::numbers::pi)) < 1e-9);
  o.grid.ratios = {0.99, 1.01};
  CHECK_THROWS_AS(htp::cz_smooth_scan(-0.5, 0.5, 0, 0, o), htp::DomainError);
  CHECK_THROWS_AS(htp::cz_size_scan(0.0, 1.5, 10, 12), htp::DomainError);
}

TEST_CASE("kernel scans stay uniform for large shifts") {
  for (auto [a, b] : {std::pair{0.0, 0.7}, {0.3, 1.1}}) {
    const auto s = htp::cz_size_scan(a, b, 10, 30);
    const auto d = htp::cz_smooth_scan(a, b, 10, 30);
    CHECK(s.uniformity_ratio <= 2.0);
    CHECK(d.uniformity_ratio <= 2.0);
  }
}

TEST_CASE("lemma left side against closed form and frozen values") {
  // gamma = 0, lambda = 1, c = -1/2, d = 1, A = 2, B = 1: int ds/(2-s)^2 = 1/2.
  htp::LemmaQuery q;
  CHECK(rel(std::exp(htp::lemma_log_lhs(q)), 0.5) < 1e-12);
  CHECK(std::abs(htp::lemma_log_rhs(q)) < 1e-15);
  struct Case {
    htp::LemmaQuery q;
    double lhs, ratio;
  };
  const Case cases[] = {
      {{-0.4, 1.0, -0.5, 1.0, 2.0, 1.0}, 0.71334335533439666238, 0.71334335533439666238},
      {{0.5, 2.0, 0.0, 5.0, 1.1, 1.0}, 1.9867921672886158202, 0.52094130113186305068},
      {{0.0, 1.0, 25.0, 100.0, 4.0, 0.5}, 6.291574132339720615e-79, 3.9116282592013757395e-91},
      {{-0.4, 2.0, 5.0, 25.0, 1.1, 1.0}, 0.047375712892336443788, 0.50014455359102519444},
  };
  for (const Case& c : cases) {
    CAPTURE(c.q.gamma);
    CAPTURE(c.q.d);
    CHECK(rel(std::exp(htp::lemma_log_lhs(c.q)), c.lhs) < 1e-10);
    CHECK(rel(std::exp(htp::lemma_log_lhs(c.q) - htp::lemma_log_rhs(c.q)), c.ratio) < 1e-10);
  }
  htp::LemmaQuery bad;
  bad.B = 3.0;
  CHECK_THROWS_AS(htp::lemma_log_lhs(bad), htp::DomainError);
}

TEST_CASE("lemma sweep") {
  const auto r = htp::lemma_bound_scan();
  CHECK(r.rows.size() == 3 * 2 * 4 * 4 * 3);
  CHECK(rel(r.rows[0].ratio, 0.5) < 1e-12);
  CHECK(std::isfinite(r.max_ratio));
  CHECK(r.passed);
}

TEST_CASE("radial Fourier transform of Gaussians") {
  const auto r = htp::radial_fourier_check({2, 3, 4});
  CHECK(r.rows.size() == 6);
  CHECK(r.max_ratio < 1e-6);
  CHECK(r.passed);
}

TEST_CASE("norm scan homogeneity and refusal of divergent weights") {
  htp::NormOptions o;
  o.bank = {htp::SampledFunction::bump(2.0, 0.8)};
  const auto w = htp::parse_weight("pow:0.25");
  const auto r = htp::norm_scan(0.0, 0.7, 0, 1, w, o);
  o.bank = {htp::SampledFunction::bump(2.0, 0.8).scaled(7.0)};
  const auto s = htp::norm_scan(0.0, 0.7, 0, 1, w, o);
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(std::abs(r.rows[i].ratio - s.rows[i].ratio) < 1e-12);
  CHECK(std::abs(s.rows[0].measured - 7.0 * r.rows[0].measured) < 1e-9 * s.rows[0].measured);
  CHECK_THROWS_AS(htp::norm_scan(0.0, 0.7, 0, 1, htp::parse_weight("pow:1.5"), o), htp::DomainError);
  CHECK_THROWS_AS(htp::norm_scan(0.0, 0.7, 0, 21, w, o), htp::DomainError);
}

TEST_CASE("square-function scan is an isometry for p = 2 without weight") {
  htp::VectorOptions o;
  o.bank = {htp::SampledFunction::bump(2.0, 0.8), htp::SampledFunction::bump(1.0, 0.4)};
  o.draws = 3;
  o.seed = 11;
  o.max_ratio_limit = 1.001;
  const auto r = htp::vector_valued_scan(0.0, 0.7, 2, htp::parse_weight("one"), o);
  CHECK(r.rows.size() == 5);
  for (const auto& row : r.rows) CHECK(std::abs(row.ratio - 1.0) < 1e-3);
  CHECK(r.passed);
  const auto again = htp::vector_valued_scan(0.0, 0.7, 2, htp::parse_weight("one"), o);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(r.rows[i].item == again.rows[i].item);
    CHECK(r.rows[i].ratio == again.rows[i].ratio);
  }
  CHECK_THROWS_AS(htp::vector_valued_scan(0.0, 0.7, 13, htp::parse_weight("one"), o), htp::DomainError);
}

TEST_CASE("single-entry square function reduces to the scalar ratio") {
  // Only f_1 nonzero: the square function of (0, S_1 f) is |S_1 f|.
  htp::NormOptions o;
  o.bank = {htp::SampledFunction::bump(2.0, 0.8)};
  const auto w = htp::parse_weight("pow:0.25");
  const auto scalar = htp::norm_scan(0.0, 0.7, 1, 1, w, o);
  htp::VectorOptions v;
  v.bank = o.bank;
  v.draws = 0;
  const auto sq = htp::vector_valued_scan(0.0, 0.7, 0, w, v);
  const auto k0 = htp::norm_scan(0.0, 0.7, 0, 0, w, o);
  CHECK(std::abs(sq.rows[0].ratio - k0.rows[0].ratio) < 1e-10);
  CHECK(scalar.rows[0].ratio > 0.0);
}

TEST_CASE("transference identity and chain composition") {
  const htp::SampledFunction f = htp::SampledFunction::bump(2.0, 0.8);
  const auto t = htp::transference_identity_check({{2, 1, 0, "resolvent"}}, f);
  CHECK(t.max_ratio < 1e-3);
  const auto one = htp::transference_identity_check({{3, 1, 1, "one"}}, f);
  CHECK(one.max_ratio < 2e-4);
  CHECK_THROWS_AS(htp::transference_identity_check({{3, 2, 1, "chi"}}, f), htp::DomainError);
  const auto single = htp::composition_identity_check(0.0, 0.7, 2, f);
  CHECK(single.max_ratio < 1e-8);
  const auto two = htp::composition_identity_check(0.0, 2.0, 3, f);
  CHECK(two.max_ratio < 1e-3);
  CHECK(two.notes.size() == 1);
}
