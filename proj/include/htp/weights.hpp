#pragma once

// Weights on (0, inf): the A_p characteristic over finite interval families
// and weighted L^p norms.

#include <functional>
#include <string>
#include <vector>

#include "htp/sampled.hpp"

namespace htp {

class WeightSpec {
 public:
  enum class Form { power, piecewise_power, tabulated };

  /// x^delta.
  static WeightSpec power(double delta, double p = 2.0);
  /// x^inner for x < knee, knee^(inner-outer) x^outer beyond (continuous).
  static WeightSpec piecewise_power(double inner, double outer, double knee, double p = 2.0);
  /// Positive samples on an ascending grid, interpolated linearly in
  /// (log x, log u) and continued by the end powers outside the grid.
  static WeightSpec tabulated(std::vector<double> x, std::vector<double> u, double p = 2.0);

  double operator()(double x) const;
  Form form() const { return form_; }
  double p() const { return p_; }
  /// Conjugate exponent, 1/p + 1/q = 1.
  double q() const { return p_ / (p_ - 1.0); }
  /// u behaves like x^e near 0 and like x^e_inf at infinity.
  double exponent_at_zero() const;
  double exponent_at_infinity() const;
  /// Points where u has a kink.
  std::vector<double> breakpoints() const;
  std::string label() const;
  WeightSpec with_p(double p) const;

 private:
  Form form_ = Form::power;
  double p_ = 2.0;
  double inner_ = 0.0;
  double outer_ = 0.0;
  double knee_ = 1.0;
  std::vector<double> log_x_;
  std::vector<double> log_u_;
};

/// "one", "pow:D", "minpow:D" (min(1,x)^D), "pw:D0,D1,KNEE".
WeightSpec parse_weight(const std::string& spec, double p = 2.0);

/// x^delta for delta in {-0.5, -0.25, 0, 0.25, 0.5}, then min(1, x)^{1/2}.
std::vector<WeightSpec> weight_bank(double p = 2.0);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct IntervalFamily {
  /// Intervals with both ends away from 0.
  std::vector<Interval> intervals;
  /// Right ends of intervals (0, b), approximated by (epsilon, b).
  std::vector<double> origin_right_ends;
  double epsilon = 1e-6;
  /// Left ends for the trend report on (eps, b): 10^-2 ... 10^-12.
  std::vector<double> trend_epsilons;
};

/// Dyadic endpoints 2^j, j in [jmin, jmax]: all pairs, plus (eps, 2^j).
IntervalFamily dyadic_family(int jmin = -8, int jmax = 8);
/// "dyadic:JMIN,JMAX".
IntervalFamily parse_family(const std::string& spec);

struct ApInterval {
  double lo = 0.0;
  double hi = 0.0;
  double mean_u = 0.0;
  /// (1/|I| int u^{-q/p})^{p/q}.
  double dual_mean = 0.0;
  double value = 0.0;
  bool touches_origin = false;
};

struct ApTrendPoint {
  double epsilon = 0.0;
  double value = 0.0;
};

struct ApResult {
  /// Max of the A_p expression over the family: a lower bound for the
  /// characteristic.
  double characteristic = 0.0;
  bool divergent = false;
  std::string divergence_reason;
  std::vector<ApInterval> intervals;
  /// Max over the origin intervals (eps, b) of the expression, per eps.
  std::vector<ApTrendPoint> trend;
};

struct ApOptions {
  /// An interval whose expression exceeds this is flagged divergent.
  double ceiling = 1e8;
  /// Per-decade growth of the origin trend above which, sustained over the
  /// last three decades, the expression is flagged divergent.
  double trend_growth = 1.5;
};

/// Intervals are evaluated in parallel; results keep the family order.
ApResult ap_characteristic(const WeightSpec& w, const IntervalFamily& family = dyadic_family(),
                           const ApOptions& opts = {});

/// (int |f|^p u)^{1/p} over the support of f, its power tail included.
double weighted_lp_norm(const SampledFunction& f, const WeightSpec& w);

/// Same for a function given pointwise: `breaks` is a partition of the
/// finite part, beyond its last point g decays like x^-tail_exponent
/// (0 means g vanishes there), and near 0 g behaves like x^origin_exponent.
double weighted_lp_norm(const std::function<double(double)>& g, const std::vector<double>& breaks,
                        double origin_exponent, double tail_exponent, const WeightSpec& w);

}  // namespace htp
