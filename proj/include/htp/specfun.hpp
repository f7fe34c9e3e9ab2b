#pragma once

// Gamma, Bessel J of real order and the Gauss hypergeometric function on [0,1).

#include <vector>

namespace htp {

/// Default upper limit for Bessel arguments. Products x*y in the truncated
/// transforms stay well below this.
inline constexpr double kBesselMaxArgument = 1e7;

/// Gamma(x) for x > 0. Throws OverflowError when the result exceeds double range.
double gamma(double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// 1/Gamma(x) for every real x, exactly 0 at 0, -1, -2, ...
double recip_gamma(double x);

/// J_nu(x) for nu >= -1/2 and 0 <= x <= max_argument. At x = 0 returns the
/// limit value (1 for nu = 0, 0 for nu > 0); nu < 0 at x = 0 is a domain error.
double bessel_j(double nu, double x, double max_argument = kBesselMaxArgument);

/// J_nu for one fixed order, evaluated many times. Above a precomputed
/// threshold the Hankel asymptotic expansion is used; below it a piecewise
/// Chebyshev table built from bessel_j at construction. Both are 10-50 times
/// cheaper than the general routine at the same accuracy.
class BesselJFixedOrder {
 public:
  explicit BesselJFixedOrder(double nu, double max_argument = kBesselMaxArgument);
  double operator()(double x) const;
  double order() const { return nu_; }
  double asymptotic_threshold() const { return threshold_; }

 private:
  double nu_;
  double max_argument_;
  double threshold_;
  /// Chebyshev coefficients on panels [2i, 2i+2) below the threshold; panel 0
  /// holds J_nu(x) x^{-nu}, which is smooth at 0 for every order.
  std::vector<double> table_;
  double phase_cos_;
  double phase_sin_;
  std::vector<double> coeffs_;  // a_k(nu) of the Hankel expansion
};

struct Hyp2F1Args {
  double p = 0.0;
  double q = 0.0;
  double r = 1.0;
  double z = 0.0;
};

struct Hyp2F1Options {
  double rel_tol = 1e-13;
  /// Switch from the Gauss series to the Euler integral above this z.
  double series_limit = 0.5;
  long max_series_terms = 2000000;
};

/// 2F1(p, q; r; z) for z in [0, 1). Gauss series for z <= series_limit, the
/// Euler integral above it (with p and q swapped when only r > p > 0 holds),
/// closed forms when r equals p or q and a long series as last resort.
double hyp2f1(const Hyp2F1Args& args, const Hyp2F1Options& opts = {});

/// d/dz 2F1 = (pq/r) 2F1(p+1, q+1; r+1; z).
double hyp2f1_dz(const Hyp2F1Args& args, const Hyp2F1Options& opts = {});

}  // namespace htp
