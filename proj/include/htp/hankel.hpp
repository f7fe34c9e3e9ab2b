#pragma once

// Hankel transform H_nu f(x) = int_0^inf f(y) J_nu(xy) (xy)^{1/2} dy, its
// tabulation, and Hankel multipliers H_l(m H_l f).

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "htp/sampled.hpp"
#include "htp/specfun.hpp"

namespace htp {

struct HankelOptions {
  /// Accuracy target for tabulated transforms, relative to ||f||_2.
  double abs_tol = 1e-10;
  /// A tabulated transform is cut off once its envelope over a window falls
  /// below this (relative to ||f||_2).
  double truncation_tol = 1e-9;
  /// Power-law tails are fitted once the fit residual is below this
  /// (relative to ||f||_2).
  double tail_fit_tol = 1e-10;
  /// Number of power-law terms x^{-t}, x^{-t-2}, ... in a fitted tail.
  int tail_terms = 3;
  double first_window = 12.0;
  double window_growth = 1.5;
  double max_extent = 6000.0;
  /// Largest phase x*w covered by one 24-point sub-panel.
  double phase_per_panel = 16.0;
};

/// H_nu f at one point, summing 24-point Gauss rules over f's panels
/// (sub-divided by oscillation, the first panel graded towards 0) plus the
/// analytic contribution of a power-law tail.
double hankel_point(const BesselJFixedOrder& j, const SampledFunction& f, double x,
                    const HankelOptions& opts = {});

/// H_nu f at every x; OpenMP-parallel over the points, output order preserved.
std::vector<double> hankel_transform(double nu, const SampledFunction& f, std::span<const double> x,
                                     const HankelOptions& opts = {});

/// Serial reference: adaptive Gauss-Kronrod over each panel with the general
/// Bessel routine. Slow; kept for tests and benchmarks.
std::vector<double> hankel_transform_reference(double nu, const SampledFunction& f, std::span<const double> x,
                                               double tol = 1e-11);

/// H_nu f as a SampledFunction: adaptive Chebyshev table over growing
/// windows, cut off when the envelope is negligible or continued by a fitted
/// power-law tail once one describes the data.
SampledFunction tabulate_transform(double nu, const SampledFunction& f, const HankelOptions& opts = {});

/// int_U^inf u^{-b} J_nu(u) du for b > -1/2, U > 0.
double bessel_power_tail(double nu, double b, double U);

/// ||f||_2 including an analytic tail contribution.
double l2_norm(const SampledFunction& f);

/// | ||H_nu f||_2 - ||f||_2 | / ||f||_2.
double plancherel_defect(double nu, const SampledFunction& f, const HankelOptions& opts = {});

struct MultiplierSpec {
  std::string name;
  std::function<double(double)> fn;
  double sup = 1.0;
  /// Points where m jumps or has a kink.
  std::vector<double> breakpoints;
  /// m(s) = sum coef * s^{-power} for large s (used to continue power tails).
  std::vector<std::pair<double, double>> expansion;
  /// m vanishes below support_start and beyond support_end.
  double support_start = 0.0;
  double support_end = std::numeric_limits<double>::infinity();
  /// m is discontinuous somewhere; H_l(m H_l f) then decays like an
  /// oscillating x^-1 and cannot be tabulated.
  bool jumps = false;
};

/// Library multipliers: "one", "zero", "chi" (indicator of [1,2]),
/// "chi:A,B", "resolvent" (1/(1+s^2)).
MultiplierSpec make_multiplier(const std::string& name);

/// m * g on the panels of g (merged with m's breakpoints).
SampledFunction multiply_spectrum(const MultiplierSpec& m, const SampledFunction& g);

/// H_l(m H_l f) at the points.
std::vector<double> multiplier_apply(double ell, const MultiplierSpec& m, const SampledFunction& f,
                                     std::span<const double> x, const HankelOptions& opts = {});

/// H_l(m H_l f) as a tabulated function. Throws DomainError for
/// multipliers with jumps.
SampledFunction tabulate_multiplier(double ell, const MultiplierSpec& m, const SampledFunction& f,
                                    const HankelOptions& opts = {});

}  // namespace htp
