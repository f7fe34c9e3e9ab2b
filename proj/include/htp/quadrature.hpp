#pragma once

// Integration engine: adaptive Gauss-Kronrod on finite intervals with declared
// algebraic endpoint behaviour, truncated half-line integrals and principal
// values against a simple pole.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace htp::quad {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_evaluations = 200000;
  /// Integrand behaves like (x-a)^e near the left end. Negative exponents
  /// trigger the substitution x = a + (b-a) t^{1/(1+e)}.
  std::optional<double> left_exponent;
  /// Same for (b-x)^e near the right end.
  std::optional<double> right_exponent;
};

using Integrand = std::function<double(double)>;

/// Integrand that also receives the distances to both interval ends, computed
/// without cancellation. Used where the integrand is singular at an end.
using OffsetIntegrand = std::function<double(double x, double from_left, double from_right)>;

QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opts = {});
QuadResult integrate(const OffsetIntegrand& f, double a, double b, const QuadOptions& opts = {});

/// Integrates over consecutive subintervals [p0,p1], [p1,p2], ... sharing one
/// tolerance budget. Endpoint exponents apply to p0 and the last point only.
QuadResult integrate(const Integrand& f, std::span<const double> breakpoints,
                     const QuadOptions& opts = {});

enum class Decay { rapid, algebraic };

struct DecayHint {
  Decay kind = Decay::rapid;
  /// f ~ C y^{-rate} for large y when kind == algebraic. Must exceed 1.
  double rate = 0.0;

  static DecayHint fast() { return {}; }
  static DecayHint power(double rate) { return {Decay::algebraic, rate}; }
};

struct HalflineOptions {
  QuadOptions quad{};
  double first_window = 1.0;
  int max_windows = 60;
  /// Windows that are allowed to grow before truncation is declared failed.
  int max_nondecreasing = 4;
};

/// Integral over (0, inf): doubling windows [0,w], [w,2w], [2w,4w], ... until
/// the last window (plus the modelled remainder for algebraic decay) is below
/// abs_tol/4.
QuadResult integrate_halfline(const Integrand& f, DecayHint hint, const HalflineOptions& opts = {});

struct PrincipalValueOptions {
  QuadOptions quad{};
  /// Excision radius for the extrapolated cross-check; 0 means (b-a)/64.
  double excision = 0.0;
  /// Abort when the symmetrised integrand still grows like 1/t near the pole.
  bool check_cancellation = true;
};

struct PrincipalValueResult : QuadResult {
  /// Richardson extrapolation of the symmetric excision integrals at
  /// eps, eps/2, eps/4. Agrees with `value` to O(eps^3).
  double extrapolated = 0.0;
};

/// PV integral of f over (a, b) with a simple pole at `pole`. The part
/// symmetric about the pole is integrated as f(pole+t) + f(pole-t).
PrincipalValueResult principal_value(const Integrand& f, double pole, double a, double b,
                                     const PrincipalValueOptions& opts = {});

/// Integrand that also receives y - pole exactly, so a 1/(y - pole) factor
/// can be formed without the rounding of y = pole + t.
using PoleIntegrand = std::function<double(double y, double offset)>;

PrincipalValueResult principal_value(const PoleIntegrand& f, double pole, double a, double b,
                                     const PrincipalValueOptions& opts = {});

/// Gauss-Legendre rule on [-1, 1]; cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// Composite Gauss-Legendre rule over a set of panels.
struct PanelRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  void append_panel(double lo, double hi, const GaussRule& rule);
  /// Panel [0, hi] split geometrically towards 0 (levels halvings) so that
  /// non-integer powers at the origin integrate accurately.
  void append_graded_panel(double lo, double hi, const GaussRule& rule, int levels);
  double sum(std::span<const double> values) const;
};

}  // namespace htp::quad
