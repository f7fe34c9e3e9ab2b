#pragma once

// Piecewise Chebyshev interpolation tables built by adaptive panel splitting.

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace htp {

inline constexpr int kChebNodes = 24;

/// First-kind Chebyshev nodes on [-1, 1], ascending.
const std::array<double, kChebNodes>& cheb_nodes();

struct ChebPanel {
  double lo = 0.0;
  double hi = 0.0;
  /// Stored values G = f / x^e at the mapped nodes, e the origin exponent.
  std::array<double, kChebNodes> values{};
};

/// Evaluates f at every abscissa of `x`, writing into `out`. Implementations
/// may evaluate in parallel.
using BatchEval = std::function<void(std::span<const double> x, std::span<double> out)>;

struct ChebBuildOptions {
  double abs_tol = 1e-10;
  /// f is stored as x^e * G(x); the per-panel tolerance on G is scaled by
  /// the largest x^e on the panel so the error in f stays at abs_tol.
  double origin_exponent = 0.0;
  std::size_t max_panels = 40000;
};

class ChebTable {
 public:
  ChebTable() = default;

  /// Adaptive table on [breaks.front(), breaks.back()], starting from the
  /// panels given by `breaks` and bisecting every panel whose trailing
  /// Chebyshev coefficients exceed the tolerance.
  static ChebTable build(const BatchEval& f, std::span<const double> breaks, const ChebBuildOptions& opts);

  /// Appends the panels of `other`, which must start where this table ends.
  void append(const ChebTable& other);
  /// Drops panels lying entirely above `x`.
  void truncate_above(double x);

  /// Interpolated value; 0 outside [lo, hi].
  double operator()(double x) const;

  bool empty() const { return panels_.empty(); }
  double lo() const { return panels_.empty() ? 0.0 : panels_.front().lo; }
  double hi() const { return panels_.empty() ? 0.0 : panels_.back().hi; }
  double origin_exponent() const { return origin_exponent_; }
  const std::vector<ChebPanel>& panels() const { return panels_; }
  std::vector<double> breakpoints() const;
  /// Largest |f| over stored nodes of panels meeting [a, b].
  double max_abs_on(double a, double b) const;
  /// f at the stored nodes of one panel (undoing the origin weight).
  std::array<double, kChebNodes> panel_values(std::size_t i) const;
  /// Multiplies every stored value by c.
  void scale(double c);

 private:
  std::vector<ChebPanel> panels_;
  double origin_exponent_ = 0.0;
};

}  // namespace htp
