#pragma once

// Functions on (0, inf) as the transforms see them: a finite part with a
// panel partition fine enough for 24-point Gauss rules, an optional power-law
// tail beyond the finite part, and the power behaviour at the origin.

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "htp/chebyshev.hpp"
#include "htp/quadrature.hpp"

namespace htp {

/// sum_i coef_i * x^{-exponent_i} for x beyond `edge`.
struct PowerTail {
  double edge = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> terms;  // (coef, exponent)

  bool empty() const { return terms.empty(); }
  double operator()(double x) const;
  /// Smallest exponent among nonzero terms; inf when empty.
  double leading_exponent() const;
};

/// Power series at the origin: x^e (c0 + c1 x^step + c2 x^{2 step} + ...);
/// step 0 stands for the single power x^e.
struct OriginTerm {
  double exponent = 0.0;
  int step = 1;
};

struct BumpSpec {
  double center = 1.0;
  double radius = 0.5;
};

class SampledFunction {
 public:
  enum class Kind { rule, bump, grid, table };
  using Rule = std::function<double(double)>;

  SampledFunction() = default;

  /// exp(1 - 1/(1 - ((x-c)/r)^2)) on (c-r, c+r), zero elsewhere.
  static SampledFunction bump(double center, double radius);
  /// Closed-form rule on [lo, hi]. For hi = inf the effective support is
  /// found by doubling until |f| stays below probe_tol * max|f|. f is assumed
  /// to behave like x^origin_exponent at 0 when lo = 0.
  static SampledFunction from_rule(std::string name, Rule fn, double lo, double hi, double origin_exponent = 0.0,
                                   double probe_tol = 1e-14);
  /// Rule on an explicit panel partition (no probing).
  static SampledFunction from_panels(std::string name, Rule fn, std::vector<double> breaks, double origin_exponent,
                                     PowerTail tail = {}, double sup = std::numeric_limits<double>::quiet_NaN());
  /// Samples on an ascending grid, interpolated by local cubics; zero outside.
  static SampledFunction from_grid(std::vector<double> x, std::vector<double> values, std::string name = "grid");
  /// Chebyshev table on [table.lo(), table.hi()] with an optional tail.
  static SampledFunction from_table(std::string name, ChebTable table, PowerTail tail = {});

  double operator()(double x) const;
  void evaluate(std::span<const double> x, std::span<double> out) const;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double support_lo() const { return breaks_.empty() ? 0.0 : breaks_.front(); }
  /// Upper end of the support; inf when a tail is present.
  double support_hi() const;
  /// Upper end of the finite part.
  double finite_hi() const { return breaks_.empty() ? 0.0 : breaks_.back(); }
  const std::vector<double>& breakpoints() const { return breaks_; }
  double origin_exponent() const { return origin_exponent_; }
  /// The power series making up f near 0 (empty when the support starts
  /// away from 0). Decides which powers the transform's tail can contain.
  const std::vector<OriginTerm>& origin_terms() const { return origin_terms_; }
  void set_origin_terms(std::vector<OriginTerm> terms) { origin_terms_ = std::move(terms); }
  const PowerTail& tail() const { return tail_; }
  const std::optional<BumpSpec>& bump_spec() const { return bump_; }
  const ChebTable* table() const { return table_.get(); }
  /// max |f| over the finite part (from the construction samples).
  double sup_norm() const { return sup_; }

  SampledFunction scaled(double c) const;
  /// Estimated absolute error of the stored values (0 for exact rules).
  double accuracy() const { return accuracy_; }
  void set_accuracy(double a) { accuracy_ = a; }

  /// Composite Gauss rule over the finite part: `order` points per panel,
  /// `split` equal sub-panels each, the first panel graded towards 0 when the
  /// support starts at the origin.
  quad::PanelRule quadrature_rule(int order = 24, int split = 1, int grading_levels = 30) const;

 private:
  Kind kind_ = Kind::rule;
  std::string name_;
  Rule rule_;
  std::shared_ptr<const ChebTable> table_;
  std::shared_ptr<const std::vector<double>> grid_x_;
  std::shared_ptr<const std::vector<double>> grid_v_;
  std::vector<double> breaks_;
  PowerTail tail_;
  double origin_exponent_ = 0.0;
  std::vector<OriginTerm> origin_terms_;
  double scale_ = 1.0;
  double sup_ = 0.0;
  double accuracy_ = 0.0;
  std::optional<BumpSpec> bump_;

  double finite_value(double x) const;
};

/// The default bank: centers {1, 2, 4}, radii {0.4c, 0.9c}.
std::vector<SampledFunction> bump_bank();

/// Parses "bump:C,R" and a few closed-form names ("gauss:NU" for
/// y^{nu+1/2} e^{-y^2/2}). Throws DomainError on anything else.
SampledFunction parse_function(const std::string& spec);

std::vector<double> linspace(double a, double b, int n);
std::vector<double> logspace(double a, double b, int n);

}  // namespace htp
