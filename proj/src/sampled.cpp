#include "htp/sampled.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "htp/error.hpp"

namespace htp {
namespace {

ChebTable probe_table(const SampledFunction::Rule& fn, double lo, double hi, double e, double tol) {
  const int initial = 8;
  std::vector<double> breaks;
  for (int i = 0; i <= initial; ++i) breaks.push_back(lo + (hi - lo) * i / initial);
  BatchEval eval = [&fn](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = fn(x[i]);
  };
  ChebBuildOptions o;
  o.abs_tol = tol;
  o.origin_exponent = (lo == 0.0) ? e : 0.0;
  return ChebTable::build(eval, breaks, o);
}

double sample_max(const SampledFunction::Rule& fn, double lo, double hi, int n) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * (i + 0.5) / n;
    m = std::max(m, std::abs(fn(x)));
  }
  return m;
}

}  // namespace

double PowerTail::operator()(double x) const {
  double s = 0.0;
  for (const auto& [c, t] : terms) s += c * std::pow(x, -t);
  return s;
}

double PowerTail::leading_exponent() const {
  double e = std::numeric_limits<double>::infinity();
  for (const auto& [c, t] : terms) {
    if (c != 0.0) e = std::min(e, t);
  }
  return e;
}

SampledFunction SampledFunction::bump(double center, double radius) {
  if (!(radius > 0.0) || !(center - radius >= 0.0)) {
    throw DomainError("bump needs 0 < r <= c so that its support lies in [0, inf)");
  }
  Rule fn = [center, radius](double x) {
    const double u = (x - center) / radius;
    const double d = 1.0 - u * u;
    if (d <= 0.0) return 0.0;
    return std::exp(1.0 - 1.0 / d);
  };
  std::ostringstream name;
  name << "bump(" << center << "," << radius << ")";
  ChebTable t = probe_table(fn, center - radius, center + radius, 0.0, 1e-15);
  SampledFunction f;
  f.kind_ = Kind::bump;
  f.name_ = name.str();
  f.rule_ = fn;
  f.breaks_ = t.breakpoints();
  f.sup_ = 1.0;
  f.bump_ = BumpSpec{center, radius};
  return f;
}

SampledFunction SampledFunction::from_rule(std::string name, Rule fn, double lo, double hi, double origin_exponent,
                                           double probe_tol) {
  if (!(lo >= 0.0) || !(hi > lo)) throw DomainError("rule support must satisfy 0 <= lo < hi");
  double top = hi;
  if (std::isinf(hi)) {
    // Double the window until the function has died out.
    double y = std::max(2.0 * lo, lo + 1.0);
    double peak = sample_max(fn, lo, y, 256);
    for (int i = 0; i < 60; ++i) {
      const double next = 2.0 * y;
      const double window = sample_max(fn, y, next, 256);
      peak = std::max(peak, window);
      y = next;
      if (window <= probe_tol * peak * 1e-3) break;
      if (i == 59) throw ConvergenceError("rule does not decay on the half-line", 0.0, window);
    }
    top = y;
  }
  const double peak = std::max(sample_max(fn, lo, top, 2048), 1e-300);
  ChebTable t = probe_table(fn, lo, top, origin_exponent, probe_tol * peak);
  SampledFunction f;
  f.kind_ = Kind::rule;
  f.name_ = std::move(name);
  f.rule_ = std::move(fn);
  f.breaks_ = t.breakpoints();
  f.origin_exponent_ = lo == 0.0 ? origin_exponent : 0.0;
  if (lo == 0.0) f.origin_terms_ = {{origin_exponent, 1}};
  f.sup_ = std::max(peak, t.max_abs_on(lo, top));
  return f;
}

SampledFunction SampledFunction::from_panels(std::string name, Rule fn, std::vector<double> breaks,
                                             double origin_exponent, PowerTail tail, double sup) {
  if (breaks.size() < 2 || !std::is_sorted(breaks.begin(), breaks.end()) || breaks.front() < 0.0) {
    throw DomainError("panel breakpoints must be ascending, nonnegative and at least two");
  }
  SampledFunction f;
  f.kind_ = Kind::rule;
  f.name_ = std::move(name);
  f.rule_ = std::move(fn);
  f.breaks_ = std::move(breaks);
  f.origin_exponent_ = f.breaks_.front() == 0.0 ? origin_exponent : 0.0;
  if (f.breaks_.front() == 0.0) f.origin_terms_ = {{origin_exponent, 1}};
  f.tail_ = std::move(tail);
  if (!f.tail_.empty()) f.tail_.edge = f.breaks_.back();
  if (std::isnan(sup)) {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < f.breaks_.size(); ++i) {
      m = std::max(m, sample_max(f.rule_, f.breaks_[i], f.breaks_[i + 1], 8));
    }
    sup = m;
  }
  f.sup_ = sup;
  return f;
}

SampledFunction SampledFunction::from_grid(std::vector<double> x, std::vector<double> values, std::string name) {
  if (x.size() < 4 || x.size() != values.size()) throw DomainError("grid needs at least 4 matching samples");
  if (!std::is_sorted(x.begin(), x.end()) || std::adjacent_find(x.begin(), x.end()) != x.end() || x.front() < 0.0) {
    throw DomainError("grid abscissae must be strictly ascending and nonnegative");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("grid values must be finite");
  }
  SampledFunction f;
  f.kind_ = Kind::grid;
  f.name_ = std::move(name);
  f.breaks_ = x;
  if (x.front() == 0.0) f.origin_terms_ = {{0.0, 1}};
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  f.sup_ = m;
  f.grid_x_ = std::make_shared<const std::vector<double>>(std::move(x));
  f.grid_v_ = std::make_shared<const std::vector<double>>(std::move(values));
  return f;
}

SampledFunction SampledFunction::from_table(std::string name, ChebTable table, PowerTail tail) {
  if (table.empty()) throw DomainError("empty Chebyshev table");
  SampledFunction f;
  f.kind_ = Kind::table;
  f.name_ = std::move(name);
  f.breaks_ = table.breakpoints();
  f.origin_exponent_ = table.origin_exponent();
  if (table.lo() == 0.0) f.origin_terms_ = {{table.origin_exponent(), 1}};
  f.sup_ = table.max_abs_on(table.lo(), table.hi());
  f.tail_ = std::move(tail);
  if (!f.tail_.empty()) f.tail_.edge = table.hi();
  f.table_ = std::make_shared<const ChebTable>(std::move(table));
  return f;
}

double SampledFunction::support_hi() const {
  return tail_.empty() ? finite_hi() : std::numeric_limits<double>::infinity();
}

double SampledFunction::finite_value(double x) const {
  switch (kind_) {
    case Kind::rule:
    case Kind::bump:
      return rule_(x);
    case Kind::table:
      return (*table_)(x);
    case Kind::grid: {
      const auto& gx = *grid_x_;
      const auto& gv = *grid_v_;
      const std::size_t n = gx.size();
      std::size_t i = std::upper_bound(gx.begin(), gx.end(), x) - gx.begin();
      // Four-point stencil around the interval containing x.
      std::size_t s = i >= 2 ? i - 2 : 0;
      s = std::min(s, n - 4);
      double v = 0.0;
      for (std::size_t a = s; a < s + 4; ++a) {
        double l = 1.0;
        for (std::size_t b = s; b < s + 4; ++b) {
          if (b != a) l *= (x - gx[b]) / (gx[a] - gx[b]);
        }
        v += l * gv[a];
      }
      return v;
    }
  }
  return 0.0;
}

double SampledFunction::operator()(double x) const {
  if (breaks_.empty() || x < breaks_.front()) return 0.0;
  if (x > breaks_.back()) return tail_.empty() ? 0.0 : tail_(x);
  return scale_ * finite_value(x);
}

void SampledFunction::evaluate(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (*this)(x[i]);
}

SampledFunction SampledFunction::scaled(double c) const {
  SampledFunction f = *this;
  f.scale_ *= c;
  f.sup_ *= std::abs(c);
  f.accuracy_ *= std::abs(c);
  // Tail coefficients carry the scale themselves.
  for (auto& term : f.tail_.terms) term.first *= c;
  return f;
}

quad::PanelRule SampledFunction::quadrature_rule(int order, int split, int grading_levels) const {
  quad::PanelRule rule;
  const quad::GaussRule& g = quad::gauss_legendre(order);
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    const double a = breaks_[i];
    const double b = breaks_[i + 1];
    if (i == 0 && a == 0.0) {
      rule.append_graded_panel(a, b, g, grading_levels);
      continue;
    }
    for (int s = 0; s < split; ++s) {
      rule.append_panel(a + (b - a) * s / split, a + (b - a) * (s + 1) / split, g);
    }
  }
  return rule;
}

std::vector<SampledFunction> bump_bank() {
  std::vector<SampledFunction> bank;
  for (double c : {1.0, 2.0, 4.0}) {
    for (double r : {0.4, 0.9}) bank.push_back(SampledFunction::bump(c, r * c));
  }
  return bank;
}

SampledFunction parse_function(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "bump") {
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw DomainError("expected bump:C,R");
    double c = 0.0;
    double r = 0.0;
    try {
      c = std::stod(rest.substr(0, comma));
      r = std::stod(rest.substr(comma + 1));
    } catch (const std::exception&) {
      throw DomainError("expected bump:C,R with numeric C and R");
    }
    return SampledFunction::bump(c, r);
  }
  if (kind == "gauss") {
    double nu = 0.0;
    try {
      nu = rest.empty() ? 0.0 : std::stod(rest);
    } catch (const std::exception&) {
      throw DomainError("expected gauss:NU");
    }
    return SampledFunction::from_rule(
        "gauss(" + rest + ")", [nu](double y) { return std::pow(y, nu + 0.5) * std::exp(-0.5 * y * y); }, 0.0,
        std::numeric_limits<double>::infinity(), nu + 0.5);
  }
  throw DomainError("unknown function spec '" + spec + "' (expected bump:C,R or gauss:NU)");
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw DomainError("grid needs at least one point");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

std::vector<double> logspace(double a, double b, int n) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("log grid needs positive ends");
  std::vector<double> v = linspace(std::log(a), std::log(b), n);
  for (double& x : v) x = std::exp(x);
  return v;
}

}  // namespace htp
