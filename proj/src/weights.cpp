#include "htp/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "htp/error.hpp"
#include "htp/parallel.hpp"
#include "htp/quadrature.hpp"

namespace htp {

namespace {

std::string num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw DomainError("bad number '" + s + "' in " + what);
  return v;
}

std::vector<double> split_numbers(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::size_t end = comma == std::string::npos ? s.size() : comma;
    out.push_back(parse_number(s.substr(start, end - start), what));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// int_lo^hi v(x) dx after x = e^t, which makes power laws smooth however
// long the interval is in ratio terms.
double log_integral(const std::function<double(double)>& v, double lo, double hi,
                    const std::vector<double>& kinks) {
  std::vector<double> pts{std::log(lo)};
  for (double k : kinks) {
    if (k > lo && k < hi) pts.push_back(std::log(k));
  }
  pts.push_back(std::log(hi));
  quad::QuadOptions q;
  q.abs_tol = 0.0;
  q.rel_tol = 1e-12;
  q.max_evaluations = 400000;
  auto g = [&v](double t) {
    const double x = std::exp(t);
    return v(x) * x;
  };
  return quad::integrate(quad::Integrand(g), pts, q).value;
}

}  // namespace

WeightSpec WeightSpec::power(double delta, double p) { return piecewise_power(delta, delta, 1.0, p); }

WeightSpec WeightSpec::piecewise_power(double inner, double outer, double knee, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("weight exponent p must lie in (1, inf)");
  if (!std::isfinite(inner) || !std::isfinite(outer) || !(knee > 0.0)) throw DomainError("bad power weight");
  WeightSpec w;
  w.form_ = inner == outer ? Form::power : Form::piecewise_power;
  w.p_ = p;
  w.inner_ = inner;
  w.outer_ = outer;
  w.knee_ = inner == outer ? 1.0 : knee;
  return w;
}

WeightSpec WeightSpec::tabulated(std::vector<double> x, std::vector<double> u, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("weight exponent p must lie in (1, inf)");
  if (x.size() < 2 || x.size() != u.size()) throw DomainError("tabulated weight needs matching grids of size >= 2");
  WeightSpec w;
  w.form_ = Form::tabulated;
  w.p_ = p;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(u[i] > 0.0)) throw DomainError("tabulated weight needs positive x and u");
    if (i > 0 && !(x[i] > x[i - 1])) throw DomainError("tabulated weight grid must ascend");
    w.log_x_.push_back(std::log(x[i]));
    w.log_u_.push_back(std::log(u[i]));
  }
  const std::size_t n = x.size();
  w.inner_ = (w.log_u_[1] - w.log_u_[0]) / (w.log_x_[1] - w.log_x_[0]);
  w.outer_ = (w.log_u_[n - 1] - w.log_u_[n - 2]) / (w.log_x_[n - 1] - w.log_x_[n - 2]);
  return w;
}

double WeightSpec::operator()(double x) const {
  if (!(x > 0.0)) return form_ == Form::power && inner_ == 0.0 ? 1.0 : (inner_ > 0.0 ? 0.0 : INFINITY);
  switch (form_) {
    case Form::power:
      return inner_ == 0.0 ? 1.0 : std::pow(x, inner_);
    case Form::piecewise_power:
      return x < knee_ ? std::pow(x, inner_) : std::pow(knee_, inner_ - outer_) * std::pow(x, outer_);
    case Form::tabulated: {
      const double lx = std::log(x);
      const std::size_t n = log_x_.size();
      if (lx <= log_x_.front()) return std::exp(log_u_.front() + inner_ * (lx - log_x_.front()));
      if (lx >= log_x_.back()) return std::exp(log_u_.back() + outer_ * (lx - log_x_.back()));
      const std::size_t i = static_cast<std::size_t>(std::upper_bound(log_x_.begin(), log_x_.end(), lx) - log_x_.begin());
      const std::size_t j = std::min(i, n - 1);
      const double t = (lx - log_x_[j - 1]) / (log_x_[j] - log_x_[j - 1]);
      return std::exp(log_u_[j - 1] + t * (log_u_[j] - log_u_[j - 1]));
    }
  }
  return 0.0;
}

double WeightSpec::exponent_at_zero() const { return inner_; }
double WeightSpec::exponent_at_infinity() const { return outer_; }

std::vector<double> WeightSpec::breakpoints() const {
  if (form_ == Form::piecewise_power) return {knee_};
  std::vector<double> out;
  for (double l : log_x_) out.push_back(std::exp(l));
  return out;
}

std::string WeightSpec::label() const {
  switch (form_) {
    case Form::power:
      return inner_ == 0.0 ? "one" : "pow:" + num(inner_);
    case Form::piecewise_power:
      if (outer_ == 0.0 && knee_ == 1.0) return "minpow:" + num(inner_);
      return "pw:" + num(inner_) + "," + num(outer_) + "," + num(knee_);
    case Form::tabulated:
      return "tabulated";
  }
  return "";
}

WeightSpec WeightSpec::with_p(double p) const {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("weight exponent p must lie in (1, inf)");
  WeightSpec w = *this;
  w.p_ = p;
  return w;
}

WeightSpec parse_weight(const std::string& spec, double p) {
  if (spec == "one") return WeightSpec::power(0.0, p);
  auto body = [&](const std::string& prefix) { return spec.substr(prefix.size()); };
  if (spec.rfind("pow:", 0) == 0) return WeightSpec::power(parse_number(body("pow:"), spec), p);
  if (spec.rfind("minpow:", 0) == 0) return WeightSpec::piecewise_power(parse_number(body("minpow:"), spec), 0.0, 1.0, p);
  if (spec.rfind("pw:", 0) == 0) {
    const auto v = split_numbers(body("pw:"), spec);
    if (v.size() != 3) throw DomainError("expected pw:D0,D1,KNEE");
    return WeightSpec::piecewise_power(v[0], v[1], v[2], p);
  }
  throw DomainError("unknown weight '" + spec + "' (one, pow:D, minpow:D, pw:D0,D1,KNEE)");
}

std::vector<WeightSpec> weight_bank(double p) {
  std::vector<WeightSpec> out;
  for (double d : {-0.5, -0.25, 0.0, 0.25, 0.5}) out.push_back(WeightSpec::power(d, p));
  out.push_back(WeightSpec::piecewise_power(0.5, 0.0, 1.0, p));
  return out;
}

IntervalFamily dyadic_family(int jmin, int jmax) {
  if (jmin > jmax) throw DomainError("dyadic family needs jmin <= jmax");
  if (jmin < -60 || jmax > 60) throw DomainError("dyadic family exponents limited to [-60, 60]");
  IntervalFamily f;
  for (int i = jmin; i <= jmax; ++i) {
    for (int j = i + 1; j <= jmax; ++j) f.intervals.push_back({std::ldexp(1.0, i), std::ldexp(1.0, j)});
    f.origin_right_ends.push_back(std::ldexp(1.0, i));
  }
  for (int e = 2; e <= 12; ++e) f.trend_epsilons.push_back(std::pow(10.0, -e));
  return f;
}

IntervalFamily parse_family(const std::string& spec) {
  if (spec.rfind("dyadic:", 0) != 0) throw DomainError("unknown interval family '" + spec + "' (dyadic:JMIN,JMAX)");
  const auto v = split_numbers(spec.substr(7), spec);
  if (v.size() != 2 || v[0] != std::round(v[0]) || v[1] != std::round(v[1])) {
    throw DomainError("expected dyadic:JMIN,JMAX with integers");
  }
  return dyadic_family(static_cast<int>(v[0]), static_cast<int>(v[1]));
}

namespace {

ApInterval ap_on(const WeightSpec& w, double lo, double hi) {
  const double p = w.p();
  const double dual_power = -1.0 / (p - 1.0);  // u^{-q/p}
  const auto kinks = w.breakpoints();
  const double len = hi - lo;
  ApInterval out;
  out.lo = lo;
  out.hi = hi;
  out.mean_u = log_integral([&w](double x) { return w(x); }, lo, hi, kinks) / len;
  const double dual = log_integral([&w, dual_power](double x) { return std::pow(w(x), dual_power); }, lo, hi, kinks);
  out.dual_mean = std::pow(dual / len, p - 1.0);
  out.value = out.mean_u * out.dual_mean;
  return out;
}

}  // namespace

ApResult ap_characteristic(const WeightSpec& w, const IntervalFamily& family, const ApOptions& opts) {
  if (!(family.epsilon > 0.0)) throw DomainError("origin intervals need epsilon > 0");
  std::vector<Interval> all = family.intervals;
  const std::size_t n_plain = all.size();
  for (double b : family.origin_right_ends) {
    if (b > family.epsilon) all.push_back({family.epsilon, b});
  }
  // Trend: every origin interval again at each epsilon.
  std::vector<Interval> trend_jobs;
  for (double e : family.trend_epsilons) {
    for (double b : family.origin_right_ends) {
      if (b > e) trend_jobs.push_back({e, b});
    }
  }
  std::vector<ApInterval> results(all.size() + trend_jobs.size());
  parallel_for(results.size(), [&](std::size_t i) {
    const Interval& iv = i < all.size() ? all[i] : trend_jobs[i - all.size()];
    results[i] = ap_on(w, iv.lo, iv.hi);
  });

  ApResult out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    ApInterval r = results[i];
    r.touches_origin = i >= n_plain;
    if (!std::isfinite(r.value)) {
      out.divergent = true;
      out.divergence_reason = "non-integrable weight on an interval";
    }
    out.characteristic = std::max(out.characteristic, r.value);
    out.intervals.push_back(r);
  }
  std::size_t at = all.size();
  for (double e : family.trend_epsilons) {
    ApTrendPoint t{e, 0.0};
    for (double b : family.origin_right_ends) {
      if (b > e) t.value = std::max(t.value, results[at++].value);
    }
    out.trend.push_back(t);
  }
  if (!out.divergent && out.characteristic > opts.ceiling) {
    out.divergent = true;
    out.divergence_reason = "expression above ceiling " + num(opts.ceiling);
  }
  const std::size_t nt = out.trend.size();
  if (!out.divergent && nt >= 4) {
    bool growing = true;
    for (std::size_t i = nt - 3; i < nt; ++i) {
      const double ratio = out.trend[i].value / out.trend[i - 1].value;
      const double decades = std::log10(out.trend[i - 1].epsilon / out.trend[i].epsilon);
      if (!(ratio > std::pow(opts.trend_growth, decades))) growing = false;
    }
    if (growing) {
      out.divergent = true;
      out.divergence_reason = "expression grows geometrically as the left end approaches 0";
    }
  }
  return out;
}

namespace {

double tail_integral(const std::function<double(double)>& v, double edge, double exponent) {
  // int_edge^inf v(x) dx with x = edge / t; v ~ x^-exponent.
  if (!(exponent > 1.0)) throw DomainError("weighted norm diverges: tail decays too slowly");
  quad::QuadOptions q;
  q.abs_tol = 0.0;
  q.rel_tol = 1e-11;
  q.max_evaluations = 400000;
  q.left_exponent = exponent - 2.0;
  auto g = [&](double t) {
    if (t <= 0.0) return 0.0;
    return v(edge / t) * edge / (t * t);
  };
  return quad::integrate(quad::Integrand(g), 0.0, 1.0, q).value;
}

double finite_integral(const std::function<double(double)>& v, std::vector<double> breaks, double origin_power,
                       const WeightSpec& w) {
  if (breaks.size() < 2) return 0.0;
  for (double k : w.breakpoints()) {
    if (k > breaks.front() && k < breaks.back()) breaks.push_back(k);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  // A coarse Gauss pass sets the absolute target for the adaptive pass.
  const auto& rule = quad::gauss_legendre(24);
  double rough = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
    const double half = 0.5 * (breaks[i + 1] - breaks[i]);
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) rough += rule.weights[j] * half * v(mid + half * rule.nodes[j]);
  }
  quad::QuadOptions q;
  q.abs_tol = 1e-12 * std::abs(rough);
  q.rel_tol = 1e-11;
  q.max_evaluations = 2000000;
  if (breaks.front() == 0.0) q.left_exponent = origin_power;
  if (q.abs_tol == 0.0 && rough == 0.0) return 0.0;
  return quad::integrate(quad::Integrand(v), breaks, q).value;
}

}  // namespace

double weighted_lp_norm(const std::function<double(double)>& g, const std::vector<double>& breaks,
                        double origin_exponent, double tail_exponent, const WeightSpec& w) {
  const double p = w.p();
  auto v = [&](double x) { return std::pow(std::abs(g(x)), p) * w(x); };
  double total = finite_integral(v, breaks, p * origin_exponent + w.exponent_at_zero(), w);
  if (tail_exponent > 0.0 && !breaks.empty()) {
    total += tail_integral(v, breaks.back(), p * tail_exponent - w.exponent_at_infinity());
  }
  return std::pow(total, 1.0 / p);
}

double weighted_lp_norm(const SampledFunction& f, const WeightSpec& w) {
  const double tail = f.tail().empty() ? 0.0 : f.tail().leading_exponent();
  return weighted_lp_norm([&f](double x) { return f(x); }, f.breakpoints(), f.origin_exponent(), tail, w);
}

}  // namespace htp
