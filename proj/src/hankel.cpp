#include "htp/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "htp/error.hpp"
#include "htp/parallel.hpp"
#include "htp/quadrature.hpp"

namespace htp {
namespace {

using cplx = std::complex<double>;

bool near_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

// Shared fixed-order evaluators; construction scans for the asymptotic
// threshold, so repeated orders reuse one instance.
const BesselJFixedOrder& bessel_for(double nu) {
  static std::mutex mutex;
  static std::map<double, std::unique_ptr<BesselJFixedOrder>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[nu];
  if (!slot) slot = std::make_unique<BesselJFixedOrder>(nu);
  return *slot;
}

// Sum of w * f(y) * J(xy) sqrt(xy) over [lo, hi], split so that each
// 24-point sub-panel spans at most `phase` radians of the Bessel argument.
double segment_sum(const BesselJFixedOrder& j, const SampledFunction& f, double x, double lo, double hi,
                   double phase) {
  const quad::GaussRule& g = quad::gauss_legendre(24);
  const int pieces = std::max(1, static_cast<int>(std::ceil(x * (hi - lo) / phase)));
  double sum = 0.0;
  for (int p = 0; p < pieces; ++p) {
    const double a = lo + (hi - lo) * p / pieces;
    const double b = lo + (hi - lo) * (p + 1) / pieces;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 24; ++i) {
      const double y = mid + half * g.nodes[i];
      const double xy = x * y;
      s += g.weights[i] * f(y) * j(xy) * std::sqrt(xy);
    }
    sum += half * s;
  }
  return sum;
}

int grading_levels(double exponent) {
  // Innermost piece [0, b 2^-L] carries about 2^{-L(e+1)} of the panel mass.
  const double levels = 40.0 / std::max(exponent + 1.0, 0.25);
  return std::clamp(static_cast<int>(std::ceil(levels)), 4, 120);
}

double tail_contribution(double nu, const PowerTail& tail, double x) {
  double s = 0.0;
  for (const auto& [c, t] : tail.terms) {
    if (c == 0.0) continue;
    s += c * std::pow(x, t - 1.0) * bessel_power_tail(nu, t - 0.5, x * tail.edge);
  }
  return s;
}

double value_at_origin(double nu, const SampledFunction& f) {
  if (nu != -0.5) return 0.0;
  // J_{-1/2}(z) sqrt(z) -> sqrt(2/pi) as z -> 0.
  quad::PanelRule rule = f.quadrature_rule();
  std::vector<double> v;
  for (double y : rule.nodes) v.push_back(f(y));
  if (!f.tail().empty()) throw DomainError("H_{-1/2} f(0) needs an integrable f; tail present");
  return std::sqrt(2.0 / std::numbers::pi) * rule.sum(v);
}

// Hankel expansion coefficients a_k(nu).
std::vector<double> hankel_coefficients(double nu, int terms) {
  std::vector<double> a{1.0};
  const double mu = 4.0 * nu * nu;
  for (int k = 1; k <= terms; ++k) {
    a.push_back(a.back() * (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k));
    if (a.back() == 0.0) break;
  }
  return a;
}

// int_U^inf u^{-s} e^{iu} du for large U, by repeated integration by parts.
cplx oscillatory_power_tail(double s, double U) {
  cplx sum = 0.0;
  double term = 1.0;
  cplx phase = 1.0;  // (-i)^j
  double prev = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 200; ++j) {
    if (j > 0) {
      term *= (s + j - 1.0) / U;
      phase *= cplx(0.0, -1.0);
    }
    if (std::abs(term) > prev) break;  // asymptotic series started to diverge
    sum += phase * term;
    prev = std::abs(term);
    if (std::abs(term) < 1e-18) break;
  }
  return cplx(0.0, 1.0) * std::exp(cplx(0.0, U)) * std::pow(U, -s) * sum;
}

double asymptotic_power_tail(double nu, double b, double U) {
  const std::vector<double> a = hankel_coefficients(nu, 40);
  const double phi = (0.5 * nu + 0.25) * std::numbers::pi;
  cplx sum = 0.0;
  cplx ik = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (k > 0) ik *= cplx(0.0, 1.0);
    const double size = std::abs(a[k]) * std::pow(U, -static_cast<double>(k));
    sum += ik * a[k] * oscillatory_power_tail(b + 0.5 + k, U);
    if (a[k] == 0.0 || (k > 0 && size < 1e-17)) break;
  }
  return std::sqrt(2.0 / std::numbers::pi) * std::real(std::exp(cplx(0.0, -phi)) * sum);
}

double numeric_bessel_power(const BesselJFixedOrder& j, double b, double lo, double hi) {
  const quad::GaussRule& g = quad::gauss_legendre(24);
  double sum = 0.0;
  auto panel = [&](double a, double c) {
    const double mid = 0.5 * (a + c);
    const double half = 0.5 * (c - a);
    double s = 0.0;
    for (int i = 0; i < 24; ++i) {
      const double u = mid + half * g.nodes[i];
      s += g.weights[i] * std::pow(u, -b) * j(u);
    }
    sum += half * s;
  };
  if (lo == 0.0) {
    // Graded towards the origin, where the integrand is u^{nu-b} times a smooth factor.
    const double first = std::min(hi, 4.0);
    const int levels = near_integer(j.order() - b) && j.order() - b >= 0.0 ? 0 : grading_levels(j.order() - b);
    double edge = first * std::ldexp(1.0, -levels);
    panel(0.0, edge);
    for (int l = levels; l > 0; --l) {
      const double next = first * std::ldexp(1.0, -(l - 1));
      panel(edge, next);
      edge = next;
    }
    lo = first;
  }
  if (hi > lo) {
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / 6.0)));
    for (int p = 0; p < pieces; ++p) panel(lo + (hi - lo) * p / pieces, lo + (hi - lo) * (p + 1) / pieces);
  }
  return sum;
}

// Power-law least squares on the given nodes: basis (x/x_ref)^{-t_j}.
bool fit_power_tail(const std::vector<double>& xs, const std::vector<double>& vs, const std::vector<double>& ts,
                    double tol, PowerTail& out) {
  const int n = static_cast<int>(ts.size());
  if (n == 0 || xs.size() < static_cast<std::size_t>(3 * n)) return false;
  const double ref = xs.back();
  std::vector<double> ata(n * n, 0.0);
  std::vector<double> atb(n, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<double> row(n);
    for (int k = 0; k < n; ++k) row[k] = std::pow(xs[i] / ref, -ts[k]);
    for (int r = 0; r < n; ++r) {
      atb[r] += row[r] * vs[i];
      for (int c = 0; c < n; ++c) ata[r * n + c] += row[r] * row[c];
    }
  }
  // Gaussian elimination with partial pivoting on the small normal system.
  std::vector<double> coef = atb;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(ata[r * n + col]) > std::abs(ata[piv * n + col])) piv = r;
    }
    if (ata[piv * n + col] == 0.0) return false;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(ata[piv * n + c], ata[col * n + c]);
      std::swap(coef[piv], coef[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double m = ata[r * n + col] / ata[col * n + col];
      for (int c = col; c < n; ++c) ata[r * n + c] -= m * ata[col * n + c];
      coef[r] -= m * coef[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    for (int c = r + 1; c < n; ++c) coef[r] -= ata[r * n + c] * coef[c];
    coef[r] /= ata[r * n + r];
  }
  double resid = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double v = 0.0;
    for (int k = 0; k < n; ++k) v += coef[k] * std::pow(xs[i] / ref, -ts[k]);
    resid = std::max(resid, std::abs(v - vs[i]));
  }
  if (!(resid <= tol)) return false;
  out.terms.clear();
  for (int k = 0; k < n; ++k) out.terms.emplace_back(coef[k] * std::pow(ref, ts[k]), ts[k]);
  return true;
}

// Powers x^-t that H_nu f can contain at infinity: y^s near the origin
// contributes x^{-(s+1)} times 2^{s+1/2} Gamma((nu+s+3/2)/2) / Gamma((nu-s+1/2)/2),
// so powers where the reciprocal gamma vanishes are left out.
std::vector<double> tail_exponents(double nu, const std::vector<OriginTerm>& origin, int count) {
  std::vector<double> ts;
  for (const OriginTerm& o : origin) {
    const int reach = o.step == 0 ? 1 : 4 * count;
    for (int j = 0; j < reach; ++j) {
      const double s = o.exponent + j * o.step;
      if (recip_gamma(0.5 * (nu - s + 0.5)) != 0.0) ts.push_back(s + 1.0);
    }
  }
  std::sort(ts.begin(), ts.end());
  std::vector<double> out;
  for (double t : ts) {
    if (out.empty() || t - out.back() > 1e-9) out.push_back(t);
    if (static_cast<int>(out.size()) == count) break;
  }
  return out;
}

// Origin series of H_nu f: x^{nu+1/2} times an even series from the body of
// f, plus a single power x^{t-1} for each tail term y^-t.
std::vector<OriginTerm> transform_origin_terms(double nu, const SampledFunction& f) {
  std::vector<OriginTerm> out{{nu + 0.5, 2}};
  for (const auto& [c, t] : f.tail().terms) {
    if (c != 0.0) out.push_back({t - 1.0, 0});
  }
  return out;
}

// Highest abscissa where |f| still exceeds rel * sup; sets the oscillation
// scale of the transform.
double effective_extent(const SampledFunction& f, double rel) {
  const auto& br = f.breakpoints();
  const double cut = rel * std::max(f.sup_norm(), 1e-300);
  for (std::size_t i = br.size() - 1; i > 0; --i) {
    for (int k = 0; k <= 8; ++k) {
      const double y = br[i - 1] + (br[i] - br[i - 1]) * k / 8.0;
      if (std::abs(f(y)) > cut) return br[i];
    }
  }
  return br.back();
}

// f's panels, with the first one split geometrically towards 0 when the
// integrand y^{e + nu + 1/2} is not smooth there.
std::vector<std::pair<double, double>> base_segments(const SampledFunction& f, double nu) {
  const auto& br = f.breakpoints();
  const double exponent = f.origin_exponent() + nu + 0.5;
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double a = br[i];
    const double b = br[i + 1];
    if (i == 0 && a == 0.0 && !(near_integer(exponent) && exponent >= 0.0)) {
      const int levels = grading_levels(exponent);
      double edge = b * std::ldexp(1.0, -levels);
      out.emplace_back(0.0, edge);
      for (int l = levels; l > 0; --l) {
        const double next = b * std::ldexp(1.0, -(l - 1));
        out.emplace_back(edge, next);
        edge = next;
      }
      continue;
    }
    out.emplace_back(a, b);
  }
  return out;
}

}  // namespace

double hankel_point(const BesselJFixedOrder& j, const SampledFunction& f, double x, const HankelOptions& opts) {
  const double nu = j.order();
  if (x < 0.0) throw DomainError("Hankel transform evaluated at negative x");
  if (x == 0.0) return value_at_origin(nu, f);
  double sum = 0.0;
  for (const auto& [a, b] : base_segments(f, nu)) sum += segment_sum(j, f, x, a, b, opts.phase_per_panel);
  if (!f.tail().empty()) sum += tail_contribution(nu, f.tail(), x);
  return sum;
}

namespace {

// Gauss nodes of f's panels, refined in dyadic levels: level L serves every
// x <= 2^L and stores y_i and w_i f(y_i) sqrt(y_i), so evaluating the
// transform costs only Bessel calls. Levels are built before the parallel
// sweep and then only read.
class TransformPlan {
 public:
  TransformPlan(const BesselJFixedOrder& j, const SampledFunction& f, const HankelOptions& opts)
      : j_(j), f_(f), opts_(opts), segments_(base_segments(f, j.order())) {}

  void prepare(std::span<const double> xs) {
    double top = 0.0;
    for (double x : xs) top = std::max(top, x);
    const int need = level_for(top);
    while (static_cast<int>(levels_.size()) <= need) {
      if (!add_level()) break;
    }
  }

  double operator()(double x) const {
    if (x < 0.0) throw DomainError("Hankel transform evaluated at negative x");
    if (x == 0.0) return value_at_origin(j_.order(), f_);
    const int level = level_for(x);
    if (level >= static_cast<int>(levels_.size())) return hankel_point(j_, f_, x, opts_);
    const Level& lv = levels_[level];
    double sum = 0.0;
    for (std::size_t i = 0; i < lv.y.size(); ++i) sum += lv.a[i] * j_(x * lv.y[i]);
    sum *= std::sqrt(x);
    if (!f_.tail().empty()) sum += tail_contribution(j_.order(), f_.tail(), x);
    return sum;
  }

 private:
  struct Level {
    std::vector<double> y;
    std::vector<double> a;
  };
  static constexpr std::size_t kMaxNodes = 4000000;

  int level_for(double x) const { return x <= 1.0 ? 0 : static_cast<int>(std::ceil(std::log2(x))); }

  bool add_level() {
    const double x = std::ldexp(1.0, static_cast<int>(levels_.size()));
    const quad::GaussRule& g = quad::gauss_legendre(24);
    std::size_t count = 0;
    std::vector<int> pieces;
    for (const auto& [lo, hi] : segments_) {
      pieces.push_back(std::max(1, static_cast<int>(std::ceil(x * (hi - lo) / opts_.phase_per_panel))));
      count += 24 * static_cast<std::size_t>(pieces.back());
    }
    if (count > kMaxNodes) return false;
    Level lv;
    lv.y.reserve(count);
    std::vector<double> w;
    w.reserve(count);
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      const auto [lo, hi] = segments_[s];
      for (int p = 0; p < pieces[s]; ++p) {
        const double a = lo + (hi - lo) * p / pieces[s];
        const double b = lo + (hi - lo) * (p + 1) / pieces[s];
        for (int i = 0; i < 24; ++i) {
          lv.y.push_back(0.5 * (a + b) + 0.5 * (b - a) * g.nodes[i]);
          w.push_back(0.5 * (b - a) * g.weights[i]);
        }
      }
    }
    lv.a.resize(count);
    parallel_for(count, [&](std::size_t i) { lv.a[i] = w[i] * f_(lv.y[i]) * std::sqrt(lv.y[i]); });
    levels_.push_back(std::move(lv));
    return true;
  }

  const BesselJFixedOrder& j_;
  const SampledFunction& f_;
  HankelOptions opts_;
  std::vector<std::pair<double, double>> segments_;
  std::vector<Level> levels_;
};

}  // namespace

std::vector<double> hankel_transform(double nu, const SampledFunction& f, std::span<const double> x,
                                     const HankelOptions& opts) {
  TransformPlan plan(bessel_for(nu), f, opts);
  plan.prepare(x);
  std::vector<double> out(x.size());
  parallel_for(x.size(), [&](std::size_t i) { out[i] = plan(x[i]); });
  return out;
}

std::vector<double> hankel_transform_reference(double nu, const SampledFunction& f, std::span<const double> x,
                                               double tol) {
  if (!(nu >= -0.5)) throw DomainError("Hankel order must be >= -1/2");
  std::vector<double> out(x.size());
  const auto& br = f.breakpoints();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) {
      out[i] = value_at_origin(nu, f);
      continue;
    }
    quad::Integrand g = [&](double y) {
      const double xy = xi * y;
      return xy == 0.0 ? 0.0 : f(y) * bessel_j(nu, xy) * std::sqrt(xy);
    };
    quad::QuadOptions o;
    o.abs_tol = tol;
    double v = 0.0;
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
      const double a = br[p];
      const double b = br[p + 1];
      // Split long panels so the local error estimate sees the oscillation.
      const int pieces = std::max(1, static_cast<int>(std::ceil(xi * (b - a) / 20.0)));
      for (int k = 0; k < pieces; ++k) {
        const double lo = a + (b - a) * k / pieces;
        const double hi = a + (b - a) * (k + 1) / pieces;
        v += quad::integrate(g, lo, hi, o).value;
      }
    }
    if (!f.tail().empty()) v += tail_contribution(nu, f.tail(), xi);
    out[i] = v;
  }
  return out;
}

double bessel_power_tail(double nu, double b, double U) {
  if (!(b > -0.5)) throw DomainError("bessel_power_tail needs b > -1/2 for convergence");
  if (!(U > 0.0)) throw DomainError("bessel_power_tail needs U > 0");
  const BesselJFixedOrder& j = bessel_for(nu);
  const double ua = std::max(40.0, 1.5 * j.asymptotic_threshold());
  if (U >= ua) return asymptotic_power_tail(nu, b, U);
  const bool total_known = nu - b > -1.0;
  if (total_known && U < ua - U) {
    // Whole-line value minus the initial stretch.
    const double total = std::pow(2.0, -b) * std::exp(log_gamma(0.5 * (nu - b + 1.0))) *
                         recip_gamma(0.5 * (nu + b + 1.0));
    return total - numeric_bessel_power(j, b, 0.0, U);
  }
  return numeric_bessel_power(j, b, U, ua) + asymptotic_power_tail(nu, b, ua);
}

double l2_norm(const SampledFunction& f) {
  quad::PanelRule rule = f.quadrature_rule(24, 2);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = f(rule.nodes[i]);
    s += rule.weights[i] * v * v;
  }
  const PowerTail& t = f.tail();
  for (const auto& [ci, ti] : t.terms) {
    for (const auto& [cj, tj] : t.terms) {
      if (ti + tj <= 1.0) throw DomainError("tail not square integrable");
      s += ci * cj * std::pow(t.edge, 1.0 - ti - tj) / (ti + tj - 1.0);
    }
  }
  return std::sqrt(std::max(s, 0.0));
}

SampledFunction tabulate_transform(double nu, const SampledFunction& f, const HankelOptions& opts) {
  if (!(nu >= -0.5)) throw DomainError("Hankel order must be >= -1/2");
  const double scale = l2_norm(f);
  std::ostringstream name;
  name << "H_" << nu << "[" << f.name() << "]";
  if (scale == 0.0) {
    ChebTable zero = ChebTable::build([](std::span<const double>, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
    }, std::vector<double>{0.0, opts.first_window}, {});
    return SampledFunction::from_table(name.str(), std::move(zero));
  }
  const BesselJFixedOrder& j = bessel_for(nu);
  const std::vector<OriginTerm> origin_out = transform_origin_terms(nu, f);
  double e_out = nu + 0.5;
  for (const OriginTerm& o : origin_out) e_out = std::min(e_out, o.exponent);
  const std::vector<double> t_out = tail_exponents(nu, f.origin_terms(), opts.tail_terms);

  const double y_eff = std::max(effective_extent(f, 1e-2), 1e-3);
  const double w0 = 4.0 * std::numbers::pi / y_eff;

  TransformPlan plan(j, f, opts);
  BatchEval eval = [&](std::span<const double> xs, std::span<double> out) {
    plan.prepare(xs);
    parallel_for(xs.size(), [&](std::size_t i) { out[i] = plan(xs[i]); });
  };
  // Errors in tabulated input show up in the transform as broad-band ripple,
  // bounded through Plancherel by error * sqrt(extent); asking for more only
  // resolves that ripple.
  const double input_noise = f.accuracy() * std::sqrt(std::max(1.0, f.finite_hi()));
  const double fit_tol = std::max(opts.tail_fit_tol * scale, input_noise);
  const double trunc_tol = std::max(opts.truncation_tol * scale, input_noise);
  ChebBuildOptions co;
  co.abs_tol = std::max(opts.abs_tol * scale, input_noise);
  co.origin_exponent = e_out;

  ChebTable table;
  double lo = 0.0;
  double hi = opts.first_window;
  double prev_lo = 0.0;
  for (;;) {
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / w0)));
    std::vector<double> breaks;
    for (int i = 0; i <= n; ++i) breaks.push_back(lo + (hi - lo) * i / n);
    ChebTable window = ChebTable::build(eval, breaks, co);
    table.append(window);
    if (lo > 0.0) {
      const double env = window.max_abs_on(lo, hi);
      if (env <= trunc_tol) {
        SampledFunction out = SampledFunction::from_table(name.str(), std::move(table));
        out.set_accuracy(co.abs_tol + env);
        out.set_origin_terms(origin_out);
        return out;
      }
      if (!t_out.empty()) {
        std::vector<double> xs;
        std::vector<double> vs;
        const auto& cn = cheb_nodes();
        for (std::size_t p = 0; p < table.panels().size(); ++p) {
          const ChebPanel& pan = table.panels()[p];
          if (pan.lo < prev_lo) continue;
          const auto vals = table.panel_values(p);
          for (int k = 0; k < kChebNodes; ++k) {
            xs.push_back(0.5 * (pan.lo + pan.hi) + 0.5 * (pan.hi - pan.lo) * cn[k]);
            vs.push_back(vals[k]);
          }
        }
        PowerTail tail;
        if (fit_power_tail(xs, vs, t_out, fit_tol, tail)) {
          SampledFunction out = SampledFunction::from_table(name.str(), std::move(table), std::move(tail));
          out.set_accuracy(co.abs_tol + fit_tol);
          out.set_origin_terms(origin_out);
          return out;
        }
      }
    }
    if (hi >= opts.max_extent) {
      std::ostringstream msg;
      msg << "tabulated transform " << name.str() << " neither decayed nor reached a power law by s = " << hi;
      throw ConvergenceError(msg.str(), 0.0, window.max_abs_on(lo, hi));
    }
    prev_lo = lo;
    lo = hi;
    hi = std::min(hi * opts.window_growth, opts.max_extent);
  }
}

double plancherel_defect(double nu, const SampledFunction& f, const HankelOptions& opts) {
  const double nf = l2_norm(f);
  if (nf == 0.0) throw DomainError("Plancherel defect undefined for the zero function");
  const SampledFunction g = tabulate_transform(nu, f, opts);
  return std::abs(l2_norm(g) - nf) / nf;
}

MultiplierSpec make_multiplier(const std::string& name) {
  MultiplierSpec m;
  m.name = name;
  if (name == "one") {
    m.fn = [](double) { return 1.0; };
    m.expansion = {{1.0, 0.0}};
    return m;
  }
  if (name == "zero") {
    m.fn = [](double) { return 0.0; };
    m.sup = 0.0;
    return m;
  }
  if (name == "resolvent") {
    m.fn = [](double s) { return 1.0 / (1.0 + s * s); };
    m.expansion = {{1.0, 2.0}, {-1.0, 4.0}, {1.0, 6.0}, {-1.0, 8.0}, {1.0, 10.0}};
    return m;
  }
  if (name == "chi" || name.rfind("chi:", 0) == 0) {
    double a = 1.0;
    double b = 2.0;
    if (name != "chi") {
      const std::string rest = name.substr(4);
      const auto comma = rest.find(',');
      try {
        if (comma == std::string::npos) throw std::invalid_argument("comma");
        a = std::stod(rest.substr(0, comma));
        b = std::stod(rest.substr(comma + 1));
      } catch (const std::exception&) {
        throw DomainError("expected chi:A,B");
      }
      if (!(0.0 <= a && a < b)) throw DomainError("chi:A,B needs 0 <= A < B");
    }
    m.fn = [a, b](double s) { return (s >= a && s <= b) ? 1.0 : 0.0; };
    m.breakpoints = {a, b};
    m.support_start = a;
    m.support_end = b;
    m.jumps = true;
    return m;
  }
  throw DomainError("unknown multiplier '" + name + "' (one, zero, chi, chi:A,B, resolvent)");
}

SampledFunction multiply_spectrum(const MultiplierSpec& m, const SampledFunction& g) {
  std::vector<double> breaks = g.breakpoints();
  for (double p : m.breakpoints) {
    if (p > breaks.front() && p < breaks.back()) breaks.push_back(p);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (m.support_start > breaks.front()) {
    if (m.support_start >= breaks.back()) throw DomainError("multiplier support lies beyond the tabulated spectrum");
    breaks.erase(breaks.begin(), std::upper_bound(breaks.begin(), breaks.end(), m.support_start));
    breaks.insert(breaks.begin(), m.support_start);
  }
  PowerTail tail;
  if (m.support_end < breaks.back()) {
    while (breaks.size() > 2 && breaks[breaks.size() - 2] >= m.support_end) breaks.pop_back();
    breaks.back() = m.support_end;
  } else if (std::isfinite(m.support_end)) {
    if (m.support_end > breaks.back()) breaks.push_back(m.support_end);
  } else if (!g.tail().empty()) {
    std::map<double, double> terms;
    for (const auto& [c, t] : g.tail().terms) {
      for (const auto& [a, p] : m.expansion) terms[t + p] += c * a;
    }
    for (const auto& [t, c] : terms) {
      if (tail.terms.size() < 6) tail.terms.emplace_back(c, t);
    }
  }
  auto fn = m.fn;
  SampledFunction copy = g;
  SampledFunction out = SampledFunction::from_panels(
      m.name + "*" + g.name(), [fn, copy](double s) { return fn(s) * copy(s); }, std::move(breaks),
      g.origin_exponent(), std::move(tail), m.sup * g.sup_norm());
  // Library multipliers are even and smooth at 0 where they do not vanish
  // identically, so the origin series keeps its powers.
  if (out.support_lo() == 0.0) out.set_origin_terms(g.origin_terms());
  out.set_accuracy(g.accuracy() * m.sup);
  return out;
}

std::vector<double> multiplier_apply(double ell, const MultiplierSpec& m, const SampledFunction& f,
                                     std::span<const double> x, const HankelOptions& opts) {
  const SampledFunction spectrum = tabulate_transform(ell, f, opts);
  return hankel_transform(ell, multiply_spectrum(m, spectrum), x, opts);
}

SampledFunction tabulate_multiplier(double ell, const MultiplierSpec& m, const SampledFunction& f,
                                    const HankelOptions& opts) {
  if (m.jumps) {
    throw DomainError("multiplier '" + m.name + "' has jumps; its output decays like an oscillating 1/x and cannot be tabulated (evaluate it pointwise with multiplier_apply)");
  }
  const SampledFunction spectrum = tabulate_transform(ell, f, opts);
  return tabulate_transform(ell, multiply_spectrum(m, spectrum), opts);
}

}  // namespace htp
