#include "htp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>

#include "htp/error.hpp"
#include "htp/parallel.hpp"

namespace htp {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void finish_max(BoundReport& r) {
  r.max_ratio = 0.0;
  for (const auto& row : r.rows) {
    if (std::isnan(row.ratio)) {
      r.max_ratio = row.ratio;
      return;
    }
    r.max_ratio = std::max(r.max_ratio, row.ratio);
  }
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void check_pair(double a, double b) {
  if (!(a >= -0.5) || !(b >= -0.5)) throw DomainError("a and b must be >= -1/2");
  if (a == b) throw DomainError("a and b must differ");
}

std::string options_key(const HankelOptions& o) {
  return fmt(o.abs_tol) + "," + fmt(o.truncation_tol) + "," + fmt(o.tail_fit_tol) + "," +
         std::to_string(o.tail_terms) + "," + fmt(o.first_window) + "," + fmt(o.window_growth) + "," +
         fmt(o.max_extent) + "," + fmt(o.phase_per_panel);
}

// H_beta(H_alpha f) tables are reused by the norm and square-function scans.
struct TransplantCache {
  std::mutex guard;
  std::map<std::string, std::shared_ptr<const SampledFunction>> tables;
};

TransplantCache& cache() {
  static TransplantCache c;
  return c;
}

// Names do not change under scaling, so the key also samples the function.
std::string function_key(const SampledFunction& f) {
  const double mid = 0.5 * (f.support_lo() + f.finite_hi());
  return f.name() + "@" + fmt(f.sup_norm()) + "," + fmt(f(mid)) + "," + std::to_string(f.breakpoints().size());
}

std::shared_ptr<const SampledFunction> transplanted(const TransplantParams& p, const SampledFunction& f,
                                                    const HankelOptions& o) {
  p.validate();
  const std::string key = fmt(p.alpha()) + "|" + fmt(p.beta()) + "|" + function_key(f) + "|" + options_key(o);
  {
    std::lock_guard lock(cache().guard);
    auto it = cache().tables.find(key);
    if (it != cache().tables.end()) return it->second;
  }
  auto table = std::make_shared<const SampledFunction>(
      tabulate_transform(p.beta(), tabulate_transform(p.alpha(), f, o), o));
  std::lock_guard lock(cache().guard);
  return cache().tables.emplace(key, table).first->second;
}

struct Profile {
  std::vector<double> breaks;
  double origin_exponent = INFINITY;
  double tail_exponent = 0.0;
};

// Union of the panels of several functions, for integrating a pointwise
// combination of them.
Profile merged_profile(const std::vector<const SampledFunction*>& fs) {
  Profile p;
  std::set<double> pts;
  double tail = INFINITY;
  bool any_tail = false;
  for (const SampledFunction* f : fs) {
    for (double b : f->breakpoints()) pts.insert(b);
    if (f->support_lo() == 0.0) p.origin_exponent = std::min(p.origin_exponent, f->origin_exponent());
    if (!f->tail().empty()) {
      any_tail = true;
      tail = std::min(tail, f->tail().leading_exponent());
    }
  }
  if (!std::isfinite(p.origin_exponent)) p.origin_exponent = 0.0;
  p.breaks.assign(pts.begin(), pts.end());
  p.tail_exponent = any_tail ? tail : 0.0;
  return p;
}

double square_function_norm(const std::vector<const SampledFunction*>& fs, const WeightSpec& w) {
  const Profile prof = merged_profile(fs);
  auto g = [&fs](double x) {
    double s = 0.0;
    for (const SampledFunction* f : fs) {
      const double v = (*f)(x);
      s += v * v;
    }
    return std::sqrt(s);
  };
  return weighted_lp_norm(g, prof.breaks, prof.origin_exponent, prof.tail_exponent, w);
}

void require_weight(const WeightSpec& w) {
  const ApResult ap = ap_characteristic(w);
  if (ap.divergent) {
    throw DomainError("weight " + w.label() + " is not A_p-finite for p = " + short_fmt(w.p()) + ": " +
                      ap.divergence_reason);
  }
}

}  // namespace

double uniformity(const std::vector<double>& v) {
  if (v.empty() || !(v.front() > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  double m = 0.0;
  for (double x : v) {
    if (std::isnan(x)) return x;
    m = std::max(m, x);
  }
  return m / v.front();
}

KernelGrid default_kernel_grid() {
  KernelGrid g;
  g.x = logspace(0.1, 10.0, 9);
  const auto t = logspace(0.01, 0.979, 40);
  g.ratios = t;
  for (auto it = t.rbegin(); it != t.rend(); ++it) g.ratios.push_back(1.0 / *it);
  return g;
}

namespace {

struct KernelPoint {
  double x;
  double y;
};

std::vector<KernelPoint> grid_points(const KernelGrid& g) {
  std::vector<KernelPoint> pts;
  for (double x : g.x) {
    for (double t : g.ratios) {
      const double y = t * x;
      if (std::abs(x - y) < g.band * std::max(x, y)) continue;
      pts.push_back({x, y});
    }
  }
  if (pts.empty()) throw DomainError("kernel grid is empty after the diagonal exclusion");
  return pts;
}

BoundReport cz_scan(double a, double b, int kmin, int kmax, const CzOptions& opts, bool smooth) {
  check_pair(a, b);
  if (!(std::abs(a - b) <= 1.0)) throw DomainError("kernel scans need 0 < |a-b| <= 1");
  if (kmin < 0 || kmax < kmin) throw DomainError("need 0 <= kmin <= kmax");
  if (kmax > 100) throw DomainError("kernel scans are capped at k <= 100");
  const auto pts = grid_points(opts.grid);
  const int nk = kmax - kmin + 1;
  std::vector<ReportRow> rows(static_cast<std::size_t>(nk));
  parallel_for(rows.size(), [&](std::size_t i) {
    const int k = kmin + static_cast<int>(i);
    const auto p = TransplantParams::shifted(a, b, k);
    ReportRow best;
    best.ratio = -1.0;
    for (const auto& [x, y] : pts) {
      const double gap = std::abs(x - y);
      const double v = smooth ? kernel_dx(p, x, y, opts.method) : kernel_eval(p, x, y, opts.method).value;
      const double bound = smooth ? 1.0 / (gap * gap) : 1.0 / gap;
      const double ratio = std::abs(v) / bound;
      if (ratio > best.ratio || std::isnan(ratio)) {
        best.axis = {static_cast<double>(k), x, y};
        best.measured = std::abs(v);
        best.bound = bound;
        best.ratio = ratio;
        if (std::isnan(ratio)) break;
      }
    }
    std::string note;
    if (branch_vanishes(p, KernelBranch::below_diagonal)) note = "zero-coefficient branch y<x";
    if (branch_vanishes(p, KernelBranch::above_diagonal)) note = "zero-coefficient branch x<y";
    best.item = p.label();
    best.note = note;
    rows[i] = best;
  });

  BoundReport r;
  r.operation = smooth ? "cz_smooth_scan" : "cz_size_scan";
  r.statement = smooth ? "uniform smoothness estimate |dK/dx| <= C2/(x-y)^2 for the shifted transplantation kernel"
                       : "uniform size estimate |K| <= C1/|x-y| for the shifted transplantation kernel";
  r.inputs = {{"a", fmt(a)},       {"b", fmt(b)},
              {"kmin", std::to_string(kmin)}, {"kmax", std::to_string(kmax)},
              {"method", to_string(opts.method)}, {"band", fmt(opts.grid.band)},
              {"grid_pairs", std::to_string(pts.size())}};
  r.axis_names = {"k", "x", "y"};
  r.rows = std::move(rows);
  finish_max(r);
  std::vector<double> per_k;
  for (const auto& row : r.rows) per_k.push_back(row.ratio);
  r.uniformity_ratio = uniformity(per_k);
  r.check = "uniformity_ratio <= " + short_fmt(opts.threshold);
  r.check_value = r.uniformity_ratio;
  r.threshold = opts.threshold;
  r.passed = r.uniformity_ratio <= opts.threshold;
  r.notes.push_back("rows hold the grid point attaining the sup of the ratio for each k");
  r.notes.push_back("excluded band |x-y| < " + short_fmt(opts.grid.band) + " max(x,y)");
  return r;
}

}  // namespace

BoundReport cz_size_scan(double a, double b, int kmin, int kmax, const CzOptions& opts) {
  return cz_scan(a, b, kmin, kmax, opts, false);
}

BoundReport cz_smooth_scan(double a, double b, int kmin, int kmax, const CzOptions& opts) {
  return cz_scan(a, b, kmin, kmax, opts, true);
}

void LemmaQuery::validate() const {
  if (!(gamma > -1.0)) throw DomainError("lemma needs gamma > -1");
  if (!(lambda > 0.0)) throw DomainError("lemma needs lambda > 0");
  if (!(c >= -0.5)) throw DomainError("lemma needs c >= -1/2");
  if (!(d > 0.0)) throw DomainError("lemma needs d > 0");
  if (!(B > 0.0) || !(B < A)) throw DomainError("lemma needs 0 < B < A");
}

double lemma_log_lhs(const LemmaQuery& q) {
  q.validate();
  // s^gamma (1-s)^{m-1} (A-Bs)^{-(m+lambda)} with m = d + c + 1/2.
  return log_euler_integral(q.gamma, q.d + q.c + 0.5, q.lambda, q.A, q.B, q.A - q.B);
}

double lemma_log_rhs(const LemmaQuery& q) {
  q.validate();
  return -q.lambda * std::log(q.d) - (q.c + 0.5) * std::log(q.A) - q.d * std::log(q.B) -
         q.lambda * std::log(q.A - q.B);
}

BoundReport lemma_bound_scan(const LemmaSweep& sweep) {
  std::vector<LemmaQuery> qs;
  for (double g : sweep.gammas) {
    for (double l : sweep.lambdas) {
      for (double c : sweep.cs) {
        for (double d : sweep.ds) {
          for (const auto& [A, B] : sweep.ABs) {
            LemmaQuery q{g, l, c, d, A, B};
            q.validate();
            qs.push_back(q);
          }
        }
      }
    }
  }
  if (qs.empty()) throw DomainError("empty lemma sweep");
  std::vector<ReportRow> rows(qs.size());
  parallel_for(qs.size(), [&](std::size_t i) {
    const LemmaQuery& q = qs[i];
    const double lhs = lemma_log_lhs(q);
    const double rhs = lemma_log_rhs(q);
    ReportRow row;
    row.axis = {q.gamma, q.lambda, q.c, q.d, q.A, q.B};
    row.measured = std::exp(lhs);
    row.bound = std::exp(rhs);
    row.ratio = std::exp(lhs - rhs);
    rows[i] = row;
  });

  BoundReport r;
  r.operation = "lemma_bound_scan";
  r.statement = "int_0^1 s^g (1-s)^(d+c-1/2) (A-Bs)^-(d+c+l+1/2) ds <= C(g,l) d^-l A^-(c+1/2) B^-d (A-B)^-l";
  r.axis_names = {"gamma", "lambda", "c", "d", "A", "B"};
  r.rows = std::move(rows);
  finish_max(r);
  const std::size_t group = sweep.cs.size() * sweep.ds.size() * sweep.ABs.size();
  double worst = 0.0;
  for (std::size_t start = 0; start < r.rows.size(); start += group) {
    std::vector<double> ratios;
    for (std::size_t i = start; i < start + group; ++i) ratios.push_back(r.rows[i].ratio);
    const double u = uniformity(ratios);
    const double c = *std::max_element(ratios.begin(), ratios.end());
    worst = std::isnan(u) ? u : std::max(worst, u);
    r.notes.push_back("gamma=" + short_fmt(r.rows[start].axis[0]) + " lambda=" + short_fmt(r.rows[start].axis[1]) +
                      ": empirical C=" + fmt(c) + " first=" + fmt(ratios.front()) + " uniformity=" + fmt(u));
  }
  r.uniformity_ratio = worst;
  r.inputs = {{"points", std::to_string(qs.size())}};
  r.check = "max over (gamma, lambda) of C / ratio at first point <= " + short_fmt(sweep.threshold);
  r.check_value = worst;
  r.threshold = sweep.threshold;
  r.passed = worst <= sweep.threshold && std::isfinite(r.max_ratio);
  return r;
}

HankelOptions NormOptions::scan_hankel_options() {
  HankelOptions o;
  o.abs_tol = 1e-8;
  o.truncation_tol = 1e-7;
  o.tail_fit_tol = 1e-8;
  return o;
}

BoundReport norm_scan(double a, double b, int kmin, int kmax, const WeightSpec& w, const NormOptions& opts) {
  check_pair(a, b);
  if (kmin < 0 || kmax < kmin) throw DomainError("need 0 <= kmin <= kmax");
  if (kmax > 20) throw DomainError("transform-based scans are capped at k <= 20");
  if (opts.bank.empty()) throw DomainError("empty function bank");
  require_weight(w);
  const std::size_t nb = opts.bank.size();
  const std::size_t nk = static_cast<std::size_t>(kmax - kmin + 1);
  std::vector<double> base(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    base[j] = weighted_lp_norm(opts.bank[j], w);
    if (!(base[j] > 0.0)) throw DomainError("bank function with zero weighted norm");
  }
  std::vector<ReportRow> rows(nk * nb);
  parallel_for(rows.size(), [&](std::size_t i) {
    const int k = kmin + static_cast<int>(i / nb);
    const std::size_t j = i % nb;
    const auto p = TransplantParams::shifted(a, b, k);
    const auto table = transplanted(p, opts.bank[j], opts.hankel);
    ReportRow row;
    row.axis = {static_cast<double>(k)};
    row.item = opts.bank[j].name();
    row.measured = weighted_lp_norm(*table, w);
    row.bound = base[j];
    row.ratio = row.measured / row.bound;
    rows[i] = row;
  });

  BoundReport r;
  r.operation = "norm_scan";
  r.statement = "||S_k^{a,b} f||_{L^p(u)} <= C ||f||_{L^p(u)} with C independent of k";
  r.inputs = {{"a", fmt(a)},
              {"b", fmt(b)},
              {"kmin", std::to_string(kmin)},
              {"kmax", std::to_string(kmax)},
              {"p", fmt(w.p())},
              {"weight", w.label()}};
  r.axis_names = {"k"};
  r.rows = std::move(rows);
  finish_max(r);
  std::vector<double> per_k(nk, 0.0);
  for (std::size_t i = 0; i < r.rows.size(); ++i) per_k[i / nb] = std::max(per_k[i / nb], r.rows[i].ratio);
  r.uniformity_ratio = uniformity(per_k);
  r.check = "uniformity_ratio <= " + short_fmt(opts.threshold);
  r.check_value = r.uniformity_ratio;
  r.threshold = opts.threshold;
  r.passed = r.uniformity_ratio <= opts.threshold;
  if (opts.max_ratio_limit > 0.0) {
    r.check += " and max_ratio <= " + short_fmt(opts.max_ratio_limit);
    r.passed = r.passed && r.max_ratio <= opts.max_ratio_limit;
  }
  if (a == -0.5 || b == -0.5) r.notes.push_back("order -1/2 lies on the boundary of the uniform bound's range a,b > -1/2");
  r.notes.push_back("per k the bound column is ||f||, the ratio is taken per bank member; uniformity uses the max over the bank");
  return r;
}

BoundReport vector_valued_scan(double a, double b, int kmax, const WeightSpec& w, const VectorOptions& opts) {
  check_pair(a, b);
  if (kmax < 0 || kmax > 12) throw DomainError("vector-valued families are truncated at K_max <= 12");
  if (opts.bank.empty()) throw DomainError("empty function bank");
  if (opts.draws < 0) throw DomainError("draws must be nonnegative");
  require_weight(w);
  const std::size_t nb = opts.bank.size();
  const std::size_t nk = static_cast<std::size_t>(kmax + 1);

  struct Family {
    std::string label;
    std::vector<std::size_t> entries;
    bool drawn;
  };
  std::vector<Family> families;
  for (std::size_t j = 0; j < nb; ++j) {
    families.push_back({"equal:" + opts.bank[j].name(), std::vector<std::size_t>(nk, j), false});
  }
  std::mt19937_64 rng(opts.seed);
  for (int d = 0; d < opts.draws; ++d) {
    Family f{"draw:" + std::to_string(d) + ":", {}, true};
    for (std::size_t k = 0; k < nk; ++k) {
      const std::size_t j = static_cast<std::size_t>(rng() % nb);
      f.entries.push_back(j);
      f.label += (k ? "," : "") + std::to_string(j);
    }
    families.push_back(f);
  }

  // Every (k, bank member) the families use, transplanted once.
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  {
    std::set<std::pair<std::size_t, std::size_t>> need;
    for (const auto& f : families) {
      for (std::size_t k = 0; k < nk; ++k) need.insert({k, f.entries[k]});
    }
    jobs.assign(need.begin(), need.end());
  }
  std::vector<std::shared_ptr<const SampledFunction>> tables(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto p = TransplantParams::shifted(a, b, static_cast<int>(jobs[i].first));
    tables[i] = transplanted(p, opts.bank[jobs[i].second], opts.hankel);
  });
  auto table_for = [&](std::size_t k, std::size_t j) {
    const auto it = std::lower_bound(jobs.begin(), jobs.end(), std::make_pair(k, j));
    return tables[static_cast<std::size_t>(it - jobs.begin())].get();
  };

  std::vector<ReportRow> rows(families.size());
  parallel_for(families.size(), [&](std::size_t i) {
    const Family& f = families[i];
    std::vector<const SampledFunction*> in;
    std::vector<const SampledFunction*> out;
    for (std::size_t k = 0; k < nk; ++k) {
      in.push_back(&opts.bank[f.entries[k]]);
      out.push_back(table_for(k, f.entries[k]));
    }
    ReportRow row;
    row.axis = {static_cast<double>(i)};
    row.item = f.label;
    row.measured = square_function_norm(out, w);
    row.bound = square_function_norm(in, w);
    row.ratio = row.measured / row.bound;
    row.note = f.drawn ? "drawn" : "equal entries";
    rows[i] = row;
  });

  BoundReport r;
  r.operation = "vector_valued_scan";
  r.statement = "||(sum_k |S_k^{a,b} f_k|^2)^{1/2}||_{L^p(u)} <= C ||(sum_k |f_k|^2)^{1/2}||_{L^p(u)}";
  r.inputs = {{"a", fmt(a)},
              {"b", fmt(b)},
              {"kmax", std::to_string(kmax)},
              {"p", fmt(w.p())},
              {"weight", w.label()},
              {"draws", std::to_string(opts.draws)},
              {"seed", std::to_string(opts.seed)}};
  r.axis_names = {"family"};
  r.rows = std::move(rows);
  finish_max(r);
  double lo = INFINITY;
  double hi = 0.0;
  bool finite = true;
  for (const auto& row : r.rows) {
    finite = finite && std::isfinite(row.ratio) && row.ratio > 0.0;
    if (row.note == "drawn") {
      lo = std::min(lo, row.ratio);
      hi = std::max(hi, row.ratio);
    }
  }
  const double spread = opts.draws > 0 ? hi / lo : 1.0;
  r.check = "all ratios finite and draw spread max/min <= " + short_fmt(opts.draw_spread);
  r.check_value = spread;
  r.threshold = opts.draw_spread;
  r.passed = finite && spread <= opts.draw_spread;
  if (opts.max_ratio_limit > 0.0) {
    r.check += " and max_ratio <= " + short_fmt(opts.max_ratio_limit);
    r.passed = r.passed && r.max_ratio <= opts.max_ratio_limit;
  }
  r.notes.push_back("truncated family: k = 0.." + std::to_string(kmax) + " of the infinite sum");
  r.notes.push_back("draw labels list the bank index used at each k");
  return r;
}

void TransferQuery::validate() const {
  if (n < 2) throw DomainError("transference needs n >= 2");
  if (d < 1) throw DomainError("transference needs d >= 1");
  if (k < 0) throw DomainError("transference needs k >= 0");
}

BoundReport transference_identity_check(const std::vector<TransferQuery>& queries, const SampledFunction& f,
                                        const CheckOptions& opts) {
  if (queries.empty()) throw DomainError("no transference queries");
  if (opts.x.empty()) throw DomainError("empty evaluation grid");
  BoundReport r;
  r.operation = "transference_identity_check";
  r.statement = "T_m at order L equals T_l^L o T_m at order l o T_L^l, l = k+(n-2)/2, L = k+(n+d-2)/2";
  r.axis_names = {"n", "d", "k"};
  const auto& o = opts.hankel;
  for (const TransferQuery& q : queries) {
    q.validate();
    const MultiplierSpec m = make_multiplier(q.multiplier);
    const double lo = q.low_order();
    const double hi = q.high_order();
    const std::vector<double> direct = multiplier_apply(hi, m, f, opts.x, o);
    // T_hi^lo f = H_lo H_hi f, then the low-order multiplier, then H_hi H_lo.
    const SampledFunction down = tabulate_transform(lo, tabulate_transform(hi, f, o), o);
    const SampledFunction mid = tabulate_multiplier(lo, m, down, o);
    const std::vector<double> chained = hankel_transform(hi, tabulate_transform(lo, mid, o), opts.x, o);
    ReportRow row;
    row.axis = {static_cast<double>(q.n), static_cast<double>(q.d), static_cast<double>(q.k)};
    row.item = q.multiplier;
    row.measured = sup_diff(direct, chained);
    row.bound = sup_abs(direct);
    if (row.bound == 0.0) {
      std::vector<double> fx(opts.x.size());
      f.evaluate(opts.x, fx);
      row.bound = sup_abs(fx);
      row.note = "left side vanishes; normalized by sup |f|";
    }
    row.ratio = row.measured / row.bound;
    r.rows.push_back(row);
  }
  r.inputs = {{"f", f.name()}, {"points", std::to_string(opts.x.size())}};
  finish_max(r);
  r.check = "max relative discrepancy <= " + short_fmt(opts.threshold);
  r.check_value = r.max_ratio;
  r.threshold = opts.threshold;
  r.passed = r.max_ratio <= opts.threshold;
  r.notes.push_back("discrepancy is max |difference| over max |left side| on the grid");
  return r;
}

BoundReport radial_fourier_check(const std::vector<int>& dims, double sigma, double threshold) {
  if (dims.empty()) throw DomainError("no dimensions given");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  const std::vector<double> xi = linspace(0.2, 4.0, 39);
  BoundReport r;
  r.operation = "radial_fourier_check";
  r.statement = "radial Fourier transform equals |xi|^{-(n-1)/2} H_{(n-2)/2}(g(s) s^{(n-1)/2})(|xi|)";
  r.axis_names = {"n", "sigma"};
  for (int n : dims) {
    if (n < 2) throw DomainError("radial check needs n >= 2");
    const double nu = 0.5 * (n - 2);
    const double half = 0.5 * (n - 1);
    for (double s : {1.0, sigma}) {
      const SampledFunction h = SampledFunction::from_rule(
          "gauss", [=](double y) { return std::exp(-0.5 * (y / s) * (y / s)) * std::pow(y, half); }, 0.0, INFINITY,
          half);
      const std::vector<double> t = hankel_transform(nu, h, xi);
      std::vector<double> got(xi.size());
      std::vector<double> want(xi.size());
      for (std::size_t i = 0; i < xi.size(); ++i) {
        got[i] = t[i] * std::pow(xi[i], -half);
        want[i] = std::pow(s, n) * std::exp(-0.5 * s * s * xi[i] * xi[i]);
      }
      ReportRow row;
      row.axis = {static_cast<double>(n), s};
      row.item = s == 1.0 ? "gaussian" : "dilated gaussian";
      row.measured = sup_diff(got, want);
      row.bound = sup_abs(want);
      row.ratio = row.measured / row.bound;
      r.rows.push_back(row);
    }
  }
  finish_max(r);
  r.inputs = {{"xi", "[0.2, 4], 39 points"}, {"convention", "unitary, (2 pi)^{-n/2} e^{-i x xi}"}};
  r.check = "max relative discrepancy <= " + short_fmt(threshold);
  r.check_value = r.max_ratio;
  r.threshold = threshold;
  r.passed = r.max_ratio <= threshold;
  r.notes.push_back("discrepancy is max |difference| over max |exact transform| on the grid");
  return r;
}

BoundReport composition_identity_check(double a, double b, int k, const SampledFunction& f, const CheckOptions& opts) {
  const auto factors = chain_decompose(a, b, k);
  const std::vector<double> chained = apply_chain(factors, f, opts.x, opts.hankel);
  const std::vector<double> direct = transplant_composition(TransplantParams::shifted(a, b, k), f, opts.x, opts.hankel);
  BoundReport r;
  r.operation = "composition_identity_check";
  r.statement = "S_k^{a,b} equals the composition of its unit-gap factors";
  r.axis_names = {"a", "b", "k"};
  ReportRow row;
  row.axis = {a, b, static_cast<double>(k)};
  row.item = f.name();
  row.measured = sup_diff(chained, direct);
  row.bound = sup_abs(direct);
  row.ratio = row.measured / row.bound;
  std::string chain;
  for (const auto& p : factors) chain += (chain.empty() ? "" : " then ") + short_fmt(p.a) + "->" + short_fmt(p.b);
  row.note = std::to_string(factors.size()) + " factor(s): " + chain;
  r.rows.push_back(row);
  finish_max(r);
  r.inputs = {{"f", f.name()}, {"points", std::to_string(opts.x.size())}};
  r.check = "max relative discrepancy <= " + short_fmt(opts.threshold);
  r.check_value = r.max_ratio;
  r.threshold = opts.threshold;
  r.passed = r.max_ratio <= opts.threshold;
  if (std::abs(b - a) == std::floor(std::abs(b - a))) r.notes.push_back("integer gap: degenerate final factor dropped");
  return r;
}

void clear_transplant_cache() {
  std::lock_guard lock(cache().guard);
  cache().tables.clear();
}

}  // namespace htp
