#include "htp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "htp/error.hpp"
#include "htp/hankel.hpp"
#include "htp/parallel.hpp"
#include "htp/report.hpp"
#include "htp/specfun.hpp"
#include "htp/transplant.hpp"
#include "htp/verify.hpp"
#include "htp/weights.hpp"

namespace htp::cli {

const char* const kVersion = HTP_VERSION;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw DomainError("config: " + key + " needs a number, got '" + v + "'");
  return d;
}

long long to_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw DomainError("config: " + key + " needs an integer, got '" + v + "'");
  return n;
}

std::string num(double v) { return format_number(v); }

std::vector<double> make_grid(const RunConfig& c) {
  return c.grid_spacing == "log" ? logspace(c.x_min, c.x_max, c.grid_n) : linspace(c.x_min, c.x_max, c.grid_n);
}

HankelOptions hankel_options(const RunConfig& c) {
  HankelOptions o;
  o.abs_tol = c.quad_tol;
  o.tail_fit_tol = c.quad_tol;
  o.truncation_tol = 10.0 * c.quad_tol;
  return o;
}

KernelFormOptions kernel_form_options(const RunConfig& c) {
  KernelFormOptions o;
  o.quad.abs_tol = 0.1 * c.quad_tol;
  o.quad.rel_tol = c.quad_tol;
  return o;
}

struct Context {
  RunConfig cfg;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  std::string out_path;

  void emit(const Report& r) const {
    ReportMeta meta{kVersion, fnv1a_hex(cfg.canonical()), cfg.seed};
    std::ostringstream s;
    if (cfg.format == "json") {
      write_json(s, meta, r);
    } else {
      write_csv(s, meta, r);
    }
    emit_text(s.str());
  }

  void emit_text(const std::string& text) const {
    if (out_path.empty()) {
      *out << text;
      return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw DomainError("cannot open " + out_path + " for writing");
    f << text;
  }
};

int emit_bound(const Context& ctx, const BoundReport& b, const std::string& command) {
  ctx.emit(to_report(b, command));
  return b.passed ? 0 : 1;
}

// Flags shared by the commands that evaluate on a grid; applied over the
// config file values when given.
struct GridFlags {
  double x_min = 0.0;
  double x_max = 0.0;
  int n = 0;
  std::string spacing;
  CLI::Option* o_min = nullptr;
  CLI::Option* o_max = nullptr;
  CLI::Option* o_n = nullptr;
  CLI::Option* o_spacing = nullptr;

  void add(CLI::App* app) {
    o_min = app->add_option("--xmin", x_min, "Smallest grid point (> 0)");
    o_max = app->add_option("--xmax", x_max, "Largest grid point");
    o_n = app->add_option("--n", n, "Number of grid points");
    o_spacing = app->add_option("--spacing", spacing, "Grid spacing")->check(CLI::IsMember({"linear", "log"}));
  }
  void apply(RunConfig& c) const {
    if (o_min->count()) c.x_min = x_min;
    if (o_max->count()) c.x_max = x_max;
    if (o_n->count()) c.grid_n = n;
    if (o_spacing->count()) c.grid_spacing = spacing;
  }
};

int specfun_eval(const Context& ctx, const std::string& fn, const std::vector<double>& args) {
  const std::size_t arity = fn == "gamma" ? 1 : fn == "besselj" ? 2 : 4;
  if (args.empty() || args.size() % arity != 0) {
    throw DomainError(fn + " takes " + std::to_string(arity) + " argument(s) per value");
  }
  std::string text;
  for (std::size_t i = 0; i < args.size(); i += arity) {
    double v = 0.0;
    if (fn == "gamma") {
      v = gamma(args[i]);
    } else if (fn == "besselj") {
      v = bessel_j(args[i], args[i + 1]);
    } else {
      v = hyp2f1({args[i], args[i + 1], args[i + 2], args[i + 3]});
    }
    text += num(v) + "\n";
  }
  ctx.emit_text(text);
  return 0;
}

int hankel_command(const Context& ctx, double nu, const std::string& fspec) {
  const SampledFunction f = parse_function(fspec);
  const auto x = make_grid(ctx.cfg);
  const auto v = hankel_transform(nu, f, x, hankel_options(ctx.cfg));
  Report r;
  r.command = "hankel transform";
  r.statement = "Hankel transform H_nu f(x) = int f(y) J_nu(xy) (xy)^{1/2} dy";
  r.inputs = {{"nu", num(nu)}, {"f", fspec}, {"xmin", num(ctx.cfg.x_min)}, {"xmax", num(ctx.cfg.x_max)},
              {"n", std::to_string(ctx.cfg.grid_n)}, {"spacing", ctx.cfg.grid_spacing}};
  r.columns = {"x", "value"};
  for (std::size_t i = 0; i < x.size(); ++i) r.rows.push_back({x[i], v[i]});
  ctx.emit(r);
  return 0;
}

int kernel_command(const Context& ctx, double alpha, double beta, double x, double y, const std::string& method) {
  const auto p = TransplantParams::orders(alpha, beta);
  p.validate();
  const KernelValue kv = kernel_eval(p, x, y, parse_kernel_method(method));
  if (ctx.cfg.format != "json") {
    ctx.emit_text(num(kv.value) + "\n");
    return 0;
  }
  Report r;
  r.command = "kernel eval";
  r.statement = "transplantation kernel K_alpha^beta(x, y)";
  r.inputs = {{"alpha", num(alpha)}, {"beta", num(beta)}, {"x", num(x)}, {"y", num(y)}, {"method", method}};
  r.columns = {"x", "y", "value", "branch", "method"};
  r.rows.push_back({x, y, kv.value, std::string(to_string(kv.branch)), std::string(to_string(kv.method))});
  ctx.emit(r);
  return 0;
}

int transplant_command(const Context& ctx, double a, double b, int k, const std::string& fspec,
                       const std::string& form, bool check) {
  const auto p = TransplantParams::shifted(a, b, k);
  p.validate();
  const SampledFunction f = parse_function(fspec);
  const auto x = make_grid(ctx.cfg);
  std::vector<double> comp;
  std::vector<double> kern;
  if (form == "composition" || check) comp = transplant_composition(p, f, x, hankel_options(ctx.cfg));
  if (form == "kernel" || check) {
    kern.resize(x.size());
    const auto ko = kernel_form_options(ctx.cfg);
    parallel_for(x.size(), [&](std::size_t i) { kern[i] = transplant_kernel_form(p, f, x[i], ko); });
  }
  Report r;
  r.command = "transplant apply";
  r.statement = "transplantation S_k^{a,b} = H_{b+k} o H_{a+k} applied to f";
  r.inputs = {{"a", num(a)},   {"b", num(b)}, {"k", std::to_string(k)}, {"f", fspec}, {"form", form},
              {"xmin", num(ctx.cfg.x_min)}, {"xmax", num(ctx.cfg.x_max)}, {"n", std::to_string(ctx.cfg.grid_n)},
              {"spacing", ctx.cfg.grid_spacing}};
  const auto& main = form == "kernel" ? kern : comp;
  int code = 0;
  if (check) {
    r.columns = {"x", "value", "composition", "kernel", "abs_diff"};
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = std::abs(comp[i] - kern[i]);
      diff = std::max(diff, d);
      scale = std::max(scale, std::abs(comp[i]));
      r.rows.push_back({x[i], main[i], comp[i], kern[i], d});
    }
    const double rel = scale > 0.0 ? diff / scale : diff;
    const bool ok = rel <= ctx.cfg.cross_check_tol;
    r.summary = {{"check", std::string("max |composition - kernel| / max |composition| <= cross_check_tol")},
                 {"check_value", rel},
                 {"threshold", ctx.cfg.cross_check_tol},
                 {"passed", ok}};
    code = ok ? 0 : 1;
  } else {
    r.columns = {"x", "value"};
    for (std::size_t i = 0; i < x.size(); ++i) r.rows.push_back({x[i], main[i]});
  }
  ctx.emit(r);
  return code;
}

int ap_command(const Context& ctx, const std::string& wspec, double p, const std::string& family) {
  const WeightSpec w = parse_weight(wspec, p);
  const IntervalFamily fam = family.empty() ? dyadic_family() : parse_family(family);
  const ApResult res = ap_characteristic(w, fam);
  Report r;
  r.command = "ap";
  r.statement = "A_p characteristic sup_I (mean_I u)(mean_I u^{-q/p})^{p/q} over a finite interval family";
  r.inputs = {{"weight", wspec}, {"p", num(p)}, {"family", family.empty() ? "dyadic:-8,8" : family}};
  r.summary = {{"characteristic", res.characteristic},
               {"divergent", res.divergent},
               {"divergence_reason", res.divergence_reason}};
  r.columns = {"lo", "hi", "mean_u", "dual_mean", "value", "touches_origin"};
  for (const auto& iv : res.intervals) {
    r.rows.push_back({iv.lo, iv.hi, iv.mean_u, iv.dual_mean, iv.value, iv.touches_origin});
  }
  TableSection trend{"trend", {"epsilon", "value"}, {}};
  for (const auto& t : res.trend) trend.rows.push_back({t.epsilon, t.value});
  r.sections.push_back(std::move(trend));
  r.notes.push_back("the characteristic is a lower bound for the supremum over all intervals");
  r.notes.push_back("a divergent flag is informational and does not change the exit code");
  ctx.emit(r);
  return 0;
}

std::vector<std::pair<double, double>> parse_ab(const std::vector<std::string>& v) {
  std::vector<std::pair<double, double>> out;
  for (const auto& s : v) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw DomainError("--ab takes A:B pairs, got '" + s + "'");
    out.emplace_back(to_double("A", s.substr(0, colon)), to_double("B", s.substr(colon + 1)));
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (!(quad_tol > 0.0)) throw DomainError("quad_tol must be positive");
  if (!(cross_check_tol > 0.0)) throw DomainError("cross_check_tol must be positive");
  if (!(x_min > 0.0)) throw DomainError("x_min must be positive");
  if (!(x_max > x_min)) throw DomainError("x_max must exceed x_min");
  if (grid_n < 2) throw DomainError("grid_n must be at least 2");
  if (grid_spacing != "linear" && grid_spacing != "log") throw DomainError("grid_spacing is linear or log");
  if (format != "csv" && format != "json") throw DomainError("format is csv or json");
  if (workers < 0) throw DomainError("workers must be nonnegative");
}

std::string RunConfig::canonical() const {
  std::ostringstream s;
  s << "quad_tol=" << num(quad_tol) << "\n"
    << "cross_check_tol=" << num(cross_check_tol) << "\n"
    << "grid_n=" << grid_n << "\n"
    << "x_min=" << num(x_min) << "\n"
    << "x_max=" << num(x_max) << "\n"
    << "grid_spacing=" << grid_spacing << "\n"
    << "format=" << format << "\n"
    << "seed=" << seed << "\n";
  return s.str();
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "quad_tol") {
      cfg.quad_tol = to_double(key, value);
    } else if (key == "cross_check_tol") {
      cfg.cross_check_tol = to_double(key, value);
    } else if (key == "grid_n") {
      cfg.grid_n = static_cast<int>(to_integer(key, value));
    } else if (key == "x_min") {
      cfg.x_min = to_double(key, value);
    } else if (key == "x_max") {
      cfg.x_max = to_double(key, value);
    } else if (key == "grid_spacing") {
      cfg.grid_spacing = value;
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(to_integer(key, value));
    } else if (key == "format") {
      cfg.format = value;
    } else if (key == "seed") {
      const long long s = to_integer(key, value);
      if (s < 0) throw DomainError("config: seed must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else {
      throw DomainError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hankel transforms, transplantation kernels and their verification sweeps", "htp"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  app.failure_message(CLI::FailureMessage::help);

  std::string config_path;
  std::string out_opt;
  std::string format;
  std::uint64_t seed = 0;
  int workers = 0;
  double quad_tol = 0.0;
  double cross_tol = 0.0;
  app.add_option("--config", config_path, "Key-value config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_opt, "Write the report to this path (csv or json selects the format)");
  auto* o_format = app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  auto* o_seed = app.add_option("--seed", seed, "Seed for random draws");
  auto* o_workers = app.add_option("--workers", workers, "Worker threads (overrides HTP_WORKERS)");
  auto* o_quad = app.add_option("--quad-tol", quad_tol, "Quadrature / tabulation accuracy");
  auto* o_cross = app.add_option("--cross-check-tol", cross_tol, "Limit for transplant apply --check");

  std::function<int(const Context&)> action;
  GridFlags hankel_grid;
  GridFlags transplant_grid;
  GridFlags* active_grid = nullptr;

  // specfun eval
  auto* specfun = app.add_subcommand("specfun", "Special functions")->require_subcommand(1)->fallthrough();
  std::string sf_fn;
  std::vector<double> sf_args;
  auto* sf_eval = specfun->add_subcommand("eval", "Print one value per argument group");
  sf_eval->add_option("--fn", sf_fn, "gamma (x), besselj (nu,x) or hyp2f1 (a,b,c,z)")
      ->required()
      ->check(CLI::IsMember({"gamma", "besselj", "hyp2f1"}));
  sf_eval->add_option("--args", sf_args, "Arguments, comma separated")->required()->delimiter(',');
  sf_eval->callback([&] { action = [&](const Context& c) { return specfun_eval(c, sf_fn, sf_args); }; });

  // hankel transform
  auto* hankel = app.add_subcommand("hankel", "Hankel transform")->require_subcommand(1)->fallthrough();
  double h_nu = 0.0;
  std::string h_f;
  auto* h_tr = hankel->add_subcommand("transform", "H_nu f on a grid");
  h_tr->add_option("--nu", h_nu, "Order (>= -1/2)")->required();
  h_tr->add_option("--f", h_f, "Input function, bump:C,R")->required();
  hankel_grid.add(h_tr);
  h_tr->callback([&] {
    active_grid = &hankel_grid;
    action = [&](const Context& c) { return hankel_command(c, h_nu, h_f); };
  });

  // kernel eval
  auto* kernel = app.add_subcommand("kernel", "Transplantation kernel")->require_subcommand(1)->fallthrough();
  double k_alpha = 0.0;
  double k_beta = 0.0;
  double k_x = 0.0;
  double k_y = 0.0;
  std::string k_method = "auto";
  auto* k_ev = kernel->add_subcommand("eval", "K_alpha^beta(x, y)");
  k_ev->add_option("--alpha", k_alpha)->required();
  k_ev->add_option("--beta", k_beta)->required();
  k_ev->add_option("--x", k_x)->required();
  k_ev->add_option("--y", k_y)->required();
  k_ev->add_option("--method", k_method)->check(CLI::IsMember({"auto", "2f1", "euler"}));
  k_ev->callback([&] {
    action = [&](const Context& c) { return kernel_command(c, k_alpha, k_beta, k_x, k_y, k_method); };
  });

  // transplant apply
  auto* transplant = app.add_subcommand("transplant", "Transplantation operator")->require_subcommand(1)->fallthrough();
  double t_a = 0.0;
  double t_b = 0.0;
  int t_k = 0;
  std::string t_f;
  std::string t_form = "composition";
  bool t_check = false;
  auto* t_ap = transplant->add_subcommand("apply", "S_k^{a,b} f on a grid");
  t_ap->add_option("--a", t_a)->required();
  t_ap->add_option("--b", t_b)->required();
  t_ap->add_option("--k", t_k)->required();
  t_ap->add_option("--f", t_f, "Input function, bump:C,R")->required();
  t_ap->add_option("--form", t_form)->check(CLI::IsMember({"composition", "kernel"}));
  t_ap->add_flag("--check", t_check, "Evaluate both forms and compare them");
  transplant_grid.add(t_ap);
  t_ap->callback([&] {
    active_grid = &transplant_grid;
    action = [&](const Context& c) { return transplant_command(c, t_a, t_b, t_k, t_f, t_form, t_check); };
  });

  // ap
  std::string ap_weight;
  double ap_p = 2.0;
  std::string ap_family;
  auto* ap = app.add_subcommand("ap", "A_p characteristic of a weight");
  ap->add_option("--weight", ap_weight, "one, pow:D, minpow:D or pw:D0,D1,KNEE")->required();
  ap->add_option("--p", ap_p, "Exponent p > 1");
  ap->add_option("--family", ap_family, "dyadic:JMIN,JMAX");
  ap->callback([&] { action = [&](const Context& c) { return ap_command(c, ap_weight, ap_p, ap_family); }; });

  // verify ...
  auto* verify = app.add_subcommand("verify", "Verification sweeps")->require_subcommand(1)->fallthrough();

  double v_a = 0.0;
  double v_b = 0.0;
  int v_kmin = 0;
  int v_kmax = 0;
  std::string v_estimate = "size";
  std::string v_method = "auto";
  double v_threshold = 0.0;
  auto* cz = verify->add_subcommand("cz", "Uniform kernel size / smoothness scan");
  cz->add_option("--a", v_a)->required();
  cz->add_option("--b", v_b)->required();
  cz->add_option("--kmin", v_kmin)->required();
  cz->add_option("--kmax", v_kmax)->required();
  cz->add_option("--estimate", v_estimate)->check(CLI::IsMember({"size", "smooth"}));
  cz->add_option("--method", v_method)->check(CLI::IsMember({"auto", "2f1", "euler"}));
  auto* cz_thr = cz->add_option("--threshold", v_threshold, "Uniformity limit (default 2)");
  cz->callback([&] {
    action = [&, cz_thr](const Context& c) {
      CzOptions o;
      o.method = parse_kernel_method(v_method);
      if (cz_thr->count()) o.threshold = v_threshold;
      const auto r = v_estimate == "smooth" ? cz_smooth_scan(v_a, v_b, v_kmin, v_kmax, o)
                                            : cz_size_scan(v_a, v_b, v_kmin, v_kmax, o);
      return emit_bound(c, r, "verify cz");
    };
  });

  std::vector<double> l_gamma;
  std::vector<double> l_lambda;
  std::vector<double> l_c;
  std::vector<double> l_d;
  std::vector<std::string> l_ab;
  auto* lemma = verify->add_subcommand("lemma", "Integral bound sweep");
  lemma->add_option("--gamma", l_gamma, "gamma values (> -1)")->delimiter(',');
  lemma->add_option("--lambda", l_lambda, "lambda values (> 0)")->delimiter(',');
  lemma->add_option("--c", l_c, "c values")->delimiter(',');
  lemma->add_option("--d", l_d, "d values")->delimiter(',');
  lemma->add_option("--ab", l_ab, "A:B pairs")->delimiter(',');
  auto* l_thr = lemma->add_option("--threshold", v_threshold, "Stability limit (default 3)");
  lemma->callback([&] {
    action = [&, l_thr](const Context& c) {
      LemmaSweep s;
      if (!l_gamma.empty()) s.gammas = l_gamma;
      if (!l_lambda.empty()) s.lambdas = l_lambda;
      if (!l_c.empty()) s.cs = l_c;
      if (!l_d.empty()) s.ds = l_d;
      if (!l_ab.empty()) s.ABs = parse_ab(l_ab);
      if (l_thr->count()) s.threshold = v_threshold;
      return emit_bound(c, lemma_bound_scan(s), "verify lemma");
    };
  });

  double v_p = 2.0;
  std::string v_weight = "one";
  double v_max_ratio = 0.0;
  auto* norm = verify->add_subcommand("norm", "Weighted norm uniformity in k");
  norm->add_option("--a", v_a)->required();
  norm->add_option("--b", v_b)->required();
  norm->add_option("--p", v_p);
  norm->add_option("--weight", v_weight);
  norm->add_option("--kmin", v_kmin);
  norm->add_option("--kmax", v_kmax)->required();
  auto* n_thr = norm->add_option("--threshold", v_threshold, "Uniformity limit (default 2)");
  norm->add_option("--max-ratio", v_max_ratio, "Also bound every ratio");
  norm->callback([&] {
    action = [&, n_thr](const Context& c) {
      NormOptions o;
      if (n_thr->count()) o.threshold = v_threshold;
      o.max_ratio_limit = v_max_ratio;
      return emit_bound(c, norm_scan(v_a, v_b, v_kmin, v_kmax, parse_weight(v_weight, v_p), o), "verify norm");
    };
  });

  int v_draws = 10;
  double v_spread = 2.0;
  auto* vec = verify->add_subcommand("vector", "Weighted square-function scan");
  vec->add_option("--a", v_a)->required();
  vec->add_option("--b", v_b)->required();
  vec->add_option("--p", v_p);
  vec->add_option("--weight", v_weight);
  vec->add_option("--kmax", v_kmax)->required();
  vec->add_option("--draws", v_draws, "Random families");
  vec->add_option("--spread", v_spread, "Limit on max/min ratio over draws");
  vec->add_option("--max-ratio", v_max_ratio, "Also bound every ratio");
  vec->callback([&] {
    action = [&](const Context& c) {
      VectorOptions o;
      o.draws = v_draws;
      o.seed = c.cfg.seed;
      o.draw_spread = v_spread;
      o.max_ratio_limit = v_max_ratio;
      return emit_bound(c, vector_valued_scan(v_a, v_b, v_kmax, parse_weight(v_weight, v_p), o), "verify vector");
    };
  });

  std::vector<int> tr_n;
  std::vector<int> tr_d;
  std::vector<int> tr_k;
  std::vector<std::string> tr_m;
  std::string v_f = "bump:2,0.8";
  auto* transfer = verify->add_subcommand("transfer", "Multiplier transference identity");
  transfer->add_option("--n", tr_n, "Dimensions n >= 2")->required()->delimiter(',');
  transfer->add_option("--d", tr_d, "Extra dimensions d >= 1")->required()->delimiter(',');
  transfer->add_option("--k", tr_k, "Degrees k >= 0")->required()->delimiter(',');
  transfer->add_option("--m", tr_m, "Multipliers: one, resolvent, chi:A,B")->required();
  transfer->add_option("--f", v_f, "Input function");
  auto* tr_thr = transfer->add_option("--threshold", v_threshold, "Discrepancy limit (default 1e-3)");
  transfer->callback([&] {
    action = [&, tr_thr](const Context& c) {
      std::vector<TransferQuery> qs;
      for (int n : tr_n)
        for (int d : tr_d)
          for (int k : tr_k)
            for (const auto& m : tr_m) qs.push_back({n, d, k, m});
      CheckOptions o;
      o.hankel = hankel_options(c.cfg);
      if (tr_thr->count()) o.threshold = v_threshold;
      return emit_bound(c, transference_identity_check(qs, parse_function(v_f), o), "verify transfer");
    };
  });

  std::vector<int> rad_n;
  double rad_sigma = 2.0;
  auto* radial = verify->add_subcommand("radial", "Radial Fourier transform of Gaussians via H_{(n-2)/2}");
  radial->add_option("--n", rad_n, "Dimensions")->required()->delimiter(',');
  radial->add_option("--sigma", rad_sigma, "Dilation of the second profile");
  auto* rad_thr = radial->add_option("--threshold", v_threshold, "Discrepancy limit (default 1e-6)");
  radial->callback([&] {
    action = [&, rad_thr](const Context& c) {
      return emit_bound(c, radial_fourier_check(rad_n, rad_sigma, rad_thr->count() ? v_threshold : 1e-6),
                        "verify radial");
    };
  });

  int ch_k = 0;
  auto* chain = verify->add_subcommand("chain", "Unit-gap factorisation of S_k^{a,b}");
  chain->add_option("--a", v_a)->required();
  chain->add_option("--b", v_b)->required();
  chain->add_option("--k", ch_k)->required();
  chain->add_option("--f", v_f, "Input function");
  auto* ch_thr = chain->add_option("--threshold", v_threshold, "Discrepancy limit (default 1e-3)");
  chain->callback([&] {
    action = [&, ch_thr](const Context& c) {
      CheckOptions o;
      o.hankel = hankel_options(c.cfg);
      if (ch_thr->count()) o.threshold = v_threshold;
      return emit_bound(c, composition_identity_check(v_a, v_b, ch_k, parse_function(v_f), o), "verify chain");
    };
  });

  // CLI11 consumes the vector from the back.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      std::stringstream text;
      text << f.rdbuf();
      apply_config_text(ctx.cfg, text.str());
    }
    if (o_format->count()) ctx.cfg.format = format;
    if (!out_opt.empty()) {
      if (out_opt == "csv" || out_opt == "json") {
        if (!o_format->count()) ctx.cfg.format = out_opt;
      } else {
        ctx.out_path = out_opt;
      }
    }
    if (o_seed->count()) ctx.cfg.seed = seed;
    if (o_workers->count()) ctx.cfg.workers = workers;
    if (o_quad->count()) ctx.cfg.quad_tol = quad_tol;
    if (o_cross->count()) ctx.cfg.cross_check_tol = cross_tol;
    if (active_grid) active_grid->apply(ctx.cfg);
    ctx.cfg.validate();
  } catch (const Error& e) {
    err << "htp: " << e.what() << "\n";
    return 2;
  }

  // Flag, then HTP_WORKERS, then the config file.
  if (o_workers->count() || !std::getenv("HTP_WORKERS")) {
    set_worker_count(ctx.cfg.workers);
  } else {
    set_worker_count(0);
  }

  int code = 0;
  try {
    code = action(ctx);
  } catch (const DomainError& e) {
    err << "htp: " << e.what() << "\n";
    code = 2;
  } catch (const std::exception& e) {
    err << "htp: " << e.what() << "\n";
    code = 1;
  }
  set_worker_count(0);
  return code;
}

}  // namespace htp::cli
