// Acceptance suite: one PASS/FAIL line per criterion, each with its measured
// value, its tolerance and its runtime against the time budget.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "htp/cli.hpp"
#include "htp/hankel.hpp"
#include "htp/parallel.hpp"
#include "htp/specfun.hpp"
#include "htp/transplant.hpp"
#include "htp/verify.hpp"
#include "htp/weights.hpp"

using namespace htp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records one measured quantity against its limit.
  void limit(const std::string& what, double value, double tol) {
    const bool ok = value <= tol;
    pass = pass && ok;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s%s=%.6g (<= %.6g)%s", detail.empty() ? "" : "; ", what.c_str(), value, tol,
                  ok ? "" : " VIOLATED");
    detail += buf;
  }
  void require(const std::string& what, bool ok) {
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + what + (ok ? " ok" : " VIOLATED");
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const double kPi = std::numbers::pi;
const std::vector<std::pair<double, double>> kPairs{{-0.5, 0.5}, {0.0, 0.7}, {0.3, 1.1}};

Outcome special_functions() {
  Outcome o;
  o.limit("gamma(1/2) vs sqrt(pi)", rel(htp::gamma(0.5), std::sqrt(kPi)), 1e-9);
  double jerr = 0.0;
  for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.3, 25.7, 47.2}) {
    const double env = std::sqrt(2.0 / (kPi * x));
    jerr = std::max(jerr, rel(bessel_j(0.5, x), env * std::sin(x)));
    jerr = std::max(jerr, rel(bessel_j(-0.5, x), env * std::cos(x)));
  }
  o.limit("J_{+-1/2} vs closed forms", jerr, 1e-9);
  double ferr = 0.0;
  for (double b : {0.5, 2.0, 7.3}) {
    for (double z : {0.1, 0.5, 0.9, 0.99}) ferr = std::max(ferr, rel(hyp2f1({1.0, b, b, z}), 1.0 / (1.0 - z)));
  }
  o.limit("2F1(1,b;b;z) vs 1/(1-z)", ferr, 1e-9);
  return o;
}

Outcome involution_plancherel() {
  const auto bank = bump_bank();
  const std::vector<double> nus{-0.5, 0.0, 0.5, 2.0, 5.5};
  const auto xs = linspace(0.1, 8.0, 80);
  std::vector<double> inv(nus.size() * bank.size());
  std::vector<double> pl(inv.size());
  for (std::size_t i = 0; i < inv.size(); ++i) {
    const double nu = nus[i / bank.size()];
    const SampledFunction& f = bank[i % bank.size()];
    const auto back = hankel_transform(nu, tabulate_transform(nu, f), xs);
    double worst = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) worst = std::max(worst, std::abs(back[j] - f(xs[j])));
    inv[i] = worst / f.sup_norm();
    pl[i] = plancherel_defect(nu, f);
  }
  Outcome o;
  o.limit("max involution defect / ||f||_inf", *std::max_element(inv.begin(), inv.end()), 1e-6);
  o.limit("max Plancherel defect", *std::max_element(pl.begin(), pl.end()), 1e-6);
  return o;
}

Outcome closed_form_kernel() {
  const auto p = TransplantParams::orders(-0.5, 0.5);
  const auto q = TransplantParams::orders(0.5, -0.5);
  auto closed = [](double x, double y) { return 2.0 / kPi * x / (x * x - y * y); };
  double err = 0.0;
  for (double x : {0.1, 0.3, 1.0, 2.0, 7.0, 20.0}) {
    for (int i = 0; i <= 18; ++i) {
      const double t = 0.05 + 0.05 * i;
      err = std::max(err, rel(kernel_eval(p, x, t * x).value, closed(x, t * x)));
      err = std::max(err, rel(kernel_eval(p, t * x, x).value, closed(t * x, x)));
      err = std::max(err, rel(kernel_eval(q, t * x, x).value, closed(x, t * x)));
      err = std::max(err, rel(kernel_eval(q, x, t * x).value, closed(t * x, x)));
    }
  }
  Outcome o;
  o.limit("closed-form kernel rel err", err, 1e-10);
  double agree = 0.0;
  for (auto [a, b] : kPairs) {
    for (int k = 0; k <= 50; ++k) {
      const auto s = TransplantParams::shifted(a, b, k);
      for (double x : {0.5, 2.0, 6.0}) {
        for (double t : {0.05, 0.2, 0.5, 0.8, 0.95}) {
          for (auto [u, v] : {std::pair{x, t * x}, {t * x, x}}) {
            const double h = kernel_eval(s, u, v, KernelMethod::hypergeometric).value;
            const double e = kernel_eval(s, u, v, KernelMethod::stabilized_euler).value;
            if (h == 0.0 && e == 0.0) continue;
            agree = std::max(agree, rel(e, h));
          }
        }
      }
    }
  }
  o.limit("2F1 vs Euler, k <= 50", agree, 1e-8);
  return o;
}

Outcome two_forms() {
  const auto bank = bump_bank();
  const auto xs = linspace(0.25, 7.5, 12);
  double worst = 0.0;
  for (auto [a, b] : kPairs) {
    for (int k : {0, 1, 5, 10}) {
      const auto p = TransplantParams::shifted(a, b, k);
      for (const auto& f : bank) {
        const auto comp = transplant_composition(p, f, xs);
        std::vector<double> kern(xs.size());
        parallel_for(xs.size(), [&](std::size_t i) { kern[i] = transplant_kernel_form(p, f, xs[i]); });
        double diff = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          diff = std::max(diff, std::abs(comp[i] - kern[i]));
          scale = std::max(scale, std::abs(comp[i]));
        }
        worst = std::max(worst, diff / scale);
      }
    }
  }
  Outcome o;
  o.limit("max |kernel - composition| / max |composition|", worst, 1e-4);
  return o;
}

Outcome kernel_uniformity() {
  Outcome o;
  double size = 0.0;
  double smooth = 0.0;
  for (auto [a, b] : kPairs) {
    size = std::max(size, cz_size_scan(a, b, 10, 50).uniformity_ratio);
    smooth = std::max(smooth, cz_smooth_scan(a, b, 10, 50).uniformity_ratio);
  }
  o.limit("size uniformity", size, 2.0);
  o.limit("smoothness uniformity", smooth, 2.0);
  double fd = 0.0;
  std::mt19937_64 rng(7);
  for (auto [a, b] : kPairs) {
    for (int k : {10, 25, 50}) {
      const auto p = TransplantParams::shifted(a, b, k);
      int done = 0;
      while (done < 6) {
        const double x = 0.2 + 4.8 * static_cast<double>(rng() % 10000) / 10000.0;
        const double y = 0.2 + 4.8 * static_cast<double>(rng() % 10000) / 10000.0;
        if (std::abs(x - y) < 0.1 * std::max(x, y)) continue;
        // The kernel behaves like (min/max)^k, so it varies on a scale min(x, y)/k.
        const double h = 1e-4 * std::min({x, y, std::abs(x - y)}) / (1.0 + k);
        const double num = (kernel_eval(p, x + h, y).value - kernel_eval(p, x - h, y).value) / (2.0 * h);
        const double dx = kernel_dx(p, x, y);
        if (dx != 0.0 || num != 0.0) fd = std::max(fd, std::abs(dx - num) / std::abs(dx));
        ++done;
      }
    }
  }
  o.limit("kernel_dx vs central differences", fd, 1e-5);
  return o;
}

Outcome lemma() {
  Outcome o;
  const LemmaQuery q;  // gamma 0, lambda 1, c -1/2, d 1, A 2, B 1
  o.limit("closed case |ratio - 1/2| / (1/2)", rel(std::exp(lemma_log_lhs(q) - lemma_log_rhs(q)), 0.5), 1e-9);
  const LemmaSweep sweep;
  o.require("sweep includes gamma=-0.4",
            std::find(sweep.gammas.begin(), sweep.gammas.end(), -0.4) != sweep.gammas.end());
  const auto r = lemma_bound_scan(sweep);
  o.limit("per-(gamma,lambda) stability", r.check_value, 3.0);
  return o;
}

Outcome norm_uniformity() {
  Outcome o;
  NormOptions w;
  w.threshold = 1.5;
  const auto r = norm_scan(0.0, 0.7, 0, 20, parse_weight("pow:0.25"), w);
  o.limit("u=x^{1/4} uniformity", r.uniformity_ratio, 1.5);
  const auto one = norm_scan(-0.5, 0.5, 0, 20, parse_weight("one"));
  o.limit("u=1 max ratio", one.max_ratio, 1.0 + 1e-3);
  return o;
}

Outcome square_function() {
  Outcome o;
  VectorOptions v;
  v.max_ratio_limit = 1.0 + 1e-3;
  const auto one = vector_valued_scan(0.0, 0.7, 12, parse_weight("one"), v);
  double equal = 0.0;
  for (const auto& row : one.rows) {
    if (row.item.rfind("equal", 0) == 0) equal = std::max(equal, row.ratio);
  }
  o.require("equal-entry families present", equal > 0.0);
  o.limit("u=1 equal-entry max ratio", equal, 1.0 + 1e-3);
  VectorOptions w;
  const auto pw = vector_valued_scan(0.0, 0.7, 12, parse_weight("pow:0.25"), w);
  o.require("u=x^{1/4} ratios finite", std::isfinite(pw.max_ratio));
  o.limit("u=x^{1/4} draw spread", pw.check_value, w.draw_spread);
  return o;
}

Outcome transference() {
  std::vector<TransferQuery> res;
  std::vector<TransferQuery> one;
  for (int n : {2, 3}) {
    for (int d : {1, 2}) {
      for (int k : {0, 1, 3}) {
        res.push_back({n, d, k, "resolvent"});
        one.push_back({n, d, k, "one"});
      }
    }
  }
  const SampledFunction f = SampledFunction::bump(2.0, 0.8);
  Outcome o;
  o.limit("resolvent discrepancy", transference_identity_check(res, f).max_ratio, 1e-3);
  o.limit("m=1 discrepancy", transference_identity_check(one, f).max_ratio, 2e-4);
  return o;
}

Outcome radial() {
  Outcome o;
  o.limit("Gaussian self-duality, n in {2,3}", radial_fourier_check({2, 3}).max_ratio, 1e-6);
  return o;
}

Outcome ap_sanity() {
  Outcome o;
  double lowest = INFINITY;
  for (const auto& w : weight_bank()) {
    for (const auto& iv : ap_characteristic(w).intervals) lowest = std::min(lowest, iv.value);
  }
  bool finite = true;
  for (double d : {-0.99, -0.9, -0.5, 0.0, 0.5, 0.9, 0.99}) {
    const auto r = ap_characteristic(WeightSpec::power(d));
    finite = finite && !r.divergent && std::isfinite(r.characteristic);
    for (const auto& iv : r.intervals) lowest = std::min(lowest, iv.value);
  }
  // Rounding can leave the expression of u = 1 a few ulps under 1.
  o.limit("1 - min A_p expression", 1.0 - lowest, 1e-12);
  o.require("finite for |delta| < 1", finite);
  o.require("divergent for delta = +-1.5", ap_characteristic(WeightSpec::power(1.5)).divergent &&
                                              ap_characteristic(WeightSpec::power(-1.5)).divergent);
  return o;
}

Outcome reproducibility() {
  const std::vector<std::vector<std::string>> commands{
      {"verify", "cz", "--a", "0", "--b", "0.7", "--kmin", "10", "--kmax", "20"},
      {"verify", "lemma"},
      {"verify", "norm", "--a", "0", "--b", "0.7", "--p", "2", "--weight", "pow:0.25", "--kmax", "3"},
      {"verify", "vector", "--a", "0", "--b", "0.7", "--p", "2", "--weight", "pow:0.25", "--kmax", "2", "--draws",
       "4", "--seed", "42"},
      {"verify", "transfer", "--n", "2", "--d", "1", "--k", "0", "--m", "resolvent"},
      {"verify", "radial", "--n", "2,3", "--format", "json"},
      {"verify", "chain", "--a", "0", "--b", "2", "--k", "3"},
  };
  Outcome o;
  for (const auto& args : commands) {
    std::string text[2];
    int code[2];
    for (int run = 0; run < 2; ++run) {
      clear_transplant_cache();
      auto a = args;
      // Second run on one worker: scheduling must not change the bytes.
      if (run == 1) a.insert(a.end(), {"--workers", "1"});
      std::ostringstream out;
      std::ostringstream err;
      code[run] = cli::run(a, out, err);
      text[run] = out.str();
    }
    o.require(args[0] + " " + args[1] + " identical", code[0] == code[1] && code[0] != 2 && !text[0].empty() &&
                                                         text[0] == text[1]);
  }
  return o;
}

struct Criterion {
  int id;
  const char* label;
  double budget_seconds;
  std::function<Outcome()> body;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria 1-12"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "special-function anchors", 60, special_functions},
      {2, "Hankel involution and Plancherel", 120, involution_plancherel},
      {3, "closed-form kernel and method agreement", 60, closed_form_kernel},
      {4, "kernel form vs composition", 600, two_forms},
      {5, "uniform kernel size and smoothness", 300, kernel_uniformity},
      {6, "integral lemma closed case and stability", 60, lemma},
      {7, "weighted norm uniformity in k", 900, norm_uniformity},
      {8, "weighted square-function scan", 600, square_function},
      {9, "multiplier transference identity", 600, transference},
      {10, "Gaussian radial Fourier self-duality", 60, radial},
      {11, "A_p characteristic sanity", 60, ap_sanity},
      {12, "byte-identical verify reruns", 600, reproducibility},
  };
  const std::set<int> wanted(only.begin(), only.end());
  int failures = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    clear_transplant_cache();
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %2d: %s  %s: %s [%.1fs, budget %.0fs%s]\n", c.id, pass ? "PASS" : "FAIL", c.label,
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : " EXCEEDED");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
