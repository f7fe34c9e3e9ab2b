#pragma once

// Sweeps that measure the kernel estimates, the integral lemma, weighted norm
// uniformity in k and the multiplier identities, reported as BoundReports.

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "htp/hankel.hpp"
#include "htp/transplant.hpp"
#include "htp/weights.hpp"

namespace htp {

struct ReportRow {
  /// One value per BoundReport::axis_names entry.
  std::vector<double> axis;
  std::string item;
  double measured = 0.0;
  double bound = 0.0;
  /// measured / bound.
  double ratio = 0.0;
  std::string note;
};

struct BoundReport {
  std::string operation;
  /// What is being measured, in words.
  std::string statement;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::string> axis_names;
  std::vector<ReportRow> rows;
  double max_ratio = 0.0;
  /// Sweep max over the value at the first sweep point; NaN when the report
  /// has no sweep axis.
  double uniformity_ratio = std::numeric_limits<double>::quiet_NaN();
  /// The quantity the pass/fail decision is taken on, and its limit.
  std::string check;
  double check_value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::vector<std::string> notes;
};

/// Max over the sequence divided by its first entry.
double uniformity(const std::vector<double>& per_sweep_point);

struct KernelGrid {
  std::vector<double> x;
  /// y = t x for each ratio t (both sides of the diagonal).
  std::vector<double> ratios;
  /// Pairs with |x - y| < band * max(x, y) are excluded.
  double band = 0.02;
};

/// x in logspace(0.1, 10, 9); t in logspace(0.01, 0.979, 40) and 1/t.
KernelGrid default_kernel_grid();

struct CzOptions {
  KernelGrid grid = default_kernel_grid();
  KernelMethod method = KernelMethod::automatic;
  double threshold = 2.0;
};

/// sup over the grid of |K_{a+k}^{b+k}(x,y)| |x-y| per k.
BoundReport cz_size_scan(double a, double b, int kmin, int kmax, const CzOptions& opts = {});
/// sup over the grid of |dK/dx| (x-y)^2 per k.
BoundReport cz_smooth_scan(double a, double b, int kmin, int kmax, const CzOptions& opts = {});

struct LemmaQuery {
  double gamma = 0.0;
  double lambda = 1.0;
  double c = -0.5;
  double d = 1.0;
  double A = 2.0;
  double B = 1.0;
  void validate() const;
};

/// log of int_0^1 s^gamma (1-s)^{d+c-1/2} (A-Bs)^{-(d+c+lambda+1/2)} ds.
double lemma_log_lhs(const LemmaQuery& q);
/// log of d^-lambda A^-(c+1/2) B^-d (A-B)^-lambda.
double lemma_log_rhs(const LemmaQuery& q);

struct LemmaSweep {
  std::vector<double> gammas{0.0, -0.4, 0.5};
  std::vector<double> lambdas{1.0, 2.0};
  std::vector<double> cs{-0.5, 0.0, 5.0, 25.0};
  std::vector<double> ds{1.0, 5.0, 25.0, 100.0};
  std::vector<std::pair<double, double>> ABs{{2.0, 1.0}, {1.1, 1.0}, {4.0, 0.5}};
  /// Limit on (max ratio) / (ratio at the first sweep point) per (gamma, lambda).
  double threshold = 3.0;
};

BoundReport lemma_bound_scan(const LemmaSweep& sweep = {});

struct NormOptions {
  std::vector<SampledFunction> bank = bump_bank();
  HankelOptions hankel = scan_hankel_options();
  /// Uniformity limit; max_ratio_limit > 0 adds a limit on every ratio.
  double threshold = 2.0;
  double max_ratio_limit = 0.0;

  static HankelOptions scan_hankel_options();
};

/// Per k, max over the bank of ||S_k^{a,b} f||_{L^p(u)} / ||f||_{L^p(u)}.
BoundReport norm_scan(double a, double b, int kmin, int kmax, const WeightSpec& w, const NormOptions& opts = {});

struct VectorOptions {
  std::vector<SampledFunction> bank = bump_bank();
  HankelOptions hankel = NormOptions::scan_hankel_options();
  /// Families f_0..f_kmax: one equal-entry family per bank member, then
  /// `draws` families with entries drawn from the bank.
  int draws = 10;
  std::uint64_t seed = 1;
  /// Limit on max/min ratio across draws; max_ratio_limit > 0 also bounds
  /// every ratio.
  double draw_spread = 2.0;
  double max_ratio_limit = 0.0;
};

/// ||(sum_k |S_k f_k|^2)^{1/2}||_{L^p(u)} / ||(sum_k |f_k|^2)^{1/2}||_{L^p(u)}
/// for families truncated at kmax (at most 12).
BoundReport vector_valued_scan(double a, double b, int kmax, const WeightSpec& w, const VectorOptions& opts = {});

struct TransferQuery {
  int n = 2;
  int d = 1;
  int k = 0;
  std::string multiplier = "resolvent";
  void validate() const;
  double low_order() const { return k + 0.5 * (n - 2); }
  double high_order() const { return k + 0.5 * (n + d - 2); }
};

struct CheckOptions {
  std::vector<double> x = linspace(0.2, 8.0, 40);
  HankelOptions hankel = {};
  double threshold = 1e-3;
};

/// Multiplier at the high order against T_low^high o (multiplier at the low
/// order) o T_high^low; max |difference| / max |left side| on the grid.
BoundReport transference_identity_check(const std::vector<TransferQuery>& queries, const SampledFunction& f,
                                        const CheckOptions& opts = {});

/// |xi|^{-(n-1)/2} H_{(n-2)/2}(g(s) s^{(n-1)/2})(|xi|) against e^{-|xi|^2/2}
/// for g = e^{-s^2/2}, plus the dilated profile g(s/sigma), on |xi| in [0.2, 4].
BoundReport radial_fourier_check(const std::vector<int>& dims, double sigma = 2.0, double threshold = 1e-6);

/// Chained unit-gap factors against the direct composition.
BoundReport composition_identity_check(double a, double b, int k, const SampledFunction& f,
                                       const CheckOptions& opts = {});

/// Drops cached transplanted tables (they are shared across scans).
void clear_transplant_cache();

}  // namespace htp
