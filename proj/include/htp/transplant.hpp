#pragma once

// Transplantation T_alpha^beta = H_beta o H_alpha: its kernel, the kernel
// derivatives, the two ways of applying it and the chain over unit shifts.

#include <span>
#include <string>
#include <vector>

#include "htp/hankel.hpp"
#include "htp/quadrature.hpp"
#include "htp/sampled.hpp"

namespace htp {

/// Orders alpha = a + k, beta = b + k.
struct TransplantParams {
  double a = 0.0;
  double b = 0.0;
  int k = 0;

  static TransplantParams orders(double alpha, double beta) { return {alpha, beta, 0}; }
  static TransplantParams shifted(double a, double b, int k) { return {a, b, k}; }
  double alpha() const { return a + k; }
  double beta() const { return b + k; }
  /// Throws DomainError unless alpha, beta >= -1/2, alpha != beta, k >= 0.
  void validate() const;
  /// Additionally requires 0 < |a - b| <= 1.
  void validate_unit_gap() const;
  std::string label() const;
};

enum class KernelBranch { below_diagonal, above_diagonal };
enum class KernelMethod { automatic, hypergeometric, stabilized_euler };

struct KernelValue {
  double value = 0.0;
  KernelBranch branch = KernelBranch::below_diagonal;
  KernelMethod method = KernelMethod::hypergeometric;
};

const char* to_string(KernelBranch b);
const char* to_string(KernelMethod m);
/// True when the reciprocal-gamma coefficient of that branch is zero, so the
/// kernel vanishes identically there ((beta-alpha)/2 a non-positive integer
/// below the diagonal, (alpha-beta)/2 above).
bool branch_vanishes(const TransplantParams& p, KernelBranch b);

/// "auto", "2f1" or "euler".
KernelMethod parse_kernel_method(const std::string& s);

/// K_alpha^beta(x, y) for x != y. `automatic` takes the stabilized Euler
/// integral for k >= 10 or orders >= 10 (and whenever the hypergeometric
/// route would need z > 0.999), otherwise 2F1; either falls back to the
/// other where it is not applicable.
KernelValue kernel_eval(const TransplantParams& p, double x, double y, KernelMethod method = KernelMethod::automatic);

/// As kernel_eval with x - y supplied by the caller (exact near the diagonal).
KernelValue kernel_eval_offset(const TransplantParams& p, double x, double y, double x_minus_y,
                               KernelMethod method = KernelMethod::automatic);
double kernel_value(const TransplantParams& p, double x, double y, double x_minus_y,
                    KernelMethod method = KernelMethod::automatic);

/// dK/dx and dK/dy.
double kernel_dx(const TransplantParams& p, double x, double y, KernelMethod method = KernelMethod::automatic);
double kernel_dy(const TransplantParams& p, double x, double y, KernelMethod method = KernelMethod::automatic);

/// E(g, m, l; A, B) = int_0^1 s^g (1-s)^{m-1} (A - B s)^{-(m+l)} ds for
/// 0 < B < A, evaluated after 1 - s = (A-B) z / B. Returned as a logarithm;
/// `a_minus_b` is passed separately so the caller can form it without
/// cancellation.
double log_euler_integral(double g, double m, double l, double A, double B, double a_minus_b);

/// H_beta applied to the tabulated H_alpha f.
std::vector<double> transplant_composition(const TransplantParams& p, const SampledFunction& f,
                                           std::span<const double> x, const HankelOptions& opts = {});

inline quad::QuadOptions kernel_form_quad_defaults() {
  quad::QuadOptions q;
  q.abs_tol = 1e-11;
  q.rel_tol = 1e-10;
  q.max_evaluations = 400000;
  return q;
}

struct KernelFormOptions {
  quad::QuadOptions quad = kernel_form_quad_defaults();
  KernelMethod method = KernelMethod::automatic;
};

/// PV int K(x,y) f(y) dy + cos((beta-alpha) pi/2) f(x) for compactly
/// supported f.
double transplant_kernel_form(const TransplantParams& p, const SampledFunction& f, double x,
                              const KernelFormOptions& opts = {});

/// Unit-gap factors of T_{a+k}^{b+k} in the order they are applied:
/// (a, a+1), (a+1, a+2), ..., (a+m, b) with m = floor|b-a|, mirrored for
/// b < a; a trailing zero-gap factor is dropped.
std::vector<TransplantParams> chain_decompose(double a, double b, int k);

/// Applies the factors in order, each as a composition of two transforms.
std::vector<double> apply_chain(const std::vector<TransplantParams>& factors, const SampledFunction& f,
                                std::span<const double> x, const HankelOptions& opts = {});

}  // namespace htp
