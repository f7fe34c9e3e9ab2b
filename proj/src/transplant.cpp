#include "htp/transplant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "htp/error.hpp"
#include "htp/specfun.hpp"

namespace htp {
namespace {

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -INFINITY) return a;
  return a + std::log1p(std::exp(b - a));
}

// Parameters of the y < x display for orders (alpha, beta).
struct Branch {
  double alpha, beta;
  double p, q, r, m, gamma;
  double rg_gap;  // 1/Gamma((beta-alpha)/2)
  double rg_q;    // 1/Gamma(q)

  Branch(double al, double be)
      : alpha(al),
        beta(be),
        p(0.5 * (al + be + 2.0)),
        q(0.5 * (al - be + 2.0)),
        r(al + 1.0),
        m(0.5 * (al + be)),
        gamma(0.5 * (al - be)),
        rg_gap(recip_gamma(0.5 * (be - al))),
        rg_q(recip_gamma(0.5 * (al - be + 2.0))) {}

  bool euler_applicable() const { return m > 0.0 && q > 0.0; }
  bool closed_form() const { return r == q; }
  // 2 Gamma(p) / (Gamma(alpha+1) Gamma((beta-alpha)/2)).
  double c0() const { return 2.0 * std::exp(log_gamma(p) - log_gamma(r)) * rg_gap; }
};

KernelMethod choose(const Branch& br, int k, double x, double y, KernelMethod requested) {
  if (requested == KernelMethod::hypergeometric) return KernelMethod::hypergeometric;
  if (!br.euler_applicable()) return KernelMethod::hypergeometric;
  if (requested == KernelMethod::stabilized_euler) return KernelMethod::stabilized_euler;
  if (br.closed_form()) return KernelMethod::hypergeometric;
  const bool near = y / x > 0.999;
  if (k >= 10 || std::min(br.alpha, br.beta) >= 10.0 || near) return KernelMethod::stabilized_euler;
  return KernelMethod::hypergeometric;
}

// 2F1(p, q; r; z) and its z-derivative at z = (y/x)^2, with 1 - z formed
// from d = x - y when the closed form (1-z)^-p applies.
std::pair<double, double> hyp_pair(const Branch& br, double x, double y, double d, bool derivative) {
  const double t = y / x;
  const double z = t * t;
  if (br.closed_form()) {
    const double one_minus_z = d * (x + y) / (x * x);
    const double F = std::pow(one_minus_z, -br.p);
    return {F, br.p * F / one_minus_z};
  }
  const double F = hyp2f1({br.p, br.q, br.r, z});
  return {F, derivative ? hyp2f1_dz({br.p, br.q, br.r, z}) : 0.0};
}

// K for y < x.
double below_value(const Branch& br, double x, double y, double d, KernelMethod method) {
  if (br.rg_gap == 0.0) return 0.0;
  if (method == KernelMethod::hypergeometric) {
    const double t = y / x;
    const double F = hyp_pair(br, x, y, d, false).first;
    return br.c0() * std::pow(t, br.alpha + 0.5) / x * F;
  }
  const double amb = d * (x + y);
  const double coef = 2.0 * br.m * br.rg_gap * br.rg_q;
  const double logv = (br.beta + 0.5) * std::log(x) + (br.alpha + 0.5) * std::log(y) +
                      log_euler_integral(br.gamma, br.m, 1.0, x * x, y * y, amb);
  return coef * std::exp(logv);
}

// dK/dx for y < x.
double below_dx(const Branch& br, double x, double y, double d, KernelMethod method) {
  if (br.rg_gap == 0.0) return 0.0;
  if (method == KernelMethod::hypergeometric) {
    const double t = y / x;
    const double z = t * t;
    const auto [F, dF] = hyp_pair(br, x, y, d, true);
    return -br.c0() * std::pow(t, br.alpha + 0.5) / (x * x) * ((br.alpha + 1.5) * F + 2.0 * z * dF);
  }
  const double A = x * x;
  const double B = y * y;
  const double amb = d * (x + y);
  const double ly = std::log(y);
  const double t1 = std::log(br.alpha + 1.5) + (br.alpha + 0.5) * ly + log_euler_integral(br.gamma, br.m, 1.0, A, B, amb);
  const double t2 =
      std::log(2.0 * br.p) + (br.alpha + 2.5) * ly + log_euler_integral(br.gamma + 1.0, br.m, 2.0, A, B, amb);
  const double coef = -2.0 * br.m * br.rg_gap * br.rg_q;
  return coef * std::exp((br.beta - 0.5) * std::log(x) + log_add(t1, t2));
}

// dK/dy for y < x.
double below_dy(const Branch& br, double x, double y, double d, KernelMethod method) {
  if (br.rg_gap == 0.0) return 0.0;
  if (method == KernelMethod::hypergeometric) {
    const double t = y / x;
    const double z = t * t;
    const auto [F, dF] = hyp_pair(br, x, y, d, true);
    return br.c0() * std::pow(t, br.alpha - 0.5) / (x * x) * ((br.alpha + 0.5) * F + 2.0 * z * dF);
  }
  const double A = x * x;
  const double B = y * y;
  const double amb = d * (x + y);
  const double ly = std::log(y);
  // alpha = -1/2 removes the first term.
  const double t1 = br.alpha + 0.5 > 0.0
                        ? std::log(br.alpha + 0.5) + (br.alpha - 0.5) * ly +
                              log_euler_integral(br.gamma, br.m, 1.0, A, B, amb)
                        : -INFINITY;
  const double t2 =
      std::log(2.0 * br.p) + (br.alpha + 1.5) * ly + log_euler_integral(br.gamma + 1.0, br.m, 2.0, A, B, amb);
  const double coef = 2.0 * br.m * br.rg_gap * br.rg_q;
  return coef * std::exp((br.beta + 0.5) * std::log(x) + log_add(t1, t2));
}

void check_point(double x, double y, double x_minus_y) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("kernel needs x, y > 0");
  if (x_minus_y == 0.0) throw DomainError("kernel is singular on the diagonal x = y");
}

}  // namespace

void TransplantParams::validate() const {
  if (k < 0) throw DomainError("shift k must be nonnegative");
  if (!(alpha() >= -0.5) || !(beta() >= -0.5)) throw DomainError("orders must be >= -1/2");
  if (alpha() == beta()) throw DomainError("transplantation needs alpha != beta");
}

void TransplantParams::validate_unit_gap() const {
  validate();
  if (!(std::abs(a - b) <= 1.0)) throw DomainError("this operation needs 0 < |a-b| <= 1");
}

std::string TransplantParams::label() const {
  std::ostringstream s;
  s.precision(17);
  s << "a=" << a << " b=" << b << " k=" << k;
  return s.str();
}

const char* to_string(KernelBranch b) {
  return b == KernelBranch::below_diagonal ? "below-diagonal" : "above-diagonal";
}

const char* to_string(KernelMethod m) {
  switch (m) {
    case KernelMethod::automatic:
      return "auto";
    case KernelMethod::hypergeometric:
      return "hypergeometric";
    case KernelMethod::stabilized_euler:
      return "stabilized-euler";
  }
  return "?";
}

bool branch_vanishes(const TransplantParams& p, KernelBranch b) {
  const double gap = b == KernelBranch::below_diagonal ? p.beta() - p.alpha() : p.alpha() - p.beta();
  return recip_gamma(0.5 * gap) == 0.0;
}

KernelMethod parse_kernel_method(const std::string& s) {
  if (s == "auto") return KernelMethod::automatic;
  if (s == "2f1" || s == "hypergeometric") return KernelMethod::hypergeometric;
  if (s == "euler" || s == "stabilized-euler") return KernelMethod::stabilized_euler;
  throw DomainError("unknown kernel method '" + s + "' (auto, 2f1, euler)");
}

double log_euler_integral(double g, double m, double l, double A, double B, double a_minus_b) {
  if (!(B > 0.0) || !(B <= A) || !(a_minus_b > 0.0)) throw DomainError("Euler integral needs 0 < B < A");
  if (!(m > 0.0) || !(g > -1.0)) throw DomainError("Euler integral needs m > 0 and g > -1");
  const double Z = B / a_minus_b;
  const double log_z_cap = std::log(Z);
  // log of z^{m-1} (1+z)^{-(m+l)} (1 - z/Z)^g, with the distance to Z given.
  auto log_integrand = [=](double z, double to_end) {
    double v = (m - 1.0) * std::log(z) - (m + l) * std::log1p(z);
    if (g != 0.0) v += g * (std::log(to_end) - log_z_cap);
    return v;
  };
  const double peak = (m - 1.0) / (l + 1.0);
  double log_scale = -INFINITY;
  for (int i = 1; i < 64; ++i) {
    const double z = Z * i / 64.0;
    log_scale = std::max(log_scale, log_integrand(z, Z - z));
  }
  if (peak > 0.0 && peak < Z) log_scale = std::max(log_scale, log_integrand(peak, Z - peak));

  // Breakpoints: the peak and a geometric ladder beyond it, since for z >> 1
  // the integrand decays like z^{-1-l} over a possibly huge range.
  std::vector<double> pts{0.0};
  double edge = std::max(peak, 0.0);
  if (edge > 0.0 && edge < Z) pts.push_back(edge);
  edge = std::max(2.0 * edge, 1.0);
  while (edge < Z) {
    pts.push_back(edge);
    edge *= 4.0;
  }
  pts.push_back(Z);

  quad::QuadOptions o;
  o.abs_tol = 1e-300;
  o.rel_tol = 1e-13;
  o.max_evaluations = 200000;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double lo = pts[i];
    const double hi = pts[i + 1];
    const double gap_to_end = Z - hi;
    quad::QuadOptions seg = o;
    if (i == 0 && m < 1.0) seg.left_exponent = m - 1.0;
    if (i + 2 == pts.size() && g < 0.0) seg.right_exponent = g;
    quad::OffsetIntegrand fn = [&](double, double from_lo, double from_hi) {
      const double z = lo + from_lo;
      const double to_end = (i + 2 == pts.size()) ? from_hi : gap_to_end + from_hi;
      return std::exp(log_integrand(z, to_end) - log_scale);
    };
    sum += quad::integrate(fn, lo, hi, seg).value;
  }
  if (!(sum > 0.0)) throw ConvergenceError("Euler integral evaluated to a non-positive value", sum, 0.0);
  return log_scale + std::log(sum) - m * std::log(B) - l * std::log(a_minus_b);
}

KernelValue kernel_eval(const TransplantParams& p, double x, double y, KernelMethod method) {
  return kernel_eval_offset(p, x, y, x - y, method);
}

KernelValue kernel_eval_offset(const TransplantParams& p, double x, double y, double x_minus_y, KernelMethod method) {
  p.validate();
  check_point(x, y, x_minus_y);
  KernelValue out;
  if (x_minus_y > 0.0) {
    const Branch br(p.alpha(), p.beta());
    out.branch = KernelBranch::below_diagonal;
    out.method = choose(br, p.k, x, y, method);
    out.value = below_value(br, x, y, x_minus_y, out.method);
  } else {
    // K_alpha^beta(x, y) = K_beta^alpha(y, x).
    const Branch br(p.beta(), p.alpha());
    out.branch = KernelBranch::above_diagonal;
    out.method = choose(br, p.k, y, x, method);
    out.value = below_value(br, y, x, -x_minus_y, out.method);
  }
  return out;
}

double kernel_value(const TransplantParams& p, double x, double y, double x_minus_y, KernelMethod method) {
  return kernel_eval_offset(p, x, y, x_minus_y, method).value;
}

double kernel_dx(const TransplantParams& p, double x, double y, KernelMethod method) {
  p.validate();
  check_point(x, y, x - y);
  if (y < x) {
    const Branch br(p.alpha(), p.beta());
    return below_dx(br, x, y, x - y, choose(br, p.k, x, y, method));
  }
  const Branch br(p.beta(), p.alpha());
  return below_dy(br, y, x, y - x, choose(br, p.k, y, x, method));
}

double kernel_dy(const TransplantParams& p, double x, double y, KernelMethod method) {
  p.validate();
  check_point(x, y, x - y);
  if (y < x) {
    const Branch br(p.alpha(), p.beta());
    return below_dy(br, x, y, x - y, choose(br, p.k, x, y, method));
  }
  const Branch br(p.beta(), p.alpha());
  return below_dx(br, y, x, y - x, choose(br, p.k, y, x, method));
}

std::vector<double> transplant_composition(const TransplantParams& p, const SampledFunction& f,
                                           std::span<const double> x, const HankelOptions& opts) {
  p.validate();
  const SampledFunction g = tabulate_transform(p.alpha(), f, opts);
  return hankel_transform(p.beta(), g, x, opts);
}

double transplant_kernel_form(const TransplantParams& p, const SampledFunction& f, double x,
                              const KernelFormOptions& opts) {
  p.validate();
  if (!f.tail().empty()) throw DomainError("kernel form needs a compactly supported f");
  if (!(x > 0.0)) throw DomainError("kernel form needs x > 0");
  const double lo = f.support_lo();
  const double hi = f.finite_hi();
  // offset = y - x exactly, so x - y near the diagonal carries no rounding.
  quad::PoleIntegrand gp = [&](double y, double offset) {
    if (offset == 0.0 || y <= 0.0) return 0.0;
    const double fy = f(y);
    return fy == 0.0 ? 0.0 : kernel_value(p, x, y, -offset, opts.method) * fy;
  };
  quad::Integrand g = [&](double y) { return gp(y, y - x); };
  double integral = 0.0;
  if (x > lo && x < hi) {
    quad::PrincipalValueOptions pv;
    pv.quad = opts.quad;
    integral = quad::principal_value(gp, x, lo, hi, pv).value;
  } else {
    integral = quad::integrate(g, std::span<const double>(f.breakpoints()), opts.quad).value;
  }
  return integral + std::cos(0.5 * (p.beta() - p.alpha()) * std::numbers::pi) * f(x);
}

std::vector<TransplantParams> chain_decompose(double a, double b, int k) {
  if (a == b) throw DomainError("chain needs a != b");
  if (!(a >= -0.5) || !(b >= -0.5)) throw DomainError("chain needs a, b >= -1/2");
  if (k < 0) throw DomainError("shift k must be nonnegative");
  const double dir = b > a ? 1.0 : -1.0;
  const int m = static_cast<int>(std::floor(std::abs(b - a)));
  std::vector<TransplantParams> out;
  for (int j = 0; j < m; ++j) out.push_back({a + dir * j, a + dir * (j + 1), k});
  const double last = a + dir * m;
  if (last != b) out.push_back({last, b, k});
  return out;
}

std::vector<double> apply_chain(const std::vector<TransplantParams>& factors, const SampledFunction& f,
                                std::span<const double> x, const HankelOptions& opts) {
  if (factors.empty()) throw DomainError("empty chain");
  SampledFunction g = f;
  for (std::size_t i = 0; i + 1 < factors.size(); ++i) {
    factors[i].validate();
    g = tabulate_transform(factors[i].beta(), tabulate_transform(factors[i].alpha(), g, opts), opts);
  }
  return transplant_composition(factors.back(), g, x, opts);
}

}  // namespace htp
