#include "htp/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include "htp/error.hpp"
#include "htp/quadrature.hpp"

namespace htp {
namespace {

constexpr double kGammaOverflow = 171.6243769563027;

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

// Gauss series. Returns false when the budget runs out before convergence.
bool hyp2f1_series(const Hyp2F1Args& a, const Hyp2F1Options& opts, long max_terms, double& out,
                   double& err) {
  double sum = 1.0;
  double term = 1.0;
  double abs_sum = 1.0;
  int small_run = 0;
  for (long n = 0; n < max_terms; ++n) {
    term *= (a.p + n) * (a.q + n) / ((a.r + n) * (n + 1.0)) * a.z;
    sum += term;
    abs_sum += std::abs(term);
    if (term == 0.0) {
      out = sum;
      err = 0.0;
      return true;
    }
    // Stop only once terms are shrinking, so a hump in the early terms of a
    // large-parameter series does not end the sum prematurely.
    const double ratio = std::abs((a.p + n + 1) * (a.q + n + 1) / ((a.r + n + 1) * (n + 2.0)) * a.z);
    if (std::abs(term) <= opts.rel_tol * 0.1 * std::abs(sum) && ratio < 1.0) {
      // Remaining tail bounded by a geometric series in the current ratio.
      if (std::abs(term) * ratio / (1.0 - ratio) <= opts.rel_tol * std::abs(sum)) {
        if (++small_run >= 2) {
          out = sum;
          err = std::max(std::abs(term), std::numeric_limits<double>::epsilon() * abs_sum);
          return true;
        }
      }
    } else {
      small_run = 0;
    }
  }
  out = sum;
  err = std::abs(term);
  return false;
}

// Euler integral with r > q > 0, evaluated with the integrand scaled by its
// maximum so large exponents do not overflow.
double hyp2f1_euler(const Hyp2F1Args& a, const Hyp2F1Options& opts) {
  const double e0 = a.q - 1.0;
  const double e1 = a.r - a.q - 1.0;
  auto log_integrand = [&](double s, double one_minus_s) {
    return e0 * std::log(s) + e1 * std::log(one_minus_s) - a.p * std::log1p(-a.z * s);
  };
  // Locate the peak of the log-integrand on the open interval.
  double peak = -std::numeric_limits<double>::infinity();
  constexpr int kProbe = 64;
  for (int i = 1; i < kProbe; ++i) {
    const double s = static_cast<double>(i) / kProbe;
    peak = std::max(peak, log_integrand(s, 1.0 - s));
  }
  for (double t : {1e-3, 1e-6}) {
    peak = std::max(peak, log_integrand(t, 1.0 - t));
    peak = std::max(peak, log_integrand(1.0 - t, t));
  }
  const quad::OffsetIntegrand g = [&](double s, double from_left, double from_right) {
    (void)s;
    if (from_left <= 0.0 || from_right <= 0.0) return 0.0;
    return std::exp(log_integrand(from_left, from_right) - peak);
  };
  quad::QuadOptions qo;
  qo.abs_tol = 0.0;
  qo.rel_tol = opts.rel_tol;
  qo.left_exponent = e0;
  qo.right_exponent = e1;
  quad::QuadResult res;
  try {
    res = quad::integrate(g, 0.0, 1.0, qo);
  } catch (const ConvergenceError& e) {
    const double scale = std::exp(peak + log_gamma(a.r) - log_gamma(a.q) - log_gamma(a.r - a.q));
    throw ConvergenceError(std::string("hyp2f1 Euler integral: ") + e.what(),
                           e.best_estimate() * scale, e.error_estimate() * scale);
  }
  const double log_scale = peak + log_gamma(a.r) - log_gamma(a.q) - log_gamma(a.r - a.q);
  const double out = std::exp(log_scale + std::log(res.value));
  if (!std::isfinite(out)) throw OverflowError("hyp2f1 result exceeds double range");
  return out;
}

}  // namespace

double gamma(double x) {
  if (!(x > 0.0)) throw DomainError("gamma requires x > 0 (use recip_gamma for other arguments)");
  if (x > kGammaOverflow) throw OverflowError("gamma overflows for x > 171.62");
  return boost::math::tgamma(x);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma requires x > 0");
  return boost::math::lgamma(x);
}

double recip_gamma(double x) {
  if (std::isnan(x)) throw DomainError("recip_gamma of NaN");
  if (is_nonpositive_integer(x)) return 0.0;
  if (x > 0.0) {
    if (x > kGammaOverflow) return std::exp(-boost::math::lgamma(x));
    return 1.0 / boost::math::tgamma(x);
  }
  // Reflection: 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi.
  const double one_minus = 1.0 - x;
  const double s = boost::math::sin_pi(x);
  if (one_minus > kGammaOverflow) {
    const double log_mag = boost::math::lgamma(one_minus) + std::log(std::abs(s)) - std::log(M_PI);
    if (log_mag > 709.0) throw OverflowError("recip_gamma overflows for large negative argument");
    return std::copysign(std::exp(log_mag), s);
  }
  return boost::math::tgamma(one_minus) * s / M_PI;
}

double bessel_j(double nu, double x, double max_argument) {
  if (!(nu >= -0.5)) throw DomainError("bessel_j supports orders nu >= -1/2");
  if (!(x >= 0.0)) throw DomainError("bessel_j requires a nonnegative argument");
  if (x > max_argument) {
    std::ostringstream msg;
    msg << "bessel_j argument " << x << " exceeds the supported range " << max_argument;
    throw DomainError(msg.str());
  }
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0) return 0.0;
    throw DomainError("bessel_j of negative order is unbounded at x = 0");
  }
  return boost::math::cyl_bessel_j(nu, x);
}

namespace {
constexpr double kTablePanel = 2.0;
constexpr int kTableNodes = 20;
}  // namespace

BesselJFixedOrder::BesselJFixedOrder(double nu, double max_argument)
    : nu_(nu), max_argument_(max_argument) {
  if (!(nu >= -0.5)) throw DomainError("bessel_j supports orders nu >= -1/2");
  const double mu = 4.0 * nu * nu;
  coeffs_.push_back(1.0);
  constexpr int kMaxTerms = 40;
  for (int k = 1; k <= kMaxTerms; ++k) {
    const double a = coeffs_.back() * (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
    coeffs_.push_back(a);
    if (a == 0.0) break;  // half-integer order: the expansion terminates
  }
  // Smallest argument at which the terms stay below 1 (no cancellation) and
  // fall under 1e-17 before they start growing again.
  auto usable = [this](double z) {
    double largest = 0.0;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
      const double t = std::abs(coeffs_[k]) * std::pow(z, -static_cast<double>(k));
      largest = std::max(largest, t);
      if (coeffs_[k] == 0.0 || t < 1e-17) return largest < 0.5;
      const double next = k + 1 < coeffs_.size() ? std::abs(coeffs_[k + 1]) * std::pow(z, -(k + 1.0)) : 0.0;
      if (next > t) return false;
    }
    return false;
  };
  double z = 1.0;
  while (!usable(z) && z < 1e6) z *= 1.02;
  threshold_ = std::max(z, 8.0);
  const double phase = (0.5 * nu + 0.25) * M_PI;
  phase_cos_ = std::cos(phase);
  phase_sin_ = std::sin(phase);

  const int panels = static_cast<int>(std::ceil(std::min(threshold_, max_argument_) / kTablePanel));
  table_.assign(static_cast<std::size_t>(panels) * kTableNodes, 0.0);
  std::array<double, kTableNodes> v{};
  for (int i = 0; i < panels; ++i) {
    const double mid = (i + 0.5) * kTablePanel;
    for (int j = 0; j < kTableNodes; ++j) {
      const double x = mid + 0.5 * kTablePanel * std::cos(M_PI * (j + 0.5) / kTableNodes);
      v[j] = bessel_j(nu, x, max_argument_);
      if (i == 0) v[j] *= std::pow(x, -nu);
    }
    for (int n = 0; n < kTableNodes; ++n) {
      double c = 0.0;
      for (int j = 0; j < kTableNodes; ++j) c += v[j] * std::cos(M_PI * n * (j + 0.5) / kTableNodes);
      table_[static_cast<std::size_t>(i) * kTableNodes + n] = c * (n == 0 ? 1.0 : 2.0) / kTableNodes;
    }
  }
}

double BesselJFixedOrder::operator()(double x) const {
  if (x < threshold_ && x > 0.0) {
    const std::size_t i = static_cast<std::size_t>(x / kTablePanel);
    if (i * kTableNodes < table_.size()) {
      const double t = 2.0 * (x - (i + 0.5) * kTablePanel) / kTablePanel;
      const double* c = &table_[i * kTableNodes];
      double b1 = 0.0;
      double b2 = 0.0;
      for (int n = kTableNodes - 1; n >= 1; --n) {
        const double b0 = c[n] + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
      }
      const double value = c[0] + t * b1 - b2;
      return i == 0 ? value * std::pow(x, nu_) : value;
    }
  }
  if (x < threshold_ || x > max_argument_) return bessel_j(nu_, x, max_argument_);
  // J = sqrt(2/(pi x)) (P cos w - Q sin w), w = x - phase.
  const double inv = 1.0 / x;
  double p = 0.0;
  double q = 0.0;
  double pw = 1.0;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    const double t = coeffs_[k] * pw;
    switch (k % 4) {
      case 0: p += t; break;
      case 1: q += t; break;
      case 2: p -= t; break;
      default: q -= t; break;
    }
    if (std::abs(t) < 1e-17 && k > 0) break;
    pw *= inv;
  }
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double cw = c * phase_cos_ + s * phase_sin_;
  const double sw = s * phase_cos_ - c * phase_sin_;
  return std::sqrt(2.0 * inv / M_PI) * (p * cw - q * sw);
}

double hyp2f1(const Hyp2F1Args& args, const Hyp2F1Options& opts) {
  if (!std::isfinite(args.p) || !std::isfinite(args.q) || !std::isfinite(args.r)) {
    throw DomainError("hyp2f1 parameters must be finite");
  }
  if (!(args.z >= 0.0 && args.z < 1.0)) throw DomainError("hyp2f1 requires z in [0, 1)");
  if (is_nonpositive_integer(args.r)) throw DomainError("hyp2f1 lower parameter is a pole");
  if (args.z == 0.0) return 1.0;
  if (args.r == args.q) return std::pow(1.0 - args.z, -args.p);
  if (args.r == args.p) return std::pow(1.0 - args.z, -args.q);

  double value = 0.0;
  double err = 0.0;
  const bool terminating = is_nonpositive_integer(args.p) || is_nonpositive_integer(args.q);
  if (args.z <= opts.series_limit || terminating) {
    if (hyp2f1_series(args, opts, opts.max_series_terms, value, err)) return value;
    throw ConvergenceError("hyp2f1 series did not converge", value, err);
  }
  if (args.r > args.q && args.q > 0.0) return hyp2f1_euler(args, opts);
  if (args.r > args.p && args.p > 0.0) {
    return hyp2f1_euler({args.q, args.p, args.r, args.z}, opts);
  }
  // No Euler representation: fall back on the series with a large budget.
  if (hyp2f1_series(args, opts, opts.max_series_terms, value, err)) return value;
  std::ostringstream msg;
  msg << "hyp2f1 series did not converge for (" << args.p << ", " << args.q << "; " << args.r
      << "; " << args.z << ")";
  throw ConvergenceError(msg.str(), value, err);
}

double hyp2f1_dz(const Hyp2F1Args& args, const Hyp2F1Options& opts) {
  if (is_nonpositive_integer(args.r)) throw DomainError("hyp2f1 lower parameter is a pole");
  const double c = args.p * args.q / args.r;
  if (c == 0.0) return 0.0;
  return c * hyp2f1({args.p + 1.0, args.q + 1.0, args.r + 1.0, args.z}, opts);
}

}  // namespace htp
