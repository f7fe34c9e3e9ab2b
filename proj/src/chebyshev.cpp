#include "htp/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "htp/error.hpp"

namespace htp {
namespace {

constexpr int N = kChebNodes;

struct ChebConstants {
  std::array<double, N> nodes{};
  std::array<double, N> bary{};
  // cos(k * theta_j) for the coefficient transform.
  std::array<std::array<double, N>, N> cosines{};
};

const ChebConstants& constants() {
  static const ChebConstants c = [] {
    ChebConstants k;
    for (int j = 0; j < N; ++j) {
      // Ascending order: j = 0 is the leftmost node.
      const double theta = (2.0 * (N - 1 - j) + 1.0) * std::numbers::pi / (2.0 * N);
      k.nodes[j] = std::cos(theta);
      k.bary[j] = ((N - 1 - j) % 2 ? -1.0 : 1.0) * std::sin(theta);
      for (int m = 0; m < N; ++m) k.cosines[m][j] = std::cos(m * theta);
    }
    return k;
  }();
  return c;
}

// Scale between errors in G and errors in f = x^e G. For e < 0 this
// accepts errors growing like x^e towards the origin, which stay integrable.
double weight_at(double hi, double e) { return e == 0.0 ? 1.0 : std::pow(hi, e); }

// Max of the trailing coefficients relative to the requested accuracy.
double tail_measure(const std::array<double, N>& v) {
  const auto& c = constants();
  double tail = 0.0;
  for (int m = N - 3; m < N; ++m) {
    double s = 0.0;
    for (int j = 0; j < N; ++j) s += v[j] * c.cosines[m][j];
    tail = std::max(tail, std::abs(2.0 * s / N));
  }
  return tail;
}

}  // namespace

const std::array<double, kChebNodes>& cheb_nodes() { return constants().nodes; }

ChebTable ChebTable::build(const BatchEval& f, std::span<const double> breaks, const ChebBuildOptions& opts) {
  if (breaks.size() < 2) throw DomainError("ChebTable needs at least one panel");
  if (opts.origin_exponent != 0.0 && breaks.front() < 0.0) {
    throw DomainError("origin-weighted tables must live on [0, inf)");
  }
  const auto& c = constants();
  ChebTable table;
  table.origin_exponent_ = opts.origin_exponent;

  std::vector<std::pair<double, double>> pending;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) pending.emplace_back(breaks[i], breaks[i + 1]);
  }
  std::vector<ChebPanel> accepted;
  std::vector<double> xs;
  std::vector<double> out;
  while (!pending.empty()) {
    if (accepted.size() + pending.size() > opts.max_panels) {
      std::ostringstream msg;
      msg << "Chebyshev table exceeded " << opts.max_panels << " panels on [" << breaks.front() << ", "
          << breaks.back() << "]";
      throw ConvergenceError(msg.str(), 0.0, 0.0);
    }
    xs.resize(pending.size() * N);
    out.resize(xs.size());
    for (std::size_t p = 0; p < pending.size(); ++p) {
      const double mid = 0.5 * (pending[p].first + pending[p].second);
      const double half = 0.5 * (pending[p].second - pending[p].first);
      for (int j = 0; j < N; ++j) xs[p * N + j] = mid + half * c.nodes[j];
    }
    f(xs, out);
    std::vector<std::pair<double, double>> next;
    for (std::size_t p = 0; p < pending.size(); ++p) {
      ChebPanel panel{pending[p].first, pending[p].second, {}};
      for (int j = 0; j < N; ++j) {
        double v = out[p * N + j];
        if (!std::isfinite(v)) throw DomainError("non-finite value while building a Chebyshev table");
        if (opts.origin_exponent != 0.0) v /= std::pow(xs[p * N + j], opts.origin_exponent);
        panel.values[j] = v;
      }
      // Coefficients cannot drop below the rounding level of the samples.
      double big = 0.0;
      for (double v : panel.values) big = std::max(big, std::abs(v));
      const double tol = std::max(opts.abs_tol / weight_at(panel.hi, opts.origin_exponent), 256 * 2.2e-16 * big);
      const double width = panel.hi - panel.lo;
      const bool tiny = width <= 1e-13 * std::max(std::abs(panel.hi), 1e-300);
      if (tiny || tail_measure(panel.values) <= 0.25 * tol) {
        accepted.push_back(panel);
      } else {
        const double mid = 0.5 * (panel.lo + panel.hi);
        next.emplace_back(panel.lo, mid);
        next.emplace_back(mid, panel.hi);
      }
    }
    pending.swap(next);
  }
  std::sort(accepted.begin(), accepted.end(), [](const ChebPanel& a, const ChebPanel& b) { return a.lo < b.lo; });
  table.panels_ = std::move(accepted);
  return table;
}

void ChebTable::append(const ChebTable& other) {
  if (other.panels_.empty()) return;
  if (panels_.empty()) {
    *this = other;
    return;
  }
  if (other.origin_exponent_ != origin_exponent_) {
    throw DomainError("cannot append Chebyshev tables with different origin weights");
  }
  if (std::abs(other.lo() - hi()) > 1e-12 * std::max(1.0, std::abs(hi()))) {
    throw DomainError("appended Chebyshev table must start where the table ends");
  }
  panels_.insert(panels_.end(), other.panels_.begin(), other.panels_.end());
}

void ChebTable::truncate_above(double x) {
  while (!panels_.empty() && panels_.back().lo >= x) panels_.pop_back();
}

double ChebTable::operator()(double x) const {
  if (panels_.empty() || x < lo() || x > hi()) return 0.0;
  auto it = std::upper_bound(panels_.begin(), panels_.end(), x,
                             [](double v, const ChebPanel& p) { return v < p.lo; });
  const ChebPanel& p = (it == panels_.begin()) ? *it : *(it - 1);
  const auto& c = constants();
  const double t = (2.0 * x - p.lo - p.hi) / (p.hi - p.lo);
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < N; ++j) {
    const double d = t - c.nodes[j];
    if (d == 0.0) {
      num = p.values[j];
      den = 1.0;
      break;
    }
    const double w = c.bary[j] / d;
    num += w * p.values[j];
    den += w;
  }
  const double g = num / den;
  return origin_exponent_ == 0.0 ? g : g * std::pow(x, origin_exponent_);
}

std::vector<double> ChebTable::breakpoints() const {
  std::vector<double> b;
  b.reserve(panels_.size() + 1);
  for (const auto& p : panels_) b.push_back(p.lo);
  if (!panels_.empty()) b.push_back(panels_.back().hi);
  return b;
}

std::array<double, kChebNodes> ChebTable::panel_values(std::size_t i) const {
  const ChebPanel& p = panels_.at(i);
  std::array<double, N> v = p.values;
  if (origin_exponent_ != 0.0) {
    const auto& c = constants();
    for (int j = 0; j < N; ++j) {
      const double x = 0.5 * (p.lo + p.hi) + 0.5 * (p.hi - p.lo) * c.nodes[j];
      v[j] *= std::pow(x, origin_exponent_);
    }
  }
  return v;
}

double ChebTable::max_abs_on(double a, double b) const {
  double m = 0.0;
  for (std::size_t i = 0; i < panels_.size(); ++i) {
    if (panels_[i].hi < a || panels_[i].lo > b) continue;
    for (double v : panel_values(i)) m = std::max(m, std::abs(v));
  }
  return m;
}

void ChebTable::scale(double c) {
  for (auto& p : panels_) {
    for (double& v : p.values) v *= c;
  }
}

}  // namespace htp
