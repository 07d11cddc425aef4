#include "mla/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mla {

Signal::Signal(std::vector<double> samples, double domain_start)
    : samples_(std::move(samples)), domain_start_(domain_start) {
  if (samples_.empty()) throw std::invalid_argument("signal must have at least one sample");
  for (double v : samples_) {
    if (!std::isfinite(v)) throw std::invalid_argument("signal samples must be finite");
  }
}

double Signal::min() const { return *std::min_element(samples_.begin(), samples_.end()); }
double Signal::max() const { return *std::max_element(samples_.begin(), samples_.end()); }

double Signal::at(double x) const {
  const double pos = std::clamp(x - domain_start_, 0.0, static_cast<double>(size() - 1));
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= size()) return samples_.back();
  const double t = pos - static_cast<double>(i);
  return samples_[i] + t * (samples_[i + 1] - samples_[i]);
}

CorrelationMethod parse_correlation_method(std::string_view name) {
  if (name == "pearson") return CorrelationMethod::pearson;
  if (name == "spearman") return CorrelationMethod::spearman;
  if (name == "kendall") return CorrelationMethod::kendall;
  throw std::invalid_argument("unknown correlation method: " + std::string(name));
}

Signal normalize_unit(const Signal& s) {
  const double lo = s.min();
  const double hi = s.max();
  std::vector<double> out(s.size(), 0.0);
  if (hi > lo) {
    const double span = hi - lo;
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = (s[i] - lo) / span;
  }
  return Signal(std::move(out), s.domain_start());
}

Signal disambiguate(const Signal& s) {
  const double lo = s.min();
  const bool pad_front = s.samples().front() != lo;
  const bool pad_back = s.samples().back() != lo;
  if (!pad_front && !pad_back) return s;
  std::vector<double> out;
  out.reserve(s.size() + 2);
  if (pad_front) out.push_back(lo);
  out.insert(out.end(), s.samples().begin(), s.samples().end());
  if (pad_back) out.push_back(lo);
  return Signal(std::move(out), pad_front ? s.domain_start() - 1.0 : s.domain_start());
}

Signal smooth3(const Signal& s) {
  const std::size_t n = s.size();
  if (n == 1) return s;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.5 * s[i];
    double w = 0.5;
    if (i > 0) {
      acc += 0.25 * s[i - 1];
      w += 0.25;
    }
    if (i + 1 < n) {
      acc += 0.25 * s[i + 1];
      w += 0.25;
    }
    out[i] = acc / w;
  }
  return Signal(std::move(out), s.domain_start());
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("correlation: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("correlation: need at least two samples");
}

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const bool cx = is_constant(x);
  const bool cy = is_constant(y);
  // Undefined for zero variance; flat fragments still need a score.
  if (cx || cy) return (cx && cy && x.front() == y.front()) ? 1.0 : 0.0;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  return pearson(rx, ry);
}

double kendall(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const std::size_t n = x.size();
  long long score = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[j] - x[i];
      const double dy = y[j] - y[i];
      const int sx = (dx > 0) - (dx < 0);
      const int sy = (dy > 0) - (dy < 0);
      score += sx * sy;
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(score) / pairs;
}

double correlation(std::span<const double> x, std::span<const double> y,
                   CorrelationMethod method) {
  switch (method) {
    case CorrelationMethod::pearson: return pearson(x, y);
    case CorrelationMethod::spearman: return spearman(x, y);
    case CorrelationMethod::kendall: return kendall(x, y);
  }
  throw std::logic_error("unreachable");
}

double correlation(const Signal& x, const Signal& y, CorrelationMethod method) {
  return correlation(x.samples(), y.samples(), method);
}

int min_lossless_thresholds(const Signal& s, double eps_min) {
  if (!(eps_min > 0.0)) throw std::invalid_argument("eps_min must be positive");
  long long sum = 0;
  long long g = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const auto term = std::llround(std::abs(s[i + 1] - s[i]) / eps_min);
    if (term == 0) continue;
    sum += term;
    g = std::gcd(g, term);
  }
  if (g == 0) return 2;
  return static_cast<int>(std::max<long long>(2, sum / g));
}

}  // namespace mla
