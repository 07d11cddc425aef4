#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mla {

/// Finite real-valued sequence sampled on consecutive integer coordinates
/// [domain_start, domain_start + size - 1]. Original signals start at 1;
/// disambiguation may prepend a sample at coordinate 0.
class Signal {
 public:
  Signal() = default;
  explicit Signal(std::vector<double> samples, double domain_start = 1.0);

  std::span<const double> samples() const { return samples_; }
  const std::vector<double>& values() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double operator[](std::size_t i) const { return samples_[i]; }

  double domain_start() const { return domain_start_; }
  double domain_end() const {
    return domain_start_ + static_cast<double>(samples_.size()) - 1.0;
  }

  double min() const;
  double max() const;

  /// Linear interpolation of the samples at a fractional coordinate,
  /// clamped to the domain.
  double at(double x) const;

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  std::vector<double> samples_;
  double domain_start_ = 1.0;
};

enum class CorrelationMethod { pearson, spearman, kendall };

CorrelationMethod parse_correlation_method(std::string_view name);

/// Affine map onto [0,1]; constant signals map to all zeros.
Signal normalize_unit(const Signal& s);

/// Pads the ends with min(s) whenever an endpoint is not already the minimum.
/// A prepended sample shifts domain_start down by one.
Signal disambiguate(const Signal& s);

/// Weighted moving average with window [1/4, 1/2, 1/4]. At the boundaries the
/// truncated window is renormalized.
Signal smooth3(const Signal& s);

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
/// Kendall tau-a: (concordant - discordant) / (n(n-1)/2).
double kendall(std::span<const double> x, std::span<const double> y);

double correlation(const Signal& x, const Signal& y, CorrelationMethod method);
double correlation(std::span<const double> x, std::span<const double> y,
                   CorrelationMethod method);

/// Midranks (1-based) of the values; ties share the average rank.
std::vector<double> midranks(std::span<const double> values);

/// Number of equally spaced thresholds needed for a lossless representation,
/// from the step-size GCD argument: sum(round(d_n/eps)) / gcd, clamped to >= 2.
int min_lossless_thresholds(const Signal& s, double eps_min);

}  // namespace mla
