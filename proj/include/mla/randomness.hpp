#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mla/signal.hpp"
#include "mla/transform.hpp"

namespace mla {

struct LengthPdf {
  int level = 0;
  int nb = 0;
  double len_max = 0.0;
  std::vector<double> mass;
};

std::vector<double> interval_lengths(const IntervalRepresentation& rep, int k);

/// Histogram of lengths in nb equal bins over [0, len_max]; lengths at or
/// beyond len_max go to the last bin. Throws "level skipped" on no data.
LengthPdf length_pdf(const std::vector<double>& lengths, int level, int nb, double len_max);
LengthPdf interval_length_pdf(const IntervalRepresentation& rep, int k, int nb, double len_max);

/// Symmetrized KL divergence (base 2) after adding 1e-10 to every bin.
double skl(const LengthPdf& p, const LengthPdf& q);

struct NullParams {
  int N = 1000;
  std::size_t l = 20000;
  int K = 9;
  int nb = 100;
  double mu = 0.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  // Bin range per level. When false each level uses the largest interval
  // length seen in the null replicates; when true every level uses l.
  bool sample_length_range = false;
  // replicates with fewer intervals at a level are excluded there; a level
  // needs at least half of the replicates to qualify
  std::size_t min_intervals = 5;
};

struct NullLevel {
  int k = 0;
  bool testable = false;
  double len_max = 0.0;
  std::size_t replicates = 0;   // replicates contributing to the samples
  std::vector<double> samples;  // pairwise SKL values, sorted ascending
  double bandwidth = 0.0;       // Silverman's rule, for density plots

  /// Fraction of null samples strictly below x.
  double cdf(double x) const;
  double density(double x) const;
};

struct NullModel {
  NullParams params;
  std::vector<NullLevel> levels;  // index k-1
};

/// Gaussian signal of length l for replicate/stream `stream`.
Signal null_replicate(const NullParams& p, std::uint64_t stream);

NullModel estimate_null(const NullParams& params);

struct LevelResult {
  int k = 0;
  bool testable = false;
  std::string reason;  // why the level is untestable
  double skl = 0.0;
  double cdf = 0.0;
  bool reject = false;
};

struct RandomnessReport {
  double alpha = 0.9;
  std::vector<LevelResult> levels;
  std::vector<int> untestable_levels() const;
};

/// Compares the signal's per-level length histograms against one fresh
/// null replicate drawn from `replicate_seed`. Reject iff CDF(skl) > alpha.
RandomnessReport run_test(const Signal& s, const NullModel& null, double alpha,
                          std::uint64_t replicate_seed);

/// Pools intervals of several fragments per level.
RandomnessReport run_test(const std::vector<Signal>& fragments, const NullModel& null,
                          double alpha, std::uint64_t replicate_seed);

enum class Side { two_sided, greater, less };
enum class WilcoxonMethod { automatic, exact, normal };

Side parse_side(std::string_view s);

struct WilcoxonResult {
  double W = 0.0;   // rank sum of y
  double p = 1.0;
  bool reject = false;
  bool exact = false;
};

/// Rank-sum test of y against x. `greater` tests for y shifted upwards.
/// Rejects when p <= 1 - confidence.
WilcoxonResult wilcoxon_rank_sum(const std::vector<double>& x, const std::vector<double>& y,
                                 double confidence = 0.95, Side side = Side::two_sided,
                                 WilcoxonMethod method = WilcoxonMethod::automatic);

/// Exact null distribution of the rank sum of n items drawn from the given
/// ranks: pairs (W, probability) sorted by W.
std::vector<std::pair<double, double>> rank_sum_distribution(const std::vector<double>& ranks,
                                                             std::size_t n);

double normal_cdf(double z);

}  // namespace mla
