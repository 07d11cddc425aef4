#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "mla/signal.hpp"

namespace mla {

struct Interval {
  double start = 0.0;
  double end = 0.0;
  int level = 1;  // 1-based threshold index
  double threshold = 0.0;

  double length() const { return end - start; }
  double midpoint() const { return 0.5 * (start + end); }
  bool contains(const Interval& o, double tol = 1e-9) const {
    return o.start >= start - tol && o.end <= end + tol;
  }
  bool contains(double x, double tol = 1e-9) const {
    return x >= start - tol && x <= end + tol;
  }
};

struct IntervalRepresentation {
  int K = 0;
  std::vector<double> thresholds;
  std::vector<std::vector<Interval>> levels;  // levels[k-1] holds I_k
  std::size_t source_length = 0;

  std::size_t total_intervals() const;
  const std::vector<Interval>& level(int k) const { return levels.at(k - 1); }
  /// Coordinates of the single level-1 interval (the disambiguated domain).
  double domain_start() const;
  double domain_end() const;
};

/// phi_k = (k-1)/(K-1), k = 1..K.
std::vector<double> equally_spaced_thresholds(int K);

/// Super-threshold components of the disambiguated signal for every
/// threshold. Values must lie in [0,1].
IntervalRepresentation horizontal_sampling(const Signal& s, int K);

enum class ReconstructMode {
  interpolated,  // linear interpolation through all interval endpoints
  level_set,     // highest threshold whose interval contains the sample
};

ReconstructMode parse_reconstruct_mode(std::string_view name);

/// Values at the original sample positions 1..source_length.
Signal reconstruct(const IntervalRepresentation& rep,
                   ReconstructMode mode = ReconstructMode::interpolated);

/// Values over the whole disambiguated domain (including padding samples).
Signal reconstruct_domain(const IntervalRepresentation& rep,
                          ReconstructMode mode = ReconstructMode::interpolated);

struct IntervalBound {
  long long max_intervals = 0;
  long long max_endpoints = 0;
};

IntervalBound interval_count_bound(long long L, long long K);

/// Number of original sample positions 1..L that are not an endpoint of
/// any interval.
std::size_t missing_probes(const IntervalRepresentation& rep);

struct CalibrationRow {
  int k = 0;
  double rho_bar = 0.0;
  double ms_bar = 0.0;
  double score = 0.0;
};

struct KCalibration {
  std::vector<CalibrationRow> rows;
  int suggested_k = 2;
};

KCalibration calibrate_k(const std::vector<Signal>& fragments, int K_max,
                         ReconstructMode mode = ReconstructMode::interpolated);

}  // namespace mla
