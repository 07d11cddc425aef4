#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mla/signal.hpp"
#include "mla/transform.hpp"

namespace mla {

/// Chain of nested intervals on consecutive levels, widest first.
struct Pattern {
  int base_level = 1;
  std::vector<Interval> intervals;

  std::size_t size() const { return intervals.size(); }
  int top_level() const { return base_level + static_cast<int>(intervals.size()) - 1; }
  const Interval& at_level(int k) const { return intervals.at(k - base_level); }
};

struct NucleosomeModel {
  std::vector<double> values;  // length 2*os+1
  int os = 0;
  double alpha = 0.5;          // weight used for the training statistics
  double train_mean = 0.0;
  double train_std = 0.0;
  std::size_t train_windows = 0;
};

struct ClassifierParams {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double alpha = 0.5;
};

enum class RegionLabel { L, EW, ED, W, D, F };

std::string to_string(RegionLabel label);
RegionLabel parse_region_label(std::string_view s);

/// Splits the representation into unique-child chains. A branch ends the
/// current chain and every child starts a new one.
std::vector<Pattern> aggregate_patterns(const IntervalRepresentation& rep);

/// Keeps patterns with strictly more than m intervals.
std::vector<Pattern> select_patterns(const std::vector<Pattern>& patterns, int m);

/// Shoelace area of the polygon through the starts (upward) and the ends
/// (downward) restricted to levels [lo, hi].
double pattern_area(const Pattern& p, int lo, int hi);

double pattern_dissimilarity(const Pattern& r, const Pattern& s, double alpha);

/// Vector form used against the model: area term is the difference of the
/// sums, shape term the sum of pointwise absolute differences.
double vector_dissimilarity(const std::vector<double>& u, const std::vector<double>& v,
                            double alpha);

/// Signal restricted to the pattern's widest interval, linearly resampled to
/// n points.
std::vector<double> pattern_profile(const Pattern& p, const Signal& s, std::size_t n);

/// Radius-os window of the signal centred on the highest sample of the
/// pattern's innermost interval (clamped at the domain ends).
std::vector<double> peak_profile(const Pattern& p, const Signal& s, int os);

double model_dissimilarity(const Pattern& p, const Signal& s, const NucleosomeModel& model,
                           double alpha);

/// Windows of radius os centered on strict local maxima that rise strictly
/// up to the center and fall strictly after it.
std::vector<std::vector<double>> extract_windows(const Signal& s, int os);

/// Averages the strictly unimodal windows of radius os centered on local
/// maxima. Throws "no training patterns" when none qualify.
NucleosomeModel build_model(const std::vector<Signal>& fragments, int os, double alpha = 0.5);

/// (mean - 3 std, mean + 3 std) of the training dissimilarities, phi1 >= 0.
ClassifierParams default_params(const NucleosomeModel& model);

RegionLabel classify_phase1(double delta, const ClassifierParams& params);

struct Region {
  double start = 0.0;
  double end = 0.0;
  RegionLabel label = RegionLabel::EW;
  double score = 0.0;
};

/// Expected nucleosomal region for a pattern labelled EW or ED.
Region expected_region(const Pattern& p, RegionLabel label);

/// EW/ED -> W/D, or F for every region overlapping another one.
std::vector<RegionLabel> classify_phase2(const std::vector<Region>& regions);

}  // namespace mla
