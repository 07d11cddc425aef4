#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mla/patterns.hpp"
#include "mla/synth.hpp"

namespace mla {

enum class ClassifierKind { rule, ocknn };

ClassifierKind parse_classifier(std::string_view name);

// How a pattern is turned into a vector for comparison with the model.
// widest: the widest interval resampled to 2os+1 points.
// peak: the radius-os window around the pattern's highest sample, built
// like the model's training windows.
enum class ProfileMode { widest, peak };

ProfileMode parse_profile_mode(std::string_view name);

struct PipelineParams {
  int K = 20;
  int m = 5;
  double alpha = 0.5;
  int os = 4;
  bool smooth = true;
  ClassifierKind classifier = ClassifierKind::rule;
  ProfileMode profile = ProfileMode::peak;
  std::optional<double> phi1;  // overrides of the model defaults
  std::optional<double> phi2;
};

struct ClassifiedPattern {
  Pattern pattern;
  double score = 0.0;  // dissimilarity to the model
  RegionLabel phase1 = RegionLabel::L;
};

struct PipelineResult {
  std::vector<ClassifiedPattern> patterns;  // selected patterns
  std::vector<Region> regions;              // final labels (W/D/F)
  std::vector<std::uint8_t> probe_labels;   // 1 = nucleosome
  ClassifierParams params;
  double ocknn_phi = 0.0;
  int ocknn_k = 0;
  std::size_t training_size = 0;
};

/// Smoothing (optional) followed by normalization to [0,1].
Signal preprocess(const Signal& s, bool smooth = true);

/// Model from the preprocessed signal(s).
NucleosomeModel model_from_signals(const std::vector<Signal>& raw, const PipelineParams& p);

/// 1 for each probe p (1-based) lying in [start - 1/2, end + 1/2] of some region.
std::vector<std::uint8_t> probe_labels(const std::vector<Region>& regions, std::size_t n);

/// Transform, aggregate, select and classify. For the ocknn classifier the
/// training set is the unimodal windows of `training` (preprocessed).
PipelineResult run_pipeline(const Signal& s, const NucleosomeModel& model,
                            const PipelineParams& p,
                            const std::vector<Signal>& training = {});

struct MCalibrationRun {
  double snr = 0.0;
  int K = 0;
  int replicate = 0;
  int best_m = 0;
  double best_ra = 0.0;
  std::vector<double> ra_by_m;  // index m
};

struct MCalibrationOptions {
  std::vector<double> snr_list{1, 2, 4};
  std::vector<int> k_list{20, 30, 40};
  int replicates = 1;
  std::uint64_t seed = 0;
  PipelineParams params;
};

/// For each (snr, K, replicate): generate a signal and an independent
/// training signal, sweep m = 0..K and keep the RA-maximizing m (median of
/// the argmax set on ties).
std::vector<MCalibrationRun> calibrate_m(const SynthConfig& base, const MCalibrationOptions& opt);

struct SynthCase {
  MaskSignal mask;
  SynthSignal signal;
  MaskSignal train_mask;
  SynthSignal train_signal;
};

/// Test signal with cfg.seed and a training signal from a derived seed.
SynthCase make_synth_case(const SynthConfig& cfg);

}  // namespace mla
