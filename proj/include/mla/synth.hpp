#pragma once

#include <cstdint>
#include <vector>

#include "mla/signal.hpp"

namespace mla {

struct SynthConfig {
  int nn = 200;         // nucleosomes
  int nl = 250;         // nucleosome length (bp)
  double lambda = 200;  // mean linker gap (bp)
  int r = 50;           // probe length (bp)
  int o = 20;           // probe overlap (bp)
  int nr = 100;         // replicates
  double dp = 0.0;      // delocalized fraction
  double dr = 0.0;      // delocalization range (bp)
  double nsv = 0.01;    // variance of the additive term
  double pur = 0.8;     // purification probability
  double ra = 4.0;      // relative abundance
  double snr = 0.0;     // 0 means noise only; see generate_signal
  std::uint64_t seed = 0;

  void validate() const;
  int step() const { return r - o; }
};

struct Nucleosome {
  long long start = 0;  // first base pair, 1-based
  bool delocalized = false;
};

struct MaskSignal {
  std::vector<std::uint8_t> bp;      // M over base pairs
  std::vector<std::uint8_t> probes;  // M' over probes
  std::vector<Nucleosome> nucleosomes;
  long long offset = 0;              // leading zeros b
};

/// Number of full probes tiling `length` base pairs.
std::size_t probe_count(long long length, int r, int o);

/// Probe i (1-based) spans base pairs [first, last].
inline long long probe_first_bp(std::size_t i, int r, int o) {
  return static_cast<long long>(r - o) * static_cast<long long>(i - 1) + 1;
}
inline long long probe_last_bp(std::size_t i, int r, int o) {
  return probe_first_bp(i, r, o) + r - 1;
}

MaskSignal generate_mask(const SynthConfig& cfg);

/// Probe-level mask: 1 iff the probe covers at least one nucleosome base pair.
std::vector<std::uint8_t> probe_mask(const std::vector<std::uint8_t>& bp, int r, int o);

struct SynthSignal {
  Signal values;           // observed V
  std::vector<double> clean;  // V before the SNR noise
  double noise_sd = 0.0;
};

/// Signal V over probes for the given mask. With SNR > 0 Gaussian noise of
/// variance var(clean V)/SNR^2 is added; SNR = 0 returns noise only.
SynthSignal generate_signal(const SynthConfig& cfg, const MaskSignal& mask);

struct RecognitionResult {
  double ra = 0.0;
  // confusion[t][p]: regions of true class t (0 = L, 1 = N) recognized (p = t)
  // or missed (p != t)
  long long confusion[2][2] = {{0, 0}, {0, 0}};
  double recall(int cls) const;
};

/// labels: 1 = nucleosome, 0 = linker, one per probe.
RecognitionResult recognition_accuracy(const std::vector<std::uint8_t>& predicted,
                                       const std::vector<std::uint8_t>& truth,
                                       double min_overlap = 0.7);

}  // namespace mla
