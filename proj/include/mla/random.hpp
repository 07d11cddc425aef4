#pragma once

#include <cstdint>
#include <random>

namespace mla {

/// splitmix64 finalizer, used to derive independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Sub-seed for stream `stream` of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed + splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// The std:: distributions are implementation-defined, so outputs would differ
// between standard libraries. These are written out by hand on top of
// mt19937_64, whose output sequence is fixed by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }
  /// Uniform in [0,1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi] (inclusive).
  long long uniform_int(long long lo, long long hi);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  long long poisson(double mean);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mla
