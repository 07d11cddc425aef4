#include "mla/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mla/random.hpp"

namespace mla {

namespace {
enum Stream : std::uint64_t { kMask = 1, kChannels = 2, kNoise = 3 };
}

void SynthConfig::validate() const {
  if (nn < 0) throw std::invalid_argument("nn must be >= 0");
  if (nl < 1) throw std::invalid_argument("nl must be >= 1");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (o < 0 || r <= o) throw std::invalid_argument("probe geometry needs r > o >= 0");
  if (nr < 1) throw std::invalid_argument("nr must be >= 1");
  if (!(dp >= 0.0 && dp <= 1.0)) throw std::invalid_argument("dp must be in [0,1]");
  if (!(dr >= 0.0)) throw std::invalid_argument("dr must be >= 0");
  if (!(nsv >= 0.0)) throw std::invalid_argument("nsv must be >= 0");
  if (!(pur >= 0.0 && pur <= 1.0)) throw std::invalid_argument("pur must be in [0,1]");
  if (!(ra > 0.0)) throw std::invalid_argument("ra must be > 0");
  if (!(snr >= 0.0) || !std::isfinite(snr)) throw std::invalid_argument("SNR must be finite and >= 0");
}

std::size_t probe_count(long long length, int r, int o) {
  if (length < r) return 0;
  return static_cast<std::size_t>((length - o) / (r - o));
}

std::vector<std::uint8_t> probe_mask(const std::vector<std::uint8_t>& bp, int r, int o) {
  const std::size_t n = probe_count(static_cast<long long>(bp.size()), r, o);
  // prefix sums make each probe O(1)
  std::vector<long long> pre(bp.size() + 1, 0);
  for (std::size_t i = 0; i < bp.size(); ++i) pre[i + 1] = pre[i] + bp[i];
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const auto a = probe_first_bp(i, r, o);
    const auto b = probe_last_bp(i, r, o);
    out[i - 1] = pre[b] - pre[a - 1] > 0 ? 1 : 0;
  }
  return out;
}

MaskSignal generate_mask(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, kMask));
  MaskSignal m;
  m.offset = rng.uniform_int(0, cfg.r);
  std::vector<std::uint8_t>& bp = m.bp;
  bp.assign(static_cast<std::size_t>(m.offset), 0);
  for (int n = 0; n < cfg.nn; ++n) {
    m.nucleosomes.push_back({static_cast<long long>(bp.size()) + 1, false});
    bp.insert(bp.end(), static_cast<std::size_t>(cfg.nl), 1);
    const long long gap = std::max<long long>(1, rng.poisson(cfg.lambda));
    bp.insert(bp.end(), static_cast<std::size_t>(gap), 0);
  }
  if (bp.size() < static_cast<std::size_t>(cfg.r)) bp.resize(static_cast<std::size_t>(cfg.r), 0);
  // delocalized nucleosomes are a property of the signal, fixed across replicates
  for (auto& nuc : m.nucleosomes) nuc.delocalized = rng.bernoulli(cfg.dp);
  m.probes = probe_mask(bp, cfg.r, cfg.o);
  return m;
}

namespace {

// Adds the overlap of base pairs [a,b] with every probe to counts.
void add_coverage(std::vector<double>& counts, long long a, long long b, int r, int o) {
  const long long step = r - o;
  const long long n = static_cast<long long>(counts.size());
  if (b < 1 || n == 0) return;
  a = std::max<long long>(a, 1);
  // probes whose span [step*(i-1)+1, step*(i-1)+r] meets [a,b]
  long long lo = (a - r + step - 1) / step + 1;  // ceil((a-r)/step)+1
  if (a - r < 0) lo = 1;
  long long hi = (b - 1) / step + 1;
  lo = std::max<long long>(lo, 1);
  hi = std::min(hi, n);
  for (long long i = lo; i <= hi; ++i) {
    const long long pa = step * (i - 1) + 1;
    const long long pb = pa + r - 1;
    const long long ov = std::min(b, pb) - std::max(a, pa) + 1;
    if (ov > 0) counts[static_cast<std::size_t>(i - 1)] += static_cast<double>(ov);
  }
}

}  // namespace

SynthSignal generate_signal(const SynthConfig& cfg, const MaskSignal& mask) {
  cfg.validate();
  const std::size_t n = mask.probes.size();
  if (n == 0) throw std::invalid_argument("mask shorter than one probe");
  Rng rng(derive_seed(cfg.seed, kChannels));
  std::vector<double> green(n, 0.0), red(n, 0.0);
  const long long len = static_cast<long long>(mask.bp.size());
  for (int rep = 0; rep < cfg.nr; ++rep) {
    for (const auto& nuc : mask.nucleosomes) {
      double shift = 0.0;
      if (nuc.delocalized) shift = rng.uniform(-0.5 * cfg.dr, 0.5 * cfg.dr);
      if (!rng.bernoulli(cfg.pur)) continue;
      const long long a = nuc.start + std::llround(shift);
      add_coverage(green, a, a + cfg.nl - 1, cfg.r, cfg.o);
    }
    // reference channel: the genome cut in pieces of r bp from a random offset
    const long long b = rng.uniform_int(0, cfg.r - 1);
    long long a = 1;
    long long e = b > 0 ? b : cfg.r;
    while (a <= len) {
      if (rng.bernoulli(cfg.pur)) add_coverage(red, a, std::min(e, len), cfg.r, cfg.o);
      a = e + 1;
      e = a + cfg.r - 1;
    }
  }
  SynthSignal out;
  out.clean.resize(n);
  const double eps_sd = std::sqrt(cfg.nsv);
  for (std::size_t i = 0; i < n; ++i) {
    const double eps = rng.normal(0.1, eps_sd);
    const double ratio = cfg.ra * (green[i] + 1.0) / (red[i] + 1.0) + eps;
    out.clean[i] = std::log2(std::max(ratio, 0.01));
  }
  double mean = 0.0;
  for (double v : out.clean) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : out.clean) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);

  Rng noise(derive_seed(cfg.seed, kNoise));
  std::vector<double> v(n);
  if (cfg.snr == 0.0) {
    const double sd = std::sqrt(var > 0.0 ? var : 1.0);
    out.noise_sd = sd;
    for (std::size_t i = 0; i < n; ++i) v[i] = mean + sd * noise.normal();
  } else {
    out.noise_sd = std::sqrt(var) / cfg.snr;
    for (std::size_t i = 0; i < n; ++i) v[i] = out.clean[i] + out.noise_sd * noise.normal();
  }
  out.values = Signal(std::move(v));
  return out;
}

double RecognitionResult::recall(int cls) const {
  const long long tot = confusion[cls][0] + confusion[cls][1];
  return tot == 0 ? 0.0 : static_cast<double>(confusion[cls][cls]) / static_cast<double>(tot);
}

RecognitionResult recognition_accuracy(const std::vector<std::uint8_t>& predicted,
                                       const std::vector<std::uint8_t>& truth,
                                       double min_overlap) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("recognition_accuracy: length mismatch");
  }
  RecognitionResult res;
  long long total = 0, hit = 0;
  std::size_t i = 0;
  while (i < truth.size()) {
    std::size_t j = i;
    while (j < truth.size() && truth[j] == truth[i]) ++j;
    const int cls = truth[i] ? 1 : 0;
    // longest same-class predicted run inside [i, j); a predicted run that
    // extends past the region intersects it in exactly this stretch
    std::size_t best = 0, cur = 0;
    for (std::size_t t = i; t < j; ++t) {
      cur = ((predicted[t] ? 1 : 0) == cls) ? cur + 1 : 0;
      best = std::max(best, cur);
    }
    const bool ok = static_cast<double>(best) >= min_overlap * static_cast<double>(j - i) - 1e-12;
    res.confusion[cls][ok ? cls : 1 - cls] += 1;
    ++total;
    if (ok) ++hit;
    i = j;
  }
  res.ra = total == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(total);
  return res;
}

}  // namespace mla
