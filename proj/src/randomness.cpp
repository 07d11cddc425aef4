#include "mla/randomness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "mla/parallel.hpp"
#include "mla/random.hpp"

namespace mla {

std::vector<double> interval_lengths(const IntervalRepresentation& rep, int k) {
  std::vector<double> out;
  for (const auto& iv : rep.level(k)) out.push_back(iv.length());
  return out;
}

LengthPdf length_pdf(const std::vector<double>& lengths, int level, int nb, double len_max) {
  if (nb < 1) throw std::invalid_argument("nb must be at least 1");
  if (!(len_max > 0.0)) throw std::invalid_argument("len_max must be positive");
  if (lengths.empty()) throw std::runtime_error("level skipped: no intervals at level " + std::to_string(level));
  LengthPdf pdf{level, nb, len_max, std::vector<double>(nb, 0.0)};
  const double width = len_max / nb;
  for (double len : lengths) {
    auto b = static_cast<long long>(std::floor(len / width));
    b = std::clamp<long long>(b, 0, nb - 1);
    pdf.mass[static_cast<std::size_t>(b)] += 1.0;
  }
  for (double& m : pdf.mass) m /= static_cast<double>(lengths.size());
  return pdf;
}

LengthPdf interval_length_pdf(const IntervalRepresentation& rep, int k, int nb, double len_max) {
  return length_pdf(interval_lengths(rep, k), k, nb, len_max);
}

double skl(const LengthPdf& p, const LengthPdf& q) {
  if (p.mass.size() != q.mass.size() || p.len_max != q.len_max) {
    throw std::invalid_argument("skl: histograms differ in shape");
  }
  constexpr double eps = 1e-10;
  const double zp = 1.0 + eps * static_cast<double>(p.mass.size());
  const double zq = 1.0 + eps * static_cast<double>(q.mass.size());
  double kl_pq = 0.0, kl_qp = 0.0;
  for (std::size_t i = 0; i < p.mass.size(); ++i) {
    const double a = (p.mass[i] + eps) / zp;
    const double b = (q.mass[i] + eps) / zq;
    const double lr = std::log2(a / b);
    kl_pq += a * lr;
    kl_qp -= b * lr;
  }
  return std::max(0.0, 0.5 * (kl_pq + kl_qp));
}

double NullLevel::cdf(double x) const {
  if (samples.empty()) return 0.0;
  const auto it = std::lower_bound(samples.begin(), samples.end(), x);
  return static_cast<double>(it - samples.begin()) / static_cast<double>(samples.size());
}

double NullLevel::density(double x) const {
  if (samples.empty() || !(bandwidth > 0.0)) return 0.0;
  double acc = 0.0;
  for (double s : samples) {
    const double z = (x - s) / bandwidth;
    acc += std::exp(-0.5 * z * z);
  }
  return acc / (static_cast<double>(samples.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
}

namespace {

double silverman(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : sorted) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n - 1));
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(n - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double t = pos - static_cast<double>(i);
    return i + 1 < n ? sorted[i] + t * (sorted[i + 1] - sorted[i]) : sorted[i];
  };
  const double iqr = q(0.75) - q(0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

IntervalRepresentation transform_raw(const Signal& s, int K) {
  return horizontal_sampling(normalize_unit(s), K);
}

}  // namespace

Signal null_replicate(const NullParams& p, std::uint64_t stream) {
  Rng rng(derive_seed(p.seed, stream));
  std::vector<double> v(p.l);
  for (double& x : v) x = rng.normal(p.mu, p.sigma);
  return Signal(std::move(v));
}

NullModel estimate_null(const NullParams& params) {
  if (params.N < 2) throw std::invalid_argument("estimate_null: N must be at least 2");
  if (params.l < 3) throw std::invalid_argument("estimate_null: l must be at least 3");
  if (params.K < 2) throw std::invalid_argument("estimate_null: K must be at least 2");
  if (params.nb < 1) throw std::invalid_argument("estimate_null: nb must be at least 1");
  const std::size_t N = static_cast<std::size_t>(params.N);
  const int K = params.K;
  // lengths[r][k-1]
  std::vector<std::vector<std::vector<double>>> lengths(N);
  parallel_for(N, [&](std::size_t r) {
    const auto rep = transform_raw(null_replicate(params, r), K);
    lengths[r].resize(K);
    for (int k = 1; k <= K; ++k) lengths[r][k - 1] = interval_lengths(rep, k);
  });

  NullModel model;
  model.params = params;
  model.levels.resize(K);
  for (int k = 1; k <= K; ++k) {
    NullLevel& lv = model.levels[k - 1];
    lv.k = k;
    // replicates with too few intervals are left out, matching the
    // condition under which run_test compares histograms
    std::vector<std::size_t> used;
    double mx = 0.0;
    for (std::size_t r = 0; r < N; ++r) {
      const auto& ls = lengths[r][k - 1];
      for (double x : ls) mx = std::max(mx, x);
      if (ls.size() >= params.min_intervals) used.push_back(r);
    }
    lv.replicates = used.size();
    lv.len_max = params.sample_length_range ? static_cast<double>(params.l) : mx;
    lv.testable = used.size() >= std::max<std::size_t>(2, (N + 1) / 2) && lv.len_max > 0.0;
    if (!lv.testable) continue;
    const std::size_t M = used.size();
    std::vector<LengthPdf> pdfs;
    pdfs.reserve(M);
    for (std::size_t r : used) pdfs.push_back(length_pdf(lengths[r][k - 1], k, params.nb, lv.len_max));
    lv.samples.resize(M * (M - 1) / 2);
    // row i owns the slots of pairs (i, j > i)
    parallel_for(M, [&](std::size_t i) {
      std::size_t base = i * M - i * (i + 1) / 2;
      for (std::size_t j = i + 1; j < M; ++j) lv.samples[base + (j - i - 1)] = skl(pdfs[i], pdfs[j]);
    });
    std::sort(lv.samples.begin(), lv.samples.end());
    lv.bandwidth = silverman(lv.samples);
  }
  return model;
}

std::vector<int> RandomnessReport::untestable_levels() const {
  std::vector<int> out;
  for (const auto& l : levels) {
    if (!l.testable) out.push_back(l.k);
  }
  return out;
}

RandomnessReport run_test(const std::vector<Signal>& fragments, const NullModel& null,
                          double alpha, std::uint64_t replicate_seed) {
  if (fragments.empty()) throw std::invalid_argument("run_test: no input signal");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");
  const auto& p = null.params;
  const int K = p.K;
  std::vector<std::vector<double>> observed(K);
  for (const auto& f : fragments) {
    const auto rep = transform_raw(f, K);
    for (int k = 1; k <= K; ++k) {
      const auto ls = interval_lengths(rep, k);
      observed[k - 1].insert(observed[k - 1].end(), ls.begin(), ls.end());
    }
  }
  // the fresh replicate comes from its own seed, not from the null's streams
  NullParams fresh = p;
  fresh.seed = replicate_seed;
  const auto ref = transform_raw(null_replicate(fresh, 0), K);

  RandomnessReport rep;
  rep.alpha = alpha;
  for (int k = 1; k <= K; ++k) {
    const NullLevel& lv = null.levels.at(k - 1);
    LevelResult res;
    res.k = k;
    const auto ref_len = interval_lengths(ref, k);
    if (!lv.testable) {
      res.reason = "null level has fewer than " + std::to_string(p.min_intervals) + " intervals";
    } else if (observed[k - 1].size() < p.min_intervals) {
      res.reason = "signal has fewer than " + std::to_string(p.min_intervals) + " intervals";
    } else if (ref_len.size() < p.min_intervals) {
      res.reason = "reference replicate has fewer than " + std::to_string(p.min_intervals) + " intervals";
    } else {
      res.testable = true;
      const auto a = length_pdf(observed[k - 1], k, p.nb, lv.len_max);
      const auto b = length_pdf(ref_len, k, p.nb, lv.len_max);
      res.skl = skl(a, b);
      res.cdf = lv.cdf(res.skl);
      res.reject = res.cdf > alpha;
    }
    rep.levels.push_back(res);
  }
  return rep;
}

RandomnessReport run_test(const Signal& s, const NullModel& null, double alpha,
                          std::uint64_t replicate_seed) {
  return run_test(std::vector<Signal>{s}, null, alpha, replicate_seed);
}

Side parse_side(std::string_view s) {
  if (s == "two-sided" || s == "two_sided" || s == "both") return Side::two_sided;
  if (s == "greater" || s == "right") return Side::greater;
  if (s == "less" || s == "left") return Side::less;
  throw std::invalid_argument("unknown side: " + std::string(s));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

std::vector<std::pair<double, double>> rank_sum_distribution(const std::vector<double>& ranks,
                                                             std::size_t n) {
  if (n > ranks.size()) throw std::invalid_argument("rank_sum_distribution: n exceeds rank count");
  // midranks are multiples of 1/2, so doubled ranks are integers
  std::vector<long long> r2;
  long long total = 0;
  for (double r : ranks) {
    r2.push_back(std::llround(2.0 * r));
    total += r2.back();
  }
  // ways[j][s]: subsets of size j with doubled sum s
  std::vector<std::vector<double>> ways(n + 1, std::vector<double>(static_cast<std::size_t>(total) + 1, 0.0));
  ways[0][0] = 1.0;
  for (long long v : r2) {
    for (std::size_t j = n; j >= 1; --j) {
      for (long long s = total; s >= v; --s) ways[j][s] += ways[j - 1][s - v];
    }
  }
  double count = 0.0;
  for (double w : ways[n]) count += w;
  std::vector<std::pair<double, double>> out;
  for (long long s = 0; s <= total; ++s) {
    if (ways[n][s] > 0.0) out.emplace_back(0.5 * static_cast<double>(s), ways[n][s] / count);
  }
  return out;
}

WilcoxonResult wilcoxon_rank_sum(const std::vector<double>& x, const std::vector<double>& y,
                                 double confidence, Side side, WilcoxonMethod method) {
  if (x.empty() || y.empty()) throw std::invalid_argument("wilcoxon: both samples must be non-empty");
  const std::size_t m = x.size(), n = y.size(), N = m + n;
  std::vector<double> all(x);
  all.insert(all.end(), y.begin(), y.end());
  for (double v : all) {
    if (!std::isfinite(v)) throw std::invalid_argument("wilcoxon: non-finite value");
  }
  const auto ranks = midranks(all);
  WilcoxonResult res;
  for (std::size_t j = m; j < N; ++j) res.W += ranks[j];
  const double mean = static_cast<double>(n) * static_cast<double>(N + 1) / 2.0;

  const bool exact = method == WilcoxonMethod::exact ||
                     (method == WilcoxonMethod::automatic && N <= 12);
  res.exact = exact;
  if (exact) {
    const auto dist = rank_sum_distribution(ranks, n);
    constexpr double tol = 1e-9;
    double p = 0.0;
    const double dev = std::abs(res.W - mean);
    for (const auto& [w, pr] : dist) {
      switch (side) {
        case Side::greater: if (w >= res.W - tol) p += pr; break;
        case Side::less: if (w <= res.W + tol) p += pr; break;
        case Side::two_sided: if (std::abs(w - mean) >= dev - tol) p += pr; break;
      }
    }
    res.p = std::min(1.0, p);
  } else {
    std::map<double, int> ties;
    for (double v : all) ++ties[v];
    double tie_term = 0.0;
    for (const auto& [v, t] : ties) tie_term += static_cast<double>(t) * t * t - t;
    const double Nd = static_cast<double>(N);
    const double var = static_cast<double>(m) * static_cast<double>(n) / 12.0 *
                       ((Nd + 1.0) - tie_term / (Nd * (Nd - 1.0)));
    if (!(var > 0.0)) {
      res.p = 1.0;
    } else {
      const double sd = std::sqrt(var);
      const double d = res.W - mean;
      switch (side) {
        case Side::greater: res.p = normal_cdf(-(d - 0.5) / sd); break;
        case Side::less: res.p = normal_cdf((d + 0.5) / sd); break;
        case Side::two_sided:
          res.p = std::min(1.0, 2.0 * normal_cdf(-std::max(0.0, std::abs(d) - 0.5) / sd));
          break;
      }
    }
  }
  res.reject = res.p <= 1.0 - confidence;
  return res;
}

}  // namespace mla
