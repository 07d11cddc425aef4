#include "mla/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mla/parallel.hpp"

namespace mla {

std::size_t IntervalRepresentation::total_intervals() const {
  std::size_t n = 0;
  for (const auto& lv : levels) n += lv.size();
  return n;
}

double IntervalRepresentation::domain_start() const {
  if (levels.empty() || levels[0].empty()) throw std::invalid_argument("empty representation");
  return levels[0].front().start;
}

double IntervalRepresentation::domain_end() const {
  if (levels.empty() || levels[0].empty()) throw std::invalid_argument("empty representation");
  return levels[0].back().end;
}

std::vector<double> equally_spaced_thresholds(int K) {
  if (K < 2) throw std::invalid_argument("K must be at least 2");
  std::vector<double> phi(K);
  for (int k = 1; k <= K; ++k) phi[k - 1] = static_cast<double>(k - 1) / static_cast<double>(K - 1);
  return phi;
}

namespace {

constexpr double kRangeTol = 1e-12;

std::vector<Interval> components(const Signal& d, double phi, int level) {
  std::vector<Interval> out;
  const auto f = d.samples();
  const double x0 = d.domain_start();
  bool inside = f[0] >= phi;
  double start = x0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const double a = f[i];
    const double b = f[i + 1];
    const double xi = x0 + static_cast<double>(i);
    if (!inside && b >= phi) {
      start = xi + (phi - a) / (b - a);
      inside = true;
    } else if (inside && b < phi) {
      out.push_back({start, xi + (a - phi) / (a - b), level, phi});
      inside = false;
    }
  }
  if (inside) out.push_back({start, d.domain_end(), level, phi});
  return out;
}

}  // namespace

IntervalRepresentation horizontal_sampling(const Signal& s, int K) {
  if (K < 2) throw std::invalid_argument("K must be at least 2");
  if (s.empty()) throw std::invalid_argument("empty signal");
  if (s.min() < -kRangeTol || s.max() > 1.0 + kRangeTol) {
    throw std::invalid_argument("horizontal_sampling: signal must be normalized to [0,1]");
  }
  const Signal d = disambiguate(s);
  IntervalRepresentation rep;
  rep.K = K;
  rep.thresholds = equally_spaced_thresholds(K);
  rep.source_length = s.size();
  rep.levels.resize(K);
  // Level 1 is the whole domain by definition, even when min(s) > 0.
  rep.levels[0].push_back({d.domain_start(), d.domain_end(), 1, rep.thresholds[0]});
  for (int k = 2; k <= K; ++k) rep.levels[k - 1] = components(d, rep.thresholds[k - 1], k);
  return rep;
}

ReconstructMode parse_reconstruct_mode(std::string_view name) {
  if (name == "interpolated") return ReconstructMode::interpolated;
  if (name == "level_set" || name == "level-set") return ReconstructMode::level_set;
  throw std::invalid_argument("unknown reconstruction mode: " + std::string(name));
}

namespace {

void check_rep(const IntervalRepresentation& rep) {
  if (rep.levels.empty() || rep.levels[0].empty() || rep.source_length == 0) {
    throw std::invalid_argument("reconstruct: empty representation");
  }
}

std::vector<double> eval_interpolated(const IntervalRepresentation& rep,
                                      const std::vector<double>& xs) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& lv : rep.levels) {
    for (const auto& iv : lv) {
      pts.emplace_back(iv.start, iv.threshold);
      pts.emplace_back(iv.end, iv.threshold);
    }
  }
  std::sort(pts.begin(), pts.end());
  // same coordinate: keep the highest level (it sorts last)
  std::vector<std::pair<double, double>> uniq;
  for (const auto& p : pts) {
    if (!uniq.empty() && uniq.back().first == p.first) {
      uniq.back().second = std::max(uniq.back().second, p.second);
    } else {
      uniq.push_back(p);
    }
  }
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    auto it = std::lower_bound(uniq.begin(), uniq.end(), x,
                               [](const auto& p, double v) { return p.first < v; });
    if (it == uniq.end()) {
      out[i] = uniq.back().second;
    } else if (it->first == x || it == uniq.begin()) {
      out[i] = it->second;
    } else {
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double t = (x - lo.first) / (hi.first - lo.first);
      out[i] = lo.second + t * (hi.second - lo.second);
    }
  }
  return out;
}

std::vector<double> eval_level_set(const IntervalRepresentation& rep,
                                   const std::vector<double>& xs) {
  std::vector<double> out(xs.size(), rep.thresholds.empty() ? 0.0 : rep.thresholds[0]);
  for (std::size_t k = 1; k < rep.levels.size(); ++k) {
    const auto& lv = rep.levels[k];
    for (std::size_t i = 0; i < xs.size(); ++i) {
      auto it = std::lower_bound(lv.begin(), lv.end(), xs[i] - 1e-9,
                                 [](const Interval& iv, double v) { return iv.end < v; });
      if (it != lv.end() && it->contains(xs[i])) out[i] = std::max(out[i], it->threshold);
    }
  }
  return out;
}

std::vector<double> evaluate(const IntervalRepresentation& rep, const std::vector<double>& xs,
                             ReconstructMode mode) {
  return mode == ReconstructMode::interpolated ? eval_interpolated(rep, xs)
                                               : eval_level_set(rep, xs);
}

}  // namespace

Signal reconstruct(const IntervalRepresentation& rep, ReconstructMode mode) {
  check_rep(rep);
  std::vector<double> xs(rep.source_length);
  std::iota(xs.begin(), xs.end(), 1.0);
  return Signal(evaluate(rep, xs, mode), 1.0);
}

Signal reconstruct_domain(const IntervalRepresentation& rep, ReconstructMode mode) {
  check_rep(rep);
  const double a = rep.domain_start();
  const auto n = static_cast<std::size_t>(std::llround(rep.domain_end() - a)) + 1;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = a + static_cast<double>(i);
  return Signal(evaluate(rep, xs, mode), a);
}

IntervalBound interval_count_bound(long long L, long long K) {
  if (L < 3) throw std::invalid_argument("interval_count_bound: L must be at least 3");
  if (K < 2) throw std::invalid_argument("interval_count_bound: K must be at least 2");
  const long long half = (L + 1) / 2;
  return {half * (K - 1) + 1, 2 * half * (K - 1) + 2};
}

std::size_t missing_probes(const IntervalRepresentation& rep) {
  std::vector<double> ends;
  for (const auto& lv : rep.levels) {
    for (const auto& iv : lv) {
      ends.push_back(iv.start);
      ends.push_back(iv.end);
    }
  }
  std::sort(ends.begin(), ends.end());
  std::size_t missing = 0;
  for (std::size_t i = 1; i <= rep.source_length; ++i) {
    const double x = static_cast<double>(i);
    auto it = std::lower_bound(ends.begin(), ends.end(), x - 1e-9);
    if (it == ends.end() || *it > x + 1e-9) ++missing;
  }
  return missing;
}

KCalibration calibrate_k(const std::vector<Signal>& fragments, int K_max, ReconstructMode mode) {
  if (K_max < 2) throw std::invalid_argument("calibrate_k: K_max must be at least 2");
  if (fragments.empty()) throw std::invalid_argument("calibrate_k: no fragments");
  double mean_len = 0.0;
  std::vector<Signal> norm;
  norm.reserve(fragments.size());
  for (const auto& f : fragments) {
    if (f.size() < 3) throw std::invalid_argument("calibrate_k: fragments need length >= 3");
    norm.push_back(normalize_unit(f));
    mean_len += static_cast<double>(f.size());
  }
  mean_len /= static_cast<double>(fragments.size());

  const std::size_t nk = static_cast<std::size_t>(K_max - 1);
  const std::size_t T = norm.size();
  std::vector<double> rho(nk * T), ms(nk * T);
  parallel_for(nk * T, [&](std::size_t idx) {
    const int k = static_cast<int>(idx / T) + 2;
    const auto& sig = norm[idx % T];
    const auto rep = horizontal_sampling(sig, k);
    const auto rec = reconstruct(rep, mode);
    const double r = pearson(sig.samples(), rec.samples());
    rho[idx] = 0.5 * (1.0 + r * r);
    ms[idx] = static_cast<double>(missing_probes(rep));
  });

  KCalibration out;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t ki = 0; ki < nk; ++ki) {
    CalibrationRow row;
    row.k = static_cast<int>(ki) + 2;
    for (std::size_t t = 0; t < T; ++t) {
      row.rho_bar += rho[ki * T + t];
      row.ms_bar += ms[ki * T + t];
    }
    row.rho_bar /= static_cast<double>(T);
    row.ms_bar /= static_cast<double>(T);
    row.score = row.rho_bar - row.ms_bar / mean_len;
    if (row.score > best) {
      best = row.score;
      out.suggested_k = row.k;
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace mla
