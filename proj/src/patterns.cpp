#include "mla/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mla {

std::string to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::L: return "L";
    case RegionLabel::EW: return "EW";
    case RegionLabel::ED: return "ED";
    case RegionLabel::W: return "W";
    case RegionLabel::D: return "D";
    case RegionLabel::F: return "F";
  }
  return "?";
}

RegionLabel parse_region_label(std::string_view s) {
  if (s == "L") return RegionLabel::L;
  if (s == "EW") return RegionLabel::EW;
  if (s == "ED") return RegionLabel::ED;
  if (s == "W") return RegionLabel::W;
  if (s == "D") return RegionLabel::D;
  if (s == "F") return RegionLabel::F;
  throw std::invalid_argument("unknown region label: " + std::string(s));
}

namespace {

// children[k][i]: indices into level k+1 of intervals nested in levels[k][i]
std::vector<std::vector<std::vector<std::size_t>>> child_lists(
    const IntervalRepresentation& rep) {
  const std::size_t K = rep.levels.size();
  std::vector<std::vector<std::vector<std::size_t>>> ch(K);
  for (std::size_t k = 0; k < K; ++k) {
    ch[k].resize(rep.levels[k].size());
    if (k + 1 >= K) continue;
    const auto& parents = rep.levels[k];
    const auto& kids = rep.levels[k + 1];
    std::size_t p = 0;
    for (std::size_t c = 0; c < kids.size(); ++c) {
      while (p < parents.size() && !parents[p].contains(kids[c])) ++p;
      if (p == parents.size()) throw std::invalid_argument("representation is not nested");
      ch[k][p].push_back(c);
    }
  }
  return ch;
}

}  // namespace

std::vector<Pattern> aggregate_patterns(const IntervalRepresentation& rep) {
  std::vector<Pattern> out;
  if (rep.levels.empty()) return out;
  const auto ch = child_lists(rep);
  // seeds as (level index, interval index); processed in level order so the
  // output is sorted by base level then start
  std::vector<std::vector<std::size_t>> seeds(rep.levels.size());
  for (std::size_t i = 0; i < rep.levels[0].size(); ++i) seeds[0].push_back(i);
  for (std::size_t k0 = 0; k0 < rep.levels.size(); ++k0) {
    std::sort(seeds[k0].begin(), seeds[k0].end());
    for (std::size_t i0 : seeds[k0]) {
      Pattern p;
      p.base_level = static_cast<int>(k0) + 1;
      std::size_t k = k0, i = i0;
      p.intervals.push_back(rep.levels[k][i]);
      while (ch[k][i].size() == 1) {
        i = ch[k][i][0];
        ++k;
        p.intervals.push_back(rep.levels[k][i]);
      }
      for (std::size_t c : ch[k][i]) seeds[k + 1].push_back(c);
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<Pattern> select_patterns(const std::vector<Pattern>& patterns, int m) {
  std::vector<Pattern> out;
  for (const auto& p : patterns) {
    if (static_cast<long long>(p.size()) > m) out.push_back(p);
  }
  return out;
}

double pattern_area(const Pattern& p, int lo, int hi) {
  std::vector<std::pair<double, double>> poly;
  for (int k = lo; k <= hi; ++k) poly.emplace_back(p.at_level(k).start, k);
  for (int k = hi; k >= lo; --k) poly.emplace_back(p.at_level(k).end, k);
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    twice += a.first * b.second - b.first * a.second;
  }
  return std::abs(0.5 * twice);
}

double pattern_dissimilarity(const Pattern& r, const Pattern& s, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must be in [0,1]");
  const int lo = std::max(r.base_level, s.base_level);
  const int hi = std::min(r.top_level(), s.top_level());
  if (lo > hi) throw std::invalid_argument("patterns share no level");
  double widths = 0.0;
  for (int k = lo; k <= hi; ++k) widths += std::abs(r.at_level(k).length() - s.at_level(k).length());
  const double area = std::abs(pattern_area(r, lo, hi) - pattern_area(s, lo, hi));
  return (1.0 - alpha) * area + alpha * widths;
}

double vector_dissimilarity(const std::vector<double>& u, const std::vector<double>& v,
                            double alpha) {
  if (u.size() != v.size()) throw std::invalid_argument("vector_dissimilarity: length mismatch");
  double su = 0.0, sv = 0.0, shape = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    su += u[i];
    sv += v[i];
    shape += std::abs(u[i] - v[i]);
  }
  return (1.0 - alpha) * std::abs(su - sv) + alpha * shape;
}

std::vector<double> pattern_profile(const Pattern& p, const Signal& s, std::size_t n) {
  if (p.intervals.empty()) throw std::invalid_argument("empty pattern");
  const Interval& w = p.intervals.front();
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = s.at(w.midpoint());
    return out;
  }
  for (std::size_t t = 0; t < n; ++t) {
    const double x = w.start + (w.end - w.start) * static_cast<double>(t) / static_cast<double>(n - 1);
    out[t] = s.at(x);
  }
  return out;
}

std::vector<double> peak_profile(const Pattern& p, const Signal& s, int os) {
  if (p.intervals.empty()) throw std::invalid_argument("empty pattern");
  if (os < 1) throw std::invalid_argument("os must be at least 1");
  const Interval& top = p.intervals.back();
  // highest sample inside the innermost interval; the midpoint if none lies there
  double c = std::round(top.midpoint());
  double best = -std::numeric_limits<double>::infinity();
  for (double x = std::ceil(top.start - 1e-9); x <= top.end + 1e-9; x += 1.0) {
    if (x < s.domain_start() || x > s.domain_end()) continue;
    const double v = s.at(x);
    if (v > best) {
      best = v;
      c = x;
    }
  }
  std::vector<double> out(2 * static_cast<std::size_t>(os) + 1);
  for (int j = -os; j <= os; ++j) out[static_cast<std::size_t>(j + os)] = s.at(c + j);
  return out;
}

double model_dissimilarity(const Pattern& p, const Signal& s, const NucleosomeModel& model,
                           double alpha) {
  return vector_dissimilarity(pattern_profile(p, s, model.values.size()), model.values, alpha);
}

namespace {

bool unimodal_window(std::span<const double> f, std::size_t c, int os) {
  for (int j = 1; j <= os; ++j) {
    if (!(f[c - j] < f[c - j + 1])) return false;
    if (!(f[c + j] < f[c + j - 1])) return false;
  }
  return true;
}

}  // namespace

std::vector<std::vector<double>> extract_windows(const Signal& s, int os) {
  if (os < 1) throw std::invalid_argument("os must be at least 1");
  const auto f = s.samples();
  const std::size_t w = 2 * static_cast<std::size_t>(os) + 1;
  std::vector<std::vector<double>> out;
  if (f.size() < w) return out;
  for (std::size_t c = os; c + os < f.size(); ++c) {
    if (!(f[c] > f[c - 1] && f[c] > f[c + 1])) continue;
    if (!unimodal_window(f, c, os)) continue;
    out.emplace_back(f.begin() + (c - os), f.begin() + (c + os + 1));
  }
  return out;
}

NucleosomeModel build_model(const std::vector<Signal>& fragments, int os, double alpha) {
  if (os < 1) throw std::invalid_argument("build_model: os must be at least 1");
  const std::size_t w = 2 * static_cast<std::size_t>(os) + 1;
  std::vector<std::vector<double>> windows;
  std::vector<double> acc(w, 0.0);
  std::size_t used_fragments = 0;
  for (const auto& frag : fragments) {
    auto local = extract_windows(frag, os);
    if (local.empty()) continue;
    for (std::size_t j = 0; j < w; ++j) {
      double m = 0.0;
      for (const auto& win : local) m += win[j];
      acc[j] += m / static_cast<double>(local.size());
    }
    ++used_fragments;
    for (auto& win : local) windows.push_back(std::move(win));
  }
  if (used_fragments == 0) throw std::runtime_error("no training patterns");

  NucleosomeModel model;
  model.os = os;
  model.alpha = alpha;
  model.values.resize(w);
  for (std::size_t j = 0; j < w; ++j) model.values[j] = acc[j] / static_cast<double>(used_fragments);
  double sum = 0.0, sq = 0.0;
  for (const auto& win : windows) {
    const double d = vector_dissimilarity(win, model.values, alpha);
    sum += d;
    sq += d * d;
  }
  const double n = static_cast<double>(windows.size());
  model.train_windows = windows.size();
  model.train_mean = sum / n;
  model.train_std = std::sqrt(std::max(0.0, sq / n - model.train_mean * model.train_mean));
  return model;
}

ClassifierParams default_params(const NucleosomeModel& model) {
  ClassifierParams p;
  p.alpha = model.alpha;
  p.phi1 = std::max(0.0, model.train_mean - 3.0 * model.train_std);
  p.phi2 = model.train_mean + 3.0 * model.train_std;
  return p;
}

RegionLabel classify_phase1(double delta, const ClassifierParams& params) {
  if (delta <= params.phi1) return RegionLabel::L;
  if (delta <= params.phi2) return RegionLabel::EW;
  return RegionLabel::ED;
}

Region expected_region(const Pattern& p, RegionLabel label) {
  if (p.intervals.empty()) throw std::invalid_argument("empty pattern");
  const std::size_t l = p.size() - 1;
  Region r;
  r.label = label;
  if (label == RegionLabel::EW) {
    const std::size_t n = std::max<std::size_t>(l, 1);
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += p.intervals[i].midpoint();
    c /= static_cast<double>(n);
    r.start = c - 3.0;
    r.end = c + 3.0;
  } else if (label == RegionLabel::ED) {
    const std::size_t n = std::max<std::size_t>(l / 2, 1);
    for (std::size_t i = 0; i < n; ++i) {
      r.start += p.intervals[i].start;
      r.end += p.intervals[i].end;
    }
    r.start /= static_cast<double>(n);
    r.end /= static_cast<double>(n);
  } else {
    throw std::invalid_argument("expected_region: label must be EW or ED");
  }
  return r;
}

std::vector<RegionLabel> classify_phase2(const std::vector<Region>& regions) {
  std::vector<RegionLabel> out(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const auto lab = regions[i].label;
    if (lab != RegionLabel::EW && lab != RegionLabel::ED) {
      throw std::invalid_argument("classify_phase2: labels must be EW or ED");
    }
    out[i] = lab == RegionLabel::EW ? RegionLabel::W : RegionLabel::D;
  }
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = i + 1; j < regions.size(); ++j) {
      if (regions[i].start <= regions[j].end && regions[j].start <= regions[i].end) {
        out[i] = RegionLabel::F;
        out[j] = RegionLabel::F;
      }
    }
  }
  return out;
}

}  // namespace mla
