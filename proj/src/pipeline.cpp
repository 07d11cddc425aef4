#include "mla/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mla/ocknn.hpp"
#include "mla/parallel.hpp"
#include "mla/random.hpp"

namespace mla {

ClassifierKind parse_classifier(std::string_view name) {
  if (name == "rule") return ClassifierKind::rule;
  if (name == "ocknn") return ClassifierKind::ocknn;
  throw std::invalid_argument("unknown classifier: " + std::string(name));
}

ProfileMode parse_profile_mode(std::string_view name) {
  if (name == "widest") return ProfileMode::widest;
  if (name == "peak") return ProfileMode::peak;
  throw std::invalid_argument("unknown profile mode: " + std::string(name));
}

Signal preprocess(const Signal& s, bool smooth) {
  return normalize_unit(smooth ? smooth3(s) : s);
}

NucleosomeModel model_from_signals(const std::vector<Signal>& raw, const PipelineParams& p) {
  std::vector<Signal> pre;
  for (const auto& s : raw) pre.push_back(preprocess(s, p.smooth));
  return build_model(pre, p.os, p.alpha);
}

std::vector<std::uint8_t> probe_labels(const std::vector<Region>& regions, std::size_t n) {
  std::vector<std::uint8_t> out(n, 0);
  for (const auto& r : regions) {
    const auto lo = static_cast<long long>(std::ceil(r.start - 0.5));
    const auto hi = static_cast<long long>(std::floor(r.end + 0.5));
    for (long long p = std::max<long long>(lo, 1); p <= std::min<long long>(hi, static_cast<long long>(n)); ++p) {
      out[static_cast<std::size_t>(p - 1)] = 1;
    }
  }
  return out;
}

PipelineResult run_pipeline(const Signal& s, const NucleosomeModel& model, const PipelineParams& p,
                            const std::vector<Signal>& training) {
  if (p.m < 0) throw std::invalid_argument("m must be >= 0");
  const Signal x = preprocess(s, p.smooth);
  const auto rep = horizontal_sampling(x, p.K);
  // the level-1 pattern is the whole domain and never a candidate region
  std::vector<Pattern> candidates;
  for (auto& pat : aggregate_patterns(rep)) {
    if (pat.base_level > 1) candidates.push_back(std::move(pat));
  }
  const auto selected = select_patterns(candidates, p.m);

  PipelineResult res;
  res.params = default_params(model);
  res.params.alpha = p.alpha;
  if (p.phi1) res.params.phi1 = *p.phi1;
  if (p.phi2) res.params.phi2 = *p.phi2;
  if (res.params.phi1 > res.params.phi2) throw std::invalid_argument("phi1 must not exceed phi2");

  std::vector<std::vector<double>> tp;
  if (p.classifier == ClassifierKind::ocknn) {
    for (const auto& t : training) {
      for (auto& w : extract_windows(preprocess(t, p.smooth), p.os)) tp.push_back(std::move(w));
    }
    if (tp.size() < 2) throw std::runtime_error("no training patterns");
    const auto n = static_cast<Eigen::Index>(tp.size());
    Eigen::MatrixXd D(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) D(i, j) = vector_dissimilarity(tp[i], tp[j], p.alpha);
    }
    const auto cal = ocknn_calibrate(D);
    res.ocknn_phi = cal.phi_star;
    res.ocknn_k = cal.k_star;
    res.training_size = tp.size();
  }

  std::vector<Region> regions;
  for (const auto& pat : selected) {
    ClassifiedPattern cp{pat, 0.0, RegionLabel::L};
    const auto prof = p.profile == ProfileMode::peak ? peak_profile(pat, x, model.os)
                                                     : pattern_profile(pat, x, model.values.size());
    cp.score = vector_dissimilarity(prof, model.values, p.alpha);
    if (p.classifier == ClassifierKind::rule) {
      cp.phase1 = classify_phase1(cp.score, res.params);
    } else {
      std::vector<double> d;
      d.reserve(tp.size());
      for (const auto& t : tp) d.push_back(vector_dissimilarity(prof, t, p.alpha));
      cp.phase1 = ocknn_classify(d, res.ocknn_phi, res.ocknn_k) ? RegionLabel::EW : RegionLabel::L;
    }
    if (cp.phase1 != RegionLabel::L) {
      Region r = expected_region(pat, cp.phase1);
      r.score = cp.score;
      regions.push_back(r);
    }
    res.patterns.push_back(std::move(cp));
  }
  const auto labels = classify_phase2(regions);
  for (std::size_t i = 0; i < regions.size(); ++i) regions[i].label = labels[i];
  std::sort(regions.begin(), regions.end(),
            [](const Region& a, const Region& b) { return a.start < b.start; });
  res.regions = std::move(regions);
  res.probe_labels = probe_labels(res.regions, s.size());
  return res;
}

SynthCase make_synth_case(const SynthConfig& cfg) {
  SynthCase c;
  c.mask = generate_mask(cfg);
  c.signal = generate_signal(cfg, c.mask);
  SynthConfig tc = cfg;
  tc.seed = derive_seed(cfg.seed, 0x7472);
  c.train_mask = generate_mask(tc);
  c.train_signal = generate_signal(tc, c.train_mask);
  return c;
}

std::vector<MCalibrationRun> calibrate_m(const SynthConfig& base, const MCalibrationOptions& opt) {
  struct Job {
    double snr;
    int K;
    int rep;
  };
  std::vector<Job> jobs;
  for (double snr : opt.snr_list) {
    for (int K : opt.k_list) {
      for (int r = 0; r < opt.replicates; ++r) jobs.push_back({snr, K, r});
    }
  }
  std::vector<MCalibrationRun> out(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t idx) {
    const Job& j = jobs[idx];
    SynthConfig cfg = base;
    cfg.snr = j.snr;
    cfg.seed = derive_seed(opt.seed, idx);
    const auto sc = make_synth_case(cfg);
    PipelineParams p = opt.params;
    p.K = j.K;
    const auto model = model_from_signals({sc.train_signal.values}, p);
    MCalibrationRun run{j.snr, j.K, j.rep, 0, -1.0, {}};
    for (int m = 0; m <= j.K; ++m) {
      p.m = m;
      const auto res = run_pipeline(sc.signal.values, model, p, {sc.train_signal.values});
      run.ra_by_m.push_back(recognition_accuracy(res.probe_labels, sc.mask.probes).ra);
    }
    run.best_ra = *std::max_element(run.ra_by_m.begin(), run.ra_by_m.end());
    std::vector<int> best;
    for (int m = 0; m <= j.K; ++m) {
      if (run.ra_by_m[m] == run.best_ra) best.push_back(m);
    }
    run.best_m = best[(best.size() - 1) / 2];
    out[idx] = std::move(run);
  });
  return out;
}

}  // namespace mla
