#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mla/parallel.hpp"
#include "mla/pipeline.hpp"
#include "mla/random.hpp"

using namespace mla;

namespace {

Pattern one_interval(double a, double b) {
  Pattern p;
  p.base_level = 2;
  p.intervals.push_back({a, b, 2, 0.5});
  return p;
}

SynthConfig small_config() {
  SynthConfig c;
  c.nn = 30;
  return c;
}

}  // namespace

TEST_SUITE("patterns") {

TEST_CASE("peak profile centres on the highest inner sample") {
  const Signal s({0, 1, 3, 2, 5, 4, 0});
  const auto prof = peak_profile(one_interval(2, 6), s, 2);
  CHECK(prof == std::vector<double>{3, 2, 5, 4, 0});
  // window runs past the end: clamped to the last sample
  const auto wide = peak_profile(one_interval(2, 6), s, 3);
  CHECK(wide == std::vector<double>{1, 3, 2, 5, 4, 0, 0});
  CHECK_THROWS_AS(peak_profile(one_interval(2, 6), s, 0), std::invalid_argument);
}

TEST_CASE("probe labels follow the half-probe rule") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 30;
    std::vector<Region> regions;
    for (int r = 0; r < 3; ++r) {
      const double a = rng.uniform(-2.0, 32.0);
      regions.push_back({a, a + rng.uniform(0.0, 6.0), RegionLabel::W, 0.0});
    }
    const auto got = probe_labels(regions, n);
    REQUIRE(got.size() == n);
    for (std::size_t p = 1; p <= n; ++p) {
      bool in = false;
      for (const auto& r : regions) {
        const double x = static_cast<double>(p);
        in = in || (x >= r.start - 0.5 && x <= r.end + 0.5);
      }
      CHECK(got[p - 1] == (in ? 1 : 0));
    }
  }
  CHECK(probe_labels({{2.4, 3.6, RegionLabel::W, 0.0}}, 5) == std::vector<std::uint8_t>{0, 1, 1, 1, 0});
}

TEST_CASE("m equal to K leaves no pattern") {
  SynthConfig c = small_config();
  c.snr = 6;
  c.seed = 11;
  const auto sc = make_synth_case(c);
  PipelineParams p;
  p.K = 20;
  p.m = 20;
  const auto model = model_from_signals({sc.train_signal.values}, p);
  const auto res = run_pipeline(sc.signal.values, model, p);
  CHECK(res.patterns.empty());
  CHECK(res.regions.empty());
  const auto ra = recognition_accuracy(res.probe_labels, sc.mask.probes);
  CHECK(ra.recall(1) == 0.0);
}

TEST_CASE("noise-free signals are recovered exactly for some m") {
  SynthConfig c = small_config();
  c.nsv = 0.0;
  MCalibrationOptions o;
  o.snr_list = {1e9};
  o.k_list = {20};
  o.replicates = 2;
  o.seed = 4;
  for (const auto& run : calibrate_m(c, o)) {
    CHECK(run.ra_by_m.size() == 21);
    CHECK(run.best_ra == 1.0);
    CHECK(run.ra_by_m[run.best_m] == 1.0);
  }
}

TEST_CASE("calibrate_m does not depend on the thread count") {
  SynthConfig c = small_config();
  MCalibrationOptions o;
  o.snr_list = {2, 4};
  o.k_list = {20};
  o.replicates = 2;
  o.seed = 9;
  set_thread_count(1);
  const auto a = calibrate_m(c, o);
  set_thread_count(4);
  const auto b = calibrate_m(c, o);
  set_thread_count(1);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].best_m == b[i].best_m);
    CHECK(a[i].ra_by_m == b[i].ra_by_m);
  }
}

TEST_CASE("ocknn backend calibrates on the training windows") {
  SynthConfig c = small_config();
  c.snr = 8;
  c.seed = 21;
  const auto sc = make_synth_case(c);
  PipelineParams p;
  p.classifier = ClassifierKind::ocknn;
  const auto model = model_from_signals({sc.train_signal.values}, p);
  const auto res = run_pipeline(sc.signal.values, model, p, {sc.train_signal.values});
  CHECK(res.training_size >= 2);
  CHECK(res.ocknn_k >= 1);
  CHECK(res.ocknn_k <= static_cast<int>(res.training_size));
  CHECK_THROWS_WITH_AS(run_pipeline(sc.signal.values, model, p, {}), "no training patterns",
                       std::runtime_error);
}

TEST_CASE("pipeline parameter validation") {
  CHECK(parse_classifier("ocknn") == ClassifierKind::ocknn);
  CHECK(parse_profile_mode("widest") == ProfileMode::widest);
  CHECK_THROWS_AS(parse_classifier("svm"), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile_mode("tallest"), std::invalid_argument);
  SynthConfig c = small_config();
  c.snr = 4;
  const auto sc = make_synth_case(c);
  PipelineParams p;
  const auto model = model_from_signals({sc.train_signal.values}, p);
  p.phi1 = 2.0;
  p.phi2 = 1.0;
  CHECK_THROWS_AS(run_pipeline(sc.signal.values, model, p), std::invalid_argument);
  p = PipelineParams{};
  p.m = -1;
  CHECK_THROWS_AS(run_pipeline(sc.signal.values, model, p), std::invalid_argument);
}

}  // TEST_SUITE
