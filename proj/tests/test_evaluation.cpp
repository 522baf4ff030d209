#include <doctest.h>

#include <algorithm>
#include <random>

#include "brcf/evaluation.hpp"
#include "brcf/synth.hpp"

using namespace brcf;

namespace {

EvalRecord with(double iou_value, double distance) {
  EvalRecord r;
  r.iou = iou_value;
  r.distance = distance;
  return r;
}

std::vector<EvalRecord> random_records(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0), d(0.0, 60.0);
  std::vector<EvalRecord> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(with(u(rng) < 0.1 ? 0.0 : u(rng), d(rng)));
  return out;
}

}  // namespace

TEST_CASE("centre distance") {
  const BBox a{0, 0, 2, 2};
  CHECK(center_distance(a, a) == 0.0);
  CHECK(center_distance(a, BBox{3, 4, 6, 1}) == 5.0);
  CHECK(center_distance(BBox{3, 4, 6, 1}, a) == 5.0);
}

TEST_CASE("records") {
  const EvalRecord r = make_record("s", 3, BBox{1, 1, 2, 2}, BBox{2, 1, 2, 2}, 1.5);
  CHECK(r.iou == doctest::Approx(1.0 / 3.0));
  CHECK(r.distance == 1.0);
  CHECK(r.frame == 3);
}

TEST_CASE("curves on small sets") {
  std::vector<EvalRecord> perfect(4, with(1.0, 0.0));
  for (const auto& p : success_curve(perfect, default_success_thresholds()))
    if (p.threshold < 1.0) CHECK(p.rate == 1.0);
  for (const auto& p : precision_curve(perfect, default_precision_thresholds()))
    if (p.threshold > 0.0) CHECK(p.rate == 1.0);

  const std::vector<EvalRecord> three{with(0.2, 1), with(0.6, 10), with(0.8, 100)};
  CHECK(success_curve(three, {0.5})[0].rate == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(precision_curve(three, {20.0})[0].rate == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS(success_curve({}, {0.5}));
}

TEST_CASE("ten hand-built records") {
  const std::vector<double> ious{0.0, 0.05, 0.3, 0.45, 0.5, 0.5, 0.7, 0.9, 0.99, 1.0};
  const std::vector<double> dists{0.0, 0.5, 2.0, 5.0, 9.99, 10.0, 18.0, 25.0, 40.0, 300.0};
  std::vector<EvalRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back(with(ious[i], dists[i]));

  const auto s = success_curve(recs, {0.0, 0.3, 0.5, 0.95, 0.999});
  CHECK(s[0].rate == 0.9);
  CHECK(s[1].rate == 0.7);
  CHECK(s[2].rate == 0.4);
  CHECK(s[3].rate == 0.2);
  CHECK(s[4].rate == 0.1);
  const auto p = precision_curve(recs, {0.0, 1.0, 10.0, 20.0, 50.0});
  CHECK(p[0].rate == 0.0);
  CHECK(p[1].rate == 0.2);
  CHECK(p[2].rate == 0.5);
  CHECK(p[3].rate == 0.7);
  CHECK(p[4].rate == 0.9);
}

TEST_CASE("curve properties on random records") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto recs = random_records(200, seed);
    const auto s = success_curve(recs, default_success_thresholds());
    const auto p = precision_curve(recs, default_precision_thresholds());
    for (std::size_t i = 1; i < s.size(); ++i) REQUIRE(s[i].rate <= s[i - 1].rate);
    for (std::size_t i = 1; i < p.size(); ++i) REQUIRE(p[i].rate >= p[i - 1].rate);

    const double positive = std::count_if(recs.begin(), recs.end(), [](const EvalRecord& r) { return r.iou > 0.0; });
    CHECK(s.front().rate == positive / recs.size());

    std::shuffle(recs.begin(), recs.end(), std::mt19937_64(seed + 50));
    const auto s2 = success_curve(recs, default_success_thresholds());
    const auto p2 = precision_curve(recs, default_precision_thresholds());
    for (std::size_t i = 0; i < s.size(); ++i) REQUIRE(s2[i].rate == s[i].rate);
    for (std::size_t i = 0; i < p.size(); ++i) REQUIRE(p2[i].rate == p[i].rate);
  }
}

TEST_CASE("summary") {
  const std::vector<EvalRecord> recs{with(1.0, 0.0), with(0.5, 4.0)};
  const Summary s = summarize("brcf", recs, 30.0);
  CHECK(s.frames == 2u);
  CHECK(s.average_overlap == 0.75);
  CHECK(s.average_distance == 2.0);
  CHECK(s.fps == 30.0);
  const std::string table = format_summary_table({s});
  for (const char* col : {"avg_overlap", "avg_distance", "avg_success", "avg_precision"})
    CHECK(table.find(col) != std::string::npos);
}

TEST_CASE("running a tracker over a sequence") {
  SynthSpec spec = translation_spec();
  spec.frames = 12;
  const Sequence seq = synth_sequence(spec, 1);
  const TrackRun run = run_tracker(seq, kcf_baseline({}));
  CHECK(run.records.size() == 12u);
  CHECK(run.frames.size() == 11u);
  CHECK(run.records.front().iou == 1.0);
  CHECK(run.fps() > 0.0);
  CHECK(mean_iou(run.records) > 0.5);
}

TEST_CASE("training pairs from a sequence") {
  SynthSpec spec = translation_spec();
  spec.frames = 25;
  const Sequence seq = synth_sequence(spec, 2);
  const auto pairs = sequence_training_pairs(seq, 4, 10, 7);
  CHECK(pairs.size() == 12u);
  for (const auto& p : pairs) {
    CHECK(iou(p.sample, p.truth) >= 0.6);
    CHECK(p.feature.size() == regression_feature_size());
  }
  CHECK(pairs[4].truth == seq.ground_truth()[10]);
  const auto again = sequence_training_pairs(seq, 4, 10, 7);
  CHECK(again[5].sample == pairs[5].sample);
  CHECK_THROWS(sequence_training_pairs(seq, 4, 0, 7));
}
