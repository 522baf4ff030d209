#include <doctest.h>

#include <cmath>

#include "brcf/evaluation.hpp"
#include "brcf/synth.hpp"
#include "brcf/tracker.hpp"

using namespace brcf;

namespace {

SynthSpec short_translation(int frames) {
  SynthSpec s = translation_spec();
  s.frames = frames;
  return s;
}

TrackerConfig extensions_off() {
  TrackerConfig c = kcf_baseline({});
  c.mode = TrackerMode::Brcf;
  return c;
}

}  // namespace

TEST_CASE("initial state") {
  const Sequence seq = synth_sequence(static_spec(), 3);
  const BBox box = seq.ground_truth()[0];
  const Tracker tr(seq.frame(0), box, TrackerConfig{});
  CHECK(tr.frame_index() == 1);
  CHECK(tr.box() == box);
  for (double a : tr.fusion().alpha) CHECK(a == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const ResponseMap r = tr.peek_response(seq.frame(0));
  const int dr = std::min(r.peak_row, tr.grid_rows() - r.peak_row);
  const int dc = std::min(r.peak_col, tr.grid_cols() - r.peak_col);
  CHECK(dr <= 1);
  CHECK(dc <= 1);

  CHECK_THROWS(Tracker(seq.frame(0), BBox{10, 10, 0, 5}, TrackerConfig{}));
  CHECK_THROWS(Tracker(seq.frame(0), BBox{-100, -100, 20, 20}, TrackerConfig{}));
  Tracker moving(seq.frame(0), box, TrackerConfig{});
  CHECK_THROWS(moving.step(Frame(64, 64, 3)));
}

TEST_CASE("static scene does not drift") {
  const Sequence seq = synth_sequence(static_spec(), 8);
  const BBox box = seq.ground_truth()[0];
  const Frame first = seq.frame(0);
  Tracker tr(first, box, TrackerConfig{});
  double drift = 0.0;
  for (int i = 0; i < 10; ++i) {
    const FrameResult r = tr.step(first);
    drift = center_distance(r.box, box);
  }
  CHECK(drift < 1.0);
  CHECK(tr.frame_index() == 11);
}

TEST_CASE("baseline equals the full pipeline with every extension off") {
  const Sequence seq = synth_sequence(short_translation(40), 2);
  const BBox box = seq.ground_truth()[0];
  Tracker full(seq.frame(0), box, extensions_off());
  Tracker base(seq.frame(0), box, kcf_baseline({}));
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const Frame f = seq.frame(i);
    const BBox a = full.step(f).box;
    const BBox b = base.step(f).box;
    REQUIRE(std::abs(a.cx - b.cx) < 1e-9);
    REQUIRE(std::abs(a.cy - b.cy) < 1e-9);
    REQUIRE(a.w == b.w);
    REQUIRE(a.h == b.h);
    REQUIRE(b.w == box.w);
    REQUIRE(b.h == box.h);
  }
}

TEST_CASE("runs are deterministic and keep invariants") {
  SynthSpec spec = short_translation(30);
  spec.vy = 1.0;
  const Sequence seq = synth_sequence(spec, 6);
  const TrackRun a = run_tracker(seq, TrackerConfig{});
  const TrackRun b = run_tracker(seq, TrackerConfig{});
  REQUIRE_FALSE(a.failed);
  REQUIRE(a.frames.size() == b.frames.size());
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    const FrameResult& x = a.frames[i];
    const FrameResult& y = b.frames[i];
    REQUIRE(x.box == y.box);
    REQUIRE(x.kl == y.kl);
    REQUIRE(x.weights == y.weights);
    REQUIRE(x.deltas == y.deltas);
    REQUIRE(x.scale == y.scale);
    REQUIRE(x.frame == static_cast<int>(i) + 2);

    REQUIRE(x.box.valid());
    REQUIRE(x.box.w >= 2.0);
    REQUIRE(x.box.h >= 2.0);
    REQUIRE(x.box.right() > 0.0);
    REQUIRE(x.box.bottom() > 0.0);
    REQUIRE(x.box.left() < spec.width);
    REQUIRE(x.box.top() < spec.height);
    REQUIRE(std::abs(x.weights[0] + x.weights[1] + x.weights[2] - 1.0) < 1e-12);
    for (double k : x.kl) REQUIRE(k >= 0.0);
    REQUIRE(x.elapsed_ms >= 0.0);
  }
}

TEST_CASE("growing target: box follows the area, baseline does not") {
  const SynthSpec spec = growth_spec();
  const Sequence seq = synth_sequence(spec, 1);
  const BBox last_truth = seq.ground_truth().back();
  const TrackRun brcf = run_tracker(seq, TrackerConfig{});
  const TrackRun kcf = run_tracker(seq, kcf_baseline({}));
  REQUIRE_FALSE(brcf.failed);
  const double brcf_err = std::abs(brcf.frames.back().box.area() / last_truth.area() - 1.0);
  const double kcf_err = std::abs(kcf.frames.back().box.area() / last_truth.area() - 1.0);
  CAPTURE(brcf_err);
  CAPTURE(kcf_err);
  CHECK(brcf_err <= 0.2);
  CHECK(kcf_err > 0.4);
}
