#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "brcf/evaluation.hpp"
#include "brcf/synth.hpp"
#include "brcf/zone.hpp"

namespace brcf {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

/// Bad configuration or arguments detected after parsing; exits with 2 like parse errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sequences;
  std::vector<std::string> synth;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Tracker config file (key = value)");
  cmd->add_option("--mode", o.mode, "brcf or kcf");
  cmd->add_option("--seed", o.seed, "Seed for synthetic data and regressor sampling");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--synth", o.synth, "Built-in synthetic sequence (translate, grow, diagonal, shrink, static)");
  cmd->add_option("sequences", o.sequences, "Sequence directories (img/ + groundtruth_rect.txt)");
}

TrackerConfig make_config(const CommonOptions& o) {
  try {
    TrackerConfig c = o.config_path.empty() ? TrackerConfig{} : load_config(o.config_path);
    if (!o.mode.empty()) c.mode = parse_mode(o.mode);
    if (o.seed) c.seed = *o.seed;
    validate_config(c);
    return c;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

std::uint64_t data_seed(const CommonOptions& o) { return o.seed.value_or(1); }

SynthSpec find_spec(const std::string& name) {
  auto all = builtin_suite();
  all.push_back(static_spec());
  for (const auto& s : all) {
    if (s.id == name) return s;
  }
  throw UsageError("unknown synthetic sequence '" + name + "'");
}

std::vector<Sequence> gather(const CommonOptions& o, const std::vector<SynthSpec>& defaults) {
  std::vector<Sequence> out;
  for (const auto& dir : o.sequences) out.push_back(load_sequence(dir));
  for (const auto& name : o.synth) out.push_back(synth_sequence(find_spec(name), data_seed(o)));
  if (out.empty()) {
    for (const auto& spec : defaults) out.push_back(synth_sequence(spec, data_seed(o)));
  }
  return out;
}

Sequence single(const CommonOptions& o) {
  if (o.sequences.size() + o.synth.size() != 1)
    throw CLI::ValidationError("exactly one sequence directory or --synth name is required");
  return gather(o, {}).front();
}

std::vector<TrackerMode> modes(const CommonOptions& o) {
  if (!o.mode.empty()) return {parse_mode(o.mode)};
  return {TrackerMode::Brcf, TrackerMode::Kcf};
}

json box_json(const BBox& b) { return {{"cx", b.cx}, {"cy", b.cy}, {"w", b.w}, {"h", b.h}}; }

json triple_json(const Triple& t) {
  json a = json::array();
  for (double v : t) a.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  return a;
}

json frame_json(const std::string& seq, const FrameResult& f) {
  return {{"sequence", seq},
          {"frame", f.frame},
          {"box", box_json(f.box)},
          {"kl", triple_json(f.kl)},
          {"eta", triple_json(f.eta)},
          {"weights", triple_json(f.weights)},
          {"scale", f.scale},
          {"deltas", {f.deltas[0], f.deltas[1], f.deltas[2], f.deltas[3]}},
          {"peak", f.peak},
          {"matches", f.matches},
          {"elapsed_ms", f.elapsed_ms}};
}

json record_json(const EvalRecord& r) {
  return {{"sequence", r.sequence}, {"frame", r.frame},     {"predicted", box_json(r.predicted)},
          {"truth", box_json(r.truth)}, {"iou", r.iou},     {"distance", r.distance},
          {"elapsed_ms", r.elapsed_ms}};
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void write_curve(const fs::path& path, const std::vector<CurvePoint>& curve) {
  auto os = open_out(path);
  os << "threshold,rate\n";
  for (const auto& p : curve) os << p.threshold << ',' << p.rate << '\n';
}

int cmd_track(const CommonOptions& o, std::ostream& out) {
  const Sequence seq = single(o);
  const TrackRun run = run_tracker(seq, make_config(o));
  std::ofstream file;
  if (!o.out.empty()) file = open_out(fs::path(o.out) / "results.jsonl");
  std::ostream& os = o.out.empty() ? out : file;
  for (const auto& f : run.frames) os << frame_json(seq.id(), f).dump() << '\n';
  if (run.failed) {
    os << json{{"sequence", seq.id()}, {"event", "failure"}, {"message", run.failure}}.dump() << '\n';
    return 1;
  }
  return 0;
}

int cmd_eval(const CommonOptions& o, std::ostream& out) {
  const auto sequences = gather(o, builtin_suite());
  const TrackerConfig base = make_config(o);
  std::vector<Summary> rows;
  for (TrackerMode mode : modes(o)) {
    TrackerConfig cfg = base;
    cfg.mode = mode;
    std::vector<EvalRecord> records;
    double frames = 0.0, ms = 0.0;
    for (const auto& seq : sequences) {
      const TrackRun run = run_tracker(seq, cfg);
      records.insert(records.end(), run.records.begin(), run.records.end());
      frames += static_cast<double>(run.frames.size() + 1);
      ms += run.total_ms;
    }
    rows.push_back(summarize(mode_name(mode), records, ms > 0.0 ? frames / (ms / 1000.0) : 0.0));
    if (!o.out.empty()) {
      const fs::path dir = fs::path(o.out) / mode_name(mode);
      auto os = open_out(dir / "records.jsonl");
      for (const auto& r : records) os << record_json(r).dump() << '\n';
      write_curve(dir / "success.csv", success_curve(records, default_success_thresholds()));
      write_curve(dir / "precision.csv", precision_curve(records, default_precision_thresholds()));
    }
  }
  const std::string table = format_summary_table(rows);
  out << table;
  if (!o.out.empty()) open_out(fs::path(o.out) / "summary.txt") << table;
  return 0;
}

struct BenchRow {
  std::string method;
  double frames = 0.0;
  double fps = 0.0;
  StageTimings stages;
  double total_ms = 0.0;
};

int cmd_bench(const CommonOptions& o, std::ostream& out) {
  SynthSpec diagonal = find_spec("diagonal");
  const auto sequences = gather(o, {growth_spec(), diagonal});
  const TrackerConfig base = make_config(o);
  std::vector<BenchRow> rows;
  for (TrackerMode mode : modes(o)) {
    TrackerConfig cfg = base;
    cfg.mode = mode;
    BenchRow row;
    row.method = mode_name(mode);
    double all_ms = 0.0, all_frames = 0.0;
    for (const auto& seq : sequences) {
      const TrackRun run = run_tracker(seq, cfg);
      all_ms += run.total_ms;
      all_frames += static_cast<double>(run.frames.size() + 1);
      for (const auto& f : run.frames) {
        row.frames += 1.0;
        row.stages.features += f.timings.features;
        row.stages.detect += f.timings.detect;
        row.stages.fusion += f.timings.fusion;
        row.stages.scale += f.timings.scale;
        row.stages.regression += f.timings.regression;
        row.stages.update += f.timings.update;
        row.total_ms += f.elapsed_ms;
      }
    }
    const double n = std::max(row.frames, 1.0);
    row.stages = {row.stages.features / n, row.stages.detect / n, row.stages.fusion / n,
                  row.stages.scale / n,    row.stages.regression / n, row.stages.update / n};
    row.total_ms /= n;
    row.fps = all_ms > 0.0 ? all_frames / (all_ms / 1000.0) : 0.0;
    rows.push_back(row);
  }

  char line[256];
  std::snprintf(line, sizeof line, "%-8s %9s %9s %9s %9s %11s %13s %10s %9s %9s %11s\n", "method", "fps",
                "features", "detect", "fusion", "scale_train", "scale_predict", "regression", "update", "total",
                "scale_share");
  out << line;
  json report = json::array();
  for (const auto& r : rows) {
    const double share = r.total_ms > 0.0 ? r.stages.scale / r.total_ms : 0.0;
    std::snprintf(line, sizeof line, "%-8s %9.2f %9.3f %9.3f %9.3f %11.3f %13.3f %10.3f %9.3f %9.3f %11.3f\n",
                  r.method.c_str(), r.fps, r.stages.features, r.stages.detect, r.stages.fusion, 0.0, r.stages.scale,
                  r.stages.regression, r.stages.update, r.total_ms, share);
    out << line;
    report.push_back({{"method", r.method},
                      {"frames", r.frames},
                      {"fps", r.fps},
                      {"ms_per_frame",
                       {{"features", r.stages.features},
                        {"detect", r.stages.detect},
                        {"fusion", r.stages.fusion},
                        {"scale_training", 0.0},
                        {"scale_prediction", r.stages.scale},
                        {"regression", r.stages.regression},
                        {"update", r.stages.update},
                        {"total", r.total_ms}}},
                      {"scale_share", share}});
  }
  if (!o.out.empty()) open_out(fs::path(o.out) / "bench.json") << report.dump(2) << '\n';
  return 0;
}

int cmd_synth(const CommonOptions& o, std::ostream& out) {
  if (o.out.empty()) throw CLI::ValidationError("synth requires --out DIR");
  std::vector<SynthSpec> specs;
  for (const auto& name : o.synth) specs.push_back(find_spec(name));
  if (specs.empty()) specs = builtin_suite();
  for (const auto& spec : specs) {
    const fs::path dir = fs::path(o.out) / spec.id;
    write_sequence(synth_sequence(spec, data_seed(o)), dir);
    out << json{{"sequence", spec.id}, {"frames", spec.frames}, {"path", dir.string()}}.dump() << '\n';
  }
  return 0;
}

int cmd_trainreg(const CommonOptions& o, std::size_t per_frame, std::size_t stride, std::ostream& out) {
  if (o.out.empty()) throw CLI::ValidationError("trainreg requires --out FILE");
  const TrackerConfig cfg = make_config(o);
  const auto sequences = gather(o, builtin_suite());
  SamplingParams sampling;
  sampling.iou_min = cfg.iou_min;
  const RegressionFeatureParams fp;
  std::vector<TrainingPair> pairs;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    auto more = sequence_training_pairs(sequences[i], per_frame, stride, cfg.seed + 100000 * i, sampling, fp);
    pairs.insert(pairs.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  }
  std::vector<double> trace;
  RegressorWeights w = train_regressor(pairs, {cfg.regressor_lambda, cfg.regressor_lr, cfg.regressor_iters_offline},
                                       nullptr, &trace);
  w.features = fp;
  save_regressor(o.out, w);
  out << json{{"pairs", pairs.size()},
              {"dimension", w.dim()},
              {"iterations", trace.size()},
              {"final_loss", trace.empty() ? 0.0 : trace.back()},
              {"path", o.out}}
             .dump()
      << '\n';
  return 0;
}

int cmd_watch(const CommonOptions& o, const std::string& zones_path, std::ostream& out) {
  if (zones_path.empty()) throw CLI::ValidationError("watch requires --zones PATH");
  const auto zones = load_zones(zones_path);
  const Sequence seq = single(o);
  const TrackRun run = run_tracker(seq, make_config(o));
  std::ofstream file;
  if (!o.out.empty()) file = open_out(fs::path(o.out) / "watch.jsonl");
  std::ostream& os = o.out.empty() ? out : file;

  std::vector<BBox> boxes{seq.ground_truth().front()};
  for (const auto& f : run.frames) boxes.push_back(f.box);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    json levels = json::array();
    std::vector<int> alarms;
    for (std::size_t z = 0; z < zones.size(); ++z) {
      const double d = zone_distance(boxes[i], zones[z]);
      const int level = zone_alarm(d, zones[z]);
      levels.push_back({{"zone", z}, {"distance", d}, {"level", level}});
      if (level == static_cast<int>(zones[z].thresholds.size())) alarms.push_back(static_cast<int>(z));
    }
    os << json{{"frame", i}, {"box", box_json(boxes[i])}, {"zones", levels}}.dump() << '\n';
    for (int z : alarms) os << json{{"event", "alarm"}, {"frame", i}, {"zone", z}}.dump() << '\n';
  }
  return run.failed ? 1 : 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Correlation-filter tracker with keypoint scale estimation and box regression", "brcf"};
  app.require_subcommand(1);
  CommonOptions o;
  std::string zones_path;
  std::size_t per_frame = 16, stride = 20;
  auto* track = app.add_subcommand("track", "Track one sequence and print per-frame results as JSON lines");
  auto* eval = app.add_subcommand("eval", "Evaluate on sequences: records, success/precision curves, summary");
  auto* bench = app.add_subcommand("bench", "Per-stage timing and frame rate");
  auto* synth = app.add_subcommand("synth", "Write synthetic sequences");
  auto* trainreg = app.add_subcommand("trainreg", "Train the box regressor offline");
  auto* watch = app.add_subcommand("watch", "Track and raise restricted-zone alarms");
  for (auto* cmd : {track, eval, bench, synth, trainreg, watch}) add_common(cmd, o);
  trainreg->add_option("--per-frame", per_frame, "Jittered samples per training frame")->check(CLI::PositiveNumber);
  trainreg->add_option("--stride", stride, "Use every n-th frame")->check(CLI::PositiveNumber);
  watch->add_option("--zones", zones_path, "Zone file: x1,y1 x2,y2 ... | t1,t2,...");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*track) return cmd_track(o, out);
    if (*eval) return cmd_eval(o, out);
    if (*bench) return cmd_bench(o, out);
    if (*synth) return cmd_synth(o, out);
    if (*trainreg) return cmd_trainreg(o, per_frame, stride, out);
    if (*watch) return cmd_watch(o, zones_path, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace brcf
