#include "brcf/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace brcf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config: bad value for " + key + ": '" + value + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  bad_value(key, value);
}

using Setter = std::function<void(TrackerConfig&, const std::string&, const std::string&)>;

template <typename T>
Setter number(T TrackerConfig::*field) {
  return [field](TrackerConfig& c, const std::string& k, const std::string& v) { c.*field = parse_number<T>(k, v); };
}

Setter flag(bool TrackerConfig::*field) {
  return [field](TrackerConfig& c, const std::string& k, const std::string& v) { c.*field = parse_bool(k, v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"mode", [](TrackerConfig& c, const std::string&, const std::string& v) { c.mode = parse_mode(v); }},
      {"cell_size", number(&TrackerConfig::cell_size)},
      {"padding_factor", number(&TrackerConfig::padding_factor)},
      {"template_size", number(&TrackerConfig::template_size)},
      {"sigma_k", number(&TrackerConfig::sigma_k)},
      {"sigma_label_factor", number(&TrackerConfig::sigma_label_factor)},
      {"lambda", number(&TrackerConfig::lambda)},
      {"alpha", number(&TrackerConfig::alpha)},
      {"literal_update", flag(&TrackerConfig::literal_update)},
      {"subcell_peak", flag(&TrackerConfig::subcell_peak)},
      {"P_cells",
       [](TrackerConfig& c, const std::string& k, const std::string& v) {
         if (v == "auto" || v.empty()) {
           c.p_cells.reset();
         } else {
           c.p_cells = parse_number<int>(k, v);
         }
       }},
      {"use_local_mask", flag(&TrackerConfig::use_local_mask)},
      {"lambda_w", number(&TrackerConfig::lambda_w)},
      {"use_color", flag(&TrackerConfig::use_color)},
      {"use_lbp", flag(&TrackerConfig::use_lbp)},
      {"color_bins", number(&TrackerConfig::color_bins)},
      {"use_scale", flag(&TrackerConfig::use_scale)},
      {"surf_threshold", number(&TrackerConfig::surf_threshold)},
      {"surf_max_points", number(&TrackerConfig::surf_max_points)},
      {"ratio_test", number(&TrackerConfig::ratio_test)},
      {"scale_clamp",
       [](TrackerConfig& c, const std::string& k, const std::string& v) {
         const auto comma = v.find(',');
         if (comma == std::string::npos) bad_value(k, v);
         c.scale_clamp_lo = parse_number<double>(k, trim(v.substr(0, comma)));
         c.scale_clamp_hi = parse_number<double>(k, trim(v.substr(comma + 1)));
       }},
      {"min_matches", number(&TrackerConfig::min_matches)},
      {"scale_min_distance", number(&TrackerConfig::scale_min_distance)},
      {"scale_min_distance_rel", number(&TrackerConfig::scale_min_distance_rel)},
      {"upright", flag(&TrackerConfig::upright)},
      {"keypoint_max_side", number(&TrackerConfig::keypoint_max_side)},
      {"use_regressor", flag(&TrackerConfig::use_regressor)},
      {"literal_regression", flag(&TrackerConfig::literal_regression)},
      {"regressor", [](TrackerConfig& c, const std::string&, const std::string& v) { c.regressor_path = v; }},
      {"regressor_lambda", number(&TrackerConfig::regressor_lambda)},
      {"regressor_lr", number(&TrackerConfig::regressor_lr)},
      {"regressor_iters_offline", number(&TrackerConfig::regressor_iters_offline)},
      {"regressor_iters_finetune", number(&TrackerConfig::regressor_iters_finetune)},
      {"regressor_samples", number(&TrackerConfig::regressor_samples)},
      {"regressor_offline_samples", number(&TrackerConfig::regressor_offline_samples)},
      {"iou_min", number(&TrackerConfig::iou_min)},
      {"seed", number(&TrackerConfig::seed)},
  };
  return table;
}

}  // namespace

TrackerMode parse_mode(const std::string& text) {
  if (text == "brcf") return TrackerMode::Brcf;
  if (text == "kcf") return TrackerMode::Kcf;
  throw std::invalid_argument("unknown mode '" + text + "' (expected brcf or kcf)");
}

std::string mode_name(TrackerMode mode) { return mode == TrackerMode::Brcf ? "brcf" : "kcf"; }

void set_config_value(TrackerConfig& config, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw std::invalid_argument("config: unknown key '" + key + "'");
  it->second(config, key, value);
}

TrackerConfig parse_config(const std::string& text, TrackerConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate_config(base);
  return base;
}

TrackerConfig load_config(const std::filesystem::path& path, TrackerConfig base) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

void validate_config(const TrackerConfig& c) {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + msg);
  };
  require(c.cell_size >= 1, "cell_size must be >= 1");
  require(c.padding_factor >= 0.0, "padding_factor must be >= 0");
  require(c.template_size >= 4 * c.cell_size, "template_size too small for the cell size");
  require(c.sigma_k > 0.0, "sigma_k must be positive");
  require(c.sigma_label_factor > 0.0, "sigma_label_factor must be positive");
  require(c.lambda > 0.0, "lambda must be positive");
  require(c.alpha >= 0.0 && c.alpha <= 1.0, "alpha must lie in [0, 1]");
  require(!c.p_cells || *c.p_cells >= 1, "P_cells must be >= 1");
  require(c.lambda_w >= 0.0 && c.lambda_w <= 1.0, "lambda_w must lie in [0, 1]");
  require(c.color_bins >= 1 && c.color_bins <= 16, "color_bins must lie in [1, 16]");
  require(c.surf_max_points >= 1, "surf_max_points must be >= 1");
  require(c.ratio_test > 0.0 && c.ratio_test <= 1.0, "ratio_test must lie in (0, 1]");
  require(c.scale_clamp_lo > 0.0 && c.scale_clamp_lo <= 1.0 && c.scale_clamp_hi >= 1.0, "scale_clamp must bracket 1");
  require(c.min_matches >= 1, "min_matches must be >= 1");
  require(c.scale_min_distance >= 0.0 && c.scale_min_distance_rel >= 0.0, "scale minimum distances must be >= 0");
  require(c.keypoint_max_side >= 32, "keypoint_max_side must be >= 32");
  require(c.regressor_lambda >= 0.0, "regressor_lambda must be >= 0");
  require(c.regressor_iters_offline >= 0 && c.regressor_iters_finetune >= 0, "regressor iterations must be >= 0");
  require(c.regressor_samples >= 1 && c.regressor_offline_samples >= 1, "regressor sample counts must be >= 1");
  require(c.iou_min > 0.0 && c.iou_min < 1.0, "iou_min must lie in (0, 1)");
}

TrackerConfig kcf_baseline(TrackerConfig config) {
  config.mode = TrackerMode::Kcf;
  config.use_local_mask = false;
  config.use_color = false;
  config.use_lbp = false;
  config.use_scale = false;
  config.use_regressor = false;
  return config;
}

}  // namespace brcf
