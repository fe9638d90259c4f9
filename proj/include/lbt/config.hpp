#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lbt/lbt.hpp"
#include "lbt/metrics.hpp"
#include "lbt/perception.hpp"
#include "lbt/simulator.hpp"
#include "lbt/tracker.hpp"

namespace lbt {

/// Invalid run configuration; message carries file and line number.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything one experiment needs: tracker, extension, scene, perception
/// noise, latency model, seed and outputs. Loaded from a sectioned
/// key = value file; unknown keys are rejected so experiment files stay
/// trustworthy.
struct RunConfig {
  TrackerConfig tracker;
  LbtConfig lbt;
  SceneConfig scene;
  DetectorNoise detector;
  LocalizerNoise localizer;
  CostModel cost_model;
  std::uint64_t seed = 1;
  std::string detector_source = "oracle";  ///< oracle | file
  std::string det_file;
  std::string gt_file;  ///< ground truth for eval/sweep in file mode
  std::string out_path;
  std::vector<int> d_values = {0, 1, 3, 7, 15, 31};
  bool pr = false;  ///< average metrics over the confidence grid
  std::vector<double> pr_grid = default_pr_grid();

  // which keys appeared explicitly, as "section.key"
  std::set<std::string> explicit_keys;

  bool has(const std::string& key) const { return explicit_keys.count(key) > 0; }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_double(std::string_view v, const std::string& where) {
  try {
    size_t pos = 0;
    const double d = std::stod(std::string(v), &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw ConfigError(where + ": expected number, got '" + std::string(v) + "'");
  }
}

inline int to_int(std::string_view v, const std::string& where) {
  const double d = to_double(v, where);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d) throw ConfigError(where + ": expected integer");
  return i;
}

inline std::uint64_t to_u64(std::string_view v, const std::string& where) {
  try {
    size_t pos = 0;
    const std::uint64_t u = std::stoull(std::string(v), &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return u;
  } catch (...) {
    throw ConfigError(where + ": expected unsigned integer");
  }
}

inline bool to_bool(std::string_view v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(where + ": expected boolean, got '" + std::string(v) + "'");
}

inline std::vector<int> to_int_list(std::string_view v, const std::string& where) {
  std::vector<int> out;
  std::string item;
  std::stringstream ss{std::string(v)};
  while (std::getline(ss, item, ',')) {
    out.push_back(to_int(trim(item), where));
  }
  if (out.empty()) throw ConfigError(where + ": expected comma-separated integers");
  return out;
}

}  // namespace detail

/// Apply one key to the config. `where` is used for error messages;
/// unknown (section, key) pairs are rejected.
inline void apply_config_key(RunConfig& cfg, const std::string& section, const std::string& key,
                             std::string_view value, const std::string& where) {
  using detail::to_bool;
  using detail::to_double;
  using detail::to_int;
  using detail::to_int_list;
  using detail::to_u64;

  const std::string full = section + "." + key;
  cfg.explicit_keys.insert(full);

  if (section == "run") {
    if (key == "seed") cfg.seed = to_u64(value, where);
    else if (key == "detector") {
      if (value != "oracle" && value != "file") throw ConfigError(where + ": detector must be oracle or file");
      cfg.detector_source = std::string(value);
    }
    else if (key == "det_file") cfg.det_file = std::string(value);
    else if (key == "gt_file") cfg.gt_file = std::string(value);
    else if (key == "out") cfg.out_path = std::string(value);
    else if (key == "d_values") cfg.d_values = to_int_list(value, where);
    else if (key == "pr") cfg.pr = to_bool(value, where);
    else throw ConfigError(where + ": unknown key '" + full + "'");
  } else if (section == "tracker") {
    if (key == "mode") {
      if (value == "sort") cfg.tracker.mode = TrackerMode::sort;
      else if (value == "kiou") cfg.tracker.mode = TrackerMode::kiou;
      else throw ConfigError(where + ": mode must be sort or kiou");
    }
    else if (key == "min_hits") cfg.tracker.min_hits = to_int(value, where);
    else if (key == "max_age") cfg.tracker.max_age = to_int(value, where);
    else if (key == "min_iou") cfg.tracker.min_iou = to_double(value, where);
    else if (key == "euclidean_gate_factor") cfg.tracker.euclidean_gate_factor = to_double(value, where);
    else if (key == "min_confidence") cfg.tracker.min_confidence = to_double(value, where);
    else if (key == "greedy_matching") cfg.tracker.greedy_matching = to_bool(value, where);
    else if (key == "include_tentative") cfg.tracker.include_tentative_in_output = to_bool(value, where);
    else if (key == "measurement_sigma") cfg.tracker.noise.measurement_sigma = to_double(value, where);
    else if (key == "process_pos_sigma") cfg.tracker.noise.process_pos_sigma = to_double(value, where);
    else if (key == "process_vel_sigma") cfg.tracker.noise.process_vel_sigma = to_double(value, where);
    else throw ConfigError(where + ": unknown key '" + full + "'");
  } else if (section == "lbt") {
    if (key == "d") cfg.lbt.d = to_int(value, where);
    else if (key == "beta") cfg.lbt.beta = to_double(value, where);
    else if (key == "localizer_size") cfg.lbt.localizer_size = to_int(value, where);
    else if (key == "selection_d") cfg.lbt.selection_d = to_double(value, where);
    else if (key == "selection_w") cfg.lbt.selection_w = to_double(value, where);
    else if (key == "min_selection_score") cfg.lbt.min_selection_score = to_double(value, where);
    else throw ConfigError(where + ": unknown key '" + full + "'");
  } else if (section == "scene") {
    if (key == "width") cfg.scene.dims.width = to_int(value, where);
    else if (key == "height") cfg.scene.dims.height = to_int(value, where);
    else if (key == "n_frames") cfg.scene.n_frames = to_int(value, where);
    else if (key == "arrival_rate") cfg.scene.arrival_rate = to_double(value, where);
    else if (key == "lifetime_min") cfg.scene.lifetime_min = to_int(value, where);
    else if (key == "lifetime_max") cfg.scene.lifetime_max = to_int(value, where);
    else if (key == "speed_min") cfg.scene.speed_min = to_double(value, where);
    else if (key == "speed_max") cfg.scene.speed_max = to_double(value, where);
    else if (key == "size_min") cfg.scene.size_min = to_double(value, where);
    else if (key == "size_max") cfg.scene.size_max = to_double(value, where);
    else if (key == "motion") {
      if (value == "constant_velocity") cfg.scene.motion = MotionModel::constant_velocity;
      else if (value == "gentle_turn") cfg.scene.motion = MotionModel::gentle_turn;
      else throw ConfigError(where + ": motion must be constant_velocity or gentle_turn");
    }
    else if (key == "non_overlapping") cfg.scene.non_overlapping = to_bool(value, where);
    else if (key == "seed") cfg.scene.seed = to_u64(value, where);
    else throw ConfigError(where + ": unknown key '" + full + "'");
  } else if (section == "detector") {
    if (key == "fn_rate") cfg.detector.fn_rate = to_double(value, where);
    else if (key == "fp_per_frame") cfg.detector.fp_per_frame = to_double(value, where);
    else if (key == "pos_sigma") cfg.detector.pos_sigma = to_double(value, where);
    else if (key == "size_sigma") cfg.detector.size_sigma = to_double(value, where);
    else if (key == "conf_tp_mean") cfg.detector.conf_tp_mean = to_double(value, where);
    else if (key == "conf_fp_mean") cfg.detector.conf_fp_mean = to_double(value, where);
    else if (key == "conf_spread") cfg.detector.conf_spread = to_double(value, where);
    else if (key == "clutter_size_min") cfg.detector.clutter_size_min = to_double(value, where);
    else if (key == "clutter_size_max") cfg.detector.clutter_size_max = to_double(value, where);
    else if (key == "seed") cfg.detector.seed = to_u64(value, where);
    else throw ConfigError(where + ": unknown key '" + full + "'");
  } else if (section == "localizer") {
    if (key == "l_max") cfg.localizer.l_max = to_int(value, where);
    else if (key == "pos_sigma") cfg.localizer.pos_sigma = to_double(value, where);
    else if (key == "size_sigma") cfg.localizer.size_sigma = to_double(value, where);
    else if (key == "target_conf_mean") cfg.localizer.target_conf_mean = to_double(value, where);
    else if (key == "clutter_conf_mean") cfg.localizer.clutter_conf_mean = to_double(value, where);
    else if (key == "conf_spread") cfg.localizer.conf_spread = to_double(value, where);
    else if (key == "seed") cfg.localizer.seed = to_u64(value, where);
    else throw ConfigError(where + ": unknown key '" + full + "'");
  } else if (section == "cost_model") {
    if (key == "detect_ms") cfg.cost_model.detect_ms = to_double(value, where);
    else if (key == "loc_batch_ms") cfg.cost_model.loc_batch_ms = to_double(value, where);
    else if (key == "loc_crop_ms") cfg.cost_model.loc_crop_ms = to_double(value, where);
    else throw ConfigError(where + ": unknown key '" + full + "'");
  } else {
    throw ConfigError(where + ": unknown section '" + section + "'");
  }
}

/// Validate cross-field invariants and fill derived defaults: module seeds
/// derive from the run seed unless set explicitly, and the selection floor
/// default depends on tracker mode.
inline void finalize_config(RunConfig& cfg) {
  if (!cfg.has("scene.seed")) cfg.scene.seed = Rng::derive(cfg.seed, 1);
  if (!cfg.has("detector.seed")) cfg.detector.seed = Rng::derive(cfg.seed, 2);
  if (!cfg.has("localizer.seed")) cfg.localizer.seed = Rng::derive(cfg.seed, 3);
  if (!cfg.has("lbt.min_selection_score")) {
    cfg.lbt.min_selection_score = lbt_defaults(cfg.tracker.mode).min_selection_score;
  }

  const auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  require(cfg.tracker.min_hits >= 1, "tracker.min_hits must be >= 1");
  require(cfg.tracker.max_age >= 1, "tracker.max_age must be >= 1");
  require(cfg.tracker.noise.measurement_sigma > 0.0, "tracker.measurement_sigma must be > 0");
  require(cfg.tracker.noise.process_pos_sigma > 0.0, "tracker.process_pos_sigma must be > 0");
  require(cfg.tracker.noise.process_vel_sigma > 0.0, "tracker.process_vel_sigma must be > 0");
  require(cfg.lbt.d >= 0, "lbt.d must be >= 0");
  require(cfg.lbt.beta >= 1.0, "lbt.beta must be >= 1");
  require(cfg.lbt.localizer_size > 0, "lbt.localizer_size must be > 0");
  require(cfg.scene.dims.width > 0 && cfg.scene.dims.height > 0, "scene dims must be positive");
  require(cfg.scene.n_frames >= 0, "scene.n_frames must be >= 0");
  require(cfg.scene.lifetime_min >= 1 && cfg.scene.lifetime_max >= cfg.scene.lifetime_min,
          "scene lifetime range must be positive and ordered");
  require(cfg.scene.speed_min > 0.0 && cfg.scene.speed_max >= cfg.scene.speed_min,
          "scene speed range must be positive and ordered");
  require(cfg.scene.size_min > 0.0 && cfg.scene.size_max >= cfg.scene.size_min,
          "scene size range must be positive and ordered");
  require(cfg.detector.fn_rate >= 0.0 && cfg.detector.fn_rate <= 1.0,
          "detector.fn_rate must be in [0, 1]");
  require(cfg.detector.fp_per_frame >= 0.0, "detector.fp_per_frame must be >= 0");
  require(cfg.localizer.l_max >= 1, "localizer.l_max must be >= 1");
  for (int d : cfg.d_values) require(d >= 0, "run.d_values must be >= 0");
  if (cfg.detector_source == "file") {
    require(!cfg.det_file.empty(), "run.det_file required when run.detector = file");
  }
}

inline RunConfig parse_run_config(std::istream& in, const std::string& name,
                                  bool finalize = true) {
  RunConfig cfg;
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    line_no += 1;
    const std::string where = name + ":" + std::to_string(line_no);
    std::string_view s = detail::trim(line);
    if (s.empty() || s.front() == '#' || s.front() == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = std::string(detail::trim(s.substr(1, s.size() - 2)));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const std::string key{detail::trim(s.substr(0, eq))};
    const std::string_view value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (section.empty()) throw ConfigError(where + ": key before any [section]");
    apply_config_key(cfg, section, key, value, where);
  }
  if (finalize) finalize_config(cfg);
  return cfg;
}

inline RunConfig load_run_config(const std::string& path, bool finalize = true) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  return parse_run_config(in, path, finalize);
}

}  // namespace lbt
