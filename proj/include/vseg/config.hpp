#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "vseg/error.hpp"
#include "vseg/fine_seg.hpp"
#include "vseg/motion_cluster.hpp"
#include "vseg/preprocess.hpp"
#include "vseg/supervoxel.hpp"
#include "vseg/tracker.hpp"

namespace vseg {

enum class BilateralMode { automatic, on, off };

/// Every tunable of the pipeline.
struct PipelineConfig {
  int clip_size = 30;
  std::string frame_pattern;  // empty: any indexed image family
  TrackingConfig tracking;
  MotionClusterParams motion;
  SlicParams slic;
  FlowParams flow;
  BilateralMode bilateral = BilateralMode::automatic;
  BilateralParams bilateral_params;
  int bilateral_min_side = 720;  // automatic mode filters frames with min(W, H) >= this
  GrabCutParams grabcut;
  bool write_overlays = false;
  // Debug exports, written only when a debug directory is given.
  bool debug_flow = true;
  bool debug_tracks = true;
  bool debug_supervoxels = true;
  bool debug_trimap = true;
  bool debug_grabcut = true;

  bool bilateral_active(int width, int height) const {
    if (bilateral == BilateralMode::automatic) return std::min(width, height) >= bilateral_min_side;
    return bilateral == BilateralMode::on;
  }
};

namespace config_detail {

inline std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw config_error(key + ": not a number: '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "off" || text == "no") return false;
  throw config_error(key + ": expected true/false, got '" + text + "'");
}

template <typename T>
std::string format(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else {
    std::ostringstream os;
    os << v;
    return os.str();
  }
}

struct Entry {
  std::string key;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <typename T, typename Access>
Entry field_path(std::string key, Access access) {
  Entry e;
  e.key = key;
  e.set = [key, access](PipelineConfig& c, const std::string& text) {
    T& slot = access(c);
    if constexpr (std::is_same_v<T, bool>) {
      slot = parse_bool(key, text);
    } else if constexpr (std::is_same_v<T, std::string>) {
      slot = text;
    } else {
      slot = parse_number<T>(key, text);
    }
  };
  e.get = [access](const PipelineConfig& c) { return format(access(c)); };
  return e;
}

#define VSEG_FIELD(key, type, expr) field_path<type>(key, [](auto& c) -> auto& { return c.expr; })

inline const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t{
        VSEG_FIELD("clip.size", int, clip_size),
        VSEG_FIELD("input.pattern", std::string, frame_pattern),
        VSEG_FIELD("tracking.grid_interval", int, tracking.grid_interval),
        VSEG_FIELD("tracking.window_length", int, tracking.window_length),
        VSEG_FIELD("tracking.pyramid_levels", int, tracking.pyramid_levels),
        VSEG_FIELD("tracking.lk_window", int, tracking.lk_window),
        VSEG_FIELD("tracking.max_iterations", int, tracking.max_iterations),
        VSEG_FIELD("tracking.convergence_eps", double, tracking.convergence_eps),
        VSEG_FIELD("tracking.fb_threshold", double, tracking.fb_threshold),
        VSEG_FIELD("tracking.min_eigenvalue", double, tracking.min_eigenvalue),
        VSEG_FIELD("ssc.k", int, motion.k),
        VSEG_FIELD("ssc.lambda_rel", double, motion.ssc.lambda_rel),
        VSEG_FIELD("ssc.iterations", int, motion.ssc.iterations),
        VSEG_FIELD("ssc.rho", double, motion.ssc.rho),
        VSEG_FIELD("ssc.tolerance", double, motion.ssc.tolerance),
        VSEG_FIELD("ssc.affine", bool, motion.ssc.affine),
        VSEG_FIELD("ssc.tie_tolerance", double, motion.foreground.tie_tolerance),
        VSEG_FIELD("ssc.tie_relative", double, motion.foreground.tie_relative),
        VSEG_FIELD("slic.n", int, slic.n),
        VSEG_FIELD("slic.depth", int, slic.depth),
        VSEG_FIELD("slic.m", double, slic.m),
        VSEG_FIELD("slic.w_m", double, slic.w_m),
        VSEG_FIELD("slic.w_z", double, slic.w_z),
        VSEG_FIELD("slic.w_L", double, slic.w_L),
        VSEG_FIELD("slic.frame_rate", double, slic.frame_rate),
        VSEG_FIELD("slic.iterations", int, slic.iterations),
        VSEG_FIELD("slic.min_size_fraction", double, slic.min_size_fraction),
        VSEG_FIELD("flow.alpha", double, flow.alpha),
        VSEG_FIELD("flow.iterations", int, flow.iterations),
        VSEG_FIELD("flow.levels", int, flow.levels),
        VSEG_FIELD("bilateral.sigma_spatial", double, bilateral_params.sigma_spatial),
        VSEG_FIELD("bilateral.sigma_range", double, bilateral_params.sigma_range),
        VSEG_FIELD("bilateral.min_side", int, bilateral_min_side),
        VSEG_FIELD("grabcut.components", int, grabcut.components),
        VSEG_FIELD("grabcut.gamma", double, grabcut.gamma),
        VSEG_FIELD("grabcut.max_iterations", int, grabcut.max_iterations),
        VSEG_FIELD("grabcut.border_fraction", double, grabcut.border_fraction),
        VSEG_FIELD("output.overlays", bool, write_overlays),
        VSEG_FIELD("debug.flow", bool, debug_flow),
        VSEG_FIELD("debug.tracks", bool, debug_tracks),
        VSEG_FIELD("debug.supervoxels", bool, debug_supervoxels),
        VSEG_FIELD("debug.trimap", bool, debug_trimap),
        VSEG_FIELD("debug.grabcut", bool, debug_grabcut),
    };
    t.push_back({"bilateral.mode",
                 [](PipelineConfig& c, const std::string& v) {
                   if (v == "auto") c.bilateral = BilateralMode::automatic;
                   else if (v == "on") c.bilateral = BilateralMode::on;
                   else if (v == "off") c.bilateral = BilateralMode::off;
                   else throw config_error("bilateral.mode: expected auto, on or off, got '" + v + "'");
                 },
                 [](const PipelineConfig& c) -> std::string {
                   return c.bilateral == BilateralMode::automatic ? "auto" : c.bilateral == BilateralMode::on ? "on" : "off";
                 }});
    t.push_back({"grabcut.data_term",
                 [](PipelineConfig& c, const std::string& v) {
                   if (v == "component") c.grabcut.data_term = DataTerm::component;
                   else if (v == "mixture") c.grabcut.data_term = DataTerm::mixture;
                   else throw config_error("grabcut.data_term: expected component or mixture, got '" + v + "'");
                 },
                 [](const PipelineConfig& c) -> std::string {
                   return c.grabcut.data_term == DataTerm::component ? "component" : "mixture";
                 }});
    return t;
  }();
  return table;
}

#undef VSEG_FIELD

}  // namespace config_detail

/// All recognized keys in declaration order.
inline std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : config_detail::entries()) keys.push_back(e.key);
  return keys;
}

/// Sets one dotted key from its text value.
inline void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& e : config_detail::entries()) {
    if (e.key == key) return e.set(cfg, config_detail::trim(value));
  }
  throw config_error("unknown configuration key '" + key + "'");
}

inline std::string get_config_value(const PipelineConfig& cfg, const std::string& key) {
  for (const auto& e : config_detail::entries()) {
    if (e.key == key) return e.get(cfg);
  }
  throw config_error("unknown configuration key '" + key + "'");
}

/// Applies a `key=value` override as given to --set.
inline void apply_override(PipelineConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw config_error("expected key=value, got '" + assignment + "'");
  set_config_value(cfg, config_detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

/// Applies `key = value` lines; blank lines and lines starting with '#' are skipped.
inline void apply_config_text(PipelineConfig& cfg, const std::string& text, const std::string& source = "config") {
  std::istringstream in(text);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    line = config_detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    try {
      apply_override(cfg, line);
    } catch (const config_error& e) {
      throw config_error(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str(), path.string());
  return cfg;
}

/// The full configuration as `key = value` lines; load_config of the result reproduces it.
inline std::string dump_config(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& e : config_detail::entries()) out += e.key + " = " + e.get(cfg) + "\n";
  return out;
}

/// Range checks that individual stages would otherwise report late.
inline void validate(const PipelineConfig& cfg) {
  if (cfg.clip_size < 2) throw config_error("clip.size must be at least 2");
  if (cfg.tracking.grid_interval < 2) throw config_error("tracking.grid_interval must be at least 2");
  if (cfg.tracking.window_length < 2) throw config_error("tracking.window_length must be at least 2");
  if (cfg.tracking.pyramid_levels < 1 || cfg.tracking.lk_window < 3) throw config_error("bad tracking pyramid/window");
  if (cfg.motion.k < 2) throw config_error("ssc.k must be at least 2");
  if (cfg.motion.ssc.lambda_rel <= 0 || cfg.motion.ssc.iterations < 1) throw config_error("bad ssc settings");
  if (cfg.slic.n < 1 || cfg.slic.depth < 1 || cfg.slic.m <= 0 || cfg.slic.iterations < 0) {
    throw config_error("slic.n and slic.depth must be >= 1 and slic.m > 0");
  }
  if (cfg.slic.w_m < 0 || cfg.slic.w_z < 0 || cfg.slic.w_L < 0 || cfg.slic.frame_rate <= 0) {
    throw config_error("slic weights must be nonnegative and the frame rate positive");
  }
  if (cfg.flow.alpha <= 0 || cfg.flow.iterations < 1 || cfg.flow.levels < 1) throw config_error("bad flow settings");
  if (cfg.bilateral_params.sigma_spatial <= 0 || cfg.bilateral_params.sigma_range <= 0) {
    throw config_error("bilateral sigmas must be positive");
  }
  if (cfg.grabcut.components < 1 || cfg.grabcut.max_iterations < 1 || cfg.grabcut.gamma < 0) {
    throw config_error("grabcut needs components >= 1, max_iterations >= 1, gamma >= 0");
  }
}

}  // namespace vseg
