#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "threatgrid/pipeline.hpp"
#include "threatgrid/simulation.hpp"
#include "threatgrid/text_io.hpp"

namespace threatgrid {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered key-value pairs; later entries override earlier ones.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// Parses a flat config document: one 'key value' per line, blank lines and
/// '#' comments ignored.
inline ConfigEntries parse_config_text(std::string_view text) {
  ConfigEntries entries;
  textio::LineScanner scanner(text);
  std::string_view line;
  while (scanner.next(line)) {
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    const std::vector<std::string_view> fields = textio::split_fields(body);
    if (fields.empty()) continue;
    if (fields.size() != 2) {
      throw ConfigError("config line " + std::to_string(scanner.line_number()) +
                        ": expected 'key value', got " + std::to_string(fields.size()) +
                        " fields");
    }
    entries.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  return entries;
}

/// Everything a simulated run needs: the scene, its noise, the detection
/// chain settings, and where the outputs go.
struct RunConfig {
  ScenarioKind kind = ScenarioKind::kTurningIn;
  ScenarioParams params;
  NoiseConfig noise;
  PipelineConfig pipeline;
  std::string out_dir = "out";
  std::string frames_path;  // detect input
  std::string plan_path;    // detect input
  bool emit_reports = false;
  bool emit_frames = false;
  bool emit_svg = false;
};

namespace detail {

inline double config_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  if (!textio::parse_double(value, out)) {
    throw ConfigError("config key '" + key + "': bad number '" + value + "'");
  }
  return out;
}

inline long config_int(const std::string& key, const std::string& value) {
  long out = 0;
  if (!textio::parse_long(value, out)) {
    throw ConfigError("config key '" + key + "': bad integer '" + value + "'");
  }
  return out;
}

inline void require(bool ok, const std::string& key, std::string_view what) {
  if (!ok) throw ConfigError("config key '" + key + "': " + std::string(what));
}

inline bool config_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw ConfigError("config key '" + key + "': expected 0/1/true/false, got '" + value + "'");
}

}  // namespace detail

/// Builds the effective run config. The scenario kind is resolved first (its
/// defaults seed every other value), then the remaining entries override in
/// order. Unknown keys are rejected. When eps is not given it follows the
/// cell size at twice its value.
inline RunConfig build_run_config(const ConfigEntries& entries) {
  RunConfig cfg;
  for (const auto& [key, value] : entries) {
    if (key == "scenario") {
      const auto kind = parse_scenario_kind(value);
      if (!kind) throw ConfigError("config key 'scenario': unknown scenario '" + value + "'");
      cfg.kind = *kind;
    }
  }
  cfg.params = default_params(cfg.kind);

  bool eps_set = false;
  for (const auto& [key, value] : entries) {
    using detail::config_double;
    using detail::config_int;
    using detail::require;
    if (key == "scenario") continue;

    if (key == "horizon") {
      cfg.pipeline.prediction.horizon = config_double(key, value);
      require(std::isfinite(cfg.pipeline.prediction.horizon) &&
                  cfg.pipeline.prediction.horizon > 0.0,
              key, "must be positive");
    } else if (key == "phi_u_deg") {
      const double deg = config_double(key, value);
      require(std::isfinite(deg) && deg >= 0.0 && deg < 90.0, key,
              "must be in [0, 90) degrees");
      cfg.pipeline.prediction.phi_u = deg * std::numbers::pi / 180.0;
    } else if (key == "seed") {
      const long seed = config_int(key, value);
      require(seed >= 0, key, "must be non-negative");
      cfg.noise.seed = static_cast<std::uint64_t>(seed);
    } else if (key == "sigma_v") {
      cfg.noise.sigma_v = config_double(key, value);
      require(std::isfinite(cfg.noise.sigma_v) && cfg.noise.sigma_v >= 0.0, key,
              "must be non-negative");
    } else if (key == "sigma_m") {
      cfg.noise.sigma_m = config_double(key, value);
      require(std::isfinite(cfg.noise.sigma_m) && cfg.noise.sigma_m >= 0.0, key,
              "must be non-negative");
    } else if (key == "lambda") {
      cfg.noise.lambda = config_double(key, value);
      require(std::isfinite(cfg.noise.lambda) && cfg.noise.lambda >= 0.0 &&
                  cfg.noise.lambda <= 1.0,
              key, "must be in [0, 1]");
    } else if (key == "v_min") {
      cfg.pipeline.mask.v_min = config_double(key, value);
      require(std::isfinite(cfg.pipeline.mask.v_min) && cfg.pipeline.mask.v_min >= 0.0, key,
              "must be non-negative");
    } else if (key == "p_occ_min") {
      cfg.pipeline.mask.p_occ_min = config_double(key, value);
      require(std::isfinite(cfg.pipeline.mask.p_occ_min) && cfg.pipeline.mask.p_occ_min >= 0.0 &&
                  cfg.pipeline.mask.p_occ_min <= 1.0,
              key, "must be in [0, 1]");
    } else if (key == "eps") {
      cfg.pipeline.dbscan_eps = config_double(key, value);
      require(std::isfinite(cfg.pipeline.dbscan_eps) && cfg.pipeline.dbscan_eps > 0.0, key,
              "must be positive");
      eps_set = true;
    } else if (key == "min_pts") {
      const long n = config_int(key, value);
      require(n >= 1 && n <= 1000000, key, "must be in [1, 1000000]");
      cfg.pipeline.dbscan_min_pts = static_cast<int>(n);
    } else if (key == "cluster_occ_min") {
      cfg.pipeline.plausibility.p_occ_min = config_double(key, value);
      require(std::isfinite(cfg.pipeline.plausibility.p_occ_min), key, "must be finite");
    } else if (key == "cluster_move_min") {
      cfg.pipeline.plausibility.p_move_min = config_double(key, value);
      require(std::isfinite(cfg.pipeline.plausibility.p_move_min), key, "must be finite");
    } else if (key == "cluster_var_max") {
      cfg.pipeline.plausibility.var_max = config_double(key, value);
      require(std::isfinite(cfg.pipeline.plausibility.var_max), key, "must be finite");
    } else if (key == "n_min") {
      const long n = config_int(key, value);
      require(n >= 1, key, "must be at least 1");
      cfg.pipeline.plausibility.n_min = static_cast<int>(n);
    } else if (key == "n_max") {
      const long n = config_int(key, value);
      require(n >= 1, key, "must be at least 1");
      cfg.pipeline.plausibility.n_max = static_cast<int>(n);
    } else if (key == "raster_margin") {
      cfg.pipeline.raster_margin = config_double(key, value);
      require(std::isfinite(cfg.pipeline.raster_margin) && cfg.pipeline.raster_margin >= 0.0,
              key, "must be non-negative");
    } else if (key == "ego_speed") {
      cfg.params.ego_speed = config_double(key, value);
    } else if (key == "ego_start_x") {
      cfg.params.ego_start_x = config_double(key, value);
      require(std::isfinite(cfg.params.ego_start_x), key, "must be finite");
    } else if (key == "ego_length") {
      cfg.params.ego_box.length = config_double(key, value);
    } else if (key == "ego_width") {
      cfg.params.ego_box.width = config_double(key, value);
    } else if (key == "actor_speed") {
      cfg.params.actor_speed = config_double(key, value);
    } else if (key == "actor_length") {
      cfg.params.actor_box.length = config_double(key, value);
    } else if (key == "actor_width") {
      cfg.params.actor_box.width = config_double(key, value);
    } else if (key == "turn_radius") {
      cfg.params.turn_radius = config_double(key, value);
    } else if (key == "lead_in") {
      cfg.params.lead_in = config_double(key, value);
    } else if (key == "approach_offset") {
      cfg.params.approach_offset = config_double(key, value);
      require(std::isfinite(cfg.params.approach_offset), key, "must be finite");
    } else if (key == "cross_x") {
      cfg.params.cross_x = config_double(key, value);
      require(std::isfinite(cfg.params.cross_x), key, "must be finite");
    } else if (key == "duration") {
      cfg.params.duration = config_double(key, value);
    } else if (key == "grid_extent") {
      cfg.params.grid_extent = config_double(key, value);
    } else if (key == "cell_size") {
      cfg.params.cell_size = config_double(key, value);
    } else if (key == "lane_half_width") {
      cfg.params.lane_half_width = config_double(key, value);
    } else if (key == "plan_padding") {
      cfg.params.plan_padding = config_double(key, value);
    } else if (key == "out_dir") {
      require(!value.empty(), key, "must not be empty");
      cfg.out_dir = value;
    } else if (key == "frames") {
      cfg.frames_path = value;
    } else if (key == "plan") {
      cfg.plan_path = value;
    } else if (key == "emit_reports") {
      cfg.emit_reports = detail::config_bool(key, value);
    } else if (key == "emit_frames") {
      cfg.emit_frames = detail::config_bool(key, value);
    } else if (key == "emit_svg") {
      cfg.emit_svg = detail::config_bool(key, value);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  if (!eps_set) cfg.pipeline.dbscan_eps = 2.0 * cfg.params.cell_size;
  if (cfg.pipeline.plausibility.n_min > cfg.pipeline.plausibility.n_max) {
    throw ConfigError("config: n_min exceeds n_max");
  }
  return cfg;
}

/// The effective configuration, one 'key value' per line sorted by key, in the
/// same vocabulary build_run_config accepts.
inline std::string serialize_run_config(const RunConfig& cfg) {
  ConfigEntries entries;
  const auto put = [&entries](std::string_view key, double v) {
    entries.emplace_back(std::string(key), textio::format_double(v));
  };
  entries.emplace_back("scenario", std::string(scenario_kind_name(cfg.kind)));
  put("horizon", cfg.pipeline.prediction.horizon);
  put("phi_u_deg", cfg.pipeline.prediction.phi_u * 180.0 / std::numbers::pi);
  entries.emplace_back("seed", std::to_string(cfg.noise.seed));
  put("sigma_v", cfg.noise.sigma_v);
  put("sigma_m", cfg.noise.sigma_m);
  put("lambda", cfg.noise.lambda);
  put("v_min", cfg.pipeline.mask.v_min);
  put("p_occ_min", cfg.pipeline.mask.p_occ_min);
  put("eps", cfg.pipeline.dbscan_eps);
  entries.emplace_back("min_pts", std::to_string(cfg.pipeline.dbscan_min_pts));
  put("cluster_occ_min", cfg.pipeline.plausibility.p_occ_min);
  put("cluster_move_min", cfg.pipeline.plausibility.p_move_min);
  put("cluster_var_max", cfg.pipeline.plausibility.var_max);
  entries.emplace_back("n_min", std::to_string(cfg.pipeline.plausibility.n_min));
  entries.emplace_back("n_max", std::to_string(cfg.pipeline.plausibility.n_max));
  put("raster_margin", cfg.pipeline.raster_margin);
  put("ego_speed", cfg.params.ego_speed);
  put("ego_start_x", cfg.params.ego_start_x);
  put("ego_length", cfg.params.ego_box.length);
  put("ego_width", cfg.params.ego_box.width);
  put("actor_speed", cfg.params.actor_speed);
  put("actor_length", cfg.params.actor_box.length);
  put("actor_width", cfg.params.actor_box.width);
  put("turn_radius", cfg.params.turn_radius);
  put("lead_in", cfg.params.lead_in);
  put("approach_offset", cfg.params.approach_offset);
  put("cross_x", cfg.params.cross_x);
  put("duration", cfg.params.duration);
  put("grid_extent", cfg.params.grid_extent);
  put("cell_size", cfg.params.cell_size);
  put("lane_half_width", cfg.params.lane_half_width);
  put("plan_padding", cfg.params.plan_padding);
  entries.emplace_back("out_dir", cfg.out_dir);
  if (!cfg.frames_path.empty()) entries.emplace_back("frames", cfg.frames_path);
  if (!cfg.plan_path.empty()) entries.emplace_back("plan", cfg.plan_path);
  entries.emplace_back("emit_reports", cfg.emit_reports ? "1" : "0");
  entries.emplace_back("emit_frames", cfg.emit_frames ? "1" : "0");
  entries.emplace_back("emit_svg", cfg.emit_svg ? "1" : "0");

  std::sort(entries.begin(), entries.end());
  std::string out = "CONFIG v1\n";
  for (const auto& [key, value] : entries) {
    out += key;
    out += ' ';
    out += value;
    out += '\n';
  }
  return out;
}

}  // namespace threatgrid
