#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "threatgrid/clustering.hpp"
#include "threatgrid/geometry.hpp"
#include "threatgrid/grid.hpp"
#include "threatgrid/pipeline.hpp"
#include "threatgrid/prediction.hpp"
#include "threatgrid/text_io.hpp"
#include "threatgrid/threat.hpp"

namespace threatgrid {

/// Grid update period, seconds (10 Hz).
inline constexpr double kFramePeriod = 0.1;

/// Largest speed a static clutter cell may carry, m/s. Kept below the default
/// moving-cell threshold so clutter never enters the search mask.
inline constexpr double kStaticSpeedCap = 0.5;

enum class ScenarioKind { kTurningIn, kTurningOver, kStraightCrossing };

inline std::string_view scenario_kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::kTurningIn: return "turning-in";
    case ScenarioKind::kTurningOver: return "turning-over";
    case ScenarioKind::kStraightCrossing: return "straight-crossing";
  }
  return "turning-in";
}

inline std::optional<ScenarioKind> parse_scenario_kind(std::string_view name) {
  if (name == "turning-in") return ScenarioKind::kTurningIn;
  if (name == "turning-over") return ScenarioKind::kTurningOver;
  if (name == "straight-crossing") return ScenarioKind::kStraightCrossing;
  return std::nullopt;
}

struct Pose {
  Vec2 position;
  double heading = 0.0;
};

/// One scripted track piece: a straight run when turn_rate is zero, otherwise
/// a constant-speed arc (positive turn_rate curves counter-clockwise).
struct TrackSegment {
  double t_start = 0.0;
  double duration = 0.0;
  Pose start;
  double speed = 0.0;
  double turn_rate = 0.0;  // rad/s
};

inline Pose segment_pose(const TrackSegment& seg, double t) {
  const double dt = t - seg.t_start;
  if (seg.turn_rate == 0.0) {
    return {seg.start.position + (seg.speed * dt) * unit_vector(seg.start.heading),
            seg.start.heading};
  }
  const double radius = seg.speed / seg.turn_rate;
  const Vec2 center =
      seg.start.position + radius * unit_vector(seg.start.heading + 0.5 * std::numbers::pi);
  const double swept = seg.turn_rate * dt;
  return {center + rotated(seg.start.position - center, swept),
          wrap_angle(seg.start.heading + swept)};
}

struct ActorTrack {
  std::vector<TrackSegment> segments;  // contiguous in time, starting at 0
  VehicleFootprint footprint;

  const TrackSegment& segment_at(double t) const {
    for (std::size_t i = segments.size(); i-- > 1;) {
      if (t >= segments[i].t_start) return segments[i];
    }
    return segments.front();
  }

  Pose pose_at(double t) const { return segment_pose(segment_at(t), t); }
  double speed_at(double t) const { return segment_at(t).speed; }
};

struct GridSpec {
  Point2 origin;
  double cell_size = 0.2;
  int width = 300;
  int height = 300;
};

/// A scripted collision scene: ego on a fixed straight plan, one actor on a
/// piecewise track, both in a fixed world frame. The prior corridor is the
/// mapped lane polygon, kept for reporting and rendering only.
struct Scenario {
  ScenarioKind kind = ScenarioKind::kTurningIn;
  EgoPlan ego_plan;
  double ego_speed = 10.0;
  ActorTrack actor;
  double duration = 3.0;
  HullPolygon prior_corridor;
  GridSpec grid;
};

struct ScenarioParams {
  double ego_speed = 10.0;
  double ego_start_x = -25.0;
  VehicleFootprint ego_box{4.0, 2.0};
  double actor_speed = 8.0;
  VehicleFootprint actor_box{4.5, 2.0};
  double turn_radius = 6.0;       // arc radius of the maneuver, m
  double lead_in = 10.0;          // straight approach length before the maneuver, m
  double approach_offset = 8.5;   // lateral lane offset of the oncoming leg, m
  double cross_x = 2.0;           // anchor x of the maneuver, m (see build_scenario)
  double duration = 3.0;
  double grid_extent = 60.0;      // square grid side length, m
  double cell_size = 0.2;
  double lane_half_width = 1.75;  // prior corridor half width, m
  double plan_padding = 6.0;      // ego plan coverage beyond the duration, s
};

/// Defaults tuned per scenario so the scripted collision happens inside the
/// grid and within the duration.
inline ScenarioParams default_params(ScenarioKind kind) {
  ScenarioParams p;
  switch (kind) {
    case ScenarioKind::kTurningIn:
      p.actor_speed = 8.0;
      p.turn_radius = 6.0;
      p.lead_in = 10.0;
      p.cross_x = 2.0;  // lane merge point
      break;
    case ScenarioKind::kTurningOver:
      p.actor_speed = 10.0;
      p.turn_radius = 7.0;
      p.lead_in = 12.0;
      p.approach_offset = 8.5;
      p.cross_x = 10.0;  // arc start x of the oncoming leg
      break;
    case ScenarioKind::kStraightCrossing:
      p.actor_speed = 8.0;
      p.lead_in = 19.2;  // spawn height above the lane
      p.cross_x = 2.0;   // crossing x
      break;
  }
  return p;
}

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline HullPolygon ego_footprint_at(const Scenario& sc, double t) {
  const PlanPose pose = plan_pose_at(sc.ego_plan, t);
  return convex_hull(footprint_corners(pose.position, pose.heading, sc.ego_plan.footprint));
}

inline HullPolygon actor_footprint_at(const Scenario& sc, double t) {
  const Pose pose = sc.actor.pose_at(t);
  return convex_hull(footprint_corners(pose.position, pose.heading, sc.actor.footprint));
}

/// First time within the duration at which the ground-truth footprints
/// overlap, located by bisection to one millisecond. Nullopt when the
/// footprints never meet.
inline std::optional<double> collision_time(const Scenario& sc) {
  const auto overlap = [&sc](double t) {
    return hulls_relate(ego_footprint_at(sc, t), actor_footprint_at(sc, t)) !=
           HullRelation::kDisjoint;
  };
  constexpr double kScanStep = 0.01;
  if (overlap(0.0)) return 0.0;
  double lo = 0.0;
  double hi = -1.0;
  for (double t = kScanStep; t <= sc.duration + 1e-9; t += kScanStep) {
    if (overlap(t)) {
      hi = t;
      break;
    }
    lo = t;
  }
  if (hi < 0.0) return std::nullopt;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    if (overlap(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

namespace detail {

inline EgoPlan straight_ego_plan(const ScenarioParams& p) {
  EgoPlan plan;
  plan.footprint = p.ego_box;
  const double t_end = p.duration + p.plan_padding;
  plan.poses.push_back({0.0, {p.ego_start_x, 0.0}, 0.0});
  plan.poses.push_back({t_end, {p.ego_start_x + p.ego_speed * t_end, 0.0}, 0.0});
  return plan;
}

inline HullPolygon lane_corridor(const ScenarioParams& p) {
  const double half = 0.5 * p.grid_extent;
  const Point2 corners[4] = {{-half, -p.lane_half_width},
                             {half, -p.lane_half_width},
                             {half, p.lane_half_width},
                             {-half, p.lane_half_width}};
  return convex_hull(std::span<const Point2>(corners));
}

inline GridSpec centered_grid(const ScenarioParams& p) {
  const int cells = static_cast<int>(std::llround(p.grid_extent / p.cell_size));
  return {{-0.5 * p.grid_extent, -0.5 * p.grid_extent}, p.cell_size, cells, cells};
}

inline void validate_params(const ScenarioParams& p) {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(p.ego_speed) || !positive(p.actor_speed)) {
    throw ScenarioError("scenario: speeds must be positive");
  }
  if (!positive(p.ego_box.length) || !positive(p.ego_box.width) ||
      !positive(p.actor_box.length) || !positive(p.actor_box.width)) {
    throw ScenarioError("scenario: footprint dimensions must be positive");
  }
  if (!positive(p.turn_radius)) throw ScenarioError("scenario: turn radius must be positive");
  if (!positive(p.duration)) throw ScenarioError("scenario: duration must be positive");
  if (!positive(p.cell_size) || !positive(p.grid_extent) || p.grid_extent < 4.0 * p.cell_size) {
    throw ScenarioError("scenario: bad grid geometry");
  }
  if (!positive(p.lane_half_width)) {
    throw ScenarioError("scenario: lane half width must be positive");
  }
  if (p.lead_in < 0.0 || !std::isfinite(p.lead_in)) {
    throw ScenarioError("scenario: lead-in must be non-negative");
  }
  if (p.plan_padding < 1.0) throw ScenarioError("scenario: plan padding must be at least 1 s");
}

}  // namespace detail

/// Builds one of the scripted scenes. Throws ScenarioError when the parameters
/// do not produce a ground-truth collision within the duration.
///
/// turning-in: the actor approaches the lane head-on from the side, arcs
/// through a quarter turn and merges at (cross_x, 0); the unbraked ego reaches
/// it during the turn.
///
/// turning-over: the actor comes the other way at approach_offset to the left
/// of the lane, starts a quarter arc at x = cross_x and cuts down across the
/// lane in front of the ego.
///
/// straight-crossing: the actor crosses the lane at x = cross_x at constant
/// speed and heading.
inline Scenario build_scenario(ScenarioKind kind, const ScenarioParams& p) {
  detail::validate_params(p);
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  constexpr double kTrackTailPad = 30.0;  // keeps the last segment defined well past the run

  Scenario sc;
  sc.kind = kind;
  sc.ego_plan = detail::straight_ego_plan(p);
  sc.ego_speed = p.ego_speed;
  sc.duration = p.duration;
  sc.prior_corridor = detail::lane_corridor(p);
  sc.grid = detail::centered_grid(p);
  sc.actor.footprint = p.actor_box;

  const double v = p.actor_speed;
  switch (kind) {
    case ScenarioKind::kTurningIn: {
      // Straight down along x = cross_x - R from y = R + lead_in, quarter arc
      // counter-clockwise, then on along the lane.
      const double r = p.turn_radius;
      const double t_arc = p.lead_in / v;
      const double t_merge = t_arc + (kHalfPi * r) / v;
      sc.actor.segments = {
          {0.0, t_arc, {{p.cross_x - r, r + p.lead_in}, -kHalfPi}, v, 0.0},
          {t_arc, t_merge - t_arc, {{p.cross_x - r, r}, -kHalfPi}, v, v / r},
          {t_merge, kTrackTailPad, {{p.cross_x, 0.0}, 0.0}, v, 0.0},
      };
      break;
    }
    case ScenarioKind::kTurningOver: {
      // Oncoming parallel leg at y = approach_offset, quarter arc
      // counter-clockwise starting at x = cross_x, then straight down across
      // the lane.
      const double r = p.turn_radius;
      const double off = p.approach_offset;
      const double t_arc = p.lead_in / v;
      const double t_down = t_arc + (kHalfPi * r) / v;
      sc.actor.segments = {
          {0.0, t_arc, {{p.cross_x + p.lead_in, off}, std::numbers::pi}, v, 0.0},
          {t_arc, t_down - t_arc, {{p.cross_x, off}, std::numbers::pi}, v, v / r},
          {t_down, kTrackTailPad, {{p.cross_x - r, off - r}, -kHalfPi}, v, 0.0},
      };
      break;
    }
    case ScenarioKind::kStraightCrossing: {
      sc.actor.segments = {
          {0.0, p.duration + kTrackTailPad, {{p.cross_x, p.lead_in}, -kHalfPi}, v, 0.0},
      };
      break;
    }
  }

  if (!collision_time(sc)) {
    throw ScenarioError("scenario '" + std::string(scenario_kind_name(kind)) +
                        "': parameters produce no collision within the duration");
  }
  return sc;
}

struct NoiseConfig {
  double sigma_v = 0.2;   // velocity noise per axis, m/s
  double sigma_m = 0.05;  // occupancy mass noise
  double lambda = 0.85;   // heading lag filter gain, [0, 1]
  std::uint64_t seed = 1;
};

/// Heading the grid's velocity estimates point along: a first-order filter of
/// the true heading, updated once per frame. Gain zero reproduces the true
/// heading exactly; gains near one model the estimator's orientation lag
/// during turns.
inline double lagged_heading(const ActorTrack& actor, double t, double lambda) {
  if (lambda <= 0.0) return actor.pose_at(t).heading;
  const int frames = static_cast<int>(std::llround(t / kFramePeriod));
  double lag = actor.pose_at(0.0).heading;
  for (int i = 1; i <= frames; ++i) {
    const double truth = actor.pose_at(i * kFramePeriod).heading;
    lag = wrap_angle(lag + (1.0 - lambda) * wrap_angle(truth - lag));
  }
  return lag;
}

/// Ground truth: cells whose centers lie inside the actor's footprint at t.
inline std::vector<CellIndex> actor_cells(const Scenario& sc, double t) {
  const HullPolygon box = actor_footprint_at(sc, t);
  const Aabb bb = hull_bbox(box);
  const GridSpec& g = sc.grid;
  const int row_lo =
      std::max(0, static_cast<int>(std::ceil((bb.min.y - g.origin.y) / g.cell_size - 1e-12)));
  const int row_hi = std::min(
      g.height - 1, static_cast<int>(std::floor((bb.max.y - g.origin.y) / g.cell_size + 1e-12)));
  const int col_lo =
      std::max(0, static_cast<int>(std::ceil((bb.min.x - g.origin.x) / g.cell_size - 1e-12)));
  const int col_hi = std::min(
      g.width - 1, static_cast<int>(std::floor((bb.max.x - g.origin.x) / g.cell_size + 1e-12)));
  std::vector<CellIndex> cells;
  for (int row = row_lo; row <= row_hi; ++row) {
    for (int col = col_lo; col <= col_hi; ++col) {
      const Point2 center{g.origin.x + col * g.cell_size, g.origin.y + row * g.cell_size};
      if (point_in_convex(center, box)) cells.push_back({row, col});
    }
  }
  return cells;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Fixed clutter pattern, independent of the noise seed: roughly three percent
/// of cells hold a static return.
inline bool clutter_cell(int row, int col) {
  const std::uint64_t key =
      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(row)) << 32) |
      static_cast<std::uint64_t>(static_cast<std::uint32_t>(col));
  return (splitmix64(key) & 0xffffULL) < 1966;
}

}  // namespace detail

/// Synthesizes the grid frame at time t. Actor cells carry the scripted
/// velocity rotated to the lagged heading plus Gaussian noise; static clutter
/// keeps its speed below the moving-cell threshold; everything else stays
/// unknown. The draw sequence is a pure function of (seed, t), so a fixed seed
/// reproduces the frame byte for byte.
inline GridFrame synthesize_frame(const Scenario& sc, double t, const NoiseConfig& noise) {
  GridFrame frame = make_frame(t, sc.grid.origin, sc.grid.cell_size, sc.grid.width, sc.grid.height);

  const std::uint64_t key = detail::splitmix64(noise.seed ^ detail::splitmix64(
                                static_cast<std::uint64_t>(std::llround(t * 1000.0))));
  std::mt19937_64 rng(key);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto draw = [&](double sigma) { return sigma > 0.0 ? sigma * gauss(rng) : 0.0; };

  const double speed = sc.actor.speed_at(t);
  const Vec2 vel_mean = speed * unit_vector(lagged_heading(sc.actor, t, noise.lambda));
  const double var = noise.sigma_v * noise.sigma_v;

  std::vector<CellIndex> actor = actor_cells(sc, t);
  auto next_actor = actor.begin();
  for (int row = 0; row < frame.height; ++row) {
    for (int col = 0; col < frame.width; ++col) {
      const bool is_actor =
          next_actor != actor.end() && next_actor->row == row && next_actor->col == col;
      if (is_actor) ++next_actor;
      CellState& c = frame.at(row, col);
      if (is_actor) {
        const double m = 0.9 - std::abs(draw(noise.sigma_m));
        c.m_occ = std::clamp(m, 0.5, 0.95);
        c.m_free = std::min(0.05, 1.0 - c.m_occ);
        c.vel = vel_mean + Vec2{draw(noise.sigma_v), draw(noise.sigma_v)};
        c.vel_cov = {var, 0.0, var};
      } else if (detail::clutter_cell(row, col)) {
        c.m_occ = 0.7;
        c.m_free = 0.1;
        Vec2 jitter{draw(noise.sigma_v), draw(noise.sigma_v)};
        const double speed_sq = norm_sq(jitter);
        if (speed_sq > kStaticSpeedCap * kStaticSpeedCap) {
          jitter = jitter * (kStaticSpeedCap / std::sqrt(speed_sq));
        }
        c.vel = jitter;
        c.vel_cov = {var, 0.0, var};
      }
    }
  }
  return frame;
}

/// Relative increase in time-to-react: how much earlier the grid-based
/// detection fires than the prior-map baseline, as a fraction of the
/// baseline's lead. Undefined when the baseline lead is not positive.
inline std::optional<double> rittr(double ttr_ours, double ttr_prior) {
  if (!(ttr_prior > 0.0)) return std::nullopt;
  return ttr_ours / ttr_prior - 1.0;
}

struct ScenarioResult {
  std::optional<double> toc;        // time of collision (ground truth)
  std::optional<double> tod_prior;  // first frame the actor box meets the ego hull
  std::optional<double> tod_ours;   // first frame any cluster classifies as threat
  std::optional<double> ttr_prior;  // toc - tod_prior
  std::optional<double> ttr_ours;   // toc - tod_ours
  std::optional<double> rittr;      // ttr_ours / ttr_prior - 1
};

struct RunOptions {
  bool collect_reports = false;  // keep per-frame reports and rasters
  bool collect_frames = false;   // keep the synthesized frames
};

struct ScenarioRun {
  ScenarioResult result;
  std::vector<ThreatReport> reports;
  std::vector<AttentionRaster> rasters;
  std::vector<GridFrame> frames;
};

namespace detail {

/// Prior-map detector: the cluster's current box touches the ego hull, by
/// corner containment or proper edge crossing.
inline bool box_touches_hull(const HullPolygon& box, const HullPolygon& hull) {
  for (const Point2& p : box.points) {
    if (point_in_convex(p, hull)) return true;
  }
  const std::size_t nb = detail::edge_count(box);
  const std::size_t nh = detail::edge_count(hull);
  for (std::size_t i = 0; i < nb; ++i) {
    const Segment eb = detail::edge(box, i);
    for (std::size_t j = 0; j < nh; ++j) {
      if (segments_intersect(eb, detail::edge(hull, j))) return true;
    }
  }
  return false;
}

}  // namespace detail

/// Steps the scenario at the grid rate, runs the detection chain on every
/// frame and reduces the run to its timing result. The prior baseline and the
/// grid-based detection see the same frames.
inline ScenarioRun run_scenario(const Scenario& sc, const NoiseConfig& noise,
                                const PipelineConfig& cfg, const RunOptions& options = {}) {
  ScenarioRun run;
  run.result.toc = collision_time(sc);

  const int n_frames = static_cast<int>(std::floor(sc.duration / kFramePeriod + 1e-9));
  for (int i = 0; i <= n_frames; ++i) {
    const double t = i * kFramePeriod;
    GridFrame frame = synthesize_frame(sc, t, noise);
    const HullPolygon ego_area = predict_ego_area(sc.ego_plan, t, cfg.prediction.horizon);
    FrameDetection detection = detect_frame(frame, ego_area, cfg);

    if (!run.result.tod_ours) {
      for (const ThreatEntry& e : detection.report.entries) {
        if (e.status == ThreatStatus::kThreat) {
          run.result.tod_ours = t;
          break;
        }
      }
    }
    if (!run.result.tod_prior) {
      for (const DetectedCluster& dc : detection.clusters) {
        if (detail::box_touches_hull(dc.attributes.box, ego_area)) {
          run.result.tod_prior = t;
          break;
        }
      }
    }
    if (options.collect_reports) {
      run.rasters.push_back(attention_raster(detection.report, frame, cfg.raster_margin));
      run.reports.push_back(std::move(detection.report));
    }
    if (options.collect_frames) run.frames.push_back(std::move(frame));
  }

  if (run.result.toc) {
    if (run.result.tod_prior) run.result.ttr_prior = *run.result.toc - *run.result.tod_prior;
    if (run.result.tod_ours) run.result.ttr_ours = *run.result.toc - *run.result.tod_ours;
    if (run.result.ttr_prior && run.result.ttr_ours) {
      run.result.rittr = rittr(*run.result.ttr_ours, *run.result.ttr_prior);
    }
  }
  return run;
}

/// Scenario result document: fixed key order, 'none' for undefined values.
inline std::string serialize_result(const ScenarioResult& result) {
  const auto field = [](std::string_view key, const std::optional<double>& v) {
    std::string line{key};
    line += ' ';
    line += v ? textio::format_double(*v) : "none";
    line += '\n';
    return line;
  };
  std::string out = "RESULT v1\n";
  out += field("toc", result.toc);
  out += field("tod_prior", result.tod_prior);
  out += field("tod_ours", result.tod_ours);
  out += field("ttr_prior", result.ttr_prior);
  out += field("ttr_ours", result.ttr_ours);
  out += field("rittr", result.rittr);
  return out;
}

}  // namespace threatgrid
