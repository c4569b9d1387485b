#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "threatgrid/geometry.hpp"
#include "threatgrid/grid.hpp"

namespace threatgrid {

struct CellIndex {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

struct MaskConfig {
  double v_min = 1.0;      // smallest speed that counts as moving, m/s
  double p_occ_min = 0.6;  // smallest occupancy probability that counts as occupied
};

/// Cells that are both occupied and moving: occupancy probability at least
/// p_occ_min and speed at least v_min. Returned in row-major order.
inline std::vector<CellIndex> search_mask(const GridFrame& frame, const MaskConfig& cfg) {
  std::vector<CellIndex> mask;
  const double v_min_sq = cfg.v_min * cfg.v_min;
  for (int row = 0; row < frame.height; ++row) {
    for (int col = 0; col < frame.width; ++col) {
      const CellState& c = frame.at(row, col);
      if (occupancy_probability(c) >= cfg.p_occ_min && norm_sq(c.vel) >= v_min_sq) {
        mask.push_back({row, col});
      }
    }
  }
  return mask;
}

/// A connected group of masked cells. Members are sorted row-major and ids are
/// assigned by ascending smallest member, so the output is a pure function of
/// the masked set.
struct Cluster {
  int id = 0;
  std::vector<CellIndex> members;
  std::vector<CellState> states;  // parallel to members
};

/// Density-based clustering over cell-center Euclidean distance. A cell is a
/// core cell when at least min_pts masked cells (itself included) lie within
/// eps. Non-core cells in reach of a core join the cluster of their lowest
/// row-major core neighbor; unreachable cells are noise and are dropped.
inline std::vector<Cluster> dbscan(const GridFrame& frame, std::span<const CellIndex> cells,
                                   double eps, int min_pts) {
  std::vector<CellIndex> sorted(cells.begin(), cells.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const std::size_t n = sorted.size();
  if (n == 0) return {};

  std::vector<Point2> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = frame.at(sorted[i].row, sorted[i].col).pos;

  const auto rank_of = [&](CellIndex idx) -> std::ptrdiff_t {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), idx);
    if (it == sorted.end() || *it != idx) return -1;
    return it - sorted.begin();
  };

  // Masked cells live on the grid lattice, so all neighbors within eps sit in
  // a bounded index window around each cell.
  const int reach = static_cast<int>(std::floor(eps / frame.cell_size + 1e-9)) + 1;
  const double eps_sq = eps * eps;
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int dr = -reach; dr <= reach; ++dr) {
      for (int dc = -reach; dc <= reach; ++dc) {
        const std::ptrdiff_t j = rank_of({sorted[i].row + dr, sorted[i].col + dc});
        if (j < 0) continue;
        if (norm_sq(pos[static_cast<std::size_t>(j)] - pos[i]) <= eps_sq) {
          neighbors[i].push_back(static_cast<std::size_t>(j));
        }
      }
    }
  }

  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    core[i] = neighbors[i].size() >= static_cast<std::size_t>(min_pts);
  }

  constexpr int kUnlabeled = -1;
  std::vector<int> label(n, kUnlabeled);
  int next_label = 0;
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || label[i] != kUnlabeled) continue;
    const int current = next_label++;
    label[i] = current;
    queue.assign(1, i);
    while (!queue.empty()) {
      const std::size_t u = queue.back();
      queue.pop_back();
      for (const std::size_t v : neighbors[u]) {
        if (core[v] && label[v] == kUnlabeled) {
          label[v] = current;
          queue.push_back(v);
        }
      }
    }
  }

  // Border cells: reachable from at least one core, assigned to the cluster of
  // the lowest row-major core neighbor. Neighbor lists are built in ascending
  // rank order, so the first core hit is that neighbor.
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (const std::size_t v : neighbors[i]) {
      if (core[v]) {
        label[i] = label[v];
        break;
      }
    }
  }

  std::vector<Cluster> clusters(static_cast<std::size_t>(next_label));
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] == kUnlabeled) continue;  // noise
    clusters[static_cast<std::size_t>(label[i])].members.push_back(sorted[i]);
  }
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    return a.members.front() < b.members.front();
  });
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    Cluster& c = clusters[k];
    c.id = static_cast<int>(k);
    c.states.reserve(c.members.size());
    for (const CellIndex idx : c.members) c.states.push_back(frame.at(idx.row, idx.col));
  }
  return clusters;
}

/// Probability that the cell is genuinely moving: the squared Mahalanobis
/// distance of the velocity estimate from zero, pushed through the two-degree
/// chi-square distribution. Near-singular covariances are jittered so a
/// confident nonzero velocity maps to probability one.
inline double movement_plausibility(const CellState& c) {
  double xx = c.vel_cov.xx;
  double yy = c.vel_cov.yy;
  const double xy = c.vel_cov.xy;
  double det = xx * yy - xy * xy;
  if (det < 1e-18 || xx <= 0.0 || yy <= 0.0) {
    xx += 1e-6;
    yy += 1e-6;
    det = std::max(xx * yy - xy * xy, 1e-18);
  }
  const double d2 =
      (c.vel.x * c.vel.x * yy - 2.0 * c.vel.x * c.vel.y * xy + c.vel.y * c.vel.y * xx) / det;
  return 1.0 - std::exp(-0.5 * d2);
}

struct PlausibilityConfig {
  double p_occ_min = 0.6;   // smallest mean occupancy probability
  double p_move_min = 0.5;  // smallest mean movement plausibility
  double var_max = 2.0;     // largest mean velocity variance, (m/s)^2
  int n_min = 4;            // inclusive cluster size bounds
  int n_max = 2000;
};

enum class PlausibilityReject { kOccupancy, kMovement, kVariance, kSize };

struct PlausibilityCheck {
  bool accepted = false;
  std::optional<PlausibilityReject> reason;
};

/// Accepts a cluster as a plausible moving object. Criteria are evaluated in a
/// fixed order (occupancy, movement, variance, size) and the first failure is
/// reported.
inline PlausibilityCheck plausibilize(const Cluster& cluster, const PlausibilityConfig& cfg) {
  const std::size_t n = cluster.states.size();
  if (n == 0) return {false, PlausibilityReject::kSize};
  double occ_sum = 0.0;
  double move_sum = 0.0;
  double var_sum = 0.0;
  for (const CellState& c : cluster.states) {
    occ_sum += occupancy_probability(c);
    move_sum += movement_plausibility(c);
    var_sum += 0.5 * (c.vel_cov.xx + c.vel_cov.yy);
  }
  const double inv = 1.0 / static_cast<double>(n);
  if (occ_sum * inv < cfg.p_occ_min) return {false, PlausibilityReject::kOccupancy};
  if (move_sum * inv < cfg.p_move_min) return {false, PlausibilityReject::kMovement};
  if (var_sum * inv > cfg.var_max) return {false, PlausibilityReject::kVariance};
  if (n < static_cast<std::size_t>(cfg.n_min) || n > static_cast<std::size_t>(cfg.n_max)) {
    return {false, PlausibilityReject::kSize};
  }
  return {true, std::nullopt};
}

/// Summary of a plausibilized cluster: mean position and velocity, plus the
/// minimal heading-aligned bounding box of the member cell centers, inflated
/// by half a cell on every side so it covers the member cells' footprints.
struct ClusterAttributes {
  Vec2 position;        // mean member cell center
  double heading = 0.0; // direction of the mean velocity, (-pi, pi]
  double speed = 0.0;   // magnitude of the mean velocity, m/s
  HullPolygon box;      // oriented bounding box, 4 corners counter-clockwise
};

/// Computes cluster attributes. Returns nullopt when member velocities cancel
/// to (numerically) zero, leaving no usable heading; callers drop the cluster
/// for that frame.
inline std::optional<ClusterAttributes> cluster_attributes(const Cluster& cluster,
                                                           double cell_size) {
  const std::size_t n = cluster.states.size();
  if (n == 0) return std::nullopt;
  Vec2 pos_sum;
  Vec2 vel_sum;
  for (const CellState& c : cluster.states) {
    pos_sum = pos_sum + c.pos;
    vel_sum = vel_sum + c.vel;
  }
  const double inv = 1.0 / static_cast<double>(n);
  const Vec2 mean_pos = inv * pos_sum;
  const Vec2 mean_vel = inv * vel_sum;
  const double speed = norm(mean_vel);
  if (speed < 1e-12) return std::nullopt;

  double heading = std::atan2(mean_vel.y, mean_vel.x);
  if (heading <= -std::numbers::pi) heading = std::numbers::pi;

  const Vec2 u = unit_vector(heading);
  const Vec2 w{-u.y, u.x};
  double u_min = 0.0, u_max = 0.0, w_min = 0.0, w_max = 0.0;
  bool first = true;
  for (const CellState& c : cluster.states) {
    const Vec2 d = c.pos - mean_pos;
    const double pu = dot(d, u);
    const double pw = dot(d, w);
    if (first) {
      u_min = u_max = pu;
      w_min = w_max = pw;
      first = false;
    } else {
      u_min = std::min(u_min, pu);
      u_max = std::max(u_max, pu);
      w_min = std::min(w_min, pw);
      w_max = std::max(w_max, pw);
    }
  }
  const double half = 0.5 * cell_size;
  u_min -= half;
  u_max += half;
  w_min -= half;
  w_max += half;
  const Point2 corners[4] = {
      mean_pos + u * u_min + w * w_min,
      mean_pos + u * u_max + w * w_min,
      mean_pos + u * u_max + w * w_max,
      mean_pos + u * u_min + w * w_max,
  };
  return ClusterAttributes{mean_pos, heading, speed, convex_hull(std::span<const Point2>(corners))};
}

}  // namespace threatgrid
