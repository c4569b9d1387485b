#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "threatgrid/clustering.hpp"
#include "threatgrid/geometry.hpp"
#include "threatgrid/grid.hpp"
#include "threatgrid/prediction.hpp"
#include "threatgrid/text_io.hpp"

namespace threatgrid {

enum class ThreatStatus { kThreat, kOnTrajectory, kNoThreat };

inline std::string_view threat_status_name(ThreatStatus s) {
  switch (s) {
    case ThreatStatus::kThreat: return "threat";
    case ThreatStatus::kOnTrajectory: return "on_trajectory";
    case ThreatStatus::kNoThreat: return "no_threat";
  }
  return "no_threat";
}

/// A plausibilized cluster together with its derived attributes.
struct DetectedCluster {
  Cluster cluster;
  ClusterAttributes attributes;
};

struct ThreatEntry {
  int cluster_id = 0;
  ClusterAttributes attributes;
  HullPolygon predicted_area;
  ThreatStatus status = ThreatStatus::kNoThreat;
};

struct ThreatReport {
  double timestamp = 0.0;
  HullPolygon ego_area;
  std::vector<ThreatEntry> entries;       // ordered by cluster id
  int collinear_contacts = 0;             // boundary-touch diagnostics, see geometry
};

/// Classifies every cluster against the ego's swept hull. A predicted area
/// that crosses the hull's boundary is a threat; one that engulfs the hull is
/// an overlap and therefore also a threat. A predicted area fully inside the
/// ego hull is traffic already on the ego's own trajectory, which prior-map
/// attention covers; everything else is no threat.
inline ThreatReport evaluate(double timestamp, std::span<const DetectedCluster> clusters,
                             const HullPolygon& ego_area, const PredictionConfig& cfg) {
  ThreatReport report;
  report.timestamp = timestamp;
  report.ego_area = ego_area;
  report.entries.reserve(clusters.size());
  for (const DetectedCluster& dc : clusters) {
    HullPolygon predicted = predict_cluster_area(dc.attributes, cfg);
    ThreatStatus status = ThreatStatus::kNoThreat;
    switch (hulls_relate(predicted, ego_area)) {
      case HullRelation::kEdgeIntersect:
        status = ThreatStatus::kThreat;
        break;
      case HullRelation::kH1ContainsH2:  // prediction engulfs the ego hull
        status = ThreatStatus::kThreat;
        break;
      case HullRelation::kH2ContainsH1:  // prediction inside the ego hull
        status = ThreatStatus::kOnTrajectory;
        break;
      case HullRelation::kDisjoint:
        break;
    }
    report.collinear_contacts += collinear_contact_count(predicted, ego_area);
    report.entries.push_back({dc.cluster.id, dc.attributes, std::move(predicted), status});
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [](const ThreatEntry& a, const ThreatEntry& b) { return a.cluster_id < b.cluster_id; });
  return report;
}

/// Binary attention grid congruent with a source frame.
struct AttentionRaster {
  double timestamp = 0.0;
  Point2 origin;
  double cell_size = 0.2;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> mask;  // row-major, 0 or 1

  friend bool operator==(const AttentionRaster&, const AttentionRaster&) = default;
};

namespace detail {

/// Cluster box grown by a margin on every side, keeping its orientation.
inline HullPolygon expanded_box(const ClusterAttributes& attrs, double margin) {
  const Vec2 u = unit_vector(attrs.heading);
  const Vec2 w{-u.y, u.x};
  double u_min = 0.0, u_max = 0.0, w_min = 0.0, w_max = 0.0;
  bool first = true;
  for (const Point2& p : attrs.box.points) {
    const Vec2 d = p - attrs.position;
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
  const Point2 corners[4] = {
      attrs.position + u * (u_min - margin) + w * (w_min - margin),
      attrs.position + u * (u_max + margin) + w * (w_min - margin),
      attrs.position + u * (u_max + margin) + w * (w_max + margin),
      attrs.position + u * (u_min - margin) + w * (w_max + margin),
  };
  return convex_hull(std::span<const Point2>(corners));
}

}  // namespace detail

/// Marks every cell whose center lies inside a threat cluster's box expanded
/// by the margin. On-trajectory clusters are excluded: the planner already
/// attends to the ego's own path.
inline AttentionRaster attention_raster(const ThreatReport& report, const GridFrame& frame,
                                        double margin) {
  AttentionRaster raster{frame.timestamp, frame.origin, frame.cell_size,
                         frame.width,     frame.height, {}};
  raster.mask.assign(frame.cells.size(), 0);
  for (const ThreatEntry& entry : report.entries) {
    if (entry.status != ThreatStatus::kThreat) continue;
    const HullPolygon box =
        margin > 0.0 ? detail::expanded_box(entry.attributes, margin) : entry.attributes.box;
    const Aabb bb = hull_bbox(box);
    const int row_lo = std::max(
        0, static_cast<int>(std::ceil((bb.min.y - frame.origin.y) / frame.cell_size - 1e-12)));
    const int row_hi = std::min(
        frame.height - 1,
        static_cast<int>(std::floor((bb.max.y - frame.origin.y) / frame.cell_size + 1e-12)));
    const int col_lo = std::max(
        0, static_cast<int>(std::ceil((bb.min.x - frame.origin.x) / frame.cell_size - 1e-12)));
    const int col_hi = std::min(
        frame.width - 1,
        static_cast<int>(std::floor((bb.max.x - frame.origin.x) / frame.cell_size + 1e-12)));
    for (int row = row_lo; row <= row_hi; ++row) {
      for (int col = col_lo; col <= col_hi; ++col) {
        if (point_in_convex(frame.at(row, col).pos, box)) raster.mask[frame.index(row, col)] = 1;
      }
    }
  }
  return raster;
}

namespace detail {

inline void append_hull(std::string& out, std::string_view name, const HullPolygon& hull) {
  out += name;
  out += ' ';
  out += std::to_string(hull.points.size());
  out += '\n';
  for (const Point2& p : hull.points) {
    textio::append_double(out, p.x);
    out += ' ';
    textio::append_double(out, p.y);
    out += '\n';
  }
}

}  // namespace detail

/// Threat report text document, stable key order, full double precision.
inline std::string serialize_report(const ThreatReport& report) {
  std::string out = "THREAT v1 ";
  textio::append_double(out, report.timestamp);
  out += '\n';
  out += "collinear_contacts " + std::to_string(report.collinear_contacts) + '\n';
  detail::append_hull(out, "ego_area", report.ego_area);
  out += "clusters " + std::to_string(report.entries.size()) + '\n';
  for (const ThreatEntry& e : report.entries) {
    out += "cluster " + std::to_string(e.cluster_id) + ' ';
    out += threat_status_name(e.status);
    out += '\n';
    out += "attributes ";
    textio::append_double(out, e.attributes.position.x);
    out += ' ';
    textio::append_double(out, e.attributes.position.y);
    out += ' ';
    textio::append_double(out, e.attributes.heading);
    out += ' ';
    textio::append_double(out, e.attributes.speed);
    out += '\n';
    detail::append_hull(out, "box", e.attributes.box);
    detail::append_hull(out, "predicted", e.predicted_area);
  }
  return out;
}

/// Attention raster document: the frame header shape with an ATTN magic, then
/// one 0/1 line per cell, row-major.
inline std::string serialize_raster(const AttentionRaster& raster) {
  std::string out = "ATTN v1 ";
  textio::append_double(out, raster.timestamp);
  out += ' ';
  textio::append_double(out, raster.origin.x);
  out += ' ';
  textio::append_double(out, raster.origin.y);
  out += ' ';
  textio::append_double(out, raster.cell_size);
  out += ' ';
  out += std::to_string(raster.width);
  out += ' ';
  out += std::to_string(raster.height);
  out += '\n';
  out.reserve(out.size() + raster.mask.size() * 2);
  for (const std::uint8_t v : raster.mask) {
    out += v ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace threatgrid
