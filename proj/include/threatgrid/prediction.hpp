#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "threatgrid/clustering.hpp"
#include "threatgrid/geometry.hpp"
#include "threatgrid/text_io.hpp"

namespace threatgrid {

/// Spacing of footprint samples along the ego plan, seconds.
inline constexpr double kPlanSampleStep = 0.1;

struct PredictionConfig {
  double horizon = 3.0;  // prediction horizon T, seconds
  double phi_u = 0.0;    // cluster heading uncertainty, radians, [0, pi/4]
};

struct VehicleFootprint {
  double length = 4.0;  // along heading, m
  double width = 2.0;   // across heading, m
};

struct PlanPose {
  double t = 0.0;
  Vec2 position;
  double heading = 0.0;
};

/// Planned ego trajectory: time-ordered poses with linear interpolation in
/// between, plus the vehicle footprint swept along it.
struct EgoPlan {
  std::vector<PlanPose> poses;
  VehicleFootprint footprint;
};

/// Interpolated pose at time t. The plan must cover t.
inline PlanPose plan_pose_at(const EgoPlan& plan, double t) {
  const auto& poses = plan.poses;
  if (poses.empty()) throw std::domain_error("plan_pose_at: empty plan");
  if (t <= poses.front().t) return {t, poses.front().position, poses.front().heading};
  if (t >= poses.back().t) return {t, poses.back().position, poses.back().heading};
  const auto it = std::upper_bound(
      poses.begin(), poses.end(), t,
      [](double value, const PlanPose& p) { return value < p.t; });
  const PlanPose& b = *it;
  const PlanPose& a = *(it - 1);
  const double u = (t - a.t) / (b.t - a.t);
  const Vec2 position = a.position + u * (b.position - a.position);
  const double heading = wrap_angle(a.heading + u * wrap_angle(b.heading - a.heading));
  return {t, position, heading};
}

/// Corners of a rectangular footprint centered on a pose, counter-clockwise.
inline std::vector<Point2> footprint_corners(Vec2 center, double heading,
                                             const VehicleFootprint& fp) {
  const Vec2 u = unit_vector(heading);
  const Vec2 w{-u.y, u.x};
  const Vec2 du = (0.5 * fp.length) * u;
  const Vec2 dw = (0.5 * fp.width) * w;
  return {center - du - dw, center + du - dw, center + du + dw, center - du + dw};
}

/// Future occupied area of a cluster under a constant-velocity motion model:
/// the convex hull of the cluster box and the box translated over the horizon.
/// With phi_u > 0 the translation fans out to the two extreme headings,
/// scaled so the reach along the nominal heading is preserved; the box keeps
/// its own orientation. The result grows monotonically in both the horizon
/// and phi_u.
inline HullPolygon predict_cluster_area(const ClusterAttributes& attrs,
                                        const PredictionConfig& cfg) {
  const std::vector<Point2>& corners = attrs.box.points;
  const Vec2 u = unit_vector(attrs.heading);
  const Vec2 w{-u.y, u.x};
  const double reach = attrs.speed * cfg.horizon;

  std::vector<Point2> pts(corners.begin(), corners.end());
  if (cfg.phi_u > 0.0) {
    const double spread = reach * std::tan(cfg.phi_u);
    const Vec2 lo = reach * u - spread * w;
    const Vec2 hi = reach * u + spread * w;
    for (const Point2& c : corners) pts.push_back(c + lo);
    for (const Point2& c : corners) pts.push_back(c + hi);
  } else {
    const Vec2 shift = reach * u;
    for (const Point2& c : corners) pts.push_back(c + shift);
  }
  return convex_hull(pts);
}

/// Swept hull of the ego footprint over [t_now, t_now + horizon], sampled
/// every kPlanSampleStep with the exact horizon end included. Throws
/// std::domain_error naming the missing interval when the plan does not cover
/// the window.
inline HullPolygon predict_ego_area(const EgoPlan& plan, double t_now, double horizon) {
  if (plan.poses.empty()) throw std::domain_error("predict_ego_area: empty plan");
  const double t_end = t_now + horizon;
  const double cover_lo = plan.poses.front().t;
  const double cover_hi = plan.poses.back().t;
  if (t_now < cover_lo - 1e-9 || t_end > cover_hi + 1e-9) {
    throw std::domain_error("predict_ego_area: plan covers [" +
                            textio::format_double(cover_lo) + ", " +
                            textio::format_double(cover_hi) + "] but [" +
                            textio::format_double(t_now) + ", " + textio::format_double(t_end) +
                            "] was requested");
  }
  std::vector<Point2> pts;
  const int steps = static_cast<int>(std::ceil(horizon / kPlanSampleStep - 1e-9));
  pts.reserve(4 * (static_cast<std::size_t>(steps) + 1));
  for (int i = 0; i <= steps; ++i) {
    const double dt = std::min(i * kPlanSampleStep, horizon);
    const PlanPose pose = plan_pose_at(plan, t_now + dt);
    for (const Point2& c : footprint_corners(pose.position, pose.heading, plan.footprint)) {
      pts.push_back(c);
    }
  }
  return convex_hull(pts);
}

/// Plan text format:
///
///   PLAN v1 <length> <width>
///   <t> <x> <y> <heading>          (one line per pose, strictly increasing t)
inline std::string serialize_plan(const EgoPlan& plan) {
  std::string out = "PLAN v1 ";
  textio::append_double(out, plan.footprint.length);
  out += ' ';
  textio::append_double(out, plan.footprint.width);
  out += '\n';
  for (const PlanPose& p : plan.poses) {
    textio::append_double(out, p.t);
    out += ' ';
    textio::append_double(out, p.position.x);
    out += ' ';
    textio::append_double(out, p.position.y);
    out += ' ';
    textio::append_double(out, p.heading);
    out += '\n';
  }
  return out;
}

inline EgoPlan parse_plan(std::string_view text) {
  textio::LineScanner scanner(text);
  std::string_view line;
  while (scanner.next(line)) {
    if (line.find_first_not_of(" \t") != std::string_view::npos) break;
    line = {};
  }
  if (line.empty()) throw ParseError(scanner.line_number(), "empty plan document");
  const auto header = textio::split_fields(line);
  if (header.size() != 4 || header[0] != "PLAN" || header[1] != "v1") {
    throw ParseError(scanner.line_number(),
                     "malformed plan header (expected 'PLAN v1 <length> <width>')");
  }
  EgoPlan plan;
  if (!textio::parse_double(header[2], plan.footprint.length) ||
      !textio::parse_double(header[3], plan.footprint.width) ||
      !(plan.footprint.length > 0.0) || !(plan.footprint.width > 0.0)) {
    throw ParseError(scanner.line_number(), "plan header: bad footprint dimensions");
  }
  while (scanner.next(line)) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const auto fields = textio::split_fields(line);
    if (fields.size() != 4) {
      throw ParseError(scanner.line_number(), "plan pose: expected 4 fields, got " +
                                                  std::to_string(fields.size()));
    }
    PlanPose pose;
    if (!textio::parse_double(fields[0], pose.t) ||
        !textio::parse_double(fields[1], pose.position.x) ||
        !textio::parse_double(fields[2], pose.position.y) ||
        !textio::parse_double(fields[3], pose.heading)) {
      throw ParseError(scanner.line_number(), "plan pose: bad number");
    }
    if (!plan.poses.empty() && pose.t <= plan.poses.back().t) {
      throw ParseError(scanner.line_number(), "plan pose: timestamps must strictly increase");
    }
    plan.poses.push_back(pose);
  }
  if (plan.poses.empty()) throw ParseError(scanner.line_number(), "plan has no poses");
  return plan;
}

}  // namespace threatgrid
