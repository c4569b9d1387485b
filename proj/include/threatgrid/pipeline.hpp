#pragma once

#include <utility>
#include <vector>

#include "threatgrid/clustering.hpp"
#include "threatgrid/prediction.hpp"
#include "threatgrid/threat.hpp"

namespace threatgrid {

/// Everything the per-frame detection chain needs.
struct PipelineConfig {
  MaskConfig mask;
  double dbscan_eps = 0.4;  // default 2 * cell_size
  int dbscan_min_pts = 3;
  PlausibilityConfig plausibility;
  PredictionConfig prediction;
  double raster_margin = 1.0;
};

struct FrameDetection {
  std::vector<DetectedCluster> clusters;  // plausibilized clusters with attributes
  ThreatReport report;
};

/// Full detection chain for one frame: search mask, clustering,
/// plausibilization, attribute extraction, threat evaluation. Clusters whose
/// member velocities cancel carry no usable heading and are dropped for the
/// frame.
inline FrameDetection detect_frame(const GridFrame& frame, const HullPolygon& ego_area,
                                   const PipelineConfig& cfg) {
  const std::vector<CellIndex> masked = search_mask(frame, cfg.mask);
  std::vector<Cluster> raw = dbscan(frame, masked, cfg.dbscan_eps, cfg.dbscan_min_pts);
  std::vector<DetectedCluster> kept;
  kept.reserve(raw.size());
  for (Cluster& cluster : raw) {
    if (!plausibilize(cluster, cfg.plausibility).accepted) continue;
    if (auto attrs = cluster_attributes(cluster, frame.cell_size)) {
      kept.push_back({std::move(cluster), *attrs});
    }
  }
  ThreatReport report = evaluate(frame.timestamp, kept, ego_area, cfg.prediction);
  return {std::move(kept), std::move(report)};
}

}  // namespace threatgrid
