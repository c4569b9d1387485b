// Builds one grid frame by hand, runs the detection chain on it and prints
// the resulting threat report: a moving blob ahead of the ego crosses the
// planned path while a slow return off to the side stays out of the mask.

#include <iostream>

#include "threatgrid/threatgrid.hpp"

namespace tg = threatgrid;

int main() {
  tg::GridFrame frame = tg::make_frame(0.0, {-10.0, -10.0}, 0.2, 100, 100);
  for (int row = 48; row < 52; ++row) {
    for (int col = 18; col < 24; ++col) {
      tg::CellState& c = frame.at(row, col);
      c.m_occ = 0.85;
      c.m_free = 0.05;
      c.vel = {4.0, 0.0};
      c.vel_cov = {0.04, 0.0, 0.04};
    }
  }
  tg::CellState& parked = frame.at(80, 80);
  parked.m_occ = 0.8;
  parked.m_free = 0.1;
  parked.vel = {0.3, 0.0};

  tg::EgoPlan plan;
  plan.footprint = {4.0, 2.0};
  plan.poses.push_back({0.0, {0.0, 0.0}, 0.0});
  plan.poses.push_back({6.0, {60.0, 0.0}, 0.0});

  const tg::PipelineConfig cfg;
  const tg::HullPolygon ego_area = tg::predict_ego_area(plan, 0.0, cfg.prediction.horizon);
  const tg::FrameDetection detection = tg::detect_frame(frame, ego_area, cfg);

  std::cout << tg::serialize_report(detection.report);
  std::cout << "clusters kept: " << detection.clusters.size() << '\n';
  return 0;
}
