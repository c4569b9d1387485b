#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "threatgrid/clustering.hpp"
#include "threatgrid/pipeline.hpp"
#include "threatgrid/prediction.hpp"
#include "threatgrid/simulation.hpp"
#include "threatgrid/text_io.hpp"
#include "threatgrid/threat.hpp"

namespace threatgrid {

struct BenchConfig {
  int frames = 32;       // distinct synthesized frames, cycled through
  int iterations = 100;  // timed pipeline passes
};

struct StageTiming {
  double median_us = 0.0;
  double p95_us = 0.0;
};

struct BenchResult {
  int width = 0;
  int height = 0;
  int frames = 0;
  int iterations = 0;
  StageTiming mask;
  StageTiming cluster;
  StageTiming attributes;
  StageTiming threat;
  StageTiming raster;
  StageTiming baseline;  // mask + cluster + attributes per pass
  StageTiming full;      // all five stages per pass
  double threat_overhead = 0.0;
  std::size_t checksum = 0;  // keeps the timed work observable
};

namespace detail {

inline StageTiming stage_timing(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  if (n == 0) return {};
  StageTiming t;
  t.median_us = n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  const std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  t.p95_us = samples[std::min(n - 1, rank == 0 ? 0 : rank - 1)];
  return t;
}

}  // namespace detail

/// Times the detection chain stage by stage over synthesized frames of the
/// given scenario and reports per-stage medians and p95s. The threat overhead
/// is the threat-stage median over the median of the stages a plain
/// clustering pipeline already pays for.
inline BenchResult run_bench(const Scenario& sc, const NoiseConfig& noise,
                             const PipelineConfig& cfg, const BenchConfig& bench) {
  using clock = std::chrono::steady_clock;
  const auto micros = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::micro>(b - a).count();
  };

  BenchResult result;
  result.width = sc.grid.width;
  result.height = sc.grid.height;
  result.frames = bench.frames;
  result.iterations = bench.iterations;

  std::vector<GridFrame> frames;
  frames.reserve(static_cast<std::size_t>(bench.frames));
  const int steps = static_cast<int>(std::floor(sc.duration / kFramePeriod + 1e-9));
  for (int i = 0; i < bench.frames; ++i) {
    NoiseConfig variant = noise;
    variant.seed = noise.seed + static_cast<std::uint64_t>(i);
    frames.push_back(synthesize_frame(sc, (i % (steps + 1)) * kFramePeriod, variant));
  }

  std::vector<double> mask_t, cluster_t, attr_t, threat_t, raster_t, baseline_t, full_t;
  mask_t.reserve(static_cast<std::size_t>(bench.iterations));
  cluster_t.reserve(mask_t.capacity());
  attr_t.reserve(mask_t.capacity());
  threat_t.reserve(mask_t.capacity());
  raster_t.reserve(mask_t.capacity());
  baseline_t.reserve(mask_t.capacity());
  full_t.reserve(mask_t.capacity());

  for (int i = 0; i < bench.iterations; ++i) {
    const GridFrame& frame = frames[static_cast<std::size_t>(i) % frames.size()];

    const auto t0 = clock::now();
    const std::vector<CellIndex> mask = search_mask(frame, cfg.mask);
    const auto t1 = clock::now();
    const std::vector<Cluster> clusters =
        dbscan(frame, mask, cfg.dbscan_eps, cfg.dbscan_min_pts);
    const auto t2 = clock::now();
    std::vector<DetectedCluster> detected;
    for (const Cluster& cl : clusters) {
      if (!plausibilize(cl, cfg.plausibility).accepted) continue;
      if (auto attrs = cluster_attributes(cl, frame.cell_size)) {
        detected.push_back({cl, *attrs});
      }
    }
    const auto t3 = clock::now();
    const HullPolygon ego_area =
        predict_ego_area(sc.ego_plan, frame.timestamp, cfg.prediction.horizon);
    const ThreatReport report =
        evaluate(frame.timestamp, detected, ego_area, cfg.prediction);
    const auto t4 = clock::now();
    const AttentionRaster raster = attention_raster(report, frame, cfg.raster_margin);
    const auto t5 = clock::now();

    result.checksum += mask.size() + clusters.size() + report.entries.size() +
                       static_cast<std::size_t>(
                           std::count(raster.mask.begin(), raster.mask.end(), std::uint8_t{1}));

    mask_t.push_back(micros(t0, t1));
    cluster_t.push_back(micros(t1, t2));
    attr_t.push_back(micros(t2, t3));
    threat_t.push_back(micros(t3, t4));
    raster_t.push_back(micros(t4, t5));
    baseline_t.push_back(micros(t0, t3));
    full_t.push_back(micros(t0, t5));
  }

  result.mask = detail::stage_timing(std::move(mask_t));
  result.cluster = detail::stage_timing(std::move(cluster_t));
  result.attributes = detail::stage_timing(std::move(attr_t));
  result.threat = detail::stage_timing(std::move(threat_t));
  result.raster = detail::stage_timing(std::move(raster_t));
  result.baseline = detail::stage_timing(std::move(baseline_t));
  result.full = detail::stage_timing(std::move(full_t));
  result.threat_overhead =
      result.baseline.median_us > 0.0 ? result.threat.median_us / result.baseline.median_us : 0.0;
  return result;
}

inline std::string format_bench(const BenchResult& r) {
  const auto stage = [](std::string_view name, const StageTiming& t) {
    std::string s{name};
    s += "_median_us ";
    s += textio::format_double(t.median_us);
    s += '\n';
    s += name;
    s += "_p95_us ";
    s += textio::format_double(t.p95_us);
    s += '\n';
    return s;
  };
  std::string out = "BENCH v1\n";
  out += "grid " + std::to_string(r.width) + "x" + std::to_string(r.height) + "\n";
  out += "frames " + std::to_string(r.frames) + "\n";
  out += "iterations " + std::to_string(r.iterations) + "\n";
  out += stage("mask", r.mask);
  out += stage("cluster", r.cluster);
  out += stage("attributes", r.attributes);
  out += stage("threat", r.threat);
  out += stage("raster", r.raster);
  out += stage("baseline", r.baseline);
  out += stage("full", r.full);
  out += "threat_overhead ";
  textio::append_double(out, r.threat_overhead);
  out += '\n';
  return out;
}

}  // namespace threatgrid
