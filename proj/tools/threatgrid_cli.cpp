#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "threatgrid/threatgrid.hpp"

namespace fs = std::filesystem;
namespace tg = threatgrid;

namespace {

std::string read_text_file(const std::string& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw tg::ConfigError(std::string(what) + " file not readable: '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed on '" + path.string() + "'");
}

std::string frame_tag(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

struct CliFlags {
  std::string config_path;
  std::string scenario;
  double horizon = 0.0;
  double phi_u_deg = 0.0;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string frames_path;
  std::string plan_path;
  bool emit_reports = false;
  bool emit_frames = false;
  bool emit_svg = false;
  CLI::Option* scenario_opt = nullptr;
  CLI::Option* horizon_opt = nullptr;
  CLI::Option* phi_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* frames_opt = nullptr;
  CLI::Option* plan_opt = nullptr;
};

void add_common_options(CLI::App* sub, CliFlags& f, bool with_scenario) {
  sub->add_option("--config", f.config_path,
                  "Config file, one 'key value' per line ('#' comments allowed)");
  if (with_scenario) {
    f.scenario_opt = sub->add_option(
        "--scenario", f.scenario, "Scenario: turning-in, turning-over or straight-crossing");
  }
  f.horizon_opt = sub->add_option("--horizon", f.horizon, "Prediction horizon in seconds");
  f.phi_opt = sub->add_option("--phi-u", f.phi_u_deg, "Heading uncertainty in degrees");
  f.seed_opt = sub->add_option("--seed", f.seed, "Noise seed");
  f.out_opt = sub->add_option("--out", f.out_dir, "Output directory");
}

tg::RunConfig gather_config(const CliFlags& f) {
  tg::ConfigEntries entries;
  if (!f.config_path.empty()) {
    entries = tg::parse_config_text(read_text_file(f.config_path, "config"));
  }
  if (f.scenario_opt != nullptr && *f.scenario_opt) entries.emplace_back("scenario", f.scenario);
  if (*f.horizon_opt) entries.emplace_back("horizon", tg::textio::format_double(f.horizon));
  if (*f.phi_opt) entries.emplace_back("phi_u_deg", tg::textio::format_double(f.phi_u_deg));
  if (*f.seed_opt) entries.emplace_back("seed", std::to_string(f.seed));
  if (*f.out_opt) entries.emplace_back("out_dir", f.out_dir);
  if (f.frames_opt != nullptr && *f.frames_opt) entries.emplace_back("frames", f.frames_path);
  if (f.plan_opt != nullptr && *f.plan_opt) entries.emplace_back("plan", f.plan_path);
  if (f.emit_reports) entries.emplace_back("emit_reports", "1");
  if (f.emit_frames) entries.emplace_back("emit_frames", "1");
  if (f.emit_svg) entries.emplace_back("emit_svg", "1");
  return tg::build_run_config(entries);
}

struct StatusCounts {
  int threat = 0;
  int on_trajectory = 0;
  int no_threat = 0;
};

StatusCounts count_statuses(const tg::ThreatReport& report) {
  StatusCounts c;
  for (const tg::ThreatEntry& e : report.entries) {
    switch (e.status) {
      case tg::ThreatStatus::kThreat: ++c.threat; break;
      case tg::ThreatStatus::kOnTrajectory: ++c.on_trajectory; break;
      case tg::ThreatStatus::kNoThreat: ++c.no_threat; break;
    }
  }
  return c;
}

void append_hull_dump(std::string& out, const tg::HullPolygon& hull) {
  for (std::size_t i = 0; i < hull.points.size(); ++i) {
    if (i) out += ';';
    tg::textio::append_double(out, hull.points[i].x);
    out += ' ';
    tg::textio::append_double(out, hull.points[i].y);
  }
}

constexpr std::string_view kTimelineHeader =
    "t,clusters,threat,on_trajectory,no_threat,collinear_contacts,attention_cells,"
    "ego_hull,cluster_hulls\n";

std::string timeline_row(const tg::ThreatReport& report, const tg::AttentionRaster& raster) {
  const StatusCounts c = count_statuses(report);
  std::size_t attention = 0;
  for (const std::uint8_t v : raster.mask) attention += v;
  std::string row;
  tg::textio::append_double(row, report.timestamp);
  row += ',' + std::to_string(report.entries.size());
  row += ',' + std::to_string(c.threat);
  row += ',' + std::to_string(c.on_trajectory);
  row += ',' + std::to_string(c.no_threat);
  row += ',' + std::to_string(report.collinear_contacts);
  row += ',' + std::to_string(attention);
  row += ',';
  append_hull_dump(row, report.ego_area);
  row += ',';
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const tg::ThreatEntry& e = report.entries[i];
    if (i) row += '|';
    row += std::to_string(e.cluster_id);
    row += ' ';
    row += tg::threat_status_name(e.status);
    row += ' ';
    append_hull_dump(row, e.predicted_area);
  }
  row += '\n';
  return row;
}

int cmd_run(const tg::RunConfig& cfg) {
  const tg::Scenario sc = tg::build_scenario(cfg.kind, cfg.params);
  tg::RunOptions options;
  options.collect_reports = true;
  options.collect_frames = cfg.emit_frames;
  const tg::ScenarioRun run = tg::run_scenario(sc, cfg.noise, cfg.pipeline, options);

  const std::string config_text = tg::serialize_run_config(cfg);
  const std::string result_text = tg::serialize_result(run.result);
  std::cout << config_text << result_text;

  const fs::path out(cfg.out_dir);
  std::string csv{kTimelineHeader};
  for (std::size_t i = 0; i < run.reports.size(); ++i) {
    csv += timeline_row(run.reports[i], run.rasters[i]);
  }
  write_file(out / "config.txt", config_text);
  write_file(out / "result.txt", result_text);
  write_file(out / "timeline.csv", csv);
  if (cfg.emit_reports) {
    for (std::size_t i = 0; i < run.reports.size(); ++i) {
      write_file(out / "reports" / ("report_" + frame_tag(i) + ".txt"),
                 tg::serialize_report(run.reports[i]));
      write_file(out / "rasters" / ("raster_" + frame_tag(i) + ".txt"),
                 tg::serialize_raster(run.rasters[i]));
    }
  }
  if (cfg.emit_frames) {
    std::string frames_text;
    for (const tg::GridFrame& frame : run.frames) frames_text += tg::serialize_frame(frame);
    write_file(out / "frames.txt", frames_text);
    write_file(out / "plan.txt", tg::serialize_plan(sc.ego_plan));
  }
  if (cfg.emit_svg) {
    for (std::size_t i = 0; i < run.reports.size(); ++i) {
      write_file(out / "svg" / ("frame_" + frame_tag(i) + ".svg"),
                 tg::render_scene_svg(sc, run.reports[i].timestamp, run.reports[i]));
    }
  }
  return 0;
}

int cmd_detect(const tg::RunConfig& cfg, bool eps_explicit) {
  if (cfg.frames_path.empty()) throw tg::ConfigError("detect: missing frames path");
  if (cfg.plan_path.empty()) throw tg::ConfigError("detect: missing plan path");

  tg::EgoPlan plan;
  try {
    plan = tg::parse_plan(read_text_file(cfg.plan_path, "plan"));
  } catch (const tg::ParseError& e) {
    throw tg::ParseError(e.line(), "'" + cfg.plan_path + "': " + e.detail());
  }

  std::ifstream frames_in(cfg.frames_path, std::ios::binary);
  if (!frames_in) {
    throw tg::ConfigError("frames file not readable: '" + cfg.frames_path + "'");
  }
  tg::FrameReader reader(frames_in);

  const fs::path out(cfg.out_dir);
  std::string csv{kTimelineHeader};
  std::size_t n_frames = 0;
  std::optional<double> first_threat;
  tg::PipelineConfig pipeline = cfg.pipeline;
  try {
    while (std::optional<tg::GridFrame> frame = reader.next()) {
      if (!eps_explicit) pipeline.dbscan_eps = 2.0 * frame->cell_size;
      const tg::HullPolygon ego_area =
          tg::predict_ego_area(plan, frame->timestamp, pipeline.prediction.horizon);
      tg::FrameDetection detection = tg::detect_frame(*frame, ego_area, pipeline);
      const tg::AttentionRaster raster =
          tg::attention_raster(detection.report, *frame, pipeline.raster_margin);
      if (!first_threat && count_statuses(detection.report).threat > 0) {
        first_threat = frame->timestamp;
      }
      csv += timeline_row(detection.report, raster);
      if (cfg.emit_reports) {
        write_file(out / "reports" / ("report_" + frame_tag(n_frames) + ".txt"),
                   tg::serialize_report(detection.report));
        write_file(out / "rasters" / ("raster_" + frame_tag(n_frames) + ".txt"),
                   tg::serialize_raster(raster));
      }
      ++n_frames;
    }
  } catch (const tg::ParseError& e) {
    throw tg::ParseError(e.line(), "'" + cfg.frames_path + "': " + e.detail());
  }

  std::cout << "DETECT v1\n";
  std::cout << "frames " << n_frames << '\n';
  std::cout << "first_threat "
            << (first_threat ? tg::textio::format_double(*first_threat) : "none") << '\n';
  write_file(out / "timeline.csv", csv);
  return 0;
}

int cmd_bench(const tg::RunConfig& cfg, int iterations, int bench_frames) {
  const tg::Scenario sc = tg::build_scenario(cfg.kind, cfg.params);
  tg::BenchConfig bench;
  if (iterations > 0) bench.iterations = iterations;
  if (bench_frames > 0) bench.frames = bench_frames;
  const tg::BenchResult result = tg::run_bench(sc, cfg.noise, cfg.pipeline, bench);
  std::cout << tg::format_bench(result);
  return 0;
}

int cmd_export(const tg::RunConfig& cfg) {
  const tg::Scenario sc = tg::build_scenario(cfg.kind, cfg.params);
  const int n_frames = static_cast<int>(std::floor(sc.duration / tg::kFramePeriod + 1e-9));
  std::string frames_text;
  for (int i = 0; i <= n_frames; ++i) {
    frames_text += tg::serialize_frame(tg::synthesize_frame(sc, i * tg::kFramePeriod, cfg.noise));
  }
  const fs::path out(cfg.out_dir);
  write_file(out / "frames.txt", frames_text);
  write_file(out / "plan.txt", tg::serialize_plan(sc.ego_plan));
  std::cout << "EXPORT v1\n";
  std::cout << "frames " << (n_frames + 1) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threat region identification on dynamic occupancy grid maps"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Simulate a scenario and run the detection chain");
  CliFlags run_flags;
  add_common_options(run, run_flags, true);
  run->add_flag("--emit-reports", run_flags.emit_reports,
                "Write per-frame reports and rasters");
  run->add_flag("--emit-frames", run_flags.emit_frames,
                "Write the synthesized frames and the plan");
  run->add_flag("--emit-svg", run_flags.emit_svg, "Write per-frame scene renderings");

  CLI::App* detect = app.add_subcommand("detect", "Run the detection chain on recorded frames");
  CliFlags detect_flags;
  add_common_options(detect, detect_flags, false);
  detect_flags.frames_opt =
      detect->add_option("--frames", detect_flags.frames_path, "Frame documents, concatenated");
  detect_flags.plan_opt = detect->add_option("--plan", detect_flags.plan_path, "Ego plan document");
  detect->add_flag("--emit-reports", detect_flags.emit_reports,
                   "Write per-frame reports and rasters");

  CLI::App* bench = app.add_subcommand("bench", "Time the detection chain stage by stage");
  CliFlags bench_flags;
  int bench_iterations = 0;
  int bench_frames = 0;
  add_common_options(bench, bench_flags, true);
  bench->add_option("--iterations", bench_iterations, "Timed passes");
  bench->add_option("--bench-frames", bench_frames, "Distinct synthesized frames to cycle");

  CLI::App* exp = app.add_subcommand("export-scenario", "Write a scenario's frames and plan");
  CliFlags exp_flags;
  add_common_options(exp, exp_flags, true);

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(gather_config(run_flags));
    if (detect->parsed()) {
      const tg::RunConfig cfg = gather_config(detect_flags);
      bool eps_explicit = false;
      if (!detect_flags.config_path.empty()) {
        for (const auto& [k, v] :
             tg::parse_config_text(read_text_file(detect_flags.config_path, "config"))) {
          if (k == "eps") eps_explicit = true;
        }
      }
      return cmd_detect(cfg, eps_explicit);
    }
    if (bench->parsed()) return cmd_bench(gather_config(bench_flags), bench_iterations, bench_frames);
    return cmd_export(gather_config(exp_flags));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const tg::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const tg::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const tg::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
