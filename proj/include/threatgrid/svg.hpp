#pragma once

#include <string>
#include <string_view>

#include "threatgrid/geometry.hpp"
#include "threatgrid/simulation.hpp"
#include "threatgrid/text_io.hpp"
#include "threatgrid/threat.hpp"

namespace threatgrid {
namespace detail {

class SvgCanvas {
 public:
  SvgCanvas(Point2 origin, double extent_x, double extent_y, double px_per_m)
      : origin_(origin), top_(origin.y + extent_y), scale_(px_per_m) {
    const int w = static_cast<int>(extent_x * px_per_m);
    const int h = static_cast<int>(extent_y * px_per_m);
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
             "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " +
             std::to_string(h) + "\">\n";
    body_ += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  }

  void polygon(const HullPolygon& hull, std::string_view fill, std::string_view stroke,
               double opacity) {
    if (hull.points.empty()) return;
    body_ += "<polygon points=\"";
    for (std::size_t i = 0; i < hull.points.size(); ++i) {
      if (i) body_ += ' ';
      append_point(hull.points[i]);
    }
    body_ += "\" fill=\"";
    body_ += fill;
    body_ += "\" stroke=\"";
    body_ += stroke;
    body_ += "\" stroke-width=\"1\" fill-opacity=\"";
    textio::append_double(body_, opacity);
    body_ += "\"/>\n";
  }

  void text(Point2 at, std::string_view content) {
    body_ += "<text x=\"";
    append_coord_x(at.x);
    body_ += "\" y=\"";
    append_coord_y(at.y);
    body_ += "\" font-family=\"monospace\" font-size=\"12\">";
    body_ += content;
    body_ += "</text>\n";
  }

  std::string finish() {
    std::string out = std::move(body_);
    out += "</svg>\n";
    return out;
  }

 private:
  void append_coord_x(double x) { textio::append_double(body_, (x - origin_.x) * scale_); }
  void append_coord_y(double y) { textio::append_double(body_, (top_ - y) * scale_); }
  void append_point(Point2 p) {
    append_coord_x(p.x);
    body_ += ',';
    append_coord_y(p.y);
  }

  Point2 origin_;
  double top_;
  double scale_;
  std::string body_;
};

}  // namespace detail

/// One frame of the scene as an SVG document: lane corridor, ego plan area and
/// footprint, actor ground truth, and every reported cluster with its box and
/// predicted area colored by status.
inline std::string render_scene_svg(const Scenario& sc, double t, const ThreatReport& report) {
  const double extent_x = sc.grid.width * sc.grid.cell_size;
  const double extent_y = sc.grid.height * sc.grid.cell_size;
  detail::SvgCanvas canvas(sc.grid.origin, extent_x, extent_y, 10.0);

  canvas.polygon(sc.prior_corridor, "#d8d8d8", "#b0b0b0", 0.8);
  canvas.polygon(report.ego_area, "#6699ff", "#2255cc", 0.25);
  canvas.polygon(ego_footprint_at(sc, t), "#2255cc", "#10307a", 0.9);
  canvas.polygon(actor_footprint_at(sc, t), "none", "#000000", 1.0);

  for (const ThreatEntry& e : report.entries) {
    std::string_view color = "#44aa44";
    if (e.status == ThreatStatus::kThreat) {
      color = "#cc2222";
    } else if (e.status == ThreatStatus::kOnTrajectory) {
      color = "#ccaa22";
    }
    canvas.polygon(e.predicted_area, color, color, 0.3);
    canvas.polygon(e.attributes.box, "#ff8800", "#aa5500", 0.5);
  }

  std::string label = "t=" + textio::format_double(t);
  for (const ThreatEntry& e : report.entries) {
    label += "  #" + std::to_string(e.cluster_id) + ":";
    label += threat_status_name(e.status);
  }
  canvas.text({sc.grid.origin.x + 1.0, sc.grid.origin.y + extent_y - 2.0}, label);
  return canvas.finish();
}

}  // namespace threatgrid
