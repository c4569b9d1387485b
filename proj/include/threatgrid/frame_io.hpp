#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "threatgrid/grid.hpp"
#include "threatgrid/text_io.hpp"

namespace threatgrid {

/// Frame text format:
///
///   DOGM v1 <timestamp> <origin_x> <origin_y> <cell_size> <width> <height>
///   <m_occ> <m_free> <vx> <vy> <cov_xx> <cov_xy> <cov_yy>   (width*height lines, row-major)
///
/// Doubles are written in their shortest round-trip form, so
/// parse(serialize(frame)) reproduces the frame exactly.
inline std::string serialize_frame(const GridFrame& frame) {
  std::string out;
  out.reserve(frame.cells.size() * 48 + 64);
  out += "DOGM v1 ";
  textio::append_double(out, frame.timestamp);
  out += ' ';
  textio::append_double(out, frame.origin.x);
  out += ' ';
  textio::append_double(out, frame.origin.y);
  out += ' ';
  textio::append_double(out, frame.cell_size);
  out += ' ';
  out += std::to_string(frame.width);
  out += ' ';
  out += std::to_string(frame.height);
  out += '\n';
  for (const CellState& c : frame.cells) {
    textio::append_double(out, c.m_occ);
    out += ' ';
    textio::append_double(out, c.m_free);
    out += ' ';
    textio::append_double(out, c.vel.x);
    out += ' ';
    textio::append_double(out, c.vel.y);
    out += ' ';
    textio::append_double(out, c.vel_cov.xx);
    out += ' ';
    textio::append_double(out, c.vel_cov.xy);
    out += ' ';
    textio::append_double(out, c.vel_cov.yy);
    out += '\n';
  }
  return out;
}

namespace detail {

inline GridFrame parse_frame_header(std::string_view line, std::size_t line_no) {
  const auto fields = textio::split_fields(line);
  if (fields.size() != 8 || fields[0] != "DOGM" || fields[1] != "v1") {
    throw ParseError(line_no, "malformed frame header (expected 'DOGM v1 <timestamp> "
                              "<origin_x> <origin_y> <cell_size> <width> <height>')");
  }
  double ts = 0.0, ox = 0.0, oy = 0.0, a = 0.0;
  long w = 0, h = 0;
  if (!textio::parse_double(fields[2], ts) || !textio::parse_double(fields[3], ox) ||
      !textio::parse_double(fields[4], oy) || !textio::parse_double(fields[5], a)) {
    throw ParseError(line_no, "malformed frame header: bad number");
  }
  if (!textio::parse_long(fields[6], w) || !textio::parse_long(fields[7], h)) {
    throw ParseError(line_no, "malformed frame header: bad grid dimension");
  }
  if (w <= 0 || h <= 0 || w > 100000 || h > 100000) {
    throw ParseError(line_no, "frame header: grid dimensions out of range");
  }
  if (!(a > 0.0)) throw ParseError(line_no, "frame header: non-positive cell size");
  return make_frame(ts, {ox, oy}, a, static_cast<int>(w), static_cast<int>(h));
}

inline void parse_cell_line(GridFrame& frame, std::size_t cell_index, std::string_view line,
                            std::size_t line_no) {
  const auto fields = textio::split_fields(line);
  if (fields.size() != 7) {
    throw ParseError(line_no, "cell " + std::to_string(cell_index) +
                                  ": expected 7 fields, got " + std::to_string(fields.size()));
  }
  CellState& c = frame.cells[cell_index];
  double v[7];
  for (int i = 0; i < 7; ++i) {
    if (!textio::parse_double(fields[i], v[i])) {
      throw ParseError(line_no, "cell " + std::to_string(cell_index) + ": bad number '" +
                                    std::string(fields[i]) + "'");
    }
  }
  c.m_occ = v[0];
  c.m_free = v[1];
  c.vel = {v[2], v[3]};
  c.vel_cov = {v[4], v[5], v[6]};
  if (auto why = cell_state_violation(c)) {
    throw ParseError(line_no, "cell " + std::to_string(cell_index) + ": " + *why);
  }
}

}  // namespace detail

/// Pulls frames one at a time from a stream of concatenated frame documents.
/// Blank lines between frames are skipped. Throws ParseError with the stream
/// line number on malformed input.
class FrameReader {
 public:
  explicit FrameReader(std::istream& in) : in_(in) {}

  std::optional<GridFrame> next() {
    std::string line;
    do {
      if (!std::getline(in_, line)) return std::nullopt;
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
    } while (line.find_first_not_of(" \t") == std::string::npos);

    GridFrame frame = detail::parse_frame_header(line, line_no_);
    const std::size_t total = frame.cells.size();
    for (std::size_t i = 0; i < total; ++i) {
      if (!std::getline(in_, line)) {
        throw ParseError(line_no_, "truncated frame payload: got " + std::to_string(i) +
                                       " of " + std::to_string(total) + " cells");
      }
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      detail::parse_cell_line(frame, i, line, line_no_);
    }
    return frame;
  }

  std::size_t line_number() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

/// Parses a buffer holding exactly one frame document.
inline GridFrame parse_frame(std::string_view text) {
  textio::LineScanner scanner(text);
  std::string_view line;
  while (scanner.next(line)) {
    if (line.find_first_not_of(" \t") != std::string_view::npos) break;
    line = {};
  }
  if (line.empty()) throw ParseError(scanner.line_number(), "empty frame document");
  GridFrame frame = detail::parse_frame_header(line, scanner.line_number());
  const std::size_t total = frame.cells.size();
  for (std::size_t i = 0; i < total; ++i) {
    if (!scanner.next(line)) {
      throw ParseError(scanner.line_number(), "truncated frame payload: got " +
                                                  std::to_string(i) + " of " +
                                                  std::to_string(total) + " cells");
    }
    detail::parse_cell_line(frame, i, line, scanner.line_number());
  }
  while (scanner.next(line)) {
    if (line.find_first_not_of(" \t") != std::string_view::npos) {
      throw ParseError(scanner.line_number(), "trailing content after frame payload");
    }
  }
  return frame;
}

/// Parses a buffer holding zero or more concatenated frame documents.
inline std::vector<GridFrame> parse_frames(std::string_view text) {
  std::vector<GridFrame> frames;
  textio::LineScanner scanner(text);
  std::string_view line;
  while (scanner.next(line)) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    GridFrame frame = detail::parse_frame_header(line, scanner.line_number());
    const std::size_t total = frame.cells.size();
    for (std::size_t i = 0; i < total; ++i) {
      if (!scanner.next(line)) {
        throw ParseError(scanner.line_number(), "truncated frame payload: got " +
                                                    std::to_string(i) + " of " +
                                                    std::to_string(total) + " cells");
      }
      detail::parse_cell_line(frame, i, line, scanner.line_number());
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace threatgrid
