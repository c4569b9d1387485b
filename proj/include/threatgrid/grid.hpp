#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "threatgrid/geometry.hpp"

namespace threatgrid {

/// Tolerance on the Dempster-Shafer mass sum, to absorb rounding in inputs
/// that were produced by a conforming writer.
inline constexpr double kMassTol = 1e-9;

/// Symmetric 2x2 velocity covariance, (m/s)^2. Symmetry is guaranteed by the
/// representation; only the upper triangle is stored.
struct VelCovariance {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  friend bool operator==(const VelCovariance&, const VelCovariance&) = default;
};

/// Per-cell state of a dynamic occupancy grid: Dempster-Shafer occupancy and
/// free masses plus a velocity estimate with its covariance.
struct CellState {
  double m_occ = 0.0;
  double m_free = 0.0;
  Point2 pos;
  Vec2 vel;
  VelCovariance vel_cov;

  friend bool operator==(const CellState&, const CellState&) = default;
};

/// Pignistic occupancy probability: the unknown mass splits evenly between
/// occupied and free.
inline double occupancy_probability(const CellState& c) {
  return c.m_occ + 0.5 * (1.0 - c.m_occ - c.m_free);
}

/// First violated cell invariant, or nullopt for a valid cell.
inline std::optional<std::string> cell_state_violation(const CellState& c) {
  if (!std::isfinite(c.m_occ) || !std::isfinite(c.m_free) || !std::isfinite(c.vel.x) ||
      !std::isfinite(c.vel.y) || !std::isfinite(c.vel_cov.xx) || !std::isfinite(c.vel_cov.xy) ||
      !std::isfinite(c.vel_cov.yy)) {
    return "non-finite value";
  }
  if (c.m_occ < 0.0 || c.m_free < 0.0) return "negative belief mass";
  if (c.m_occ + c.m_free > 1.0 + kMassTol) {
    return "m_occ + m_free exceeds 1 (" + std::to_string(c.m_occ + c.m_free) + ")";
  }
  if (c.vel_cov.xx < -kMassTol || c.vel_cov.yy < -kMassTol) return "negative velocity variance";
  if (c.vel_cov.xx * c.vel_cov.yy - c.vel_cov.xy * c.vel_cov.xy < -kMassTol) {
    return "indefinite velocity covariance";
  }
  return std::nullopt;
}

/// One time slice of the dynamic occupancy grid, row-major. The origin is the
/// world position of cell (0, 0)'s center; cell (i, j) has its center at
/// origin + (j * cell_size, i * cell_size).
struct GridFrame {
  double timestamp = 0.0;
  Point2 origin;
  double cell_size = 0.2;
  int width = 0;
  int height = 0;
  std::vector<CellState> cells;

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(col);
  }

  const CellState& at(int row, int col) const { return cells[index(row, col)]; }
  CellState& at(int row, int col) { return cells[index(row, col)]; }

  friend bool operator==(const GridFrame&, const GridFrame&) = default;
};

/// World position of a cell center, bounds-checked.
inline Point2 cell_center(const GridFrame& frame, int row, int col) {
  if (row < 0 || row >= frame.height || col < 0 || col >= frame.width) {
    throw std::out_of_range("cell_center: cell (" + std::to_string(row) + ", " +
                            std::to_string(col) + ") outside " + std::to_string(frame.height) +
                            "x" + std::to_string(frame.width) + " grid");
  }
  return {frame.origin.x + col * frame.cell_size, frame.origin.y + row * frame.cell_size};
}

/// Fresh frame of unknown cells (zero masses, zero velocity) with every cell
/// position derived from the grid geometry.
inline GridFrame make_frame(double timestamp, Point2 origin, double cell_size, int width,
                            int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("make_frame: non-positive dimension");
  if (!(cell_size > 0.0)) throw std::invalid_argument("make_frame: non-positive cell size");
  GridFrame frame;
  frame.timestamp = timestamp;
  frame.origin = origin;
  frame.cell_size = cell_size;
  frame.width = width;
  frame.height = height;
  frame.cells.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      frame.at(row, col).pos = {origin.x + col * cell_size, origin.y + row * cell_size};
    }
  }
  return frame;
}

/// First violated frame invariant (including per-cell checks), or nullopt.
inline std::optional<std::string> frame_violation(const GridFrame& frame) {
  if (frame.width <= 0 || frame.height <= 0) return "non-positive grid dimension";
  if (!(frame.cell_size > 0.0)) return "non-positive cell size";
  if (frame.cells.size() !=
      static_cast<std::size_t>(frame.width) * static_cast<std::size_t>(frame.height)) {
    return "cell count does not match width * height";
  }
  for (std::size_t i = 0; i < frame.cells.size(); ++i) {
    if (auto why = cell_state_violation(frame.cells[i])) {
      return "cell " + std::to_string(i) + ": " + *why;
    }
  }
  return std::nullopt;
}

}  // namespace threatgrid
