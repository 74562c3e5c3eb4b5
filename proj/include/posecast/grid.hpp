#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "posecast/errors.hpp"

namespace posecast {

enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Axis, 3> kAxes = {Axis::X, Axis::Y, Axis::Z};

/// Shape of a per-joint score grid. depth == 1 denotes a planar (2D) grid.
struct GridSpec {
  std::uint32_t joints = 0;
  std::uint32_t depth = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;

  bool is_3d() const { return depth > 1; }

  /// Cells in one joint's grid (depth * height * width).
  std::size_t cell_count() const {
    return static_cast<std::size_t>(depth) * height * width;
  }

  /// Total values across all joints.
  std::size_t value_count() const { return cell_count() * joints; }

  std::uint32_t axis_len(Axis a) const {
    switch (a) {
      case Axis::X: return width;
      case Axis::Y: return height;
      case Axis::Z: return depth;
    }
    return 0;
  }

  /// Throws contract_error if any extent is zero or the cell count would
  /// overflow the platform's index range.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct CellCoord {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint32_t z = 0;

  friend bool operator==(const CellCoord&, const CellCoord&) = default;
};

/// Inverts the row-major (z, y, x; x fastest) layout of one joint's grid.
/// Cell i sits at continuous coordinate (x, y, z) == its 0-based indices.
CellCoord cell_coordinate(const GridSpec& spec, std::size_t linear_index);

/// Inverse of cell_coordinate.
std::size_t linear_index(const GridSpec& spec, const CellCoord& c);

/// Per-joint grid of raw scores (logits). Layout: [joint][z][y][x], x fastest.
struct Heatmap {
  GridSpec spec;
  std::vector<double> scores;

  Heatmap() = default;
  explicit Heatmap(const GridSpec& s) : spec(s) {
    spec.validate();
    scores.assign(spec.value_count(), 0.0);
  }

  double& at(std::uint32_t k, std::uint32_t z, std::uint32_t y,
             std::uint32_t x) {
    return scores[index(k, z, y, x)];
  }
  double at(std::uint32_t k, std::uint32_t z, std::uint32_t y,
            std::uint32_t x) const {
    return scores[index(k, z, y, x)];
  }

  std::size_t index(std::uint32_t k, std::uint32_t z, std::uint32_t y,
                    std::uint32_t x) const {
    return ((static_cast<std::size_t>(k) * spec.depth + z) * spec.height + y) *
               spec.width +
           x;
  }

  const double* joint_data(std::uint32_t k) const {
    return scores.data() + static_cast<std::size_t>(k) * spec.cell_count();
  }
  double* joint_data(std::uint32_t k) {
    return scores.data() + static_cast<std::size_t>(k) * spec.cell_count();
  }

  friend bool operator==(const Heatmap&, const Heatmap&) = default;
};

/// Per-joint probability grid; each joint's cells sum to 1 (within 1e-9).
struct NormalizedHeatmap {
  GridSpec spec;
  std::vector<double> probs;

  NormalizedHeatmap() = default;
  explicit NormalizedHeatmap(const GridSpec& s) : spec(s) {
    spec.validate();
    probs.assign(spec.value_count(), 0.0);
  }

  const double* joint_data(std::uint32_t k) const {
    return probs.data() + static_cast<std::size_t>(k) * spec.cell_count();
  }
  double* joint_data(std::uint32_t k) {
    return probs.data() + static_cast<std::size_t>(k) * spec.cell_count();
  }
};

/// K joints with continuous grid-unit coordinates and a per-axis supervision
/// mask (true = this axis carries a usable value).
struct JointSet {
  std::vector<std::array<double, 3>> coords;
  std::vector<std::array<bool, 3>> mask;

  JointSet() = default;
  explicit JointSet(std::size_t k)
      : coords(k, {0.0, 0.0, 0.0}), mask(k, {true, true, true}) {}

  std::size_t joint_count() const { return coords.size(); }

  double coord(std::size_t k, Axis a) const {
    return coords[k][static_cast<int>(a)];
  }
  bool masked(std::size_t k, Axis a) const {
    return mask[k][static_cast<int>(a)];
  }

  friend bool operator==(const JointSet&, const JointSet&) = default;
};

/// One joint's probability mass collapsed onto a single axis.
struct HeatVector {
  Axis axis = Axis::X;
  std::vector<double> probs;
};

/// d(scalar loss)/d(raw score) for every cell; same layout as Heatmap.
struct DecodeGradient {
  GridSpec spec;
  std::vector<double> d_scores;

  DecodeGradient() = default;
  explicit DecodeGradient(const GridSpec& s) : spec(s) {
    d_scores.assign(spec.value_count(), 0.0);
  }
};

}  // namespace posecast
