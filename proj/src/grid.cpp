#include "posecast/grid.hpp"

#include <limits>

namespace posecast {

namespace {

bool mul_overflows(std::size_t a, std::size_t b) {
  return b != 0 && a > std::numeric_limits<std::size_t>::max() / b;
}

}  // namespace

void GridSpec::validate() const {
  if (joints < 1) throw contract_error("grid: joint count must be >= 1");
  if (depth < 1 || height < 1 || width < 1)
    throw contract_error("grid: depth/height/width must be >= 1");
  std::size_t n = depth;
  if (mul_overflows(n, height)) throw contract_error("grid: extent overflow");
  n *= height;
  if (mul_overflows(n, width)) throw contract_error("grid: extent overflow");
  n *= width;
  if (mul_overflows(n, joints)) throw contract_error("grid: extent overflow");
  n *= joints;
  // Keep room for a double payload of the same size.
  if (mul_overflows(n, sizeof(double)))
    throw contract_error("grid: extent overflow");
}

CellCoord cell_coordinate(const GridSpec& spec, std::size_t linear_index) {
  spec.validate();
  if (linear_index >= spec.cell_count())
    throw std::out_of_range("cell_coordinate: index " +
                            std::to_string(linear_index) + " out of range");
  CellCoord c;
  c.x = static_cast<std::uint32_t>(linear_index % spec.width);
  c.y = static_cast<std::uint32_t>((linear_index / spec.width) % spec.height);
  c.z = static_cast<std::uint32_t>(linear_index /
                                   (static_cast<std::size_t>(spec.width) *
                                    spec.height));
  return c;
}

std::size_t linear_index(const GridSpec& spec, const CellCoord& c) {
  spec.validate();
  if (c.x >= spec.width || c.y >= spec.height || c.z >= spec.depth)
    throw std::out_of_range("linear_index: coordinate out of range");
  return (static_cast<std::size_t>(c.z) * spec.height + c.y) * spec.width +
         c.x;
}

}  // namespace posecast
