#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "posecast/grid.hpp"

namespace posecast::io {

// Heatmap container: magic "IHPR", u32 version (=1), u32 K, D, H, W, then
// K*D*H*W IEEE-754 float64 values in grid layout order. All fields
// little-endian. Round trips are bit-exact.

inline constexpr char kHeatmapMagic[4] = {'I', 'H', 'P', 'R'};
inline constexpr std::uint32_t kHeatmapVersion = 1;

/// Returns the number of bytes written.
std::size_t write_heatmap(const Heatmap& h, std::ostream& sink);

/// Throws format_error (carrying the byte offset) on bad magic, version
/// mismatch, truncation, or non-finite payload values.
Heatmap read_heatmap(std::istream& source);

std::size_t write_heatmap_file(const Heatmap& h,
                               const std::filesystem::path& path);
Heatmap read_heatmap_file(const std::filesystem::path& path);

// JointSet text form: JSON object with "coords" (K x 3 numbers) and
// "mask" (K x 3 booleans).
std::string joint_set_to_json(const JointSet& js);
JointSet joint_set_from_json(const std::string& text);

}  // namespace posecast::io
