#include "posecast/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace posecast::io {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i)
    b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in, std::size_t offset,
                      const char* field) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4)
    throw format_error(std::string("heatmap stream truncated in ") + field,
                       offset);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in, std::size_t offset) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (in.gcount() != 8)
    throw format_error("heatmap stream truncated in payload", offset);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::size_t write_heatmap(const Heatmap& h, std::ostream& sink) {
  h.spec.validate();
  if (h.scores.size() != h.spec.value_count())
    throw contract_error("write_heatmap: score array does not match spec");
  sink.write(kHeatmapMagic, 4);
  put_u32(sink, kHeatmapVersion);
  put_u32(sink, h.spec.joints);
  put_u32(sink, h.spec.depth);
  put_u32(sink, h.spec.height);
  put_u32(sink, h.spec.width);
  std::size_t offset = 24;
  for (double v : h.scores) {
    if (!std::isfinite(v))
      throw format_error("write_heatmap: non-finite score", offset);
    put_f64(sink, v);
    offset += 8;
  }
  if (!sink) throw format_error("write_heatmap: sink write failed", offset);
  return offset;
}

Heatmap read_heatmap(std::istream& source) {
  char magic[4];
  source.read(magic, 4);
  if (source.gcount() != 4 || std::memcmp(magic, kHeatmapMagic, 4) != 0)
    throw format_error("heatmap stream: bad magic", 0);
  const std::uint32_t version = get_u32(source, 4, "version");
  if (version != kHeatmapVersion)
    throw format_error("heatmap stream: unsupported version " +
                           std::to_string(version),
                       4);
  Heatmap h;
  h.spec.joints = get_u32(source, 8, "joint count");
  h.spec.depth = get_u32(source, 12, "depth");
  h.spec.height = get_u32(source, 16, "height");
  h.spec.width = get_u32(source, 20, "width");
  try {
    h.spec.validate();
  } catch (const contract_error& e) {
    throw format_error(std::string("heatmap stream: invalid shape: ") +
                           e.what(),
                       8);
  }
  const std::size_t n = h.spec.value_count();
  h.scores.resize(n);
  std::size_t offset = 24;
  for (std::size_t i = 0; i < n; ++i) {
    h.scores[i] = get_f64(source, offset);
    if (!std::isfinite(h.scores[i]))
      throw format_error("heatmap stream: non-finite value", offset);
    offset += 8;
  }
  return h;
}

std::size_t write_heatmap_file(const Heatmap& h,
                               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw format_error("cannot open " + path.string() + " for writing");
  return write_heatmap(h, out);
}

Heatmap read_heatmap_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("cannot open " + path.string());
  return read_heatmap(in);
}

std::string joint_set_to_json(const JointSet& js) {
  nlohmann::json j;
  j["coords"] = nlohmann::json::array();
  j["mask"] = nlohmann::json::array();
  for (std::size_t k = 0; k < js.joint_count(); ++k) {
    j["coords"].push_back({js.coords[k][0], js.coords[k][1], js.coords[k][2]});
    j["mask"].push_back({js.mask[k][0], js.mask[k][1], js.mask[k][2]});
  }
  return j.dump();
}

JointSet joint_set_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw format_error(std::string("joint set JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object() || !j.contains("coords") || !j.contains("mask"))
    throw format_error("joint set JSON: expected coords and mask");
  const auto& coords = j["coords"];
  const auto& mask = j["mask"];
  if (!coords.is_array() || !mask.is_array() || coords.size() != mask.size())
    throw format_error("joint set JSON: coords/mask size mismatch");
  JointSet js(coords.size());
  for (std::size_t k = 0; k < coords.size(); ++k) {
    if (!coords[k].is_array() || coords[k].size() != 3 ||
        !mask[k].is_array() || mask[k].size() != 3)
      throw format_error("joint set JSON: entries must be triples");
    for (int a = 0; a < 3; ++a) {
      js.coords[k][a] = coords[k][a].get<double>();
      js.mask[k][a] = mask[k][a].get<bool>();
    }
  }
  return js;
}

}  // namespace posecast::io
