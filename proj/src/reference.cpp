#include "posecast/reference.hpp"

#include <cmath>
#include <limits>

namespace posecast::reference {

JointSet argmax_decode(const Heatmap& h) {
  const std::size_t cells = h.spec.cell_count();
  JointSet out(h.spec.joints);
  for (std::uint32_t k = 0; k < h.spec.joints; ++k) {
    const double* s = h.joint_data(k);
    std::size_t best = 0;
    for (std::size_t i = 1; i < cells; ++i)
      if (s[i] > s[best]) best = i;
    const CellCoord c = cell_coordinate(h.spec, best);
    out.coords[k] = {static_cast<double>(c.x), static_cast<double>(c.y),
                     static_cast<double>(c.z)};
  }
  return out;
}

NormalizedHeatmap normalize(const Heatmap& h) {
  const std::size_t cells = h.spec.cell_count();
  NormalizedHeatmap out(h.spec);
  for (std::uint32_t k = 0; k < h.spec.joints; ++k) {
    const double* s = h.joint_data(k);
    double* p = out.joint_data(k);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cells; ++i) m = std::max(m, s[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      p[i] = std::exp(s[i] - m);
      sum += p[i];
    }
    const double inv = 1.0 / sum;
    for (std::size_t i = 0; i < cells; ++i) p[i] *= inv;
  }
  return out;
}

JointSet integral_decode(const NormalizedHeatmap& nh) {
  JointSet out(nh.spec.joints);
  for (std::uint32_t k = 0; k < nh.spec.joints; ++k) {
    const double* p = nh.joint_data(k);
    double ex = 0.0, ey = 0.0, ez = 0.0;
    std::size_t i = 0;
    for (std::uint32_t z = 0; z < nh.spec.depth; ++z)
      for (std::uint32_t y = 0; y < nh.spec.height; ++y)
        for (std::uint32_t x = 0; x < nh.spec.width; ++x, ++i) {
          ex += p[i] * x;
          ey += p[i] * y;
          ez += p[i] * z;
        }
    out.coords[k] = {ex, ey, ez};
  }
  return out;
}

std::vector<HeatVector> marginalize(const NormalizedHeatmap& nh, Axis axis) {
  std::vector<HeatVector> out(nh.spec.joints);
  for (std::uint32_t k = 0; k < nh.spec.joints; ++k) {
    out[k].axis = axis;
    out[k].probs.assign(nh.spec.axis_len(axis), 0.0);
    const double* p = nh.joint_data(k);
    std::size_t i = 0;
    for (std::uint32_t z = 0; z < nh.spec.depth; ++z)
      for (std::uint32_t y = 0; y < nh.spec.height; ++y)
        for (std::uint32_t x = 0; x < nh.spec.width; ++x, ++i) {
          const std::uint32_t bin =
              axis == Axis::X ? x : (axis == Axis::Y ? y : z);
          out[k].probs[bin] += p[i];
        }
  }
  return out;
}

DecodeGradient integral_backward(const Heatmap& h,
                                 const JointGradient& upstream) {
  const NormalizedHeatmap nh = normalize(h);
  const JointSet decoded = integral_decode(nh);
  DecodeGradient grad(h.spec);
  for (std::uint32_t k = 0; k < h.spec.joints; ++k) {
    const double* p = nh.joint_data(k);
    double* g = grad.d_scores.data() + k * h.spec.cell_count();
    std::size_t i = 0;
    for (std::uint32_t z = 0; z < h.spec.depth; ++z)
      for (std::uint32_t y = 0; y < h.spec.height; ++y)
        for (std::uint32_t x = 0; x < h.spec.width; ++x, ++i) {
          g[i] = p[i] * (upstream[k][0] * (x - decoded.coords[k][0]) +
                         upstream[k][1] * (y - decoded.coords[k][1]) +
                         upstream[k][2] * (z - decoded.coords[k][2]));
        }
  }
  return grad;
}

Heatmap gaussian_target(const GridSpec& spec, const JointSet& gt,
                        double sigma) {
  Heatmap out(spec);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::uint32_t k = 0; k < spec.joints; ++k) {
    const auto& c = gt.coords[k];
    double* t = out.joint_data(k);
    std::size_t i = 0;
    for (std::uint32_t z = 0; z < spec.depth; ++z)
      for (std::uint32_t y = 0; y < spec.height; ++y)
        for (std::uint32_t x = 0; x < spec.width; ++x, ++i) {
          const double dx = x - c[0];
          const double dy = y - c[1];
          const double dz = spec.depth > 1 ? z - c[2] : 0.0;
          t[i] = std::exp(-(dx * dx + dy * dy + dz * dz) * inv);
        }
  }
  return out;
}

double h1_loss_value(const Heatmap& pred, const Heatmap& target) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.scores.size(); ++i) {
    const double d = pred.scores[i] - target.scores[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.scores.size());
}

}  // namespace posecast::reference
