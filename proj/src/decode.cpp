#include "posecast/decode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "posecast/parallel.hpp"

namespace posecast {

namespace {

// Per-joint max, computed chunk-wise. max is order-insensitive over finite
// values, so the result does not depend on scheduling.
double joint_max(const double* s, std::size_t n) {
  const std::size_t chunks = par::chunk_count(n);
  if (chunks <= 1) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, s[i]);
    return m;
  }
  std::vector<double> partial(chunks,
                              -std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * par::kChunk;
    const std::size_t end = std::min(begin + par::kChunk, n);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = begin; i < end; ++i) m = std::max(m, s[i]);
    partial[static_cast<std::size_t>(c)] = m;
  }
  double m = -std::numeric_limits<double>::infinity();
  for (double p : partial) m = std::max(m, p);
  return m;
}

}  // namespace

JointSet argmax_decode(const Heatmap& h) {
  h.spec.validate();
  const std::size_t cells = h.spec.cell_count();
  JointSet out(h.spec.joints);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(h.spec.joints); ++k) {
    const double* s = h.joint_data(static_cast<std::uint32_t>(k));
    std::size_t best = 0;
    for (std::size_t i = 1; i < cells; ++i)
      if (s[i] > s[best]) best = i;
    const CellCoord c = cell_coordinate(h.spec, best);
    out.coords[static_cast<std::size_t>(k)] = {static_cast<double>(c.x),
                                               static_cast<double>(c.y),
                                               static_cast<double>(c.z)};
  }
  return out;
}

NormalizedHeatmap normalize(const Heatmap& h) {
  h.spec.validate();
  if (h.scores.size() != h.spec.value_count())
    throw contract_error("normalize: score array does not match spec");
  const std::size_t total = h.scores.size();
  for (std::size_t i = 0; i < total; ++i)
    if (!std::isfinite(h.scores[i]))
      throw contract_error("normalize: non-finite score");

  const std::size_t cells = h.spec.cell_count();
  NormalizedHeatmap out(h.spec);

  std::vector<double> maxes(h.spec.joints);
  for (std::uint32_t k = 0; k < h.spec.joints; ++k)
    maxes[k] = joint_max(h.joint_data(k), cells);

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(total); ++i) {
    const std::size_t k = static_cast<std::size_t>(i) / cells;
    out.probs[static_cast<std::size_t>(i)] =
        std::exp(h.scores[static_cast<std::size_t>(i)] - maxes[k]);
  }

  for (std::uint32_t k = 0; k < h.spec.joints; ++k) {
    double* p = out.joint_data(k);
    const double sum = par::chunked_sum(cells, [&](std::size_t i) {
      return p[i];
    });
    const double inv = 1.0 / sum;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(cells); ++i)
      p[static_cast<std::size_t>(i)] *= inv;
  }
  return out;
}

JointSet integral_decode(const NormalizedHeatmap& nh) {
  nh.spec.validate();
  const std::size_t cells = nh.spec.cell_count();
  const std::size_t w = nh.spec.width;
  const std::size_t hw = w * nh.spec.height;
  JointSet out(nh.spec.joints);
  for (std::uint32_t k = 0; k < nh.spec.joints; ++k) {
    const double* p = nh.joint_data(k);
    const double ex = par::chunked_sum(cells, [&](std::size_t i) {
      return p[i] * static_cast<double>(i % w);
    });
    const double ey = par::chunked_sum(cells, [&](std::size_t i) {
      return p[i] * static_cast<double>((i / w) % nh.spec.height);
    });
    const double ez = par::chunked_sum(cells, [&](std::size_t i) {
      return p[i] * static_cast<double>(i / hw);
    });
    out.coords[k] = {ex, ey, ez};
  }
  return out;
}

std::vector<HeatVector> marginalize(const NormalizedHeatmap& nh, Axis axis) {
  nh.spec.validate();
  const std::size_t len = nh.spec.axis_len(axis);
  const std::size_t w = nh.spec.width;
  const std::size_t hgt = nh.spec.height;
  const std::size_t hw = w * hgt;
  const std::size_t cells = nh.spec.cell_count();

  std::vector<HeatVector> out(nh.spec.joints);
  for (auto& v : out) {
    v.axis = axis;
    v.probs.assign(len, 0.0);
  }
  // Each output bin is an independent serial sum over a strided slice, so
  // the result is thread-count invariant.
  const std::int64_t units =
      static_cast<std::int64_t>(nh.spec.joints) * static_cast<std::int64_t>(len);
#pragma omp parallel for schedule(static)
  for (std::int64_t u = 0; u < units; ++u) {
    const std::uint32_t k = static_cast<std::uint32_t>(u / len);
    const std::size_t bin = static_cast<std::size_t>(u % len);
    const double* p = nh.joint_data(k);
    double acc = 0.0;
    switch (axis) {
      case Axis::X:
        for (std::size_t i = bin; i < cells; i += w) acc += p[i];
        break;
      case Axis::Y:
        for (std::size_t z = 0; z < nh.spec.depth; ++z) {
          const double* row = p + z * hw + bin * w;
          for (std::size_t x = 0; x < w; ++x) acc += row[x];
        }
        break;
      case Axis::Z: {
        const double* slab = p + bin * hw;
        for (std::size_t i = 0; i < hw; ++i) acc += slab[i];
        break;
      }
    }
    out[k].probs[bin] = acc;
  }
  return out;
}

double vector_integral(const HeatVector& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.probs.size(); ++i)
    acc += static_cast<double>(i) * v.probs[i];
  return acc;
}

JointSet two_step_decode(const NormalizedHeatmap& nh) {
  JointSet out(nh.spec.joints);
  for (Axis a : kAxes) {
    const auto vectors = marginalize(nh, a);
    for (std::uint32_t k = 0; k < nh.spec.joints; ++k)
      out.coords[k][static_cast<int>(a)] = vector_integral(vectors[k]);
  }
  return out;
}

DecodeGradient integral_backward(const NormalizedHeatmap& nh,
                                 const JointSet& decoded,
                                 const JointGradient& upstream) {
  nh.spec.validate();
  if (decoded.joint_count() != nh.spec.joints ||
      upstream.size() != nh.spec.joints)
    throw contract_error("integral_backward: joint count mismatch");
  const std::size_t cells = nh.spec.cell_count();
  const std::size_t w = nh.spec.width;
  const std::size_t hw = w * nh.spec.height;
  DecodeGradient grad(nh.spec);
  const std::size_t total = nh.spec.value_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(total); ++ii) {
    const std::size_t idx = static_cast<std::size_t>(ii);
    const std::size_t k = idx / cells;
    const std::size_t i = idx % cells;
    const double x = static_cast<double>(i % w);
    const double y = static_cast<double>((i / w) % nh.spec.height);
    const double z = static_cast<double>(i / hw);
    const double g =
        upstream[k][0] * (x - decoded.coords[k][0]) +
        upstream[k][1] * (y - decoded.coords[k][1]) +
        upstream[k][2] * (z - decoded.coords[k][2]);
    grad.d_scores[idx] = nh.probs[idx] * g;
  }
  return grad;
}

DecodeGradient integral_backward(const Heatmap& h,
                                 const JointGradient& upstream) {
  const NormalizedHeatmap nh = normalize(h);
  return integral_backward(nh, integral_decode(nh), upstream);
}

DecodeGradient softmax_backward(const NormalizedHeatmap& nh,
                                const std::vector<double>& d_probs) {
  nh.spec.validate();
  if (d_probs.size() != nh.spec.value_count())
    throw contract_error("softmax_backward: gradient size mismatch");
  const std::size_t cells = nh.spec.cell_count();
  DecodeGradient grad(nh.spec);
  for (std::uint32_t k = 0; k < nh.spec.joints; ++k) {
    const double* p = nh.joint_data(k);
    const double* g = d_probs.data() + static_cast<std::size_t>(k) * cells;
    const double inner = par::chunked_sum(cells, [&](std::size_t i) {
      return g[i] * p[i];
    });
    double* out = grad.d_scores.data() + static_cast<std::size_t>(k) * cells;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(cells); ++i) {
      const std::size_t idx = static_cast<std::size_t>(i);
      out[idx] = p[idx] * (g[idx] - inner);
    }
  }
  return grad;
}

}  // namespace posecast
