#include "posecast/losses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <json.hpp>

#include "posecast/parallel.hpp"

namespace posecast {

namespace {

double clamp_coord(double v, std::uint32_t len, bool* flagged) {
  const double hi = static_cast<double>(len - 1);
  if (v < 0.0) {
    *flagged = true;
    return 0.0;
  }
  if (v > hi) {
    *flagged = true;
    return hi;
  }
  return v;
}

// Nearest integer, ties toward the lower index.
std::int64_t round_half_down(double v) {
  return static_cast<std::int64_t>(std::ceil(v - 0.5));
}

// Direct-mode heatmap losses need every grid axis of every joint supervised
// (z only exists on volumetric grids).
void require_grid_supervision(const GridSpec& spec, const JointSet& gt,
                              const char* op) {
  if (gt.joint_count() != spec.joints)
    throw contract_error(std::string(op) + ": joint count mismatch");
  for (std::size_t k = 0; k < gt.joint_count(); ++k) {
    if (!gt.mask[k][0] || !gt.mask[k][1] || (spec.is_3d() && !gt.mask[k][2]))
      throw contract_error(
          std::string(op) +
          ": all grid axes must be supervised (use the two_step "
          "decomposition for partially supervised samples)");
  }
}

double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

// Numerically stable BCE of logistic(s) against label y in {0, 1}.
double bce_with_logit(double s, double y) {
  return std::max(s, 0.0) - s * y + std::log1p(std::exp(-std::abs(s)));
}

}  // namespace

std::string to_string(HeatmapLoss v) {
  switch (v) {
    case HeatmapLoss::H1_gaussian_mse: return "H1_gaussian_mse";
    case HeatmapLoss::H2_onehot_ce: return "H2_onehot_ce";
    case HeatmapLoss::H3_binary_ce: return "H3_binary_ce";
    case HeatmapLoss::none: return "none";
  }
  return "none";
}

std::string to_string(JointLossKind v) {
  switch (v) {
    case JointLossKind::L1: return "L1";
    case JointLossKind::L2: return "L2";
    case JointLossKind::none: return "none";
  }
  return "none";
}

std::string to_string(Decomposition v) {
  return v == Decomposition::direct ? "direct" : "two_step";
}

HeatmapLoss heatmap_loss_from_string(const std::string& s) {
  if (s == "H1_gaussian_mse") return HeatmapLoss::H1_gaussian_mse;
  if (s == "H2_onehot_ce") return HeatmapLoss::H2_onehot_ce;
  if (s == "H3_binary_ce") return HeatmapLoss::H3_binary_ce;
  if (s == "none") return HeatmapLoss::none;
  throw contract_error("unknown heatmap_loss: " + s);
}

JointLossKind joint_loss_from_string(const std::string& s) {
  if (s == "L1") return JointLossKind::L1;
  if (s == "L2") return JointLossKind::L2;
  if (s == "none") return JointLossKind::none;
  throw contract_error("unknown joint_loss: " + s);
}

Decomposition decomposition_from_string(const std::string& s) {
  if (s == "direct") return Decomposition::direct;
  if (s == "two_step") return Decomposition::two_step;
  throw contract_error("unknown decomposition: " + s);
}

void LossSpec::validate() const {
  if (heatmap_loss == HeatmapLoss::none && joint_loss == JointLossKind::none)
    throw contract_error("loss spec: at least one term must be enabled");
  if (!(joint_weight >= 0.0) || !std::isfinite(joint_weight))
    throw contract_error("loss spec: joint_weight must be >= 0");
  if (!(gaussian_sigma > 0.0)) throw contract_error("loss spec: gaussian_sigma must be > 0");
  if (!(h3_radius > 0.0)) throw contract_error("loss spec: h3_radius must be > 0");
}

std::string LossSpec::to_json() const {
  nlohmann::json j;
  j["heatmap_loss"] = to_string(heatmap_loss);
  j["joint_loss"] = to_string(joint_loss);
  j["joint_weight"] = joint_weight;
  j["decomposition"] = to_string(decomposition);
  j["gaussian_sigma"] = gaussian_sigma;
  j["h3_radius"] = h3_radius;
  return j.dump();
}

LossSpec LossSpec::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  LossSpec spec;
  spec.heatmap_loss = heatmap_loss_from_string(j.at("heatmap_loss"));
  spec.joint_loss = joint_loss_from_string(j.at("joint_loss"));
  spec.joint_weight = j.at("joint_weight").get<double>();
  spec.decomposition = decomposition_from_string(j.at("decomposition"));
  spec.gaussian_sigma = j.at("gaussian_sigma").get<double>();
  spec.h3_radius = j.at("h3_radius").get<double>();
  spec.validate();
  return spec;
}

Heatmap gaussian_target(const GridSpec& spec, const JointSet& gt, double sigma,
                        std::size_t* clamped) {
  spec.validate();
  if (gt.joint_count() != spec.joints)
    throw contract_error("gaussian_target: joint count mismatch");
  if (!(sigma > 0.0)) throw contract_error("gaussian_target: sigma must be > 0");

  Heatmap out(spec);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const std::size_t cells = spec.cell_count();
  std::size_t flagged_joints = 0;

  for (std::uint32_t k = 0; k < spec.joints; ++k) {
    bool flagged = false;
    const double cx = clamp_coord(gt.coords[k][0], spec.width, &flagged);
    const double cy = clamp_coord(gt.coords[k][1], spec.height, &flagged);
    const double cz =
        spec.is_3d() ? clamp_coord(gt.coords[k][2], spec.depth, &flagged) : 0.0;
    if (flagged) ++flagged_joints;
    double* t = out.joint_data(k);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(cells); ++i) {
      const std::size_t idx = static_cast<std::size_t>(i);
      const double dx = static_cast<double>(idx % spec.width) - cx;
      const double dy =
          static_cast<double>((idx / spec.width) % spec.height) - cy;
      const double dz =
          spec.is_3d()
              ? static_cast<double>(idx / (static_cast<std::size_t>(spec.width) *
                                           spec.height)) -
                    cz
              : 0.0;
      t[idx] = std::exp(-(dx * dx + dy * dy + dz * dz) * inv);
    }
  }
  if (clamped != nullptr) *clamped = flagged_joints;
  return out;
}

std::vector<double> gaussian_vector_target(std::size_t len, double center,
                                           double sigma) {
  if (len == 0) throw contract_error("gaussian_vector_target: empty axis");
  bool flagged = false;
  const double c = clamp_coord(center, static_cast<std::uint32_t>(len), &flagged);
  std::vector<double> t(len);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  double sum = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double d = static_cast<double>(i) - c;
    t[i] = std::exp(-d * d * inv);
    sum += t[i];
  }
  for (double& v : t) v /= sum;
  return t;
}

HeatmapLossResult h1_loss(const Heatmap& pred, const Heatmap& target) {
  if (pred.spec != target.spec)
    throw contract_error("h1_loss: spec mismatch");
  const std::size_t n = pred.scores.size();
  HeatmapLossResult res;
  res.d_scores = DecodeGradient(pred.spec);
  res.value = par::chunked_sum(n, [&](std::size_t i) {
    const double d = pred.scores[i] - target.scores[i];
    return d * d;
  }) / static_cast<double>(n);
  const double scale = 2.0 / static_cast<double>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const std::size_t idx = static_cast<std::size_t>(i);
    res.d_scores.d_scores[idx] = scale * (pred.scores[idx] - target.scores[idx]);
  }
  return res;
}

namespace {

HeatmapLossResult h2_loss_core(const NormalizedHeatmap& nh,
                               const JointSet& gt) {
  const GridSpec& spec = nh.spec;
  const std::size_t cells = spec.cell_count();
  HeatmapLossResult res;
  res.d_scores = DecodeGradient(spec);
  const double inv_k = 1.0 / static_cast<double>(spec.joints);
  double value = 0.0;
  for (std::uint32_t k = 0; k < spec.joints; ++k) {
    const std::int64_t tx = round_half_down(gt.coords[k][0]);
    const std::int64_t ty = round_half_down(gt.coords[k][1]);
    const std::int64_t tz = spec.is_3d() ? round_half_down(gt.coords[k][2]) : 0;
    if (tx < 0 || tx >= spec.width || ty < 0 || ty >= spec.height || tz < 0 ||
        tz >= spec.depth)
      throw contract_error("h2_loss: ground truth rounds outside the grid");
    const std::size_t target =
        (static_cast<std::size_t>(tz) * spec.height + static_cast<std::size_t>(ty)) *
            spec.width +
        static_cast<std::size_t>(tx);
    const double* p = nh.joint_data(k);
    value += -std::log(std::max(p[target], 1e-300));
    double* g = res.d_scores.d_scores.data() + static_cast<std::size_t>(k) * cells;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(cells); ++i) {
      const std::size_t idx = static_cast<std::size_t>(i);
      g[idx] = (p[idx] - (idx == target ? 1.0 : 0.0)) * inv_k;
    }
  }
  res.value = value * inv_k;
  return res;
}

}  // namespace

HeatmapLossResult h2_loss(const Heatmap& pred, const JointSet& gt) {
  if (gt.joint_count() != pred.spec.joints)
    throw contract_error("h2_loss: joint count mismatch");
  return h2_loss_core(normalize(pred), gt);
}

HeatmapLossResult h3_loss(const Heatmap& pred, const JointSet& gt,
                          double radius) {
  pred.spec.validate();
  if (gt.joint_count() != pred.spec.joints)
    throw contract_error("h3_loss: joint count mismatch");
  if (!(radius > 0.0)) throw contract_error("h3_loss: radius must be > 0");
  const GridSpec& spec = pred.spec;
  const std::size_t cells = spec.cell_count();
  const std::size_t n = pred.scores.size();
  const double r2 = radius * radius;
  HeatmapLossResult res;
  res.d_scores = DecodeGradient(spec);
  const double inv_n = 1.0 / static_cast<double>(n);

  auto label_at = [&](std::size_t k, std::size_t i) {
    const double dx = static_cast<double>(i % spec.width) - gt.coords[k][0];
    const double dy =
        static_cast<double>((i / spec.width) % spec.height) - gt.coords[k][1];
    const double dz =
        spec.is_3d()
            ? static_cast<double>(i / (static_cast<std::size_t>(spec.width) *
                                       spec.height)) -
                  gt.coords[k][2]
            : 0.0;
    return (dx * dx + dy * dy + dz * dz) <= r2 ? 1.0 : 0.0;
  };

  res.value = par::chunked_sum(n, [&](std::size_t i) {
    return bce_with_logit(pred.scores[i], label_at(i / cells, i % cells));
  }) * inv_n;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const std::size_t idx = static_cast<std::size_t>(i);
    res.d_scores.d_scores[idx] =
        (logistic(pred.scores[idx]) - label_at(idx / cells, idx % cells)) *
        inv_n;
  }
  return res;
}

JointLossResult joint_loss(const JointSet& pred, const JointSet& gt,
                           JointLossKind kind) {
  if (kind == JointLossKind::none)
    throw contract_error("joint_loss: kind must be L1 or L2");
  if (pred.joint_count() != gt.joint_count())
    throw contract_error("joint_loss: joint count mismatch");
  std::size_t supervised = 0;
  for (std::size_t k = 0; k < gt.joint_count(); ++k)
    for (int a = 0; a < 3; ++a)
      if (gt.mask[k][a]) ++supervised;
  if (supervised == 0)
    throw contract_error("joint_loss: no supervised axis");

  JointLossResult res;
  res.d_coords.assign(pred.joint_count(), {0.0, 0.0, 0.0});
  const double inv = 1.0 / static_cast<double>(supervised);
  double value = 0.0;
  for (std::size_t k = 0; k < gt.joint_count(); ++k) {
    for (int a = 0; a < 3; ++a) {
      if (!gt.mask[k][a]) continue;
      const double d = pred.coords[k][a] - gt.coords[k][a];
      if (kind == JointLossKind::L1) {
        value += std::abs(d);
        res.d_coords[k][a] = (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) * inv;
      } else {
        value += d * d;
        res.d_coords[k][a] = 2.0 * d * inv;
      }
    }
  }
  res.value = value * inv;
  return res;
}

VectorLossResult vector_loss(const std::vector<HeatVector>& vx,
                             const std::vector<HeatVector>& vy,
                             const std::vector<HeatVector>& vz,
                             const JointSet& gt, double sigma) {
  const std::size_t joints = gt.joint_count();
  if (vx.size() != joints || vy.size() != joints || vz.size() != joints)
    throw contract_error("vector_loss: joint count mismatch");

  VectorLossResult res;
  for (int a = 0; a < 3; ++a) {
    res.d_vectors[a].resize(joints);
    const auto& vs = a == 0 ? vx : (a == 1 ? vy : vz);
    for (std::size_t k = 0; k < joints; ++k)
      res.d_vectors[a][k].assign(vs[k].probs.size(), 0.0);
  }

  std::size_t supervised = 0;
  for (std::size_t k = 0; k < joints; ++k)
    for (int a = 0; a < 3; ++a)
      if (gt.mask[k][a]) ++supervised;
  if (supervised == 0) return res;

  const double inv_pairs = 1.0 / static_cast<double>(supervised);
  for (std::size_t k = 0; k < joints; ++k) {
    for (int a = 0; a < 3; ++a) {
      if (!gt.mask[k][a]) continue;
      const auto& v = (a == 0 ? vx : (a == 1 ? vy : vz))[k].probs;
      const std::vector<double> t =
          gaussian_vector_target(v.size(), gt.coords[k][a], sigma);
      const double inv_len = 1.0 / static_cast<double>(v.size());
      double term = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = v[i] - t[i];
        term += d * d;
        res.d_vectors[a][k][i] = 2.0 * d * inv_len * inv_pairs;
      }
      term *= inv_len;
      res.axis_terms[a] += term * inv_pairs;
    }
  }
  res.value = res.axis_terms[0] + res.axis_terms[1] + res.axis_terms[2];
  return res;
}

LossValue compose_loss(const LossSpec& spec, const Heatmap& pred,
                       const JointSet& gt) {
  spec.validate();
  pred.spec.validate();
  if (gt.joint_count() != pred.spec.joints)
    throw contract_error("compose_loss: joint count mismatch");

  LossValue out;
  out.d_scores = DecodeGradient(pred.spec);
  const std::size_t n = pred.scores.size();
  const std::size_t cells = pred.spec.cell_count();

  const bool needs_softmax =
      spec.joint_loss != JointLossKind::none ||
      (spec.heatmap_loss != HeatmapLoss::none &&
       (spec.decomposition == Decomposition::two_step ||
        spec.heatmap_loss == HeatmapLoss::H2_onehot_ce));
  NormalizedHeatmap nh;
  if (needs_softmax) nh = normalize(pred);

  auto accumulate = [&](const std::vector<double>& g, double scale) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
      out.d_scores.d_scores[static_cast<std::size_t>(i)] +=
          scale * g[static_cast<std::size_t>(i)];
  };

  if (spec.heatmap_loss != HeatmapLoss::none) {
    if (spec.decomposition == Decomposition::direct) {
      require_grid_supervision(pred.spec, gt, "compose_loss[direct heatmap]");
      HeatmapLossResult h;
      switch (spec.heatmap_loss) {
        case HeatmapLoss::H1_gaussian_mse:
          h = h1_loss(pred, gaussian_target(pred.spec, gt, spec.gaussian_sigma));
          break;
        case HeatmapLoss::H2_onehot_ce:
          h = h2_loss_core(nh, gt);
          break;
        case HeatmapLoss::H3_binary_ce:
          h = h3_loss(pred, gt, spec.h3_radius);
          break;
        case HeatmapLoss::none: break;
      }
      out.heatmap_term = h.value;
      accumulate(h.d_scores.d_scores, 1.0);
    } else {
      // Two-step: supervise each joint's axis marginals on its supervised
      // axes. Every heatmap loss family uses the 1D Gaussian target here.
      const auto vx = marginalize(nh, Axis::X);
      const auto vy = marginalize(nh, Axis::Y);
      const auto vz = marginalize(nh, Axis::Z);
      const VectorLossResult vl =
          vector_loss(vx, vy, vz, gt, spec.gaussian_sigma);
      out.heatmap_term = vl.value;
      std::vector<double> d_probs(n, 0.0);
#pragma omp parallel for schedule(static)
      for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        const std::size_t idx = static_cast<std::size_t>(ii);
        const std::size_t k = idx / cells;
        const std::size_t i = idx % cells;
        const std::size_t x = i % pred.spec.width;
        const std::size_t y = (i / pred.spec.width) % pred.spec.height;
        const std::size_t z =
            i / (static_cast<std::size_t>(pred.spec.width) * pred.spec.height);
        d_probs[idx] = vl.d_vectors[0][k][x] + vl.d_vectors[1][k][y] +
                       vl.d_vectors[2][k][z];
      }
      const DecodeGradient g = softmax_backward(nh, d_probs);
      accumulate(g.d_scores, 1.0);
    }
  }

  if (spec.joint_loss != JointLossKind::none) {
    const JointSet decoded = spec.decomposition == Decomposition::direct
                                 ? integral_decode(nh)
                                 : two_step_decode(nh);
    const JointLossResult jl = joint_loss(decoded, gt, spec.joint_loss);
    out.joint_term = jl.value;
    const DecodeGradient g = integral_backward(nh, decoded, jl.d_coords);
    accumulate(g.d_scores, spec.joint_weight);
  }

  out.total = out.heatmap_term + spec.joint_weight * out.joint_term;
  return out;
}

}  // namespace posecast
