#include "posecast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <json.hpp>

namespace posecast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool fully_masked(const JointSet& js, std::size_t k) {
  return js.mask[k][0] && js.mask[k][1] && js.mask[k][2];
}

bool planar_masked(const JointSet& js, std::size_t k) {
  return js.mask[k][0] && js.mask[k][1];
}

double planar_dist(const PoseEvalItem& it, std::size_t k) {
  const double dx = it.pred.coords[k][0] - it.gt.coords[k][0];
  const double dy = it.pred.coords[k][1] - it.gt.coords[k][1];
  return std::hypot(dx, dy);
}

double dist3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void require_items(std::span<const PoseEvalItem> items, const char* op) {
  if (items.empty())
    throw contract_error(std::string(op) + ": empty item set");
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void PoseEvalItem::validate() const {
  if (pred.joint_count() != gt.joint_count())
    throw contract_error("pose eval item: pred/gt joint count mismatch");
  if (!(head_length > 0.0))
    throw contract_error("pose eval item: head_length must be > 0");
  if (!(person_scale > 0.0))
    throw contract_error("pose eval item: person_scale must be > 0");
  if (per_joint_kappa.size() != gt.joint_count())
    throw contract_error("pose eval item: kappa count mismatch");
  for (double k : per_joint_kappa)
    if (!(k > 0.0)) throw contract_error("pose eval item: kappas must be > 0");
}

std::array<double, 3> SimilarityTransform::apply(
    const std::array<double, 3>& p) const {
  std::array<double, 3> out;
  for (int r = 0; r < 3; ++r)
    out[r] = scale * (rotation[r][0] * p[0] + rotation[r][1] * p[1] +
                      rotation[r][2] * p[2]) +
             translation[r];
  return out;
}

double pckh(std::span<const PoseEvalItem> items, double alpha) {
  require_items(items, "pckh");
  if (alpha < 0.0) throw contract_error("pckh: alpha must be >= 0");
  std::size_t hits = 0, total = 0;
  for (const auto& it : items) {
    it.validate();
    for (std::size_t k = 0; k < it.gt.joint_count(); ++k) {
      if (!planar_masked(it.gt, k)) continue;
      ++total;
      if (planar_dist(it, k) < alpha * it.head_length) ++hits;
    }
  }
  if (total == 0) throw contract_error("pckh: no supervised planar joints");
  return static_cast<double>(hits) / static_cast<double>(total);
}

double auc(std::span<const PoseEvalItem> items) {
  require_items(items, "auc");
  double sum = 0.0;
  for (int i = 0; i <= 50; ++i) sum += pckh(items, 0.01 * i);
  return sum / 51.0;
}

double mpjpe(std::span<const PoseEvalItem> items) {
  require_items(items, "mpjpe");
  double sum = 0.0;
  std::size_t total = 0;
  for (const auto& it : items) {
    for (std::size_t k = 0; k < it.gt.joint_count(); ++k) {
      if (!fully_masked(it.gt, k)) continue;
      sum += dist3(it.pred.coords[k], it.gt.coords[k]);
      ++total;
    }
  }
  if (total == 0) throw contract_error("mpjpe: no fully supervised joints");
  return sum / static_cast<double>(total);
}

ProcrustesResult procrustes_align(const JointSet& pred, const JointSet& gt) {
  if (pred.joint_count() != gt.joint_count())
    throw contract_error("procrustes_align: joint count mismatch");
  std::vector<std::size_t> used;
  for (std::size_t k = 0; k < gt.joint_count(); ++k)
    if (fully_masked(gt, k) && fully_masked(pred, k)) used.push_back(k);
  if (used.size() < 3)
    throw degeneracy_error("procrustes_align: need at least 3 joints");

  const std::size_t n = used.size();
  Eigen::MatrixXd P(3, n), G(3, n);
  for (std::size_t i = 0; i < n; ++i)
    for (int a = 0; a < 3; ++a) {
      P(a, i) = pred.coords[used[i]][a];
      G(a, i) = gt.coords[used[i]][a];
    }
  const Eigen::Vector3d pc = P.rowwise().mean();
  const Eigen::Vector3d gc = G.rowwise().mean();
  P.colwise() -= pc;
  G.colwise() -= gc;

  const double p_norm2 = P.squaredNorm();
  // Collinear (or coincident) configurations leave the rotation
  // under-determined.
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> shape_svd(P);
    const auto& sv = shape_svd.singularValues();
    if (sv(0) <= 0.0 || sv(1) <= 1e-12 * sv(0))
      throw degeneracy_error("procrustes_align: rank-deficient configuration");
  }

  const Eigen::Matrix3d M = G * P.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d U = svd.matrixU();
  const Eigen::Matrix3d V = svd.matrixV();
  Eigen::Vector3d d(1.0, 1.0, 1.0);
  if ((U * V.transpose()).determinant() < 0.0) d(2) = -1.0;
  const Eigen::Matrix3d R = U * d.asDiagonal() * V.transpose();
  const double scale = svd.singularValues().dot(d) / p_norm2;
  const Eigen::Vector3d t = gc - scale * R * pc;

  ProcrustesResult res;
  res.transform.scale = scale;
  for (int r = 0; r < 3; ++r) {
    res.transform.translation[r] = t(r);
    for (int c = 0; c < 3; ++c) res.transform.rotation[r][c] = R(r, c);
  }
  res.aligned = pred;
  for (std::size_t k = 0; k < pred.joint_count(); ++k)
    res.aligned.coords[k] = res.transform.apply(pred.coords[k]);
  return res;
}

double pa_mpjpe(std::span<const PoseEvalItem> items) {
  require_items(items, "pa_mpjpe");
  double sum = 0.0;
  std::size_t total = 0;
  for (const auto& it : items) {
    const ProcrustesResult aligned = procrustes_align(it.pred, it.gt);
    for (std::size_t k = 0; k < it.gt.joint_count(); ++k) {
      if (!fully_masked(it.gt, k)) continue;
      sum += dist3(aligned.aligned.coords[k], it.gt.coords[k]);
      ++total;
    }
  }
  if (total == 0)
    throw contract_error("pa_mpjpe: no fully supervised joints");
  return sum / static_cast<double>(total);
}

double oks(const PoseEvalItem& item) {
  item.validate();
  double sum = 0.0;
  std::size_t total = 0;
  for (std::size_t k = 0; k < item.gt.joint_count(); ++k) {
    if (!planar_masked(item.gt, k)) continue;
    const double d = planar_dist(item, k);
    const double s = item.person_scale * item.per_joint_kappa[k];
    sum += std::exp(-d * d / (2.0 * s * s));
    ++total;
  }
  if (total == 0) throw contract_error("oks: no supervised planar joints");
  return sum / static_cast<double>(total);
}

std::vector<double> default_oks_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.50 + 0.05 * i);
  return t;
}

std::map<double, double> ap_over_oks(std::span<const PoseEvalItem> items,
                                     std::span<const double> thresholds) {
  require_items(items, "ap_over_oks");
  std::vector<double> scores;
  scores.reserve(items.size());
  for (const auto& it : items) scores.push_back(oks(it));
  std::map<double, double> out;
  for (double t : thresholds) {
    std::size_t hits = 0;
    for (double s : scores)
      if (s >= t) ++hits;
    out[t] = static_cast<double>(hits) / static_cast<double>(scores.size());
  }
  return out;
}

MetricReport evaluate_items(std::span<const PoseEvalItem> items,
                            double stride) {
  require_items(items, "evaluate_items");
  MetricReport rep;
  rep.item_count = items.size();
  for (int i = 0; i <= 50; ++i) {
    const double alpha = 0.01 * i;
    rep.pckh[alpha] = pckh(items, alpha);
  }
  rep.auc = auc(items);

  bool any_3d = false;
  for (const auto& it : items)
    for (std::size_t k = 0; k < it.gt.joint_count(); ++k)
      if (fully_masked(it.gt, k)) any_3d = true;
  rep.mpjpe = any_3d ? mpjpe(items) * stride : kNaN;
  rep.pa_mpjpe = any_3d ? pa_mpjpe(items) * stride : kNaN;

  const std::vector<double> thresholds = default_oks_thresholds();
  rep.ap_per_threshold = ap_over_oks(items, thresholds);
  double ap_sum = 0.0;
  for (const auto& [t, v] : rep.ap_per_threshold) ap_sum += v;
  rep.ap = ap_sum / static_cast<double>(rep.ap_per_threshold.size());

  // Diagnostics over supervised axes.
  double err_sum = 0.0;
  std::size_t err_n = 0;
  std::array<double, 3> abs_sum = {0.0, 0.0, 0.0};
  std::array<std::size_t, 3> abs_n = {0, 0, 0};
  for (const auto& it : items) {
    for (std::size_t k = 0; k < it.gt.joint_count(); ++k) {
      double sq = 0.0;
      bool any = false;
      for (int a = 0; a < 3; ++a) {
        if (!it.gt.mask[k][a]) continue;
        const double d = it.pred.coords[k][a] - it.gt.coords[k][a];
        sq += d * d;
        abs_sum[a] += std::abs(d);
        ++abs_n[a];
        any = true;
      }
      if (any) {
        err_sum += std::sqrt(sq);
        ++err_n;
      }
    }
  }
  rep.mean_error = err_n > 0 ? err_sum / static_cast<double>(err_n) * stride : kNaN;
  for (int a = 0; a < 3; ++a)
    rep.mean_abs_error[a] =
        abs_n[a] > 0 ? abs_sum[a] / static_cast<double>(abs_n[a]) * stride : kNaN;
  return rep;
}

std::string MetricReport::to_json() const {
  nlohmann::json j;
  j["pckh"] = nlohmann::json::array();
  for (const auto& [alpha, v] : pckh)
    j["pckh"].push_back({{"alpha", alpha}, {"value", v}});
  j["auc"] = auc;
  j["mpjpe"] = std::isnan(mpjpe) ? nlohmann::json() : nlohmann::json(mpjpe);
  j["pa_mpjpe"] =
      std::isnan(pa_mpjpe) ? nlohmann::json() : nlohmann::json(pa_mpjpe);
  j["ap"] = ap;
  j["ap_per_threshold"] = nlohmann::json::array();
  for (const auto& [t, v] : ap_per_threshold)
    j["ap_per_threshold"].push_back({{"threshold", t}, {"value", v}});
  j["mean_error"] = mean_error;
  j["mean_abs_error"] = nlohmann::json::array();
  for (int a = 0; a < 3; ++a)
    j["mean_abs_error"].push_back(std::isnan(mean_abs_error[a])
                                      ? nlohmann::json()
                                      : nlohmann::json(mean_abs_error[a]));
  j["item_count"] = item_count;
  return j.dump(2);
}

std::string MetricReport::to_csv() const {
  std::string out = "metric,param,value\n";
  auto row = [&out](const std::string& name, const std::string& param,
                    double v) {
    out += name + "," + param + "," + format_value(v) + "\n";
  };
  row("auc", "", auc);
  row("mpjpe", "", mpjpe);
  row("pa_mpjpe", "", pa_mpjpe);
  row("ap", "", ap);
  row("mean_error", "", mean_error);
  row("mean_abs_error", "x", mean_abs_error[0]);
  row("mean_abs_error", "y", mean_abs_error[1]);
  row("mean_abs_error", "z", mean_abs_error[2]);
  for (const auto& [t, v] : ap_per_threshold)
    row("ap", format_value(t), v);
  for (const auto& [alpha, v] : pckh) row("pckh", format_value(alpha), v);
  return out;
}

}  // namespace posecast
