#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "posecast/grid.hpp"

namespace posecast {

/// One evaluated pose: predicted and ground-truth joints plus the
/// normalizers the benchmark metrics are defined against.
struct PoseEvalItem {
  JointSet pred;
  JointSet gt;
  double head_length = 1.0;              // PCKh normalizer, image units
  double person_scale = 1.0;             // OKS normalizer
  std::vector<double> per_joint_kappa;   // OKS falloff constants, one per joint

  void validate() const;  // throws contract_error
};

struct SimilarityTransform {
  double scale = 1.0;
  std::array<std::array<double, 3>, 3> rotation = {
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  std::array<double, 3> translation = {0, 0, 0};

  std::array<double, 3> apply(const std::array<double, 3>& p) const;
};

struct ProcrustesResult {
  JointSet aligned;  // transform applied to pred
  SimilarityTransform transform;
};

struct MetricReport {
  std::map<double, double> pckh;       // alpha -> fraction
  double auc = 0.0;
  double mpjpe = 0.0;                  // NaN when no fully 3D items exist
  double pa_mpjpe = 0.0;               // NaN when no fully 3D items exist
  double ap = 0.0;
  std::map<double, double> ap_per_threshold;
  // diagnostics: mean Euclidean error over supervised axes and per-axis MAE
  double mean_error = 0.0;
  std::array<double, 3> mean_abs_error = {0.0, 0.0, 0.0};
  std::size_t item_count = 0;

  std::string to_json() const;
  std::string to_csv() const;  // one row per metric; PCKh curve as alpha rows
};

/// Fraction of supervised (item, joint) pairs whose planar (x, y) distance
/// is strictly below alpha * head_length. Throws contract_error on an empty
/// item set.
double pckh(std::span<const PoseEvalItem> items, double alpha);

/// Mean of pckh over alpha in {0.00, 0.01, ..., 0.50} (51 samples).
double auc(std::span<const PoseEvalItem> items);

/// Mean Euclidean 3D distance over items and fully supervised joints.
double mpjpe(std::span<const PoseEvalItem> items);

/// Least-squares similarity alignment (scale, proper rotation, translation)
/// of pred onto gt over fully supervised joints, solved through the SVD of
/// the cross covariance. Reflections are excluded. Throws degeneracy_error
/// when fewer than 3 joints are available or the configuration is collinear.
ProcrustesResult procrustes_align(const JointSet& pred, const JointSet& gt);

/// mpjpe after per-item Procrustes alignment.
double pa_mpjpe(std::span<const PoseEvalItem> items);

/// Mean over supervised joints of exp(-d^2 / (2 scale^2 kappa^2)) with
/// planar distances.
double oks(const PoseEvalItem& item);

/// For each threshold, the fraction of items whose OKS reaches it; `ap` is
/// their mean. Default thresholds are 0.50, 0.55, ..., 0.95.
std::map<double, double> ap_over_oks(std::span<const PoseEvalItem> items,
                                     std::span<const double> thresholds);

std::vector<double> default_oks_thresholds();

/// Full report over an item set; `stride` converts grid cells to image
/// units at report time.
MetricReport evaluate_items(std::span<const PoseEvalItem> items,
                            double stride = 1.0);

}  // namespace posecast
