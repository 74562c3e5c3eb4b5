#pragma once

#include <array>
#include <string>
#include <vector>

#include "posecast/decode.hpp"
#include "posecast/grid.hpp"

namespace posecast {

enum class HeatmapLoss { H1_gaussian_mse, H2_onehot_ce, H3_binary_ce, none };
enum class JointLossKind { L1, L2, none };
enum class Decomposition { direct, two_step };

std::string to_string(HeatmapLoss v);
std::string to_string(JointLossKind v);
std::string to_string(Decomposition v);
HeatmapLoss heatmap_loss_from_string(const std::string& s);
JointLossKind joint_loss_from_string(const std::string& s);
Decomposition decomposition_from_string(const std::string& s);

/// Which loss terms apply and how they combine.
///
/// Under the two_step decomposition the heatmap term supervises per-axis
/// probability marginals against discretized 1D Gaussians instead of the
/// full grid, which is what lets samples with unsupervised axes (2D data on
/// a 3D grid) still contribute heatmap supervision on their known axes.
struct LossSpec {
  HeatmapLoss heatmap_loss = HeatmapLoss::H1_gaussian_mse;
  JointLossKind joint_loss = JointLossKind::L1;
  double joint_weight = 1.0;
  Decomposition decomposition = Decomposition::direct;
  double gaussian_sigma = 1.0;
  double h3_radius = 15.0;

  void validate() const;  // throws contract_error

  std::string to_json() const;
  static LossSpec from_json(const std::string& text);

  friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

struct LossValue {
  double total = 0.0;
  double heatmap_term = 0.0;
  double joint_term = 0.0;
  DecodeGradient d_scores;
};

struct HeatmapLossResult {
  double value = 0.0;
  DecodeGradient d_scores;
};

struct JointLossResult {
  double value = 0.0;
  JointGradient d_coords;
};

struct VectorLossResult {
  double value = 0.0;
  // axis contributions to value; zero for unsupervised axes
  std::array<double, 3> axis_terms = {0.0, 0.0, 0.0};
  // d value / d marginal, indexed [axis][joint][bin]
  std::array<std::vector<std::vector<double>>, 3> d_vectors;
};

/// Peak-1 Gaussian rendered around each joint's continuous center (3D
/// distance on volumetric grids). Centers outside the grid are clamped to
/// the grid bounds; `clamped`, when given, receives the number of clamped
/// joints so callers can flag the sample.
Heatmap gaussian_target(const GridSpec& spec, const JointSet& gt, double sigma,
                        std::size_t* clamped = nullptr);

/// Discretized 1D Gaussian, peak 1 at `center`, renormalized to sum 1 so it
/// is comparable to a probability marginal.
std::vector<double> gaussian_vector_target(std::size_t len, double center,
                                           double sigma);

/// Mean squared error over all cells; gradient 2*(pred - target)/N.
HeatmapLossResult h1_loss(const Heatmap& pred, const Heatmap& target);

/// Per joint, cross entropy of the softmax against the one-hot cell nearest
/// the ground truth (ties toward the lower index), averaged over joints.
HeatmapLossResult h2_loss(const Heatmap& pred, const JointSet& gt);

/// Per cell, binary cross entropy of logistic(score) against a ball label:
/// 1 within `radius` cells of the joint, 0 outside. Mean over all cells.
HeatmapLossResult h3_loss(const Heatmap& pred, const JointSet& gt,
                          double radius);

/// L1/L2 distance between decoded and ground-truth coordinates, averaged
/// over supervised axes only. Throws contract_error when nothing is
/// supervised.
JointLossResult joint_loss(const JointSet& pred, const JointSet& gt,
                           JointLossKind kind);

/// Mean squared error between predicted axis marginals and discretized 1D
/// Gaussian targets, averaged over supervised (joint, axis) pairs.
/// Unsupervised axes contribute exactly zero.
VectorLossResult vector_loss(const std::vector<HeatVector>& vx,
                             const std::vector<HeatVector>& vy,
                             const std::vector<HeatVector>& vz,
                             const JointSet& gt, double sigma);

/// Evaluates the configured heatmap term, decodes with the configured
/// decomposition, evaluates the configured joint term, and accumulates every
/// gradient path into d_scores. total = heatmap_term + joint_weight *
/// joint_term.
LossValue compose_loss(const LossSpec& spec, const Heatmap& pred,
                       const JointSet& gt);

}  // namespace posecast
