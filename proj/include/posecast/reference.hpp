#pragma once

#include <vector>

#include "posecast/decode.hpp"
#include "posecast/grid.hpp"

// Straight-line serial implementations of the hot kernels. These are the
// ground truth the OpenMP kernels are tested against and the baseline the
// benchmark compares them to. No pragmas, no chunking: one loop nest each,
// summing left to right.
namespace posecast::reference {

JointSet argmax_decode(const Heatmap& h);
NormalizedHeatmap normalize(const Heatmap& h);
JointSet integral_decode(const NormalizedHeatmap& nh);
std::vector<HeatVector> marginalize(const NormalizedHeatmap& nh, Axis axis);
DecodeGradient integral_backward(const Heatmap& h,
                                 const JointGradient& upstream);

/// Peak-1 Gaussian rendered around each joint's continuous center.
Heatmap gaussian_target(const GridSpec& spec, const JointSet& gt,
                        double sigma);

/// Mean squared error over all cells.
double h1_loss_value(const Heatmap& pred, const Heatmap& target);

}  // namespace posecast::reference
