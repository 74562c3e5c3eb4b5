#pragma once

#include <array>
#include <vector>

#include "posecast/grid.hpp"

namespace posecast {

/// Per joint, the integer coordinates of the maximal cell. Ties break toward
/// the lowest linear index. Not differentiable; quantized to the grid.
JointSet argmax_decode(const Heatmap& h);

/// Per-joint softmax over all cells (computed with max subtraction, which
/// leaves the result mathematically unchanged). Throws contract_error on
/// non-finite scores.
NormalizedHeatmap normalize(const Heatmap& h);

/// Per joint and axis, the probability-weighted mean cell coordinate.
/// Output lies in [0, axis_len - 1]; continuous, sub-cell accurate.
JointSet integral_decode(const NormalizedHeatmap& nh);

/// Collapses each joint's probability grid onto one axis by summing over the
/// two complementary axes. Each result sums to 1.
std::vector<HeatVector> marginalize(const NormalizedHeatmap& nh, Axis axis);

/// Expectation of a 1D probability vector: sum_i i * v[i].
double vector_integral(const HeatVector& v);

/// marginalize + vector_integral per axis; agrees with integral_decode up to
/// floating-point rounding.
JointSet two_step_decode(const NormalizedHeatmap& nh);

/// Upstream gradient of a scalar loss with respect to each joint's decoded
/// (x, y, z).
using JointGradient = std::vector<std::array<double, 3>>;

/// Backward pass of normalize + integral_decode in closed form:
///   d score_k(q) = sum_a upstream[k][a] * prob_k(q) * (coord_a(q) - J_k_a).
/// Per joint the entries sum to 0 (the softmax Jacobian annihilates
/// constants). Throws contract_error on shape mismatch.
DecodeGradient integral_backward(const Heatmap& h,
                                 const JointGradient& upstream);

/// Same backward pass reusing already computed probabilities and joints.
DecodeGradient integral_backward(const NormalizedHeatmap& nh,
                                 const JointSet& decoded,
                                 const JointGradient& upstream);

/// Generic softmax backward: given dL/dprob for every cell, returns
/// dL/dscore. Used to chain losses defined on probabilities (for example
/// losses on axis marginals) back to raw scores.
DecodeGradient softmax_backward(const NormalizedHeatmap& nh,
                                const std::vector<double>& d_probs);

}  // namespace posecast
