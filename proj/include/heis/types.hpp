#pragma once

#include <Eigen/Dense>

namespace heis {

// Group index n is a session-level parameter, 1 <= n <= 4.  Horizontal
// vectors live in R^{2n}; fixed-capacity storage keeps integrand
// evaluations allocation-free.
inline constexpr int kMaxN = 4;

using HVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2 * kMaxN, 1>;
using HMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2 * kMaxN, 2 * kMaxN>;

}  // namespace heis
