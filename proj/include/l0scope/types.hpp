#pragma once

#include <Eigen/Dense>

#include <limits>

namespace l0scope {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// |g_i(x)| above this counts as a nonzero component.
inline constexpr double kDefaultZeroTol = 1e-9;
/// Slack allowed when testing membership in the constraint set.
inline constexpr double kDefaultFeasTol = 1e-9;

}  // namespace l0scope
