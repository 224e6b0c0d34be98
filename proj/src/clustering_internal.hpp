#pragma once

#include "elbowsig/clustering.hpp"

namespace elbowsig::detail {

/// Shared argument validation for the iterative fit operations.
void validate_fit_args(const MethodConfig& config, int k, Eigen::Index n_points);

}  // namespace elbowsig::detail
