#pragma once

#include "elbowsig/clustering.hpp"

#include <vector>

namespace elbowsig {

/// Elbow statistics over k = 2..k_max, aligned with k_values.
struct ElbowSequence {
    std::vector<int> k_values;
    std::vector<double> delta;
    std::vector<bool> degenerate_flags;  // true where the denominator guard fired
};

/// delta_k = -(H_{k+1} - 2 H_k + H_{k-1}) / (H_{k+1} - H_k) from H given over
/// k = 1..k_max+1 (at least three entries). Denominators with magnitude below
/// 1e-12 * max(1, H_1) yield delta_k = 0 with the degenerate flag set.
ElbowSequence elbow_sequence(const std::vector<double>& H);
ElbowSequence elbow_sequence(const HeterogeneitySequence& H);

}  // namespace elbowsig
