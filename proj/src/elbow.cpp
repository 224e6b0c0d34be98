#include "elbowsig/elbow.hpp"

#include <cmath>
#include <string>

namespace elbowsig {

ElbowSequence elbow_sequence(const std::vector<double>& H) {
    if (H.size() < 3)
        throw DataError("elbow statistic needs H for k = 1..k_max+1 with k_max >= 2 "
                        "(at least 3 entries), got " + std::to_string(H.size()));
    for (size_t i = 0; i < H.size(); ++i)
        if (!std::isfinite(H[i]))
            throw NumericError("heterogeneity H_" + std::to_string(i + 1) + " is not finite");

    const double eps_den = 1e-12 * std::max(1.0, H.front());
    ElbowSequence out;
    const size_t count = H.size() - 2;
    out.k_values.reserve(count);
    out.delta.reserve(count);
    out.degenerate_flags.reserve(count);
    for (size_t idx = 1; idx + 1 < H.size(); ++idx) {
        const double numerator = H[idx + 1] - 2.0 * H[idx] + H[idx - 1];
        const double denominator = H[idx + 1] - H[idx];
        out.k_values.push_back(static_cast<int>(idx) + 1);
        if (std::abs(denominator) < eps_den) {
            out.delta.push_back(0.0);
            out.degenerate_flags.push_back(true);
        } else {
            const double value = -numerator / denominator;
            if (!std::isfinite(value))
                throw NumericError("elbow statistic overflowed at k=" +
                                   std::to_string(idx + 1));
            out.delta.push_back(value);
            out.degenerate_flags.push_back(false);
        }
    }
    return out;
}

ElbowSequence elbow_sequence(const HeterogeneitySequence& H) { return elbow_sequence(H.H); }

}  // namespace elbowsig
