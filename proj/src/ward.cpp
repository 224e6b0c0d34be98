#include "elbowsig/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace elbowsig {

Dendrogram ward_dendrogram(const Dataset& data) {
    const Matrix& X = data.values();
    const int n = static_cast<int>(X.rows());

    Dendrogram out;
    out.n_points = n;
    out.merges.reserve(static_cast<size_t>(n - 1));

    // Slot-based condensed matrix: each slot holds one active cluster and a
    // merge reuses the surviving slot. d(i,j) is the Ward cost (SSE increase)
    // of merging slots i and j; for singletons that is ||x_i - x_j||^2 / 2,
    // and the Lance-Williams update below preserves the interpretation.
    Matrix d(n, n);
    for (int i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double cost = 0.5 * (X.row(i) - X.row(j)).squaredNorm();
            d(i, j) = cost;
            d(j, i) = cost;
        }
    }

    std::vector<int> node(static_cast<size_t>(n));  // node id currently held by each slot
    std::iota(node.begin(), node.end(), 0);
    std::vector<double> size(static_cast<size_t>(n), 1.0);
    std::vector<bool> alive(static_cast<size_t>(n), true);

    for (int t = 0; t < n - 1; ++t) {
        int best_i = -1;
        int best_j = -1;
        int best_lo = -1;
        int best_hi = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (!alive[static_cast<size_t>(i)]) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!alive[static_cast<size_t>(j)]) continue;
                const double cost = d(i, j);
                const int lo = std::min(node[static_cast<size_t>(i)], node[static_cast<size_t>(j)]);
                const int hi = std::max(node[static_cast<size_t>(i)], node[static_cast<size_t>(j)]);
                // Ties broken lexicographically on the merged node-id pair so
                // the tree is independent of slot layout.
                if (cost < best ||
                    (cost == best && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
                    best = cost;
                    best_i = i;
                    best_j = j;
                    best_lo = lo;
                    best_hi = hi;
                }
            }
        }

        const double sa = size[static_cast<size_t>(best_i)];
        const double sb = size[static_cast<size_t>(best_j)];
        for (int c = 0; c < n; ++c) {
            if (!alive[static_cast<size_t>(c)] || c == best_i || c == best_j) continue;
            const double sc = size[static_cast<size_t>(c)];
            const double updated =
                ((sa + sc) * d(best_i, c) + (sb + sc) * d(best_j, c) - sc * best) / (sa + sb + sc);
            d(best_i, c) = updated;
            d(c, best_i) = updated;
        }

        out.merges.push_back({best_lo, best_hi, best});
        node[static_cast<size_t>(best_i)] = n + t;
        size[static_cast<size_t>(best_i)] = sa + sb;
        alive[static_cast<size_t>(best_j)] = false;
    }
    return out;
}

}  // namespace elbowsig
