#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace elbowsig {

/// Identifies one deterministic pseudo-random stream. Streams for
/// Monte-Carlo units of work (reference dataset r, replicate s, fit at k)
/// are derived from a parent spec with substream(), a pure function of
/// (master_seed, stream_id, index). Identical specs yield identical draws
/// regardless of thread schedule.
struct RngSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    RngSpec substream(std::uint64_t index) const;
};

/// Deterministic random stream. The engine (mt19937_64) is fully specified
/// by the standard and all variate transforms below are hand-rolled, so a
/// given RngSpec reproduces the same draws on every run.
class RngStream {
public:
    explicit RngStream(const RngSpec& spec);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01();

    /// Uniform on [lo, hi]; result clamped so it never leaves the interval.
    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller (spare value cached).
    double normal();
    double normal(double mean, double sd);

    /// Uniform integer in [0, n), rejection-sampled (no modulo bias).
    std::size_t uniform_index(std::size_t n);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// First k entries of a uniformly random permutation of {0, ..., n-1}
/// (partial Fisher-Yates), in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    RngStream& rng);

}  // namespace elbowsig
