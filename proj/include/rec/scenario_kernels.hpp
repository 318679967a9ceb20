// Data-parallel kernels behind scenario sampling and reduction.
//
// Every kernel has a serial reference version and an OpenMP version. Each
// output element is computed by exactly one thread with the same operation
// order as the serial loop, so the two versions agree bit for bit.

#ifndef REC_SCENARIO_KERNELS_HPP
#define REC_SCENARIO_KERNELS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace rec::kernels {

/// Row-major point cloud: `count` points of `dim` coordinates.
struct PointCloud {
    std::size_t count = 0;
    std::size_t dim = 0;
    std::vector<double> coords;

    std::span<const double> point(std::size_t i) const {
        return {coords.data() + i * dim, dim};
    }
};

/// Full symmetric matrix of Euclidean distances, row-major count x count.
std::vector<double> pairwise_distances_serial(const PointCloud& pts);
std::vector<double> pairwise_distances_omp(const PointCloud& pts);

/// Fast-forward candidate scores. For every candidate u not yet kept,
/// score[u] = sum over i not kept, i != u of prob[i] * min(dist(i,u), nearest[i]),
/// where nearest[i] is the distance from i to the closest kept scenario
/// (infinity while nothing is kept). Kept candidates get +infinity.
std::vector<double> fast_forward_scores_serial(std::span<const double> dist,
                                               std::span<const double> prob,
                                               std::span<const double> nearest,
                                               std::span<const char> kept);
std::vector<double> fast_forward_scores_omp(std::span<const double> dist,
                                            std::span<const double> prob,
                                            std::span<const double> nearest,
                                            std::span<const char> kept);

/// Sparse Markov transition row: successor states and their probabilities,
/// ordered by successor index.
struct TransitionRow {
    std::vector<std::uint32_t> next;
    std::vector<double> cumulative;  // running sum of probabilities, last entry 1
};

/// Lookup of the row for (hour, state). Returns nullptr when the pair was
/// never observed; callers then stay in the same state.
using RowLookup = const TransitionRow* (*)(const void* ctx, std::size_t hour, std::uint32_t state);

struct ChainView {
    const void* ctx = nullptr;
    RowLookup lookup = nullptr;
    std::size_t period = 24;
};

/// Uniform double in [0,1) from a 64-bit word; platform independent.
inline double unit_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Deterministic per-path seed derived from (seed, path index).
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

/// Draws `count` state paths of length `horizon`, starting after
/// `initial_state` observed at `initial_hour`. Output is row-major
/// count x horizon. Path i depends only on (seed, i).
std::vector<std::uint32_t> sample_paths_serial(const ChainView& chain, std::uint32_t initial_state,
                                               std::size_t initial_hour, std::size_t count,
                                               std::size_t horizon, std::uint64_t seed);
std::vector<std::uint32_t> sample_paths_omp(const ChainView& chain, std::uint32_t initial_state,
                                            std::size_t initial_hour, std::size_t count,
                                            std::size_t horizon, std::uint64_t seed);

}  // namespace rec::kernels

#endif
