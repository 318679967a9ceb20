#include "rec/scenario_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rec::kernels {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

double score_one(std::span<const double> dist, std::span<const double> prob,
                 std::span<const double> nearest, std::span<const char> kept, std::size_t u) {
    const std::size_t n = prob.size();
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (kept[i] || i == u) continue;
        z += prob[i] * std::min(dist[i * n + u], nearest[i]);
    }
    return z;
}

std::uint32_t draw(const TransitionRow* row, std::uint32_t state, double u) {
    if (row == nullptr || row->next.empty()) return state;
    const auto it = std::upper_bound(row->cumulative.begin(), row->cumulative.end(), u);
    if (it == row->cumulative.end()) return row->next.back();
    return row->next[static_cast<std::size_t>(it - row->cumulative.begin())];
}

void sample_one(const ChainView& chain, std::uint32_t initial_state, std::size_t initial_hour,
                std::size_t horizon, std::uint64_t seed, std::size_t index, std::uint32_t* out) {
    std::mt19937_64 rng(path_seed(seed, index));
    std::uint32_t state = initial_state;
    for (std::size_t t = 0; t < horizon; ++t) {
        const std::size_t hour = (initial_hour + t) % chain.period;
        state = draw(chain.lookup(chain.ctx, hour, state), state, unit_from_bits(rng()));
        out[t] = state;
    }
}

}  // namespace

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over a mixed pair
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + (index + 1) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<double> pairwise_distances_serial(const PointCloud& pts) {
    const std::size_t n = pts.count;
    std::vector<double> out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = distance(pts.point(i), pts.point(j));
            out[i * n + j] = d;
            out[j * n + i] = d;
        }
    return out;
}

std::vector<double> pairwise_distances_omp(const PointCloud& pts) {
    const std::size_t n = pts.count;
    std::vector<double> out(n * n, 0.0);
    const auto ni = static_cast<std::ptrdiff_t>(n);
    // cells (i, j) and (j, i), j > i, both belong to row i's iteration
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < ni; ++i) {
        const auto row = static_cast<std::size_t>(i);
        for (std::size_t j = row + 1; j < n; ++j) {
            const double d = distance(pts.point(row), pts.point(j));
            out[row * n + j] = d;
            out[j * n + row] = d;
        }
    }
    return out;
}

std::vector<double> fast_forward_scores_serial(std::span<const double> dist,
                                               std::span<const double> prob,
                                               std::span<const double> nearest,
                                               std::span<const char> kept) {
    const std::size_t n = prob.size();
    std::vector<double> z(n, std::numeric_limits<double>::infinity());
    for (std::size_t u = 0; u < n; ++u)
        if (!kept[u]) z[u] = score_one(dist, prob, nearest, kept, u);
    return z;
}

std::vector<double> fast_forward_scores_omp(std::span<const double> dist,
                                            std::span<const double> prob,
                                            std::span<const double> nearest,
                                            std::span<const char> kept) {
    const std::size_t n = prob.size();
    std::vector<double> z(n, std::numeric_limits<double>::infinity());
    const auto nu = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t u = 0; u < nu; ++u) {
        const auto cand = static_cast<std::size_t>(u);
        if (!kept[cand]) z[cand] = score_one(dist, prob, nearest, kept, cand);
    }
    return z;
}

std::vector<std::uint32_t> sample_paths_serial(const ChainView& chain, std::uint32_t initial_state,
                                               std::size_t initial_hour, std::size_t count,
                                               std::size_t horizon, std::uint64_t seed) {
    std::vector<std::uint32_t> out(count * horizon);
    for (std::size_t i = 0; i < count; ++i)
        sample_one(chain, initial_state, initial_hour, horizon, seed, i, out.data() + i * horizon);
    return out;
}

std::vector<std::uint32_t> sample_paths_omp(const ChainView& chain, std::uint32_t initial_state,
                                            std::size_t initial_hour, std::size_t count,
                                            std::size_t horizon, std::uint64_t seed) {
    std::vector<std::uint32_t> out(count * horizon);
    const auto nc = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < nc; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        sample_one(chain, initial_state, initial_hour, horizon, seed, idx, out.data() + idx * horizon);
    }
    return out;
}

}  // namespace rec::kernels
