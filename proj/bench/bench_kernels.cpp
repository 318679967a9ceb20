// Serial vs OpenMP scenario kernels.

#include <benchmark/benchmark.h>

#include <limits>
#include <random>

#include "rec/scenario_engine.hpp"
#include "rec/scenario_kernels.hpp"

using namespace rec;

namespace {

kernels::PointCloud cloud(std::size_t count, std::size_t dim = 72) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    kernels::PointCloud p{count, dim, std::vector<double>(count * dim)};
    for (double& x : p.coords) x = u(rng);
    return p;
}

template <auto Kernel>
void distances(benchmark::State& state) {
    const auto pts = cloud(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(pts));
}

template <auto Kernel>
void scores(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto dist = kernels::pairwise_distances_serial(cloud(n));
    const std::vector<double> prob(n, 1.0 / static_cast<double>(n));
    const std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    const std::vector<char> kept(n, 0);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(dist, prob, nearest, kept));
}

const DmcModel& model() {
    static const DmcModel m = [] {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        MultiSeries h;
        h.kinds = {TrajectoryKind::pv, TrajectoryKind::load, TrajectoryKind::member_demand};
        h.channels.assign(3, std::vector<double>(24 * 120));
        for (auto& ch : h.channels)
            for (std::size_t t = 0; t < ch.size(); ++t) ch[t] = static_cast<double>(t % 24) + 5.0 * u(rng);
        return fit_dmc(h, 10);
    }();
    return m;
}

template <auto Kernel>
void sampling(benchmark::State& state) {
    const auto view = model().view();
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(view, 0, 23, n, 24, 7));
}

}  // namespace

BENCHMARK(distances<kernels::pairwise_distances_serial>)->Name("pairwise_distances/serial")->Arg(300)->Arg(1000);
BENCHMARK(distances<kernels::pairwise_distances_omp>)->Name("pairwise_distances/omp")->Arg(300)->Arg(1000);
BENCHMARK(scores<kernels::fast_forward_scores_serial>)->Name("fast_forward_scores/serial")->Arg(300)->Arg(1000);
BENCHMARK(scores<kernels::fast_forward_scores_omp>)->Name("fast_forward_scores/omp")->Arg(300)->Arg(1000);
BENCHMARK(sampling<kernels::sample_paths_serial>)->Name("sample_paths/serial")->Arg(300)->Arg(10000);
BENCHMARK(sampling<kernels::sample_paths_omp>)->Name("sample_paths/omp")->Arg(300)->Arg(10000);

BENCHMARK_MAIN();
