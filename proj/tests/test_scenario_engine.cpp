#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "rec/scenario_engine.hpp"

using namespace rec;

namespace {

// day 1: 0 until hour 11, then 10; day 2: 1 until hour 12, then 10
MultiSeries two_day_series() {
    MultiSeries s;
    s.kinds = {TrajectoryKind::pv};
    std::vector<double> v;
    for (int h = 0; h < 24; ++h) v.push_back(h < 12 ? 0.0 : 10.0);
    for (int h = 0; h < 24; ++h) v.push_back(h < 13 ? 1.0 : 10.0);
    s.channels = {v};
    return s;
}

ScenarioSet random_set(std::size_t n, std::size_t horizon, std::uint64_t seed, bool uniform = false) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(0.0, 50.0), w(0.1, 1.0);
    std::vector<Scenario> sc(n);
    std::vector<double> p(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sc[i].channels.assign(2, std::vector<double>(horizon));
        for (auto& ch : sc[i].channels)
            for (double& x : ch) x = val(rng);
        p[i] = uniform ? 1.0 : w(rng);
        total += p[i];
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) acc += (p[i] /= total);
    p[n - 1] = 1.0 - acc;
    return ScenarioSet({TrajectoryKind::pv, TrajectoryKind::load}, std::move(sc), std::move(p));
}

// Distance matrix straight from the scenario values.
std::vector<std::vector<double>> oracle_distances(const ScenarioSet& set) {
    const std::size_t n = set.size(), ch = set.kinds().size(), K = set.horizon();
    std::vector<double> scale(ch, 1.0);
    for (std::size_t c = 0; c < ch; ++c) {
        double m = 0.0;
        for (const auto& s : set.scenarios())
            for (double v : s.channels[c]) m = std::max(m, std::abs(v));
        if (m > 0.0) scale[c] = m;
    }
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            long double acc = 0.0;
            for (std::size_t c = 0; c < ch; ++c)
                for (std::size_t t = 0; t < K; ++t) {
                    const double diff = (set.scenarios()[i].channels[c][t] - set.scenarios()[j].channels[c][t]) / scale[c];
                    acc += diff * diff;
                }
            d[i][j] = std::sqrt(static_cast<double>(acc));
        }
    return d;
}

double kantorovich(const std::vector<std::vector<double>>& d, const std::vector<double>& p,
                   const std::vector<std::size_t>& kept) {
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t j : kept) m = std::min(m, d[i][j]);
        total += p[i] * m;
    }
    return total;
}

std::vector<std::size_t> greedy_oracle(const std::vector<std::vector<double>>& d, const std::vector<double>& p,
                                       std::size_t target) {
    std::vector<std::size_t> kept;
    for (std::size_t step = 0; step < target; ++step) {
        std::size_t best = p.size();
        double best_val = 0.0;
        for (std::size_t u = 0; u < p.size(); ++u) {
            if (std::find(kept.begin(), kept.end(), u) != kept.end()) continue;
            auto trial = kept;
            trial.push_back(u);
            const double v = kantorovich(d, p, trial);
            if (best == p.size() || v < best_val - 1e-12) {
                best = u;
                best_val = v;
            }
        }
        kept.push_back(best);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

}  // namespace

TEST_CASE("equal-probability bins on a uniform ramp") {
    MultiSeries s;
    s.kinds = {TrajectoryKind::load};
    std::vector<double> v(240);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    s.channels = {v};
    const auto m = fit_dmc(s, 10);
    REQUIRE(m.bin_edges[0].size() == 9);
    for (std::size_t b = 0; b < 9; ++b) CHECK(m.bin_edges[0][b] == 24.0 * static_cast<double>(b + 1));
    CHECK(m.representatives[0][0] == doctest::Approx(11.5));
    CHECK(m.representatives[0][9] == doctest::Approx(227.5));
    CHECK(m.bin_of(0, 23.999) == 0);
    CHECK(m.bin_of(0, 24.0) == 1);
}

TEST_CASE("hand-counted transitions") {
    const auto m = fit_dmc(two_day_series(), 3);
    REQUIRE(m.bin_edges[0] == std::vector<double>{1.0, 10.0});
    CHECK(m.representatives[0] == std::vector<double>{0.0, 1.0, 10.0});

    using T = std::vector<std::pair<std::uint32_t, double>>;
    CHECK(m.transition(5, 0) == T{{0, 1.0}});
    CHECK(m.transition(11, 0) == T{{2, 1.0}});
    CHECK(m.transition(11, 1) == T{{1, 1.0}});
    CHECK(m.transition(12, 1) == T{{2, 1.0}});
    CHECK(m.transition(12, 2) == T{{2, 1.0}});
    CHECK(m.transition(23, 2) == T{{1, 1.0}});
    // never seen at hour 23: stays put
    CHECK(m.transition(23, 0) == T{{0, 1.0}});
    CHECK(m.transition(3, 2) == T{{2, 1.0}});

    const auto start = last_observed_state(m, two_day_series());
    CHECK(start.state == 2);
    CHECK(start.hour == 23);

    // from the end of day 2 every path is forced: 1 x13 then 10 x11
    const auto set = sample_scenarios(m, start, 4, 24, 9);
    for (const auto& sc : set.scenarios())
        for (std::size_t t = 0; t < 24; ++t) CHECK(sc.channels[0][t] == (t < 13 ? 1.0 : 10.0));
}

TEST_CASE("branching transitions split by frequency") {
    auto s = two_day_series();
    auto& v = s.channels[0];
    std::vector<double> day3(24);
    for (int h = 0; h < 24; ++h) day3[static_cast<std::size_t>(h)] = h < 12 ? 0.0 : (h == 12 ? 1.0 : 10.0);
    v.insert(v.end(), day3.begin(), day3.end());
    const auto m = fit_dmc(s, 3);
    REQUIRE(m.bin_edges[0] == std::vector<double>{1.0, 10.0});
    // hour 11 from state 0: day 1 jumps to 10, day 3 moves to 1
    using T = std::vector<std::pair<std::uint32_t, double>>;
    CHECK(m.transition(11, 0) == T{{1, 0.5}, {2, 0.5}});
    // hour 23 from state 2: day 1 -> 1 and day 2 -> 0
    CHECK(m.transition(23, 2) == T{{0, 0.5}, {1, 0.5}});
}

TEST_CASE("joint state packing") {
    MultiSeries s;
    s.kinds = {TrajectoryKind::pv, TrajectoryKind::load};
    std::vector<double> a(48), b(48);
    for (std::size_t i = 0; i < 48; ++i) {
        a[i] = static_cast<double>(i % 4);
        b[i] = static_cast<double>(i % 3);
    }
    s.channels = {a, b};
    const auto m = fit_dmc(s, 4);
    CHECK(m.bins(0) == 4);
    CHECK(m.bins(1) == 3);
    CHECK(m.state_count() == 12);
    CHECK(m.encode({2, 1}) == 7);
    CHECK(m.decode(7) == std::vector<std::size_t>{2, 1});
    CHECK_THROWS_AS(m.encode({4, 0}), InputError);
    CHECK_THROWS_AS(m.decode(12), InputError);
}

TEST_CASE("fit rejects bad history") {
    MultiSeries s;
    s.kinds = {TrajectoryKind::pv};
    s.channels = {std::vector<double>(30, 1.0)};
    CHECK_THROWS_AS(fit_dmc(s), InputError);
    s.channels = {std::vector<double>(24, 1.0)};
    CHECK_THROWS_AS(fit_dmc(s), InputError);
    s.channels = {std::vector<double>(48, 1.0)};
    s.channels[0][7] = -1.0;
    CHECK_THROWS_WITH_AS(fit_dmc(s), doctest::Contains("row 7"), InputError);
    s.channels[0][7] = 1.0;
    CHECK_NOTHROW(fit_dmc(s));
    CHECK_THROWS_AS(fit_dmc(s, 1), InputError);
}

TEST_CASE("sampling is seed deterministic and equal across serial and OpenMP") {
    MultiSeries s;
    s.kinds = {TrajectoryKind::pv, TrajectoryKind::load};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> a(24 * 20), b(24 * 20);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = std::max(0.0, std::sin(static_cast<double>(i % 24) / 24.0 * 3.14159)) * 40.0 * u(rng);
        b[i] = 10.0 + 5.0 * u(rng);
    }
    s.channels = {a, b};
    const auto m = fit_dmc(s, 5);
    const auto start = last_observed_state(m, s);

    omp_set_num_threads(4);
    const auto ser = sample_scenarios(m, start, 57, 24, 11, Parallelism::serial);
    const auto par = sample_scenarios(m, start, 57, 24, 11, Parallelism::openmp);
    const auto again = sample_scenarios(m, start, 57, 24, 11, Parallelism::openmp);
    const auto other = sample_scenarios(m, start, 57, 24, 12, Parallelism::openmp);
    bool same = true, differs = false;
    for (std::size_t i = 0; i < 57; ++i) {
        same = same && ser.scenarios()[i].channels == par.scenarios()[i].channels &&
               par.scenarios()[i].channels == again.scenarios()[i].channels;
        differs = differs || par.scenarios()[i].channels != other.scenarios()[i].channels;
    }
    CHECK(same);
    CHECK(differs);
    CHECK(std::accumulate(ser.probabilities().begin(), ser.probabilities().end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // a path depends only on its own index
    const auto prefix = sample_scenarios(m, start, 5, 24, 11, Parallelism::openmp);
    for (std::size_t i = 0; i < 5; ++i) CHECK(prefix.scenarios()[i].channels == par.scenarios()[i].channels);
}

TEST_CASE("kernels agree bit for bit") {
    omp_set_num_threads(4);
    const auto set = random_set(83, 24, 3);
    const auto pts = reduction_points(set);
    const auto ds = kernels::pairwise_distances_serial(pts);
    const auto dp = kernels::pairwise_distances_omp(pts);
    CHECK(ds == dp);
    const std::size_t n = set.size();
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::vector<char> kept(n, 0);
    kept[4] = kept[40] = 1;
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(ds[i * n + 4], ds[i * n + 40]);
    CHECK(kernels::fast_forward_scores_serial(ds, set.probabilities(), nearest, kept) ==
          kernels::fast_forward_scores_omp(ds, set.probabilities(), nearest, kept));
    const auto a = fast_forward_select(set, 9, Parallelism::serial);
    const auto b = fast_forward_select(set, 9, Parallelism::openmp);
    CHECK(a.kept == b.kept);
    CHECK(a.probabilities == b.probabilities);
}

TEST_CASE("price scenarios are one equiprobable day each") {
    std::vector<DailyPricePair> hist(4, {std::vector<double>(24, 0.2), std::vector<double>(24, 0.05)});
    hist[2].sell_max[5] = 0.4;
    const auto set = build_price_scenarios(hist, 24);
    CHECK(set.size() == 4);
    CHECK(set.probabilities() == std::vector<double>(4, 0.25));
    CHECK(set.value(2, TrajectoryKind::price_sell_max, 5) == 0.4);
    CHECK(set.value(1, TrajectoryKind::price_buy_min, 0) == 0.05);
    CHECK_THROWS_AS(build_price_scenarios({}, 24), InputError);
    hist[1].buy_min.pop_back();
    CHECK_THROWS_WITH_AS(build_price_scenarios(hist, 24), doctest::Contains("day 1"), InputError);
}

TEST_CASE("fast-forward selection matches a greedy oracle") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto set = random_set(7, 3, seed);
        const auto d = oracle_distances(set);
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t target = 1; target <= 7; ++target) {
            const auto r = fast_forward_select(set, target);
            CHECK(r.kept == greedy_oracle(d, set.probabilities(), target));
            CHECK(std::is_sorted(r.kept.begin(), r.kept.end()));
            CHECK(r.objective == doctest::Approx(kantorovich(d, set.probabilities(), r.kept)).epsilon(1e-12));
            CHECK(std::accumulate(r.probabilities.begin(), r.probabilities.end(), 0.0) ==
                  doctest::Approx(1.0).epsilon(1e-9));
            CHECK(r.objective <= prev + 1e-12);
            prev = r.objective;

            // every deleted scenario's mass lands on its nearest kept one
            std::vector<double> mass(set.size(), 0.0);
            for (std::size_t i = 0; i < set.size(); ++i) {
                std::size_t to = r.kept.front();
                for (std::size_t j : r.kept)
                    if (d[i][j] < d[i][to]) to = j;
                mass[to] += set.probabilities()[i];
            }
            for (std::size_t k = 0; k < r.kept.size(); ++k)
                CHECK(r.probabilities[k] == doctest::Approx(mass[r.kept[k]]).epsilon(1e-12));
        }
    }
}

TEST_CASE("single kept scenario is the exact optimum") {
    for (std::uint64_t seed = 20; seed < 30; ++seed) {
        const auto set = random_set(6, 4, seed);
        const auto d = oracle_distances(set);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < 6; ++j) best = std::min(best, kantorovich(d, set.probabilities(), {j}));
        CHECK(fast_forward_select(set, 1).objective == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("reduction bounds and output set") {
    const auto set = random_set(12, 5, 2);
    CHECK_THROWS_AS(reduce_scenarios(set, 0), InputError);
    CHECK_THROWS_AS(reduce_scenarios(set, 13), InputError);
    const auto all = fast_forward_select(set, 12);
    CHECK(all.objective == 0.0);
    CHECK(all.probabilities == set.probabilities());
    const auto red = reduce_scenarios(set, 4);
    CHECK(red.size() == 4);
    CHECK(red.kinds() == set.kinds());
    const auto sel = fast_forward_select(set, 4);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(red.scenarios()[k].channels == set.scenarios()[sel.kept[k]].channels);
}

TEST_CASE("identical scenarios collapse without loss") {
    auto base = random_set(3, 4, 8, true);
    std::vector<Scenario> sc;
    for (int rep = 0; rep < 3; ++rep)
        for (const auto& s : base.scenarios()) sc.push_back(s);
    ScenarioSet set(base.kinds(), sc, std::vector<double>(9, 1.0 / 9.0));
    const auto r = fast_forward_select(set, 3);
    CHECK(r.objective == doctest::Approx(0.0));
    for (double p : r.probabilities) CHECK(p == doctest::Approx(1.0 / 3.0));
}
