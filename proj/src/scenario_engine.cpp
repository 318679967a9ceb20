#include "rec/scenario_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rec {

MultiSeries MultiSeries::slice(std::size_t first, std::size_t count) const {
    if (first + count > length()) throw InputError("series slice out of range");
    MultiSeries out;
    out.kinds = kinds;
    for (const auto& ch : channels)
        out.channels.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(first),
                                  ch.begin() + static_cast<std::ptrdiff_t>(first + count));
    return out;
}

std::size_t DmcModel::state_count() const {
    std::size_t n = 1;
    for (std::size_t c = 0; c < bin_edges.size(); ++c) n *= bins(c);
    return n;
}

std::size_t DmcModel::bin_of(std::size_t channel, double value) const {
    const auto& e = bin_edges[channel];
    return static_cast<std::size_t>(std::upper_bound(e.begin(), e.end(), value) - e.begin());
}

std::uint32_t DmcModel::encode(const std::vector<std::size_t>& bin_index) const {
    std::size_t s = 0;
    for (std::size_t c = 0; c < bin_index.size(); ++c) {
        if (bin_index[c] >= bins(c)) throw InputError("bin index out of range");
        s = s * bins(c) + bin_index[c];
    }
    return static_cast<std::uint32_t>(s);
}

std::vector<std::size_t> DmcModel::decode(std::uint32_t state) const {
    if (state >= state_count()) throw InputError("state index out of range");
    std::vector<std::size_t> out(bin_edges.size());
    std::size_t s = state;
    for (std::size_t c = bin_edges.size(); c-- > 0;) {
        out[c] = s % bins(c);
        s /= bins(c);
    }
    return out;
}

std::uint32_t DmcModel::state_of(const std::vector<double>& values) const {
    std::vector<std::size_t> idx(values.size());
    for (std::size_t c = 0; c < values.size(); ++c) idx[c] = bin_of(c, values[c]);
    return encode(idx);
}

std::vector<std::pair<std::uint32_t, double>> DmcModel::transition(std::size_t hour,
                                                                    std::uint32_t state) const {
    const auto& table = rows.at(hour % period);
    const auto it = table.find(state);
    if (it == table.end()) return {{state, 1.0}};
    std::vector<std::pair<std::uint32_t, double>> out;
    double prev = 0.0;
    for (std::size_t i = 0; i < it->second.next.size(); ++i) {
        out.emplace_back(it->second.next[i], it->second.cumulative[i] - prev);
        prev = it->second.cumulative[i];
    }
    return out;
}

namespace {

const kernels::TransitionRow* lookup_row(const void* ctx, std::size_t hour, std::uint32_t state) {
    const auto* model = static_cast<const DmcModel*>(ctx);
    const auto& table = model->rows[hour % DmcModel::period];
    const auto it = table.find(state);
    return it == table.end() ? nullptr : &it->second;
}

std::vector<double> quantile_edges(std::vector<double> values, std::size_t bins) {
    std::sort(values.begin(), values.end());
    std::vector<double> edges;
    const std::size_t n = values.size();
    for (std::size_t b = 1; b < bins; ++b) {
        const double cut = values[b * n / bins];
        if (cut > values.front() && (edges.empty() || cut > edges.back())) edges.push_back(cut);
    }
    return edges;
}

}  // namespace

kernels::ChainView DmcModel::view() const { return {this, &lookup_row, period}; }

DmcModel fit_dmc(const MultiSeries& history, std::size_t bins_per_channel) {
    if (history.channels.empty() || history.kinds.size() != history.channels.size())
        throw InputError("fit_dmc: history needs one kind per channel");
    const std::size_t n = history.length();
    for (const auto& ch : history.channels)
        if (ch.size() != n) throw InputError("fit_dmc: channels differ in length");
    if (n % DmcModel::period != 0)
        throw InputError("fit_dmc: history length " + std::to_string(n) +
                         " is not a whole number of days");
    if (n / DmcModel::period < 2) throw InputError("fit_dmc: need at least 2 days of history");
    if (bins_per_channel < 2) throw InputError("fit_dmc: bins_per_channel must be >= 2");
    for (std::size_t c = 0; c < history.channels.size(); ++c)
        for (std::size_t t = 0; t < n; ++t) {
            const double v = history.channels[c][t];
            if (!std::isfinite(v) || v < 0.0)
                throw InputError("fit_dmc: invalid " + to_string(history.kinds[c]) + " value at row " +
                                 std::to_string(t));
        }

    DmcModel m;
    m.kinds = history.kinds;
    for (const auto& ch : history.channels) {
        m.bin_edges.push_back(quantile_edges(ch, bins_per_channel));
        const auto& edges = m.bin_edges.back();
        std::vector<double> sum(edges.size() + 1, 0.0);
        std::vector<std::size_t> cnt(edges.size() + 1, 0);
        for (double v : ch) {
            const auto b = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) -
                                                    edges.begin());
            sum[b] += v;
            ++cnt[b];
        }
        std::vector<double> rep(sum.size());
        for (std::size_t b = 0; b < rep.size(); ++b) rep[b] = sum[b] / static_cast<double>(cnt[b]);
        m.representatives.push_back(std::move(rep));
    }
    if (m.state_count() > std::numeric_limits<std::uint32_t>::max())
        throw InputError("fit_dmc: joint state space too large");

    std::vector<std::uint32_t> states(n);
    std::vector<double> row_values(history.channels.size());
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t c = 0; c < row_values.size(); ++c) row_values[c] = history.channels[c][t];
        states[t] = m.state_of(row_values);
    }

    std::vector<std::map<std::uint32_t, std::map<std::uint32_t, std::size_t>>> counts(DmcModel::period);
    for (std::size_t t = 0; t + 1 < n; ++t) ++counts[t % DmcModel::period][states[t]][states[t + 1]];

    m.rows.resize(DmcModel::period);
    for (std::size_t h = 0; h < DmcModel::period; ++h)
        for (const auto& [from, succ] : counts[h]) {
            std::size_t total = 0;
            for (const auto& kv : succ) total += kv.second;
            kernels::TransitionRow row;
            std::size_t running = 0;
            for (const auto& [to, c] : succ) {
                running += c;
                row.next.push_back(to);
                row.cumulative.push_back(static_cast<double>(running) / static_cast<double>(total));
            }
            m.rows[h].emplace(from, std::move(row));
        }
    return m;
}

ChainStart last_observed_state(const DmcModel& model, const MultiSeries& history) {
    const std::size_t n = history.length();
    if (n == 0) throw InputError("empty history");
    std::vector<double> values(history.channels.size());
    for (std::size_t c = 0; c < values.size(); ++c) values[c] = history.channels[c][n - 1];
    return {model.state_of(values), (n - 1) % DmcModel::period};
}

ScenarioSet sample_scenarios(const DmcModel& model, ChainStart start, std::size_t count,
                             std::size_t horizon, std::uint64_t seed, Parallelism mode) {
    if (count < 1) throw InputError("sample_scenarios: count must be >= 1");
    if (start.state >= model.state_count())
        throw InputError("sample_scenarios: initial state out of range");
    const auto chain = model.view();
    const auto paths = mode == Parallelism::openmp
                           ? kernels::sample_paths_omp(chain, start.state, start.hour, count, horizon, seed)
                           : kernels::sample_paths_serial(chain, start.state, start.hour, count, horizon, seed);

    std::vector<Scenario> scenarios(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto& sc = scenarios[i];
        sc.channels.assign(model.kinds.size(), std::vector<double>(horizon));
        for (std::size_t t = 0; t < horizon; ++t) {
            const auto bins = model.decode(paths[i * horizon + t]);
            for (std::size_t c = 0; c < bins.size(); ++c)
                sc.channels[c][t] = model.representatives[c][bins[c]];
        }
    }
    return ScenarioSet(model.kinds, std::move(scenarios),
                       std::vector<double>(count, 1.0 / static_cast<double>(count)));
}

ScenarioSet build_price_scenarios(const std::vector<DailyPricePair>& history, std::size_t horizon) {
    if (history.empty()) throw InputError("build_price_scenarios: no historical days");
    std::vector<Scenario> scenarios;
    for (std::size_t d = 0; d < history.size(); ++d) {
        DayTrajectory sell{TrajectoryKind::price_sell_max, history[d].sell_max};
        DayTrajectory buy{TrajectoryKind::price_buy_min, history[d].buy_min};
        try {
            sell.validate(horizon);
            buy.validate(horizon);
        } catch (const InputError& e) {
            throw InputError("build_price_scenarios: day " + std::to_string(d) + ": " + e.what());
        }
        scenarios.push_back(Scenario{{history[d].sell_max, history[d].buy_min}});
    }
    const double p = 1.0 / static_cast<double>(history.size());
    return ScenarioSet({TrajectoryKind::price_sell_max, TrajectoryKind::price_buy_min},
                       std::move(scenarios), std::vector<double>(history.size(), p));
}

kernels::PointCloud reduction_points(const ScenarioSet& set) {
    const std::size_t channels = set.kinds().size();
    const std::size_t horizon = set.horizon();
    std::vector<double> scale(channels, 0.0);
    for (const auto& sc : set.scenarios())
        for (std::size_t c = 0; c < channels; ++c)
            for (double v : sc.channels[c]) scale[c] = std::max(scale[c], std::abs(v));
    for (double& s : scale)
        if (s == 0.0) s = 1.0;

    kernels::PointCloud pts;
    pts.count = set.size();
    pts.dim = channels * horizon;
    pts.coords.reserve(pts.count * pts.dim);
    for (const auto& sc : set.scenarios())
        for (std::size_t c = 0; c < channels; ++c)
            for (double v : sc.channels[c]) pts.coords.push_back(v / scale[c]);
    return pts;
}

ReductionResult fast_forward_select(const ScenarioSet& set, std::size_t target, Parallelism mode) {
    const std::size_t n = set.size();
    if (target < 1 || target > n)
        throw InputError("reduce_scenarios: target " + std::to_string(target) + " outside [1, " +
                         std::to_string(n) + "]");
    ReductionResult res;
    if (target == n) {
        for (std::size_t i = 0; i < n; ++i) res.kept.push_back(i);
        res.probabilities = set.probabilities();
        return res;
    }

    const auto pts = reduction_points(set);
    const auto dist = mode == Parallelism::openmp ? kernels::pairwise_distances_omp(pts)
                                                  : kernels::pairwise_distances_serial(pts);
    const auto& prob = set.probabilities();
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::vector<char> kept(n, 0);

    for (std::size_t step = 0; step < target; ++step) {
        const auto z = mode == Parallelism::openmp
                           ? kernels::fast_forward_scores_omp(dist, prob, nearest, kept)
                           : kernels::fast_forward_scores_serial(dist, prob, nearest, kept);
        std::size_t best = n;
        for (std::size_t u = 0; u < n; ++u)
            if (!kept[u] && (best == n || z[u] < z[best])) best = u;
        kept[best] = 1;
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], dist[i * n + best]);
    }

    std::vector<double> merged(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (kept[i]) {
            merged[i] += prob[i];
            continue;
        }
        std::size_t to = n;
        for (std::size_t j = 0; j < n; ++j)
            if (kept[j] && (to == n || dist[i * n + j] < dist[i * n + to])) to = j;
        merged[to] += prob[i];
        res.objective += prob[i] * dist[i * n + to];
    }
    for (std::size_t i = 0; i < n; ++i)
        if (kept[i]) {
            res.kept.push_back(i);
            res.probabilities.push_back(merged[i]);
        }
    return res;
}

ScenarioSet reduce_scenarios(const ScenarioSet& set, std::size_t target, Parallelism mode) {
    const auto sel = fast_forward_select(set, target, mode);
    std::vector<Scenario> scenarios;
    for (std::size_t i : sel.kept) scenarios.push_back(set.scenarios()[i]);
    return ScenarioSet(set.kinds(), std::move(scenarios), sel.probabilities);
}

}  // namespace rec
