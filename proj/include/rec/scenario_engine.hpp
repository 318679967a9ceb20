// Price and energy scenario construction and fast-forward reduction.

#ifndef REC_SCENARIO_ENGINE_HPP
#define REC_SCENARIO_ENGINE_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "rec/core_types.hpp"
#include "rec/scenario_kernels.hpp"

namespace rec {

/// Equal-length hourly channels, e.g. pv / load / member demand.
struct MultiSeries {
    std::vector<TrajectoryKind> kinds;
    std::vector<std::vector<double>> channels;

    std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
    /// Rows [first, first + count).
    MultiSeries slice(std::size_t first, std::size_t count) const;
};

/// Hour-indexed discrete Markov chain over binned joint states.
///
/// Each channel is cut into equal-probability bins; a joint state is the
/// tuple of bin indices packed mixed-radix (first channel most significant).
/// transition(h) maps the state at hour h to the state at hour h+1, with
/// hour `period - 1` wrapping to hour 0 of the next day.
class DmcModel {
public:
    static constexpr std::size_t period = 24;

    std::vector<TrajectoryKind> kinds;
    std::vector<std::vector<double>> bin_edges;        // inner cut points, strictly ascending
    std::vector<std::vector<double>> representatives;  // mean training value per bin
    // rows[h][state]; absent rows fall back to self-transition
    std::vector<std::map<std::uint32_t, kernels::TransitionRow>> rows;

    std::size_t bins(std::size_t channel) const { return bin_edges[channel].size() + 1; }
    std::size_t state_count() const;

    std::size_t bin_of(std::size_t channel, double value) const;
    std::uint32_t encode(const std::vector<std::size_t>& bin_index) const;
    std::vector<std::size_t> decode(std::uint32_t state) const;
    std::uint32_t state_of(const std::vector<double>& values) const;

    /// Successor distribution for (hour, state) as (next, probability)
    /// pairs; the self-transition fallback for unobserved pairs.
    std::vector<std::pair<std::uint32_t, double>> transition(std::size_t hour,
                                                             std::uint32_t state) const;

    kernels::ChainView view() const;
};

DmcModel fit_dmc(const MultiSeries& history, std::size_t bins_per_channel = 10);

struct ChainStart {
    std::uint32_t state = 0;
    std::size_t hour = DmcModel::period - 1;
};

/// State and hour-of-day of the last row of `history`.
ChainStart last_observed_state(const DmcModel& model, const MultiSeries& history);

enum class Parallelism { serial, openmp };

ScenarioSet sample_scenarios(const DmcModel& model, ChainStart start, std::size_t count,
                             std::size_t horizon, std::uint64_t seed,
                             Parallelism mode = Parallelism::openmp);

struct DailyPricePair {
    std::vector<double> sell_max;
    std::vector<double> buy_min;
};

/// One equiprobable scenario per historical day.
ScenarioSet build_price_scenarios(const std::vector<DailyPricePair>& history, std::size_t horizon);

struct ReductionResult {
    std::vector<std::size_t> kept;     // ascending input indices
    std::vector<double> probabilities;  // aligned with `kept`
    double objective = 0.0;             // sum over deleted of prob * distance to nearest kept
};

/// Fast-forward selection under the Kantorovich distance with a Euclidean
/// metric over per-channel max-normalized concatenated trajectories.
ReductionResult fast_forward_select(const ScenarioSet& set, std::size_t target,
                                    Parallelism mode = Parallelism::openmp);

ScenarioSet reduce_scenarios(const ScenarioSet& set, std::size_t target,
                             Parallelism mode = Parallelism::openmp);

/// Normalized points used by the reduction metric.
kernels::PointCloud reduction_points(const ScenarioSet& set);

}  // namespace rec

#endif
