// Shared domain records for the day-ahead community program.
//
// All energies are kWh per hourly slot; all prices are EUR/kWh.

#ifndef REC_CORE_TYPES_HPP
#define REC_CORE_TYPES_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rec {

/// Raised when caller-supplied data (series, CSV rows, scenario sets) is malformed.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class SharedEnergyCapMode { member_demand, rec_exchange };

std::string to_string(SharedEnergyCapMode mode);
SharedEnergyCapMode shared_energy_cap_mode_from_string(const std::string& text);

struct RecConfig {
    int horizon_hours = 24;

    double p_export_max = 200.0;
    double p_import_max = 200.0;

    double battery_capacity_kwh = 250.0;
    double battery_power_kwh_per_slot = 120.0;
    double eta_charge = 0.95;
    double eta_discharge = 0.95;

    double soc_initial = 0.5;
    double soc_final_min = 0.3;
    double soc_final_max = 0.7;

    // Unset penalties and relaxation range are derived from the scenario
    // sets at build time (see milp_builder).
    std::optional<double> penalty_sell;
    std::optional<double> penalty_buy;
    double incentive_shared = 0.119;
    std::optional<double> epsilon_max;

    bool renewable_only_charging = true;
    SharedEnergyCapMode shared_energy_cap_mode = SharedEnergyCapMode::member_demand;
};

/// Each entry names the offending field and the bound it breaks.
std::vector<std::string> validate_config(const RecConfig& config);

RecConfig load_config_json(const std::string& path);
RecConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const RecConfig& config);

enum class TrajectoryKind {
    pv,
    load,
    member_demand,
    price_sell_max,
    price_buy_min,
    price_export,
    price_import
};

std::string to_string(TrajectoryKind kind);
bool is_price(TrajectoryKind kind);

struct DayTrajectory {
    TrajectoryKind kind = TrajectoryKind::pv;
    std::vector<double> values;

    /// Throws InputError on wrong length, NaN, or negative entries.
    void validate(std::size_t horizon) const;
};

/// One member of a scenario set: a bundle of trajectories, one per channel,
/// all of the same length.
struct Scenario {
    std::vector<std::vector<double>> channels;
};

class ScenarioSet {
public:
    static constexpr double probability_tolerance = 1e-9;

    ScenarioSet() = default;
    ScenarioSet(std::vector<TrajectoryKind> kinds, std::vector<Scenario> scenarios,
                std::vector<double> probabilities);

    const std::vector<TrajectoryKind>& kinds() const { return kinds_; }
    const std::vector<Scenario>& scenarios() const { return scenarios_; }
    const std::vector<double>& probabilities() const { return probabilities_; }

    std::size_t size() const { return scenarios_.size(); }
    std::size_t horizon() const;
    bool empty() const { return scenarios_.empty(); }

    /// Position of a channel, throws InputError when absent.
    std::size_t channel_index(TrajectoryKind kind) const;
    double value(std::size_t scenario, TrajectoryKind kind, std::size_t hour) const;
    double probability(std::size_t scenario) const { return probabilities_[scenario]; }

    /// First `horizon` slots of every channel.
    ScenarioSet truncated(std::size_t horizon) const;

private:
    std::vector<TrajectoryKind> kinds_;
    std::vector<Scenario> scenarios_;
    std::vector<double> probabilities_;
};

enum class BidSide { sell, buy };

std::string to_string(BidSide side);

struct Bid {
    int hour = 0;
    BidSide side = BidSide::sell;
    double price = 0.0;
    double quantity = 0.0;
    bool submitted = false;
};

/// Violations of the standalone bid invariants for one day of bids.
/// `bids` holds at most one entry per hour.
std::vector<std::string> check_bids(const std::vector<Bid>& bids, const RecConfig& config);

struct DayAheadProgram {
    std::vector<double> rec_baseline;
    std::vector<double> bess_baseline;  // positive = discharge
    std::vector<std::optional<Bid>> bids;
    // Selection vectors over the candidate clearing prices, per hour.
    std::vector<std::vector<int>> sell_price_choice;
    std::vector<std::vector<int>> buy_price_choice;

    /// The bid submitted at `hour` on `side`, if any.
    std::optional<Bid> bid_at(int hour, BidSide side) const;
};

/// Checks that each hour's price-choice vector sums to the submit flag and
/// that a submitted price equals the selected candidate.
std::vector<std::string> check_program(const DayAheadProgram& program,
                                       const ScenarioSet& prices);

}  // namespace rec

#endif
