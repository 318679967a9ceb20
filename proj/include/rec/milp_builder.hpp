// Stochastic day-ahead bidding program for the community.
//
// Scenario indices: k = hour, s = price scenario, l = energy scenario,
// j = candidate bid price (a price scenario's clearing price). Names in the
// emitted instance are 1-based, e.g. P_e_3_1_2 for (k=3, s=1, l=2).
//
// Sign conventions: P_rec > 0 is export, Phat_b > 0 is battery discharge.

#ifndef REC_MILP_BUILDER_HPP
#define REC_MILP_BUILDER_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "rec/core_types.hpp"
#include "rec/milp.hpp"

namespace rec {

/// Raised when inputs break a config or pricing invariant; carries every
/// violation found.
class BuildError : public std::runtime_error {
public:
    explicit BuildError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

struct BuildInputs {
    RecConfig config;
    ScenarioSet prices;    // channels price_sell_max, price_buy_min
    ScenarioSet energies;  // channels pv, load, member_demand
    DayTrajectory price_export{TrajectoryKind::price_export, {}};
    DayTrajectory price_import{TrajectoryKind::price_import, {}};
    double soc_initial = 0.5;
    bool bids_disabled = false;  // fixes b+ = b- = 0 for every hour
};

/// Everything the encoders need, with defaults resolved.
struct ModelContext {
    RecConfig config;
    ScenarioSet prices;
    ScenarioSet energies;
    std::vector<double> price_export;
    std::vector<double> price_import;
    double soc_initial = 0.5;
    bool bids_disabled = false;

    int hours = 0;
    int n_prices = 0;
    int n_energies = 0;
    double penalty_sell = 0.0;
    double penalty_buy = 0.0;
    double epsilon_max = 0.0;

    double sell_clearing(int k, int s) const;
    double buy_clearing(int k, int s) const;
    double pv(int k, int l) const;
    double load(int k, int l) const;
    double member_demand(int k, int l) const;

    /// Acceptance coefficient: 1 when a sell bid priced at candidate j is
    /// accepted in price scenario s (candidate <= clearing price).
    int sell_accepts(int k, int s, int j) const;
    /// 1 when a buy bid priced at candidate j is accepted in s (candidate >= clearing price).
    int buy_accepts(int k, int s, int j) const;
};

/// Validates the inputs and resolves defaults: penalties 1.1 x max sell /
/// 0.9 x min buy clearing price, relaxation range from the energy scenario
/// spread. Throws BuildError.
ModelContext make_context(const BuildInputs& inputs);

/// Largest over hours of the scenario spread of pv - load - member demand.
double default_epsilon_max(const ScenarioSet& energies);

void declare_variables(MilpInstance& m, const ModelContext& ctx);
void encode_bidding(MilpInstance& m, const ModelContext& ctx);
void encode_acceptance(MilpInstance& m, const ModelContext& ctx);
void encode_energy_balance(MilpInstance& m, const ModelContext& ctx);
void encode_relaxation_logic(MilpInstance& m, const ModelContext& ctx);
void encode_storage(MilpInstance& m, const ModelContext& ctx);
void encode_shared_energy(MilpInstance& m, const ModelContext& ctx);
void encode_objective(MilpInstance& m, const ModelContext& ctx);

MilpInstance build_instance(const ModelContext& ctx);
MilpInstance build_instance(const BuildInputs& inputs);

/// State of charge after each hour along scenario path (s, l).
std::vector<double> planned_soc_path(const MilpInstance& m, const ModelContext& ctx,
                                     const std::vector<double>& values, int s, int l);

struct PlanDetails {
    DayAheadProgram program;
    double objective = 0.0;
    // soc[s][l][k] after hour k
    std::vector<std::vector<std::vector<double>>> soc;
    // min(cap, P_e) per (s, l, k), independent of the incentive weight
    std::vector<std::vector<std::vector<double>>> shared_energy;
};

/// Rounds binaries, checks the rounding moved no row by more than 1e-5,
/// and reads the program. Throws MilpError otherwise.
PlanDetails extract_program(const MilpInstance& m, const ModelContext& ctx, const Solution& sol);

}  // namespace rec

#endif
