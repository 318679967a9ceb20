// Rolling day-by-day simulation of the community: plan, operate, settle.

#ifndef REC_SIM_HARNESS_HPP
#define REC_SIM_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rec/core_types.hpp"
#include "rec/csv_io.hpp"
#include "rec/market_settlement.hpp"
#include "rec/milp_builder.hpp"
#include "rec/solver_backend.hpp"

namespace rec {

/// base; no_msd = Case 1; no_incentive = Case 2; neither = Case 3.
enum class CaseId { base, no_msd, no_incentive, neither };

std::string to_string(CaseId c);
CaseId case_from_string(const std::string& text);
std::string case_label(CaseId c);  // "Base", "Case 1", ...
inline const CaseId all_cases[] = {CaseId::base, CaseId::no_msd, CaseId::no_incentive, CaseId::neither};

/// Switches bids off and/or zeroes the shared-energy incentive.
void apply_case(BuildInputs& inputs, CaseId c);

/// energy.csv, msd_prices.csv and grid_prices.csv of one data directory,
/// row-aligned, whole days.
struct DataBundle {
    HourlySeries energy;
    HourlySeries msd;
    HourlySeries grid;
    std::size_t days() const { return energy.rows() / 24; }
};

DataBundle load_data(const std::filesystem::path& dir);

struct RunSpec {
    RecConfig config;
    std::filesystem::path data_dir;
    CaseId case_id = CaseId::base;
    std::size_t n_prices = 10;
    std::size_t n_energies = 10;
    std::size_t energy_samples = 300;
    std::size_t price_window_days = 30;
    std::size_t dmc_bins = 10;
    std::uint64_t seed = 1;
    std::size_t days = 7;  // simulated days, taken from the end of the data
    SolveRequest solver;   // run_dir is set per day
    std::filesystem::path out_dir;  // empty: nothing written

    std::vector<std::string> validate() const;
};

/// What is known about one day: the planner's inputs and what actually happened.
struct RealizedDay {
    RealizedEnergy energy;
    std::vector<double> sell_max;
    std::vector<double> buy_min;
};

struct DayOutcome {
    std::size_t day = 0;  // absolute index in the data
    std::string date;     // first timestamp of the day
    CaseId case_id = CaseId::base;
    SolveStatus status = SolveStatus::optimal;
    double planned_objective = 0.0;
    double mip_gap = 0.0;
    PlanDetails plan;
    std::vector<double> price_probabilities;
    std::vector<double> energy_probabilities;
    RealizedDay realized;
    AcceptanceFlags accepted;
    DispatchResult dispatch;
    Tariffs tariffs;
    CashFlowReport cash;
    double soc_initial = 0.0;
    double soc_final() const { return dispatch.soc_final(); }
};

/// Plans on `inputs` (case toggles applied here), operates against
/// `realized`, settles. Throws SolveError naming the instance file when the
/// program is infeasible.
DayOutcome execute_day(BuildInputs inputs, const RealizedDay& realized, CaseId c, SolveRequest solver);

/// Scenario sets and known prices for absolute day `day`, trained only on
/// the rows before it.
BuildInputs day_inputs(const RunSpec& spec, const DataBundle& data, std::size_t day, double soc_initial);
RealizedDay realized_day(const RunSpec& spec, const DataBundle& data, std::size_t day);

/// `day_index` counts from the first simulated day.
DayOutcome run_day(const RunSpec& spec, const DataBundle& data, std::size_t day_index, double soc_initial);

struct WeekResult {
    RunSpec spec;
    std::vector<DayOutcome> days;
    CashFlow total;
    double planned_objective = 0.0;
};

/// Days in sequence, each starting from the realized SOC the previous one ended with.
WeekResult run_week(const RunSpec& spec);
WeekResult run_week(const RunSpec& spec, const DataBundle& data);

/// report.json, cashflow.csv, bids.csv, soc.csv and long-format CSVs.
void write_week_reports(const WeekResult& week, const std::filesystem::path& dir);

std::string week_report_json(const WeekResult& week);
std::string week_cashflow_csv(const WeekResult& week);
std::string bids_csv(const WeekResult& week);
std::string soc_csv(const WeekResult& week);
std::string soc_long_csv(const WeekResult& week);
std::string cashflow_long_csv(const WeekResult& week);

struct CaseRow {
    CaseId case_id = CaseId::base;
    double net = 0.0;
    double planned_objective = 0.0;
};

struct CaseComparison {
    std::vector<CaseRow> rows;  // base, Case 1, Case 2, Case 3
    const CaseRow& row(CaseId c) const;
};

/// Percentage change of `value` over `reference`, relative to |reference|.
double percent_delta(double value, double reference);

/// Runs the week once per case on the same data and seed.
CaseComparison compare_cases(const RunSpec& spec);

/// Columns: case, net_eur, delta_vs_case3_pct, delta_vs_case1_pct.
std::string comparison_csv(const CaseComparison& cmp);
std::string comparison_table(const CaseComparison& cmp);

}  // namespace rec

#endif
