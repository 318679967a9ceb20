// Ex-post operation of a day-ahead program: bid acceptance against the
// realized clearing prices, greedy real-time battery dispatch, and the
// realized cash flow.

#ifndef REC_MARKET_SETTLEMENT_HPP
#define REC_MARKET_SETTLEMENT_HPP

#include <string>
#include <vector>

#include "rec/core_types.hpp"

namespace rec {

struct AcceptanceFlags {
    std::vector<char> sell;
    std::vector<char> buy;
};

/// Sell accepted iff submitted and price <= realized sell clearing price;
/// buy accepted iff submitted and price >= realized buy clearing price.
AcceptanceFlags decide_acceptance(const DayAheadProgram& program, const std::vector<double>& sell_max,
                                  const std::vector<double>& buy_min);

struct RealizedEnergy {
    std::vector<double> pv;
    std::vector<double> load;
    std::vector<double> member_demand;
};

struct DispatchHour {
    double charge = 0.0;
    double discharge = 0.0;
    double export_kwh = 0.0;
    double import_kwh = 0.0;
    double rec_exchange = 0.0;  // export - import - member demand
    double target = 0.0;        // baseline plus accepted deviation
    double error_sell = 0.0;
    double error_buy = 0.0;
    double soc = 0.0;           // after the hour
};

struct DispatchResult {
    double soc_initial = 0.0;
    std::vector<DispatchHour> hours;
    double soc_final() const { return hours.empty() ? soc_initial : hours.back().soc; }
};

/// Each hour the battery is set to whatever net discharge brings the
/// community exchange to its target, clipped to the power rating, the
/// energy left in or room left in the battery, renewable-only charging and,
/// where the battery allows, the grid connection limits. Whatever the
/// clipping leaves undelivered on an accepted bid is the service error.
DispatchResult realtime_dispatch(const DayAheadProgram& program, const AcceptanceFlags& accepted,
                                 const RealizedEnergy& realized, const RecConfig& config, double soc_initial);

struct Tariffs {
    std::vector<double> price_export;
    std::vector<double> price_import;
    double penalty_sell = 0.0;
    double penalty_buy = 0.0;
    double incentive_shared = 0.0;
};

struct CashFlow {
    double export_revenue = 0.0;
    double import_cost = 0.0;
    double shared_incentive = 0.0;
    double msd_sell_revenue = 0.0;
    double msd_buy_cost = 0.0;
    double penalty_sell = 0.0;
    double penalty_buy_refund = 0.0;
    double net = 0.0;

    double balance() const {
        return export_revenue - import_cost + shared_incentive + msd_sell_revenue - msd_buy_cost -
               penalty_sell + penalty_buy_refund;
    }
    CashFlow& operator+=(const CashFlow& o);
};

struct CashFlowReport {
    std::vector<CashFlow> hours;
    CashFlow total;
};

/// Accepted bids are paid (or pay) their own price. Energy is paid on the
/// exchange net of the service actually delivered, the same baseline-side
/// flow the planner prices, so service energy is not paid twice. Shared
/// energy is min(physical export, member demand) whatever cap the planner used.
CashFlowReport settle(const DispatchResult& dispatch, const DayAheadProgram& program,
                      const AcceptanceFlags& accepted, const RealizedEnergy& realized, const Tariffs& tariffs);

/// One row per hour (1-based) and a final `total` row.
std::string cashflow_csv(const CashFlowReport& report);
std::string cashflow_json(const CashFlowReport& report);

}  // namespace rec

#endif
