#include "rec/market_settlement.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "rec/csv_io.hpp"

namespace rec {

AcceptanceFlags decide_acceptance(const DayAheadProgram& program, const std::vector<double>& sell_max,
                                  const std::vector<double>& buy_min) {
    const std::size_t hours = program.bids.size();
    if (sell_max.size() != hours || buy_min.size() != hours)
        throw InputError("realized clearing prices must cover " + std::to_string(hours) + " hours");
    AcceptanceFlags out{std::vector<char>(hours, 0), std::vector<char>(hours, 0)};
    for (std::size_t k = 0; k < hours; ++k) {
        const auto& bid = program.bids[k];
        if (!bid || !bid->submitted) continue;
        if (bid->side == BidSide::sell)
            out.sell[k] = bid->price <= sell_max[k];
        else
            out.buy[k] = bid->price >= buy_min[k];
    }
    return out;
}

DispatchResult realtime_dispatch(const DayAheadProgram& program, const AcceptanceFlags& accepted,
                                 const RealizedEnergy& realized, const RecConfig& config, double soc_initial) {
    const std::size_t hours = program.rec_baseline.size();
    if (realized.pv.size() != hours || realized.load.size() != hours || realized.member_demand.size() != hours)
        throw InputError("realized energies must cover " + std::to_string(hours) + " hours");
    if (accepted.sell.size() != hours || accepted.buy.size() != hours)
        throw InputError("acceptance flags must cover " + std::to_string(hours) + " hours");

    const double cap = config.battery_capacity_kwh;
    const double pb = cap > 0.0 ? config.battery_power_kwh_per_slot : 0.0;
    DispatchResult out;
    out.soc_initial = soc_initial;
    double soc = soc_initial;
    for (std::size_t k = 0; k < hours; ++k) {
        const double pv = realized.pv[k], load = realized.load[k], md = realized.member_demand[k];
        double deviation = 0.0;
        const auto bid = program.bids[k];
        if (bid && accepted.sell[k]) deviation = bid->quantity;
        if (bid && accepted.buy[k]) deviation = -bid->quantity;

        DispatchHour h;
        h.target = program.rec_baseline[k] + deviation;
        const double surplus = pv - load;
        // battery net discharge x: rec = surplus + x - md
        double hi = pb, lo = -pb;
        if (cap > 0.0) {
            hi = std::min(hi, soc * cap * config.eta_discharge);
            lo = std::max(lo, -(1.0 - soc) * cap / config.eta_charge);
        }
        if (config.renewable_only_charging) lo = std::max(lo, -pv);
        hi = std::max(hi, 0.0);
        lo = std::min(lo, 0.0);
        // stay inside the connection limits when the battery can
        const double grid_hi = config.p_export_max - surplus, grid_lo = -config.p_import_max - surplus;
        if (std::max(lo, grid_lo) <= std::min(hi, grid_hi)) {
            lo = std::max(lo, grid_lo);
            hi = std::min(hi, grid_hi);
        }
        const double x = std::clamp(h.target - surplus + md, lo, hi);
        h.discharge = std::max(x, 0.0);
        h.charge = std::max(-x, 0.0);
        const double net = surplus + x;
        h.export_kwh = std::max(net, 0.0);
        h.import_kwh = std::max(-net, 0.0);
        h.rec_exchange = net - md;
        if (bid && accepted.sell[k]) h.error_sell = std::clamp(h.target - h.rec_exchange, 0.0, bid->quantity);
        if (bid && accepted.buy[k]) h.error_buy = std::clamp(h.rec_exchange - h.target, 0.0, bid->quantity);
        if (cap > 0.0) {
            soc += (config.eta_charge * h.charge - h.discharge / config.eta_discharge) / cap;
            soc = std::clamp(soc, 0.0, 1.0);  // round-off only; the clip above keeps it inside
        }
        h.soc = soc;
        out.hours.push_back(h);
    }
    return out;
}

CashFlow& CashFlow::operator+=(const CashFlow& o) {
    export_revenue += o.export_revenue;
    import_cost += o.import_cost;
    shared_incentive += o.shared_incentive;
    msd_sell_revenue += o.msd_sell_revenue;
    msd_buy_cost += o.msd_buy_cost;
    penalty_sell += o.penalty_sell;
    penalty_buy_refund += o.penalty_buy_refund;
    net += o.net;
    return *this;
}

CashFlowReport settle(const DispatchResult& dispatch, const DayAheadProgram& program,
                      const AcceptanceFlags& accepted, const RealizedEnergy& realized, const Tariffs& tariffs) {
    const std::size_t hours = dispatch.hours.size();
    if (tariffs.price_export.size() != hours || tariffs.price_import.size() != hours)
        throw InputError("grid prices must cover " + std::to_string(hours) + " hours");
    if (program.bids.size() != hours || realized.member_demand.size() != hours)
        throw InputError("program and realization must cover " + std::to_string(hours) + " hours");
    CashFlowReport report;
    for (std::size_t k = 0; k < hours; ++k) {
        const auto& d = dispatch.hours[k];
        CashFlow c;
        const auto& bid = program.bids[k];
        // energy delivered as service is paid through the bid, not the energy price
        double energy_net = d.export_kwh - d.import_kwh;
        if (bid && accepted.sell[k]) {
            c.msd_sell_revenue = bid->quantity * bid->price;
            c.penalty_sell = d.error_sell * tariffs.penalty_sell;
            energy_net -= bid->quantity - d.error_sell;
        }
        if (bid && accepted.buy[k]) {
            c.msd_buy_cost = bid->quantity * bid->price;
            c.penalty_buy_refund = d.error_buy * tariffs.penalty_buy;
            energy_net += bid->quantity - d.error_buy;
        }
        c.export_revenue = std::max(energy_net, 0.0) * tariffs.price_export[k];
        c.import_cost = std::max(-energy_net, 0.0) * tariffs.price_import[k];
        c.shared_incentive = std::min(d.export_kwh, realized.member_demand[k]) * tariffs.incentive_shared;
        c.net = c.balance();
        report.total += c;
        report.hours.push_back(c);
    }
    return report;
}

namespace {

const char* const cash_columns[] = {"export_revenue_eur", "import_cost_eur",  "shared_incentive_eur",
                                    "msd_sell_revenue_eur", "msd_buy_cost_eur", "penalty_sell_eur",
                                    "penalty_buy_refund_eur", "net_eur"};

std::vector<double> cash_values(const CashFlow& c) {
    return {c.export_revenue, c.import_cost,  c.shared_incentive,   c.msd_sell_revenue,
            c.msd_buy_cost,   c.penalty_sell, c.penalty_buy_refund, c.net};
}

}  // namespace

std::string cashflow_csv(const CashFlowReport& report) {
    std::string out = "hour";
    for (const char* c : cash_columns) out += std::string(",") + c;
    out += "\n";
    auto row = [&](const std::string& label, const CashFlow& c) {
        out += label;
        for (double v : cash_values(c)) out += "," + format_double(v);
        out += "\n";
    };
    for (std::size_t k = 0; k < report.hours.size(); ++k) row(std::to_string(k + 1), report.hours[k]);
    row("total", report.total);
    return out;
}

namespace {

nlohmann::ordered_json cash_json(const CashFlow& c) {
    nlohmann::ordered_json j;
    const auto v = cash_values(c);
    for (std::size_t i = 0; i < v.size(); ++i) j[cash_columns[i]] = v[i];
    return j;
}

}  // namespace

std::string cashflow_json(const CashFlowReport& report) {
    nlohmann::ordered_json doc;
    doc["hours"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < report.hours.size(); ++k) {
        auto h = cash_json(report.hours[k]);
        h["hour"] = k + 1;
        doc["hours"].push_back(std::move(h));
    }
    doc["total"] = cash_json(report.total);
    return doc.dump(1) + "\n";
}

}  // namespace rec
