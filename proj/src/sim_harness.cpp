#include "rec/sim_harness.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "rec/exchange.hpp"
#include "rec/scenario_engine.hpp"

namespace rec {

std::string to_string(CaseId c) {
    switch (c) {
        case CaseId::base: return "base";
        case CaseId::no_msd: return "no_msd";
        case CaseId::no_incentive: return "no_incentive";
        case CaseId::neither: return "neither";
    }
    return "base";
}

CaseId case_from_string(const std::string& text) {
    for (CaseId c : all_cases)
        if (to_string(c) == text) return c;
    throw InputError("unknown case '" + text + "' (expected base, no_msd, no_incentive or neither)");
}

std::string case_label(CaseId c) {
    switch (c) {
        case CaseId::base: return "Base";
        case CaseId::no_msd: return "Case 1";
        case CaseId::no_incentive: return "Case 2";
        case CaseId::neither: return "Case 3";
    }
    return "Base";
}

void apply_case(BuildInputs& inputs, CaseId c) {
    if (c == CaseId::no_msd || c == CaseId::neither) inputs.bids_disabled = true;
    if (c == CaseId::no_incentive || c == CaseId::neither) inputs.config.incentive_shared = 0.0;
}

DataBundle load_data(const std::filesystem::path& dir) {
    DataBundle d;
    d.energy = read_hourly_csv((dir / "energy.csv").string(), energy_columns);
    d.msd = read_hourly_csv((dir / "msd_prices.csv").string(), msd_price_columns);
    d.grid = read_hourly_csv((dir / "grid_prices.csv").string(), grid_price_columns);
    if (d.msd.timestamps != d.energy.timestamps || d.grid.timestamps != d.energy.timestamps)
        throw InputError("energy.csv, msd_prices.csv and grid_prices.csv must share their timestamp column");
    if (d.energy.rows() == 0 || d.energy.rows() % 24 != 0)
        throw InputError("data must hold whole days of 24 rows, got " + std::to_string(d.energy.rows()) + " rows");
    return d;
}

std::vector<std::string> RunSpec::validate() const {
    auto out = validate_config(config);
    if (config.horizon_hours > 24) out.push_back("horizon_hours must be <= 24 for day-by-day simulation");
    if (n_prices < 1) out.push_back("n_prices must be >= 1");
    if (n_energies < 1) out.push_back("n_energies must be >= 1");
    if (energy_samples < n_energies) out.push_back("energy_samples must be >= n_energies");
    if (price_window_days < 1) out.push_back("price_window_days must be >= 1");
    if (dmc_bins < 2) out.push_back("dmc_bins must be >= 2");
    if (days < 1) out.push_back("days must be >= 1");
    for (const auto& e : solver.validate()) out.push_back(e);
    return out;
}

namespace {

std::vector<double> day_slice(const std::vector<double>& column, std::size_t day, std::size_t hours) {
    const auto first = column.begin() + static_cast<std::ptrdiff_t>(day * 24);
    return {first, first + static_cast<std::ptrdiff_t>(hours)};
}

std::size_t first_simulated_day(const RunSpec& spec, const DataBundle& data) {
    if (data.days() < spec.days + 2)
        throw InputError("data holds " + std::to_string(data.days()) + " days; simulating " +
                         std::to_string(spec.days) + " needs at least two more for training");
    return data.days() - spec.days;
}

std::filesystem::path day_dir(const std::filesystem::path& base, std::size_t day_index) {
    std::ostringstream os;
    os << "day_" << (day_index + 1 < 10 ? "0" : "") << day_index + 1;
    return base / os.str();
}

}  // namespace

BuildInputs day_inputs(const RunSpec& spec, const DataBundle& data, std::size_t day, double soc_initial) {
    const auto hours = static_cast<std::size_t>(spec.config.horizon_hours);
    BuildInputs in;
    in.config = spec.config;
    in.soc_initial = soc_initial;

    const std::size_t window = std::min(spec.price_window_days, day);
    std::vector<DailyPricePair> history;
    for (std::size_t d = day - window; d < day; ++d)
        history.push_back({day_slice(data.msd.column(msd_price_columns[0]), d, hours),
                           day_slice(data.msd.column(msd_price_columns[1]), d, hours)});
    const auto prices = build_price_scenarios(history, hours);
    in.prices = reduce_scenarios(prices, std::min(spec.n_prices, prices.size()));

    MultiSeries past;
    past.kinds = {TrajectoryKind::pv, TrajectoryKind::load, TrajectoryKind::member_demand};
    for (const auto& name : energy_columns) {
        const auto& col = data.energy.column(name);
        past.channels.emplace_back(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(day * 24));
    }
    const auto model = fit_dmc(past, spec.dmc_bins);
    const auto start = last_observed_state(model, past);
    const auto sampled =
        sample_scenarios(model, start, spec.energy_samples, hours, kernels::path_seed(spec.seed, day));
    in.energies = reduce_scenarios(sampled, spec.n_energies);

    in.price_export = {TrajectoryKind::price_export, day_slice(data.grid.column(grid_price_columns[0]), day, hours)};
    in.price_import = {TrajectoryKind::price_import, day_slice(data.grid.column(grid_price_columns[1]), day, hours)};
    return in;
}

RealizedDay realized_day(const RunSpec& spec, const DataBundle& data, std::size_t day) {
    const auto hours = static_cast<std::size_t>(spec.config.horizon_hours);
    RealizedDay r;
    r.energy.pv = day_slice(data.energy.column(energy_columns[0]), day, hours);
    r.energy.load = day_slice(data.energy.column(energy_columns[1]), day, hours);
    r.energy.member_demand = day_slice(data.energy.column(energy_columns[2]), day, hours);
    r.sell_max = day_slice(data.msd.column(msd_price_columns[0]), day, hours);
    r.buy_min = day_slice(data.msd.column(msd_price_columns[1]), day, hours);
    return r;
}

DayOutcome execute_day(BuildInputs inputs, const RealizedDay& realized, CaseId c, SolveRequest solver) {
    apply_case(inputs, c);
    const ModelContext ctx = make_context(inputs);
    const MilpInstance inst = build_instance(ctx);
    if (!solver.run_dir.empty()) {
        std::filesystem::create_directories(solver.run_dir);
        std::ofstream(solver.run_dir / "instance.json") << emit_symbol_map(inst);
    }
    if (!inputs.bids_disabled && solver.start.empty()) {
        // the same day without bids is quick to solve and feasible here
        BuildInputs restricted = inputs;
        restricted.bids_disabled = true;
        SolveRequest first = solver;
        if (!solver.run_dir.empty()) first.run_dir = solver.run_dir / "no_bids";
        const Solution s0 = solve(build_instance(make_context(restricted)), first);
        if (s0.status == SolveStatus::optimal || s0.status == SolveStatus::gap_limit) solver.start = s0.values;
    }
    const Solution sol = solve(inst, solver);
    if (sol.status != SolveStatus::optimal && sol.status != SolveStatus::gap_limit) {
        std::string where = solver.run_dir.empty() ? std::string("(no run directory kept)")
                                                   : (solver.run_dir / "instance.lp").string();
        throw SolveError("day-ahead program is " + to_string(sol.status) + "; instance: " + where);
    }

    DayOutcome out;
    out.case_id = c;
    out.status = sol.status;
    out.mip_gap = sol.mip_gap;
    out.plan = extract_program(inst, ctx, sol);
    out.planned_objective = out.plan.objective;
    out.price_probabilities = ctx.prices.probabilities();
    out.energy_probabilities = ctx.energies.probabilities();
    out.realized = realized;
    out.soc_initial = inputs.soc_initial;
    out.accepted = decide_acceptance(out.plan.program, realized.sell_max, realized.buy_min);
    out.dispatch = realtime_dispatch(out.plan.program, out.accepted, realized.energy, ctx.config, inputs.soc_initial);
    out.tariffs = {ctx.price_export, ctx.price_import, ctx.penalty_sell, ctx.penalty_buy,
                   ctx.config.incentive_shared};
    out.cash = settle(out.dispatch, out.plan.program, out.accepted, realized.energy, out.tariffs);
    return out;
}

DayOutcome run_day(const RunSpec& spec, const DataBundle& data, std::size_t day_index, double soc_initial) {
    const std::size_t day = first_simulated_day(spec, data) + day_index;
    if (day >= data.days()) throw InputError("day index " + std::to_string(day_index) + " is past the data");
    SolveRequest req = spec.solver;
    if (!spec.out_dir.empty()) req.run_dir = day_dir(spec.out_dir, day_index);
    DayOutcome out = execute_day(day_inputs(spec, data, day, soc_initial), realized_day(spec, data, day),
                                 spec.case_id, req);
    out.day = day;
    out.date = data.energy.timestamps[day * 24];
    return out;
}

WeekResult run_week(const RunSpec& spec) { return run_week(spec, load_data(spec.data_dir)); }

WeekResult run_week(const RunSpec& spec, const DataBundle& data) {
    const auto errs = spec.validate();
    if (!errs.empty()) throw InputError("invalid run spec: " + errs.front());
    WeekResult week;
    week.spec = spec;
    double soc = spec.config.soc_initial;
    for (std::size_t i = 0; i < spec.days; ++i) {
        week.days.push_back(run_day(spec, data, i, soc));
        soc = week.days.back().soc_final();
        week.total += week.days.back().cash.total;
        week.planned_objective += week.days.back().planned_objective;
    }
    if (!spec.out_dir.empty()) write_week_reports(week, spec.out_dir);
    return week;
}

namespace {

using ojson = nlohmann::ordered_json;

const char* const cash_terms[] = {"export_revenue_eur", "import_cost_eur",  "shared_incentive_eur",
                                  "msd_sell_revenue_eur", "msd_buy_cost_eur", "penalty_sell_eur",
                                  "penalty_buy_refund_eur", "net_eur"};

std::vector<double> terms_of(const CashFlow& c) {
    return {c.export_revenue, c.import_cost,  c.shared_incentive,   c.msd_sell_revenue,
            c.msd_buy_cost,   c.penalty_sell, c.penalty_buy_refund, c.net};
}

ojson cash_object(const CashFlow& c) {
    ojson j;
    const auto v = terms_of(c);
    for (std::size_t i = 0; i < v.size(); ++i) j[cash_terms[i]] = v[i];
    return j;
}

std::string cash_header() {
    std::string h;
    for (const char* t : cash_terms) h += std::string(",") + t;
    return h;
}

std::string cash_cells(const CashFlow& c) {
    std::string out;
    for (double v : terms_of(c)) out += "," + format_double(v);
    return out;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write " + p.string());
    out << text;
}

}  // namespace

std::string week_report_json(const WeekResult& week) {
    const auto& spec = week.spec;
    ojson doc;
    doc["seed"] = spec.seed;
    doc["case"] = to_string(spec.case_id);
    doc["backend"] = to_string(spec.solver.backend);
    doc["n_prices"] = spec.n_prices;
    doc["n_energies"] = spec.n_energies;
    doc["energy_samples"] = spec.energy_samples;
    doc["price_window_days"] = spec.price_window_days;
    doc["config"] = ojson::parse(config_to_json_text(spec.config));
    doc["days"] = ojson::array();
    for (std::size_t i = 0; i < week.days.size(); ++i) {
        const auto& d = week.days[i];
        ojson j;
        j["day"] = i + 1;
        j["date"] = d.date;
        j["status"] = to_string(d.status);
        j["planned_objective_eur"] = d.planned_objective;
        j["mip_gap"] = d.mip_gap;
        j["soc_initial"] = d.soc_initial;
        j["soc_final"] = d.soc_final();
        std::size_t sells = 0, buys = 0, accepted = 0;
        for (std::size_t k = 0; k < d.plan.program.bids.size(); ++k) {
            const auto& b = d.plan.program.bids[k];
            if (!b) continue;
            (b->side == BidSide::sell ? sells : buys)++;
            accepted += d.accepted.sell[k] || d.accepted.buy[k];
        }
        j["sell_bids"] = sells;
        j["buy_bids"] = buys;
        j["accepted_bids"] = accepted;
        j["cashflow"] = cash_object(d.cash.total);
        doc["days"].push_back(std::move(j));
    }
    doc["planned_objective_eur"] = week.planned_objective;
    doc["cashflow"] = cash_object(week.total);
    return doc.dump(1) + "\n";
}

std::string week_cashflow_csv(const WeekResult& week) {
    std::string out = "day,hour" + cash_header() + "\n";
    for (std::size_t i = 0; i < week.days.size(); ++i) {
        const auto& cash = week.days[i].cash;
        const std::string day = std::to_string(i + 1);
        for (std::size_t k = 0; k < cash.hours.size(); ++k)
            out += day + "," + std::to_string(k + 1) + cash_cells(cash.hours[k]) + "\n";
        out += day + ",total" + cash_cells(cash.total) + "\n";
    }
    out += "week,total" + cash_cells(week.total) + "\n";
    return out;
}

std::string bids_csv(const WeekResult& week) {
    std::string out = "day,hour,side,price_eur_kwh,quantity_kwh,accepted,error_kwh,clearing_price_eur_kwh\n";
    for (std::size_t i = 0; i < week.days.size(); ++i) {
        const auto& d = week.days[i];
        for (std::size_t k = 0; k < d.plan.program.bids.size(); ++k) {
            const auto& b = d.plan.program.bids[k];
            if (!b) continue;
            const bool sell = b->side == BidSide::sell;
            const bool acc = sell ? d.accepted.sell[k] : d.accepted.buy[k];
            const auto& h = d.dispatch.hours[k];
            out += std::to_string(i + 1) + "," + std::to_string(k + 1) + "," + to_string(b->side) + "," +
                   format_double(b->price) + "," + format_double(b->quantity) + "," + (acc ? "1" : "0") + "," +
                   format_double(sell ? h.error_sell : h.error_buy) + "," +
                   format_double(sell ? d.realized.sell_max[k] : d.realized.buy_min[k]) + "\n";
        }
    }
    return out;
}

std::string soc_csv(const WeekResult& week) {
    std::string out = "day,hour,realized_soc,planned_min,planned_max,planned_expected\n";
    for (std::size_t i = 0; i < week.days.size(); ++i) {
        const auto& d = week.days[i];
        const auto& soc = d.plan.soc;
        for (std::size_t k = 0; k <= d.dispatch.hours.size(); ++k) {
            const double real = k == 0 ? d.soc_initial : d.dispatch.hours[k - 1].soc;
            double lo = std::numeric_limits<double>::infinity(), hi = -lo, mean = 0.0;
            for (std::size_t s = 0; s < soc.size(); ++s)
                for (std::size_t l = 0; l < soc[s].size(); ++l) {
                    const double v = k == 0 ? d.soc_initial : soc[s][l][k - 1];
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                    mean += d.price_probabilities[s] * d.energy_probabilities[l] * v;
                }
            out += std::to_string(i + 1) + "," + std::to_string(k) + "," + format_double(real) + "," +
                   format_double(lo) + "," + format_double(hi) + "," + format_double(mean) + "\n";
        }
    }
    return out;
}

std::string soc_long_csv(const WeekResult& week) {
    std::string out = "day,hour,series,soc\n";
    for (std::size_t i = 0; i < week.days.size(); ++i) {
        const auto& d = week.days[i];
        const std::string day = std::to_string(i + 1);
        for (std::size_t k = 0; k <= d.dispatch.hours.size(); ++k) {
            const double real = k == 0 ? d.soc_initial : d.dispatch.hours[k - 1].soc;
            out += day + "," + std::to_string(k) + ",realized," + format_double(real) + "\n";
        }
        for (std::size_t s = 0; s < d.plan.soc.size(); ++s)
            for (std::size_t l = 0; l < d.plan.soc[s].size(); ++l) {
                const std::string series = "s" + std::to_string(s + 1) + "_l" + std::to_string(l + 1);
                out += day + ",0," + series + "," + format_double(d.soc_initial) + "\n";
                for (std::size_t k = 0; k < d.plan.soc[s][l].size(); ++k)
                    out += day + "," + std::to_string(k + 1) + "," + series + "," +
                           format_double(d.plan.soc[s][l][k]) + "\n";
            }
    }
    return out;
}

std::string cashflow_long_csv(const WeekResult& week) {
    std::string out = "day,hour,term,value_eur\n";
    for (std::size_t i = 0; i < week.days.size(); ++i) {
        const auto& cash = week.days[i].cash;
        for (std::size_t k = 0; k < cash.hours.size(); ++k) {
            const auto v = terms_of(cash.hours[k]);
            for (std::size_t t = 0; t < v.size(); ++t)
                out += std::to_string(i + 1) + "," + std::to_string(k + 1) + "," + cash_terms[t] + "," +
                       format_double(v[t]) + "\n";
        }
    }
    return out;
}

void write_week_reports(const WeekResult& week, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_text(dir / "report.json", week_report_json(week));
    write_text(dir / "cashflow.csv", week_cashflow_csv(week));
    write_text(dir / "bids.csv", bids_csv(week));
    write_text(dir / "soc.csv", soc_csv(week));
    write_text(dir / "soc_long.csv", soc_long_csv(week));
    write_text(dir / "cashflow_long.csv", cashflow_long_csv(week));
}

const CaseRow& CaseComparison::row(CaseId c) const {
    for (const auto& r : rows)
        if (r.case_id == c) return r;
    throw InputError("comparison has no row for " + to_string(c));
}

double percent_delta(double value, double reference) {
    if (reference == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return 100.0 * (value - reference) / std::abs(reference);
}

CaseComparison compare_cases(const RunSpec& spec) {
    const DataBundle data = load_data(spec.data_dir);
    CaseComparison cmp;
    for (CaseId c : all_cases) {
        RunSpec s = spec;
        s.case_id = c;
        if (!spec.out_dir.empty()) s.out_dir = spec.out_dir / to_string(c);
        const WeekResult w = run_week(s, data);
        cmp.rows.push_back({c, w.total.net, w.planned_objective});
    }
    if (!spec.out_dir.empty()) {
        std::filesystem::create_directories(spec.out_dir);
        write_text(spec.out_dir / "comparison.csv", comparison_csv(cmp));
    }
    return cmp;
}

namespace {

std::string pct_text(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string comparison_csv(const CaseComparison& cmp) {
    const double c3 = cmp.row(CaseId::neither).net, c1 = cmp.row(CaseId::no_msd).net;
    std::string out = "case,net_eur,delta_vs_case3_pct,delta_vs_case1_pct\n";
    for (const auto& r : cmp.rows)
        out += case_label(r.case_id) + "," + format_double(r.net) + "," + pct_text(percent_delta(r.net, c3)) + "," +
               pct_text(percent_delta(r.net, c1)) + "\n";
    return out;
}

std::string comparison_table(const CaseComparison& cmp) {
    const double c3 = cmp.row(CaseId::neither).net, c1 = cmp.row(CaseId::no_msd).net;
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %14s %14s %14s\n", "case", "net EUR", "vs Case 3 %", "vs Case 1 %");
    out += buf;
    for (const auto& r : cmp.rows) {
        std::snprintf(buf, sizeof buf, "%-8s %14.2f %14s %14s\n", case_label(r.case_id).c_str(), r.net,
                      pct_text(percent_delta(r.net, c3)).c_str(), pct_text(percent_delta(r.net, c1)).c_str());
        out += buf;
    }
    return out;
}

}  // namespace rec
