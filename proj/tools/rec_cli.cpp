// rec: plan, simulate and compare the community's day-ahead program.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rec/exchange.hpp"
#include "rec/sim_harness.hpp"

#ifndef REC_DEFAULT_DATA_DIR
#define REC_DEFAULT_DATA_DIR "data/synthetic"
#endif

namespace {

struct Options {
    std::string config_path;
    std::string data_dir = REC_DEFAULT_DATA_DIR;
    std::string case_name = "base";
    std::size_t nm = 10, nr = 10, samples = 300, days = 7;
    std::uint64_t seed = 1;
    std::string backend = "external";
    std::string out_dir;
    double time_limit = 60.0;
    double gap = 1e-6;
    std::size_t day = 1;
    double soc = -1.0;
};

void add_common(CLI::App* app, Options& o) {
    app->add_option("--config", o.config_path, "RecConfig JSON file (defaults apply to missing keys)");
    app->add_option("--data-dir", o.data_dir, "directory with energy.csv, msd_prices.csv, grid_prices.csv");
    app->add_option("--case", o.case_name, "base | no_msd | no_incentive | neither")
        ->check(CLI::IsMember({"base", "no_msd", "no_incentive", "neither"}));
    app->add_option("--nm", o.nm, "price scenarios kept after reduction")->check(CLI::PositiveNumber);
    app->add_option("--nr", o.nr, "energy scenarios kept after reduction")->check(CLI::PositiveNumber);
    app->add_option("--samples", o.samples, "energy scenarios sampled before reduction")->check(CLI::PositiveNumber);
    app->add_option("--days", o.days, "simulated days, taken from the end of the data")->check(CLI::PositiveNumber);
    app->add_option("--seed", o.seed, "seed for all sampling");
    app->add_option("--backend", o.backend, "external | reference")
        ->check(CLI::IsMember({"external", "reference"}));
    app->add_option("--out-dir", o.out_dir, "where reports and exchange files go");
    app->add_option("--time-limit", o.time_limit, "solver time limit per day, seconds")->check(CLI::PositiveNumber);
    app->add_option("--gap", o.gap, "relative MIP gap")->check(CLI::NonNegativeNumber);
}

rec::RunSpec make_spec(const Options& o) {
    rec::RunSpec spec;
    if (!o.config_path.empty()) spec.config = rec::load_config_json(o.config_path);
    spec.data_dir = o.data_dir;
    spec.case_id = rec::case_from_string(o.case_name);
    spec.n_prices = o.nm;
    spec.n_energies = o.nr;
    spec.energy_samples = o.samples;
    spec.days = o.days;
    spec.seed = o.seed;
    spec.solver.backend = rec::backend_from_string(o.backend);
    spec.solver.time_limit_s = o.time_limit;
    spec.solver.rel_gap = o.gap;
    if (spec.solver.backend == rec::Backend::reference) spec.solver.binary_limit = 1u << 20;
    spec.out_dir = o.out_dir;
    const auto errs = spec.validate();
    if (!errs.empty()) {
        std::string all;
        for (const auto& e : errs) all += "\n  " + e;
        throw rec::InputError("invalid settings:" + all);
    }
    return spec;
}

void print_cash(const rec::CashFlow& c) {
    std::printf("  export revenue      %12.2f EUR\n", c.export_revenue);
    std::printf("  import cost         %12.2f EUR\n", c.import_cost);
    std::printf("  shared incentive    %12.2f EUR\n", c.shared_incentive);
    std::printf("  MSD sell revenue    %12.2f EUR\n", c.msd_sell_revenue);
    std::printf("  MSD buy cost        %12.2f EUR\n", c.msd_buy_cost);
    std::printf("  sell penalties      %12.2f EUR\n", c.penalty_sell);
    std::printf("  buy refunds         %12.2f EUR\n", c.penalty_buy_refund);
    std::printf("  net                 %12.2f EUR\n", c.net);
}

int run_plan(const Options& o) {
    const auto spec = make_spec(o);
    const auto data = rec::load_data(spec.data_dir);
    if (o.day < 1 || o.day > spec.days) throw rec::InputError("--day must be in [1, " + std::to_string(spec.days) + "]");
    const double soc = o.soc >= 0.0 ? o.soc : spec.config.soc_initial;
    rec::WeekResult w;
    w.spec = spec;
    w.days.push_back(rec::run_day(spec, data, o.day - 1, soc));
    w.total = w.days.back().cash.total;
    w.planned_objective = w.days.back().planned_objective;
    if (!spec.out_dir.empty()) rec::write_week_reports(w, spec.out_dir);
    const auto& d = w.days.back();
    std::printf("day %s (%s), case %s\n", d.date.c_str(), rec::to_string(d.status).c_str(),
                rec::case_label(spec.case_id).c_str());
    std::printf("planned expected cash flow %.2f EUR (gap %.2g)\n", d.planned_objective, d.mip_gap);
    std::printf("%-4s %10s %5s %9s %9s %4s\n", "hour", "baseline", "side", "price", "qty", "acc");
    for (std::size_t k = 0; k < d.plan.program.bids.size(); ++k) {
        const auto& b = d.plan.program.bids[k];
        const bool acc = d.accepted.sell[k] || d.accepted.buy[k];
        std::printf("%-4zu %10.2f %5s %9.4f %9.2f %4s\n", k + 1, d.plan.program.rec_baseline[k],
                    b ? rec::to_string(b->side).c_str() : "-", b ? b->price : 0.0, b ? b->quantity : 0.0,
                    b ? (acc ? "yes" : "no") : "");
    }
    std::printf("realized cash flow, SOC %.3f -> %.3f\n", d.soc_initial, d.soc_final());
    print_cash(d.cash.total);
    return 0;
}

int run_simulate(const Options& o) {
    const auto spec = make_spec(o);
    const auto w = rec::run_week(spec);
    std::printf("%zu days, case %s, seed %llu\n", w.days.size(), rec::case_label(spec.case_id).c_str(),
                static_cast<unsigned long long>(spec.seed));
    for (std::size_t i = 0; i < w.days.size(); ++i) {
        const auto& d = w.days[i];
        std::printf("  %s  planned %9.2f  net %9.2f  SOC %.3f -> %.3f  %s\n", d.date.substr(0, 10).c_str(),
                    d.planned_objective, d.cash.total.net, d.soc_initial, d.soc_final(),
                    rec::to_string(d.status).c_str());
    }
    print_cash(w.total);
    if (!spec.out_dir.empty()) std::printf("reports in %s\n", spec.out_dir.string().c_str());
    return 0;
}

int run_compare(const Options& o) {
    const auto spec = make_spec(o);
    const auto cmp = rec::compare_cases(spec);
    std::cout << rec::comparison_table(cmp);
    return 0;
}

int run_emit(const Options& o) {
    auto spec = make_spec(o);
    if (spec.out_dir.empty()) throw rec::InputError("emit needs --out-dir");
    const auto data = rec::load_data(spec.data_dir);
    if (o.day < 1 || o.day > spec.days) throw rec::InputError("--day must be in [1, " + std::to_string(spec.days) + "]");
    const std::size_t day = data.days() - spec.days + (o.day - 1);
    auto in = rec::day_inputs(spec, data, day, o.soc >= 0.0 ? o.soc : spec.config.soc_initial);
    rec::apply_case(in, spec.case_id);
    const auto inst = rec::build_instance(in);
    std::filesystem::create_directories(spec.out_dir);
    std::ofstream(spec.out_dir / "instance.lp") << rec::emit_exchange(inst);
    std::ofstream(spec.out_dir / "instance.json") << rec::emit_symbol_map(inst);
    std::printf("%zu variables (%zu binary), %zu constraints -> %s\n", inst.variables().size(),
                inst.binary_count(), inst.constraints().size(), (spec.out_dir / "instance.lp").string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Day-ahead program of a renewable energy community bidding in the ancillary services market"};
    app.require_subcommand(1);
    Options o;
    auto* plan = app.add_subcommand("plan", "plan, operate and settle one day");
    auto* simulate = app.add_subcommand("simulate", "simulate the week day by day");
    auto* compare = app.add_subcommand("compare", "simulate the week once per case and compare");
    auto* emit = app.add_subcommand("emit", "write one day's MILP without solving it");
    for (auto* sub : {plan, simulate, compare, emit}) add_common(sub, o);
    for (auto* sub : {plan, emit}) {
        sub->add_option("--day", o.day, "day of the simulated week, 1-based");
        sub->add_option("--soc", o.soc, "initial state of charge (default: config soc_initial)");
    }
    CLI11_PARSE(app, argc, argv);
    try {
        if (plan->parsed()) return run_plan(o);
        if (simulate->parsed()) return run_simulate(o);
        if (compare->parsed()) return run_compare(o);
        return run_emit(o);
    } catch (const rec::InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
