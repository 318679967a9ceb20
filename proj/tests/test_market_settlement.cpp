#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "rec/market_settlement.hpp"
#include "rec/solver_backend.hpp"

using namespace rec;

namespace {

DayAheadProgram program(std::vector<std::optional<Bid>> bids, std::vector<double> baseline) {
    DayAheadProgram p;
    p.bids = std::move(bids);
    p.rec_baseline = baseline;
    p.bess_baseline.assign(baseline.size(), 0.0);
    return p;
}

Tariffs flat_tariffs(std::size_t hours) {
    Tariffs t;
    t.price_export.assign(hours, 0.05);
    t.price_import.assign(hours, 0.2);
    t.penalty_sell = 0.3;
    t.penalty_buy = 0.01;
    t.incentive_shared = 0.119;
    return t;
}

RecConfig plant() {
    RecConfig c;
    c.horizon_hours = 1;
    return c;
}

}  // namespace

TEST_CASE("acceptance against realized clearing prices") {
    const auto p = program({Bid{0, BidSide::sell, 80, 5, true}, Bid{1, BidSide::sell, 100, 5, true},
                            Bid{2, BidSide::buy, 10, 5, true}, Bid{3, BidSide::buy, 30, 5, true}, std::nullopt,
                            Bid{5, BidSide::sell, 50, 5, false}},
                           std::vector<double>(6, 0.0));
    const auto a = decide_acceptance(p, {100, 100, 0, 0, 0, 100}, {0, 0, 20, 20, 20, 0});
    CHECK(a.sell == std::vector<char>{1, 1, 0, 0, 0, 0});
    CHECK(a.buy == std::vector<char>{0, 0, 0, 1, 0, 0});
    CHECK_THROWS_AS(decide_acceptance(p, {1}, {1}), InputError);
}

TEST_CASE("an accepted sell covers a pv shortfall from the battery") {
    const auto p = program({Bid{0, BidSide::sell, 0.2, 10.0, true}}, {20.0});
    const AcceptanceFlags acc{{1}, {0}};
    const auto forecast = realtime_dispatch(p, acc, {{50.0}, {10.0}, {10.0}}, plant(), 0.5);
    const auto actual = realtime_dispatch(p, acc, {{40.0}, {10.0}, {10.0}}, plant(), 0.5);
    CHECK(forecast.hours[0].discharge == doctest::Approx(0.0));
    CHECK(actual.hours[0].discharge == doctest::Approx(10.0));
    CHECK(actual.hours[0].rec_exchange == doctest::Approx(30.0));
    CHECK(actual.hours[0].error_sell == 0.0);
    CHECK(actual.hours[0].soc == doctest::Approx(0.5 - 10.0 / 0.95 / 250.0));
}

TEST_CASE("an empty battery leaves the full shortfall") {
    const auto p = program({Bid{0, BidSide::sell, 0.2, 10.0, true}}, {20.0});
    const auto d = realtime_dispatch(p, {{1}, {0}}, {{0.0}, {10.0}, {10.0}}, plant(), 0.0);
    CHECK(d.hours[0].discharge == 0.0);
    CHECK(d.hours[0].error_sell == 10.0);
    CHECK(d.hours[0].import_kwh == 10.0);
    CHECK(d.soc_final() == 0.0);
}

TEST_CASE("a rejected bid still steers toward the baseline without error") {
    const auto p = program({Bid{0, BidSide::sell, 0.2, 10.0, true}}, {20.0});
    const auto d = realtime_dispatch(p, {{0}, {0}}, {{40.0}, {10.0}, {10.0}}, plant(), 0.5);
    CHECK(d.hours[0].target == 20.0);
    CHECK(d.hours[0].rec_exchange == doctest::Approx(20.0));
    CHECK(d.hours[0].charge == doctest::Approx(0.0));
    CHECK(d.hours[0].error_sell == 0.0);
}

TEST_CASE("accepted buy: consume more, limited by renewable-only charging") {
    // target -30: battery should charge 40 but only 15 kWh of pv is available
    const auto p = program({Bid{0, BidSide::buy, 0.02, 20.0, true}}, {-10.0});
    auto cfg = plant();
    const auto d = realtime_dispatch(p, {{0}, {1}}, {{15.0}, {5.0}, {10.0}}, cfg, 0.5);
    CHECK(d.hours[0].charge == doctest::Approx(15.0));
    CHECK(d.hours[0].rec_exchange == doctest::Approx(-15.0));
    CHECK(d.hours[0].error_buy == doctest::Approx(15.0));
    cfg.renewable_only_charging = false;
    const auto free = realtime_dispatch(p, {{0}, {1}}, {{15.0}, {5.0}, {10.0}}, cfg, 0.5);
    CHECK(free.hours[0].charge == doctest::Approx(30.0));
    CHECK(free.hours[0].error_buy == 0.0);
}

TEST_CASE("random realizations keep every dispatch invariant") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t K = 24;
        RecConfig cfg;
        cfg.renewable_only_charging = trial % 2 == 0;
        cfg.battery_capacity_kwh = trial % 7 == 0 ? 0.0 : 50.0 + 300.0 * u(rng);
        DayAheadProgram p;
        RealizedEnergy r;
        AcceptanceFlags acc{std::vector<char>(K, 0), std::vector<char>(K, 0)};
        for (std::size_t k = 0; k < K; ++k) {
            p.rec_baseline.push_back(-150.0 + 300.0 * u(rng));
            p.bess_baseline.push_back(0.0);
            const double roll = u(rng);
            if (roll < 0.4) {
                p.bids.push_back(Bid{static_cast<int>(k), BidSide::sell, 0.2, 120.0 * u(rng), true});
                acc.sell[k] = u(rng) < 0.7;
            } else if (roll < 0.8) {
                p.bids.push_back(Bid{static_cast<int>(k), BidSide::buy, 0.02, 120.0 * u(rng), true});
                acc.buy[k] = u(rng) < 0.7;
            } else {
                p.bids.push_back(std::nullopt);
            }
            r.pv.push_back(60.0 * u(rng));
            r.load.push_back(30.0 * u(rng));
            r.member_demand.push_back(40.0 * u(rng));
        }
        const double soc0 = u(rng);
        const auto d = realtime_dispatch(p, acc, r, cfg, soc0);
        double soc = soc0;
        for (std::size_t k = 0; k < K; ++k) {
            const auto& h = d.hours[k];
            CHECK(h.soc >= 0.0);
            CHECK(h.soc <= 1.0);
            CHECK(h.charge * h.discharge == 0.0);
            CHECK(h.export_kwh * h.import_kwh == 0.0);
            CHECK(h.charge <= cfg.battery_power_kwh_per_slot + 1e-9);
            CHECK(h.discharge <= cfg.battery_power_kwh_per_slot + 1e-9);
            if (cfg.renewable_only_charging) CHECK(h.charge <= r.pv[k] + 1e-9);
            if (cfg.battery_capacity_kwh == 0.0) CHECK(h.charge + h.discharge == 0.0);
            CHECK(h.export_kwh - h.import_kwh == doctest::Approx(r.pv[k] - r.load[k] + h.discharge - h.charge));
            CHECK(h.rec_exchange == doctest::Approx(h.export_kwh - h.import_kwh - r.member_demand[k]));
            const double q = p.bids[k] ? p.bids[k]->quantity : 0.0;
            CHECK(h.error_sell <= q);
            CHECK(h.error_buy <= q);
            if (!acc.sell[k]) CHECK(h.error_sell == 0.0);
            if (!acc.buy[k]) CHECK(h.error_buy == 0.0);
            if (cfg.battery_capacity_kwh > 0.0) {
                soc += (cfg.eta_charge * h.charge - h.discharge / cfg.eta_discharge) / cfg.battery_capacity_kwh;
                CHECK(h.soc == doctest::Approx(soc).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("settlement examples") {
    SUBCASE("nothing happens") {
        const auto p = program({std::nullopt}, {0.0});
        const auto d = realtime_dispatch(p, {{0}, {0}}, {{10.0}, {10.0}, {0.0}}, plant(), 0.5);
        const auto r = settle(d, p, {{0}, {0}}, {{10.0}, {10.0}, {0.0}}, flat_tariffs(1));
        const CashFlow& c = r.total;
        CHECK(c.export_revenue == 0.0);
        CHECK(c.import_cost == 0.0);
        CHECK(c.shared_incentive == 0.0);
        CHECK(c.msd_sell_revenue == 0.0);
        CHECK(c.net == 0.0);
    }
    SUBCASE("shared energy incentive") {
        DispatchResult d;
        d.hours.push_back(DispatchHour{});
        d.hours[0].export_kwh = 30.0;
        const auto p = program({std::nullopt}, {0.0});
        const auto r = settle(d, p, {{0}, {0}}, {{0.0}, {0.0}, {50.0}}, flat_tariffs(1));
        CHECK(r.hours[0].shared_incentive == doctest::Approx(3.57));
        CHECK(r.hours[0].export_revenue == doctest::Approx(1.5));
    }
    SUBCASE("accepted sell with a shortfall") {
        DispatchResult d;
        d.hours.push_back(DispatchHour{});
        d.hours[0].error_sell = 2.0;
        d.hours[0].export_kwh = 8.0;
        const auto p = program({Bid{0, BidSide::sell, 0.2, 10.0, true}}, {0.0});
        const auto r = settle(d, p, {{1}, {0}}, {{0.0}, {0.0}, {0.0}}, flat_tariffs(1));
        CHECK(r.hours[0].msd_sell_revenue == doctest::Approx(2.0));
        CHECK(r.hours[0].penalty_sell == doctest::Approx(0.6));
        // the 8 kWh delivered are the service itself, not energy sold on top of it
        CHECK(r.hours[0].export_revenue == 0.0);
        CHECK(r.hours[0].import_cost == 0.0);
        CHECK(r.total.net == doctest::Approx(1.4));
    }
    SUBCASE("accepted buy with a shortfall") {
        DispatchResult d;
        d.hours.push_back(DispatchHour{});
        d.hours[0].error_buy = 4.0;
        d.hours[0].import_kwh = 16.0;
        const auto p = program({Bid{0, BidSide::buy, 0.02, 20.0, true}}, {0.0});
        const auto r = settle(d, p, {{0}, {1}}, {{0.0}, {0.0}, {0.0}}, flat_tariffs(1));
        CHECK(r.hours[0].msd_buy_cost == doctest::Approx(0.4));
        CHECK(r.hours[0].penalty_buy_refund == doctest::Approx(0.04));
        CHECK(r.hours[0].import_cost == 0.0);
        CHECK(r.total.net == doctest::Approx(-0.36));
    }
}

TEST_CASE("report totals and formats") {
    const auto p = program({Bid{0, BidSide::sell, 0.2, 10.0, true}, std::nullopt, Bid{2, BidSide::buy, 0.03, 5, true}},
                           {20.0, -5.0, 0.0});
    RealizedEnergy r{{40.0, 0.0, 30.0}, {10.0, 10.0, 5.0}, {10.0, 5.0, 20.0}};
    auto cfg = plant();
    cfg.horizon_hours = 3;
    const AcceptanceFlags acc{{1, 0, 0}, {0, 0, 1}};
    const auto rep = settle(realtime_dispatch(p, acc, r, cfg, 0.5), p, acc, r, flat_tariffs(3));
    CashFlow sum;
    for (const auto& h : rep.hours) {
        CHECK(h.net == doctest::Approx(h.balance()));
        sum += h;
    }
    CHECK(rep.total.net == doctest::Approx(sum.net));
    CHECK(rep.total.export_revenue == doctest::Approx(sum.export_revenue));

    const auto csv = cashflow_csv(rep);
    CHECK(csv.rfind("hour,export_revenue_eur,import_cost_eur,shared_incentive_eur,msd_sell_revenue_eur,"
                    "msd_buy_cost_eur,penalty_sell_eur,penalty_buy_refund_eur,net_eur\n1,",
                    0) == 0);
    CHECK(csv.find("\ntotal,") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    const auto json = cashflow_json(rep);
    CHECK(json.find("\"total\"") != std::string::npos);
    CHECK(json.find("\"hour\": 3") != std::string::npos);

    CHECK_THROWS_AS(settle(realtime_dispatch(p, acc, r, cfg, 0.5), p, acc, r, flat_tariffs(2)), InputError);
}

TEST_CASE("realizing a planned scenario reproduces its flows and value") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        testing::SmallSpec spec;
        spec.hours = 3;
        spec.n_prices = 1;
        spec.n_energies = 1;
        auto in = testing::random_inputs(seed, spec);
        in.bids_disabled = true;
        in.config.epsilon_max = 0.0;
        const auto ctx = make_context(in);
        const auto m = build_instance(ctx);
        const auto sol = reference_solve(m, 1 << 20);
        REQUIRE(sol.status == SolveStatus::optimal);
        const auto plan = extract_program(m, ctx, sol);

        for (int l = 0; l < ctx.n_energies; ++l) {
            RealizedEnergy r;
            for (int k = 0; k < ctx.hours; ++k) {
                r.pv.push_back(ctx.pv(k, l));
                r.load.push_back(ctx.load(k, l));
                r.member_demand.push_back(ctx.member_demand(k, l));
            }
            const AcceptanceFlags none{std::vector<char>(3, 0), std::vector<char>(3, 0)};
            const auto d = realtime_dispatch(plan.program, none, r, ctx.config, ctx.soc_initial);
            Tariffs t{ctx.price_export, ctx.price_import, ctx.penalty_sell, ctx.penalty_buy,
                      ctx.config.incentive_shared};
            const auto rep = settle(d, plan.program, none, r, t);

            double planned_value = 0.0;
            for (int k = 0; k < ctx.hours; ++k) {
                const auto& h = d.hours[static_cast<std::size_t>(k)];
                const auto& v = sol.values;
                CHECK(h.charge == doctest::Approx(v[m.var("P_c", k, 0, l)]).epsilon(1e-7).scale(1.0));
                CHECK(h.discharge == doctest::Approx(v[m.var("P_d", k, 0, l)]).epsilon(1e-7).scale(1.0));
                CHECK(h.rec_exchange == doctest::Approx(v[m.var("P_rec", k, 0, l)]).epsilon(1e-7).scale(1.0));
                CHECK(h.soc == doctest::Approx(plan.soc[0][static_cast<std::size_t>(l)][static_cast<std::size_t>(k)]));
                CHECK(h.error_sell == 0.0);
                CHECK(h.error_buy == 0.0);
                const auto kk = static_cast<std::size_t>(k);
                planned_value += v[m.var("Phat_e", k, 0, l)] * ctx.price_export[kk] -
                                 v[m.var("Phat_i", k, 0, l)] * ctx.price_import[kk] +
                                 v[m.var("P_sh", k, 0, l)] * ctx.config.incentive_shared;
            }
            CHECK(rep.total.net == doctest::Approx(planned_value).epsilon(1e-7).scale(1.0));
        }
    }
}
