#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rec/core_types.hpp"
#include "rec/csv_io.hpp"

using namespace rec;

namespace {

bool mentions(const std::vector<std::string>& errs, const std::string& what) {
    for (const auto& e : errs)
        if (e.find(what) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("default config is valid and matches the plant of the experiment") {
    RecConfig c;
    CHECK(validate_config(c).empty());
    CHECK(c.battery_capacity_kwh == 250.0);
    CHECK(c.battery_power_kwh_per_slot == 120.0);
    CHECK(c.p_export_max == 200.0);
    CHECK(c.p_import_max == 200.0);
    CHECK(c.eta_charge == 0.95);
    CHECK(c.soc_final_min == 0.3);
    CHECK(c.soc_final_max == 0.7);
    CHECK(c.incentive_shared == doctest::Approx(0.119));
}

TEST_CASE("config validation names the field and the bound") {
    RecConfig c;
    c.eta_charge = 1.2;
    auto errs = validate_config(c);
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].find("eta_charge") != std::string::npos);
    CHECK(errs[0].find("(0, 1]") != std::string::npos);

    c = {};
    c.soc_final_min = 0.8;
    c.soc_final_max = 0.2;
    CHECK(mentions(validate_config(c), "soc_final_min must be <= soc_final_max"));

    c = {};
    c.battery_capacity_kwh = -1.0;
    c.p_export_max = 0.0;
    errs = validate_config(c);
    CHECK(errs.size() == 2);
    CHECK(mentions(errs, "battery_capacity_kwh"));
    CHECK(mentions(errs, "p_export_max"));

    c = {};
    c.battery_capacity_kwh = 0.0;
    CHECK(validate_config(c).empty());
}

TEST_CASE("config json round-trips and rejects unknown keys") {
    RecConfig c;
    c.penalty_sell = 0.9;
    c.renewable_only_charging = false;
    c.shared_energy_cap_mode = SharedEnergyCapMode::rec_exchange;
    const auto text = config_to_json_text(c);
    const RecConfig back = config_from_json_text(text);
    CHECK(config_to_json_text(back) == text);
    CHECK(back.penalty_sell.value() == 0.9);
    CHECK_FALSE(back.penalty_buy.has_value());
    CHECK_FALSE(back.renewable_only_charging);

    CHECK_THROWS_AS(config_from_json_text(R"({"battery_kwh": 3})"), InputError);
    CHECK_THROWS_AS(config_from_json_text(R"({"eta_charge": "high"})"), InputError);
    CHECK_THROWS_AS(config_from_json_text("{"), InputError);
    CHECK_FALSE(validate_config(config_from_json_text(R"({"eta_charge": 2})")).empty());
    const RecConfig partial = config_from_json_text(R"({"battery_capacity_kwh": 100})");
    CHECK(partial.battery_capacity_kwh == 100.0);
    CHECK(partial.p_export_max == 200.0);
}

TEST_CASE("trajectories must have the horizon length and be non-negative") {
    DayTrajectory t{TrajectoryKind::pv, std::vector<double>(24, 1.0)};
    CHECK_NOTHROW(t.validate(24));
    CHECK_THROWS_AS(t.validate(23), InputError);
    t.values[3] = -0.1;
    CHECK_THROWS_AS(t.validate(24), InputError);
    t.values[3] = std::nan("");
    CHECK_THROWS_AS(t.validate(24), InputError);
}

TEST_CASE("scenario set probabilities sum to one within 1e-9") {
    const std::vector<TrajectoryKind> kinds{TrajectoryKind::pv};
    std::vector<Scenario> sc(3, Scenario{{{1.0, 2.0}}});
    CHECK_NOTHROW(ScenarioSet(kinds, sc, {0.2, 0.3, 0.5}));
    CHECK_NOTHROW(ScenarioSet(kinds, sc, {0.2, 0.3, 0.5 + 5e-10}));
    CHECK_THROWS_AS(ScenarioSet(kinds, sc, {0.2, 0.3, 0.5 + 1e-8}), InputError);
    CHECK_THROWS_AS(ScenarioSet(kinds, sc, {0.2, 0.3}), InputError);
    CHECK_THROWS_AS(ScenarioSet(kinds, sc, {-0.2, 0.7, 0.5}), InputError);

    ScenarioSet set(kinds, sc, {0.2, 0.3, 0.5});
    CHECK(set.horizon() == 2);
    CHECK(set.value(1, TrajectoryKind::pv, 1) == 2.0);
    CHECK_THROWS_AS(set.channel_index(TrajectoryKind::load), InputError);
    CHECK(set.truncated(1).horizon() == 1);
}

TEST_CASE("bid invariants") {
    RecConfig c;
    c.horizon_hours = 2;
    CHECK(check_bids({{0, BidSide::sell, 0.2, 10.0, true}, {1, BidSide::buy, 0.1, 5.0, true}}, c).empty());
    CHECK(mentions(check_bids({{0, BidSide::sell, 0.2, 10.0, true}, {0, BidSide::buy, 0.1, 5.0, true}}, c),
                   "more than one"));
    CHECK(mentions(check_bids({{0, BidSide::sell, 0.2, 250.0, true}}, c), "exchange limit"));
    CHECK(mentions(check_bids({{0, BidSide::sell, 0.2, 1.0, false}}, c), "unsubmitted"));
    CHECK(mentions(check_bids({{5, BidSide::sell, 0.2, 1.0, true}}, c), "out of range"));
}

TEST_CASE("program price choice must match the submitted bid") {
    std::vector<Scenario> sc{Scenario{{{0.3}, {0.05}}}, Scenario{{{0.4}, {0.02}}}};
    ScenarioSet prices({TrajectoryKind::price_sell_max, TrajectoryKind::price_buy_min}, sc, {0.5, 0.5});
    DayAheadProgram p;
    p.rec_baseline = {0.0};
    p.bess_baseline = {0.0};
    p.bids = {Bid{0, BidSide::sell, 0.4, 5.0, true}};
    p.sell_price_choice = {{0, 1}};
    p.buy_price_choice = {{0, 0}};
    CHECK(check_program(p, prices).empty());
    CHECK(p.bid_at(0, BidSide::sell).has_value());
    CHECK_FALSE(p.bid_at(0, BidSide::buy).has_value());

    p.bids[0]->price = 0.3;
    CHECK(mentions(check_program(p, prices), "differs"));
    p.sell_price_choice = {{1, 1}};
    CHECK(mentions(check_program(p, prices), "sums to 2"));
}

TEST_CASE("hourly csv parsing") {
    const std::string text =
        "timestamp,pv_kwh,load_kwh,member_demand_kwh\n"
        "2022-07-01T00:00,0,2.5,7\n"
        "2022-07-01T01:00,1.25,2,6.5\n";
    const auto s = parse_hourly_csv(text, energy_columns);
    CHECK(s.rows() == 2);
    CHECK(s.column("pv_kwh")[1] == 1.25);
    CHECK(s.column("member_demand_kwh")[0] == 7.0);
    CHECK(parse_hourly_csv(format_hourly_csv(s), energy_columns).column("load_kwh") == s.column("load_kwh"));

    CHECK_THROWS_AS(parse_hourly_csv("timestamp,pv_kwh\n", energy_columns), InputError);
    CHECK_THROWS_WITH_AS(parse_hourly_csv("timestamp,pv_kwh,load_kwh,member_demand_kwh\nt,1,x,2\n", energy_columns),
                         doctest::Contains("line 2"), InputError);
    CHECK_THROWS_AS(parse_hourly_csv("timestamp,pv_kwh,load_kwh,member_demand_kwh\nt,1,-2,2\n", energy_columns),
                    InputError);
    CHECK_THROWS_AS(parse_hourly_csv("timestamp,pv_kwh,load_kwh,member_demand_kwh\nt,1,2\n", energy_columns),
                    InputError);
}

TEST_CASE("shortest round-trip number formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(250) == "250");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
