// Small synthetic community instances for tests.

#ifndef REC_TESTS_FIXTURES_HPP
#define REC_TESTS_FIXTURES_HPP

#include <random>

#include "rec/milp_builder.hpp"

namespace rec::testing {

struct SmallSpec {
    int hours = 3;
    int n_prices = 2;
    int n_energies = 2;
    double battery_kwh = 40.0;
    double battery_power = 20.0;
    double soc_initial = 0.5;
};

/// Random but well-formed inputs: prices in cents, energies of a few tens of kWh.
inline BuildInputs random_inputs(std::uint64_t seed, const SmallSpec& spec = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BuildInputs in;
    in.config.horizon_hours = spec.hours;
    in.config.p_export_max = 60.0;
    in.config.p_import_max = 60.0;
    in.config.battery_capacity_kwh = spec.battery_kwh;
    in.config.battery_power_kwh_per_slot = spec.battery_power;
    in.config.soc_initial = spec.soc_initial;
    in.soc_initial = spec.soc_initial;

    std::vector<Scenario> ps;
    for (int s = 0; s < spec.n_prices; ++s) {
        Scenario sc;
        sc.channels.assign(2, std::vector<double>(spec.hours));
        for (int k = 0; k < spec.hours; ++k) {
            // two-decimal prices make boundary ties between scenarios likely
            sc.channels[0][k] = std::round(100.0 * (0.10 + 0.20 * u(rng))) / 100.0;
            sc.channels[1][k] = std::round(100.0 * (0.01 + 0.06 * u(rng))) / 100.0;
        }
        ps.push_back(std::move(sc));
    }
    std::vector<double> pp(spec.n_prices, 1.0 / spec.n_prices);
    in.prices = ScenarioSet({TrajectoryKind::price_sell_max, TrajectoryKind::price_buy_min}, ps, pp);

    std::vector<Scenario> es;
    std::vector<double> ep;
    double total = 0.0;
    for (int l = 0; l < spec.n_energies; ++l) {
        Scenario sc;
        sc.channels.assign(3, std::vector<double>(spec.hours));
        for (int k = 0; k < spec.hours; ++k) {
            sc.channels[0][k] = 40.0 * u(rng);
            sc.channels[1][k] = 5.0 + 10.0 * u(rng);
            sc.channels[2][k] = 20.0 * u(rng);
        }
        es.push_back(std::move(sc));
        ep.push_back(0.5 + u(rng));
        total += ep.back();
    }
    for (double& p : ep) p /= total;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < ep.size(); ++i) sum += ep[i];
    ep.back() = 1.0 - sum;
    in.energies = ScenarioSet({TrajectoryKind::pv, TrajectoryKind::load, TrajectoryKind::member_demand}, es, ep);

    in.price_export.values.resize(spec.hours);
    in.price_import.values.resize(spec.hours);
    for (int k = 0; k < spec.hours; ++k) {
        in.price_export.values[k] = 0.05 + 0.05 * u(rng);
        in.price_import.values[k] = 0.15 + 0.10 * u(rng);
    }
    return in;
}

}  // namespace rec::testing

#endif
