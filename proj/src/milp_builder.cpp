#include "rec/milp_builder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rec {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
    std::string out = "instance build refused:";
    for (const auto& s : v) out += "\n  " + s;
    return out;
}

std::string idx_name(const std::string& symbol, int k, int s = -1, int l = -1) {
    std::string n = symbol + "_" + std::to_string(k + 1);
    if (s >= 0) n += "_" + std::to_string(s + 1);
    if (l >= 0) n += "_" + std::to_string(l + 1);
    return n;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

BuildError::BuildError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

double ModelContext::sell_clearing(int k, int s) const {
    return prices.value(static_cast<std::size_t>(s), TrajectoryKind::price_sell_max, static_cast<std::size_t>(k));
}
double ModelContext::buy_clearing(int k, int s) const {
    return prices.value(static_cast<std::size_t>(s), TrajectoryKind::price_buy_min, static_cast<std::size_t>(k));
}
double ModelContext::pv(int k, int l) const {
    return energies.value(static_cast<std::size_t>(l), TrajectoryKind::pv, static_cast<std::size_t>(k));
}
double ModelContext::load(int k, int l) const {
    return energies.value(static_cast<std::size_t>(l), TrajectoryKind::load, static_cast<std::size_t>(k));
}
double ModelContext::member_demand(int k, int l) const {
    return energies.value(static_cast<std::size_t>(l), TrajectoryKind::member_demand,
                          static_cast<std::size_t>(k));
}

int ModelContext::sell_accepts(int k, int s, int j) const {
    return sell_clearing(k, j) <= sell_clearing(k, s) ? 1 : 0;
}
int ModelContext::buy_accepts(int k, int s, int j) const {
    return buy_clearing(k, j) >= buy_clearing(k, s) ? 1 : 0;
}

double default_epsilon_max(const ScenarioSet& energies) {
    double eps = 0.0;
    for (std::size_t k = 0; k < energies.horizon(); ++k) {
        double lo = infinity, hi = -infinity;
        for (std::size_t l = 0; l < energies.size(); ++l) {
            const double bal = energies.value(l, TrajectoryKind::pv, k) -
                               energies.value(l, TrajectoryKind::load, k) -
                               energies.value(l, TrajectoryKind::member_demand, k);
            lo = std::min(lo, bal);
            hi = std::max(hi, bal);
        }
        eps = std::max(eps, hi - lo);
    }
    return eps;
}

ModelContext make_context(const BuildInputs& in) {
    std::vector<std::string> errs = validate_config(in.config);
    const int hours = in.config.horizon_hours;
    const auto K = static_cast<std::size_t>(std::max(hours, 0));

    auto check_set = [&](const ScenarioSet& set, const char* what,
                         std::initializer_list<TrajectoryKind> kinds) {
        if (set.empty()) {
            errs.push_back(std::string(what) + " scenario set is empty");
            return;
        }
        if (set.horizon() != K)
            errs.push_back(std::string(what) + " scenarios have length " + std::to_string(set.horizon()) +
                           ", expected " + std::to_string(K));
        for (auto kind : kinds) {
            try {
                const std::size_t c = set.channel_index(kind);
                for (const auto& sc : set.scenarios())
                    for (double v : sc.channels[c])
                        if (!std::isfinite(v) || v < 0.0) {
                            errs.push_back(std::string(what) + " scenarios: invalid " + to_string(kind) +
                                           " value " + fmt(v));
                            return;
                        }
            } catch (const InputError& e) {
                errs.push_back(e.what());
            }
        }
    };
    check_set(in.prices, "price", {TrajectoryKind::price_sell_max, TrajectoryKind::price_buy_min});
    check_set(in.energies, "energy", {TrajectoryKind::pv, TrajectoryKind::load, TrajectoryKind::member_demand});
    for (const auto* t : {&in.price_export, &in.price_import}) {
        try {
            t->validate(K);
        } catch (const InputError& e) {
            errs.push_back(e.what());
        }
    }
    if (!(in.soc_initial >= 0.0 && in.soc_initial <= 1.0))
        errs.push_back("soc_initial must lie in [0, 1] (got " + fmt(in.soc_initial) + ")");
    if (!errs.empty()) throw BuildError(errs);

    ModelContext ctx;
    ctx.config = in.config;
    ctx.prices = in.prices;
    ctx.energies = in.energies;
    ctx.price_export = in.price_export.values;
    ctx.price_import = in.price_import.values;
    ctx.soc_initial = in.soc_initial;
    ctx.bids_disabled = in.bids_disabled;
    ctx.hours = hours;
    ctx.n_prices = static_cast<int>(in.prices.size());
    ctx.n_energies = static_cast<int>(in.energies.size());

    double max_sell = -infinity, min_buy = infinity;
    for (int k = 0; k < hours; ++k)
        for (int s = 0; s < ctx.n_prices; ++s) {
            max_sell = std::max(max_sell, ctx.sell_clearing(k, s));
            min_buy = std::min(min_buy, ctx.buy_clearing(k, s));
        }
    ctx.penalty_sell = in.config.penalty_sell
                           ? *in.config.penalty_sell
                           : (max_sell > 0.0 ? 1.1 * max_sell : max_sell + 1e-3);
    ctx.penalty_buy = in.config.penalty_buy
                          ? *in.config.penalty_buy
                          : (min_buy > 0.0 ? 0.9 * min_buy : min_buy - 1e-3);
    if (!(ctx.penalty_sell > max_sell))
        errs.push_back("penalty_sell " + fmt(ctx.penalty_sell) +
                       " must exceed every sell clearing price (max " + fmt(max_sell) + ")");
    if (!(ctx.penalty_buy < min_buy))
        errs.push_back("penalty_buy " + fmt(ctx.penalty_buy) +
                       " must be below every buy clearing price (min " + fmt(min_buy) + ")");
    if (!errs.empty()) throw BuildError(errs);

    ctx.epsilon_max = in.config.epsilon_max ? *in.config.epsilon_max : default_epsilon_max(in.energies);
    return ctx;
}

void declare_variables(MilpInstance& m, const ModelContext& ctx) {
    const auto& c = ctx.config;
    const int K = ctx.hours, S = ctx.n_prices, L = ctx.n_energies;
    const double pe = c.p_export_max, pi = c.p_import_max, eps = ctx.epsilon_max;
    const bool battery = c.battery_capacity_kwh > 0.0;
    const double pb = battery ? c.battery_power_kwh_per_slot : 0.0;
    const auto B = VarKind::binary;
    const auto C = VarKind::continuous;

    auto per_k = [&](const char* sym, VarKind kind, double lo, double up) {
        for (int k = 0; k < K; ++k) m.add_variable(idx_name(sym, k), kind, lo, up, {sym, k});
    };
    auto per_ks = [&](const char* sym, VarKind kind, double lo, double up) {
        for (int k = 0; k < K; ++k)
            for (int s = 0; s < S; ++s) m.add_variable(idx_name(sym, k, s), kind, lo, up, {sym, k, s});
    };
    auto per_ksl = [&](const char* sym, VarKind kind, double lo, double up) {
        for (int k = 0; k < K; ++k)
            for (int s = 0; s < S; ++s)
                for (int l = 0; l < L; ++l)
                    m.add_variable(idx_name(sym, k, s, l), kind, lo, up, {sym, k, s, l});
    };

    const double bid_up = ctx.bids_disabled ? 0.0 : 1.0;
    per_k("P_plus", C, 0.0, pe);
    per_k("P_minus", C, 0.0, pi);
    per_k("b_plus", B, 0.0, bid_up);
    per_k("b_minus", B, 0.0, bid_up);
    // candidate-price index j shares the s slot
    per_ks("d_plus", B, 0.0, 1.0);
    per_ks("d_minus", B, 0.0, 1.0);
    per_ks("z_plus", C, 0.0, pe);
    per_ks("z_minus", C, 0.0, pi);
    per_ks("Gamma_plus", C, 0.0, pe);
    per_ks("Gamma_minus", C, 0.0, pi);
    per_ks("delta_plus", B, 0.0, 1.0);
    per_ks("delta_minus", B, 0.0, 1.0);
    per_ks("u_plus", B, 0.0, 1.0);
    per_ks("u_minus", B, 0.0, 1.0);
    per_k("Phat_rec", C, -infinity, infinity);
    per_k("Phat_b", C, -infinity, infinity);
    per_ksl("P_e", C, 0.0, pe);
    per_ksl("P_i", C, 0.0, pi);
    per_ksl("delta_e", B, 0.0, 1.0);
    per_ksl("Phat_e", C, 0.0, pe);
    per_ksl("Phat_i", C, 0.0, pi);
    per_ksl("deltahat_e", B, 0.0, 1.0);
    per_ksl("P_rec", C, -infinity, infinity);
    per_ksl("E_plus", C, 0.0, pe);
    per_ksl("E_minus", C, 0.0, pi);
    per_ksl("w_plus", C, 0.0, eps);
    per_ksl("w_minus", C, 0.0, eps);
    per_ksl("v_plus", C, 0.0, eps);
    per_ksl("v_minus", C, 0.0, eps);
    per_ksl("P_c", C, 0.0, pb);
    per_ksl("P_d", C, 0.0, pb);
    per_ksl("delta_c", B, 0.0, 1.0);
    per_ksl("P_sh", C, 0.0, pe);
}

void encode_bidding(MilpInstance& m, const ModelContext& ctx) {
    const double pe = ctx.config.p_export_max, pi = ctx.config.p_import_max;
    for (int k = 0; k < ctx.hours; ++k) {
        const auto bp = m.var("b_plus", k), bm = m.var("b_minus", k);
        m.add_constraint(idx_name("bid_sell_cap", k), {{m.var("P_plus", k), 1.0}, {bp, -pe}}, Sense::le, 0.0);
        m.add_constraint(idx_name("bid_buy_cap", k), {{m.var("P_minus", k), 1.0}, {bm, -pi}}, Sense::le, 0.0);
        m.add_constraint(idx_name("one_bid", k), {{bp, 1.0}, {bm, 1.0}}, Sense::le, 1.0);
        std::vector<Term> sell{{bp, -1.0}}, buy{{bm, -1.0}};
        for (int j = 0; j < ctx.n_prices; ++j) {
            sell.push_back({m.var("d_plus", k, j), 1.0});
            buy.push_back({m.var("d_minus", k, j), 1.0});
        }
        m.add_constraint(idx_name("price_choice_sell", k), std::move(sell), Sense::eq, 0.0);
        m.add_constraint(idx_name("price_choice_buy", k), std::move(buy), Sense::eq, 0.0);
    }
}

namespace {

// y = x * b for binary b and 0 <= x <= cap, with y >= 0 carried by bounds.
void encode_product(MilpInstance& m, const std::string& stem, std::size_t y, std::size_t x,
                    std::size_t b, double cap) {
    m.add_constraint(stem + "_le_qty", {{y, 1.0}, {x, -1.0}}, Sense::le, 0.0);
    m.add_constraint(stem + "_le_flag", {{y, 1.0}, {b, -cap}}, Sense::le, 0.0);
    m.add_constraint(stem + "_ge", {{y, 1.0}, {x, -1.0}, {b, -cap}}, Sense::ge, -cap);
}

std::string product_stem(const char* stem, int k, int s) {
    return std::string(stem) + "_" + std::to_string(k + 1) + "_" + std::to_string(s + 1);
}

}  // namespace

void encode_acceptance(MilpInstance& m, const ModelContext& ctx) {
    const double pe = ctx.config.p_export_max, pi = ctx.config.p_import_max;
    for (int k = 0; k < ctx.hours; ++k)
        for (int s = 0; s < ctx.n_prices; ++s) {
            std::vector<Term> sell{{m.var("delta_plus", k, s), 1.0}};
            std::vector<Term> buy{{m.var("delta_minus", k, s), 1.0}};
            for (int j = 0; j < ctx.n_prices; ++j) {
                if (ctx.sell_accepts(k, s, j)) sell.push_back({m.var("d_plus", k, j), -1.0});
                if (ctx.buy_accepts(k, s, j)) buy.push_back({m.var("d_minus", k, j), -1.0});
            }
            m.add_constraint(idx_name("accept_sell", k, s), std::move(sell), Sense::eq, 0.0);
            m.add_constraint(idx_name("accept_buy", k, s), std::move(buy), Sense::eq, 0.0);
            encode_product(m, product_stem("gamma_sell", k, s), m.var("Gamma_plus", k, s),
                           m.var("P_plus", k), m.var("delta_plus", k, s), pe);
            encode_product(m, product_stem("gamma_buy", k, s), m.var("Gamma_minus", k, s),
                           m.var("P_minus", k), m.var("delta_minus", k, s), pi);
        }
}

void encode_energy_balance(MilpInstance& m, const ModelContext& ctx) {
    const double pe = ctx.config.p_export_max, pi = ctx.config.p_import_max;
    for (int k = 0; k < ctx.hours; ++k)
        for (int s = 0; s < ctx.n_prices; ++s)
            for (int l = 0; l < ctx.n_energies; ++l) {
                const auto Pe = m.var("P_e", k, s, l), Pi = m.var("P_i", k, s, l);
                const auto de = m.var("delta_e", k, s, l);
                const auto Pc = m.var("P_c", k, s, l), Pd = m.var("P_d", k, s, l);
                const auto Prec = m.var("P_rec", k, s, l);
                const auto Ep = m.var("E_plus", k, s, l), Em = m.var("E_minus", k, s, l);
                const auto Gp = m.var("Gamma_plus", k, s), Gm = m.var("Gamma_minus", k, s);
                const auto Hpe = m.var("Phat_e", k, s, l), Hpi = m.var("Phat_i", k, s, l);
                const auto dhe = m.var("deltahat_e", k, s, l);
                auto n = [&](const char* stem) { return idx_name(stem, k, s, l); };

                m.add_constraint(n("cf_balance"), {{Pe, 1.0}, {Pi, -1.0}, {Pd, -1.0}, {Pc, 1.0}}, Sense::eq,
                                 ctx.pv(k, l) - ctx.load(k, l));
                m.add_constraint(n("cf_export_cap"), {{Pe, 1.0}, {de, -pe}}, Sense::le, 0.0);
                m.add_constraint(n("cf_import_cap"), {{Pi, 1.0}, {de, pi}}, Sense::le, pi);
                m.add_constraint(n("rec_identity"), {{Prec, 1.0}, {Pe, -1.0}, {Pi, 1.0}}, Sense::eq,
                                 -ctx.member_demand(k, l));
                m.add_constraint(n("rec_service"),
                                 {{Prec, 1.0},
                                  {m.var("Phat_rec", k), -1.0},
                                  {m.var("w_plus", k, s, l), -1.0},
                                  {m.var("w_minus", k, s, l), 1.0},
                                  {Gp, -1.0},
                                  {Ep, 1.0},
                                  {Gm, 1.0},
                                  {Em, -1.0}},
                                 Sense::eq, 0.0);
                m.add_constraint(n("err_sell"), {{Ep, 1.0}, {Gp, -1.0}}, Sense::le, 0.0);
                m.add_constraint(n("err_buy"), {{Em, 1.0}, {Gm, -1.0}}, Sense::le, 0.0);
                m.add_constraint(n("cf_baseline"),
                                 {{Pe, 1.0}, {Pi, -1.0}, {Hpe, -1.0}, {Hpi, 1.0}, {Gp, -1.0}, {Ep, 1.0},
                                  {Gm, 1.0}, {Em, -1.0}},
                                 Sense::eq, 0.0);
                m.add_constraint(n("base_export_cap"), {{Hpe, 1.0}, {dhe, -pe}}, Sense::le, 0.0);
                m.add_constraint(n("base_import_cap"), {{Hpi, 1.0}, {dhe, pi}}, Sense::le, pi);
            }
}

void encode_relaxation_logic(MilpInstance& m, const ModelContext& ctx) {
    const double eps = ctx.epsilon_max;
    for (int k = 0; k < ctx.hours; ++k)
        for (int s = 0; s < ctx.n_prices; ++s) {
            const auto bp = m.var("b_plus", k), bm = m.var("b_minus", k);
            const auto dp = m.var("delta_plus", k, s), dm = m.var("delta_minus", k, s);
            const auto up = m.var("u_plus", k, s), um = m.var("u_minus", k, s);
            m.add_constraint(idx_name("u_sell_and", k, s), {{up, 1.0}, {dp, -1.0}, {bp, -1.0}}, Sense::ge, -1.0);
            m.add_constraint(idx_name("u_sell_le_accept", k, s), {{up, 1.0}, {dp, -1.0}}, Sense::le, 0.0);
            m.add_constraint(idx_name("u_sell_le_bid", k, s), {{up, 1.0}, {bp, -1.0}}, Sense::le, 0.0);
            m.add_constraint(idx_name("u_buy_and", k, s), {{um, 1.0}, {dm, -1.0}, {bm, -1.0}}, Sense::ge, -1.0);
            m.add_constraint(idx_name("u_buy_le_accept", k, s), {{um, 1.0}, {dm, -1.0}}, Sense::le, 0.0);
            m.add_constraint(idx_name("u_buy_le_bid", k, s), {{um, 1.0}, {bm, -1.0}}, Sense::le, 0.0);
            for (int l = 0; l < ctx.n_energies; ++l) {
                m.add_constraint(idx_name("w_plus_cap", k, s, l), {{m.var("w_plus", k, s, l), 1.0}, {um, eps}},
                                 Sense::le, eps);
                m.add_constraint(idx_name("w_minus_cap", k, s, l), {{m.var("w_minus", k, s, l), 1.0}, {up, eps}},
                                 Sense::le, eps);
                m.add_constraint(idx_name("v_plus_cap", k, s, l), {{m.var("v_plus", k, s, l), 1.0}, {up, -eps}},
                                 Sense::le, 0.0);
                m.add_constraint(idx_name("v_minus_cap", k, s, l), {{m.var("v_minus", k, s, l), 1.0}, {um, -eps}},
                                 Sense::le, 0.0);
            }
        }
}

void encode_storage(MilpInstance& m, const ModelContext& ctx) {
    const auto& c = ctx.config;
    const double pb = c.battery_power_kwh_per_slot;
    const double cap = c.battery_capacity_kwh;
    const bool battery = cap > 0.0;
    const double s0 = ctx.soc_initial;
    for (int k = 0; k < ctx.hours; ++k)
        for (int s = 0; s < ctx.n_prices; ++s)
            for (int l = 0; l < ctx.n_energies; ++l) {
                const auto Pc = m.var("P_c", k, s, l), Pd = m.var("P_d", k, s, l);
                const auto dc = m.var("delta_c", k, s, l);
                auto n = [&](const char* stem) { return idx_name(stem, k, s, l); };
                m.add_constraint(n("bess_service"),
                                 {{Pd, 1.0},
                                  {Pc, -1.0},
                                  {m.var("Phat_b", k), -1.0},
                                  {m.var("Gamma_plus", k, s), -1.0},
                                  {m.var("Gamma_minus", k, s), 1.0},
                                  {m.var("v_plus", k, s, l), -1.0},
                                  {m.var("v_minus", k, s, l), 1.0}},
                                 Sense::eq, 0.0);
                m.add_constraint(n("charge_cap"), {{Pc, 1.0}, {dc, -pb}}, Sense::le, 0.0);
                m.add_constraint(n("discharge_cap"), {{Pd, 1.0}, {dc, pb}}, Sense::le, pb);
                if (battery) {
                    // SOC scaled by capacity: sum_j (eta_c Pc_j - Pd_j / eta_d)
                    std::vector<Term> path;
                    for (int j = 0; j <= k; ++j) {
                        path.push_back({m.var("P_c", j, s, l), c.eta_charge});
                        path.push_back({m.var("P_d", j, s, l), -1.0 / c.eta_discharge});
                    }
                    m.add_constraint(n("soc_lo"), path, Sense::ge, -s0 * cap);
                    m.add_constraint(n("soc_hi"), std::move(path), Sense::le, (1.0 - s0) * cap);
                }
                if (c.renewable_only_charging)
                    m.add_constraint(n("green_charge"), {{Pc, 1.0}}, Sense::le, ctx.pv(k, l));
            }
    if (!battery || ctx.hours == 0) return;
    for (int s = 0; s < ctx.n_prices; ++s)
        for (int l = 0; l < ctx.n_energies; ++l) {
            std::vector<Term> path;
            for (int j = 0; j < ctx.hours; ++j) {
                path.push_back({m.var("P_c", j, s, l), c.eta_charge});
                path.push_back({m.var("P_d", j, s, l), -1.0 / c.eta_discharge});
            }
            const std::string tag = "_" + std::to_string(s + 1) + "_" + std::to_string(l + 1);
            m.add_constraint("soc_end_lo" + tag, path, Sense::ge, (c.soc_final_min - s0) * cap);
            m.add_constraint("soc_end_hi" + tag, std::move(path), Sense::le, (c.soc_final_max - s0) * cap);
        }
}

void encode_shared_energy(MilpInstance& m, const ModelContext& ctx) {
    for (int k = 0; k < ctx.hours; ++k)
        for (int s = 0; s < ctx.n_prices; ++s)
            for (int l = 0; l < ctx.n_energies; ++l) {
                const auto sh = m.var("P_sh", k, s, l);
                m.add_constraint(idx_name("shared_le_export", k, s, l), {{sh, 1.0}, {m.var("P_e", k, s, l), -1.0}},
                                 Sense::le, 0.0);
                if (ctx.config.shared_energy_cap_mode == SharedEnergyCapMode::member_demand)
                    m.add_constraint(idx_name("shared_le_cap", k, s, l), {{sh, 1.0}}, Sense::le,
                                     ctx.member_demand(k, l));
                else
                    m.add_constraint(idx_name("shared_le_cap", k, s, l),
                                     {{sh, 1.0}, {m.var("P_rec", k, s, l), -1.0}}, Sense::le, 0.0);
            }
}

void encode_objective(MilpInstance& m, const ModelContext& ctx) {
    const double pe = ctx.config.p_export_max, pi = ctx.config.p_import_max;
    const auto& pm = ctx.prices.probabilities();
    const auto& pr = ctx.energies.probabilities();
    double pr_total = 0.0;
    for (double p : pr) pr_total += p;

    for (int k = 0; k < ctx.hours; ++k) {
        for (int j = 0; j < ctx.n_prices; ++j) {
            const auto zp = m.var("z_plus", k, j), zm = m.var("z_minus", k, j);
            encode_product(m, product_stem("z_sell", k, j), zp, m.var("P_plus", k), m.var("d_plus", k, j), pe);
            encode_product(m, product_stem("z_buy", k, j), zm, m.var("P_minus", k), m.var("d_minus", k, j), pi);
            // pay-as-bid revenue, accepted with the scenario mass where candidate j clears
            double sell_mass = 0.0, buy_mass = 0.0;
            for (int s = 0; s < ctx.n_prices; ++s) {
                const auto ps = static_cast<std::size_t>(s);
                if (ctx.sell_accepts(k, s, j)) sell_mass += pm[ps] * pr_total;
                if (ctx.buy_accepts(k, s, j)) buy_mass += pm[ps] * pr_total;
            }
            m.add_objective(zp, sell_mass * ctx.sell_clearing(k, j));
            m.add_objective(zm, -buy_mass * ctx.buy_clearing(k, j));
        }
        const auto kk = static_cast<std::size_t>(k);
        for (int s = 0; s < ctx.n_prices; ++s)
            for (int l = 0; l < ctx.n_energies; ++l) {
                const double w = pm[static_cast<std::size_t>(s)] * pr[static_cast<std::size_t>(l)];
                m.add_objective(m.var("Phat_e", k, s, l), w * ctx.price_export[kk]);
                m.add_objective(m.var("Phat_i", k, s, l), -w * ctx.price_import[kk]);
                m.add_objective(m.var("P_sh", k, s, l), w * ctx.config.incentive_shared);
                m.add_objective(m.var("E_plus", k, s, l), -w * ctx.penalty_sell);
                m.add_objective(m.var("E_minus", k, s, l), w * ctx.penalty_buy);
            }
    }
}

MilpInstance build_instance(const ModelContext& ctx) {
    MilpInstance m;
    declare_variables(m, ctx);
    encode_bidding(m, ctx);
    encode_acceptance(m, ctx);
    encode_energy_balance(m, ctx);
    encode_relaxation_logic(m, ctx);
    encode_storage(m, ctx);
    encode_shared_energy(m, ctx);
    encode_objective(m, ctx);
    return m;
}

MilpInstance build_instance(const BuildInputs& inputs) { return build_instance(make_context(inputs)); }

std::vector<double> planned_soc_path(const MilpInstance& m, const ModelContext& ctx,
                                     const std::vector<double>& values, int s, int l) {
    const auto& c = ctx.config;
    std::vector<double> out;
    double soc = ctx.soc_initial;
    for (int k = 0; k < ctx.hours; ++k) {
        if (c.battery_capacity_kwh > 0.0)
            soc += (c.eta_charge * values[m.var("P_c", k, s, l)] -
                    values[m.var("P_d", k, s, l)] / c.eta_discharge) /
                   c.battery_capacity_kwh;
        out.push_back(soc);
    }
    return out;
}

PlanDetails extract_program(const MilpInstance& m, const ModelContext& ctx, const Solution& sol) {
    if (sol.status != SolveStatus::optimal && sol.status != SolveStatus::gap_limit)
        throw MilpError("cannot extract a program from a " + to_string(sol.status) + " solution");
    const auto rounded = round_binaries(m, sol.values);
    if (rounded.max_residual_change > 1e-5) {
        std::ostringstream os;
        os << "rounding binaries moved a constraint residual by " << rounded.max_residual_change;
        throw MilpError(os.str());
    }
    const auto& x = rounded.values;

    PlanDetails out;
    out.objective = sol.objective_value;
    auto& p = out.program;
    const auto K = static_cast<std::size_t>(ctx.hours);
    const auto S = static_cast<std::size_t>(ctx.n_prices);
    p.bids.assign(K, std::nullopt);
    p.sell_price_choice.assign(K, std::vector<int>(S, 0));
    p.buy_price_choice.assign(K, std::vector<int>(S, 0));
    for (int k = 0; k < ctx.hours; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        p.rec_baseline.push_back(x[m.var("Phat_rec", k)]);
        p.bess_baseline.push_back(x[m.var("Phat_b", k)]);
        double sell_price = 0.0, buy_price = 0.0;
        for (int j = 0; j < ctx.n_prices; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            p.sell_price_choice[kk][jj] = static_cast<int>(x[m.var("d_plus", k, j)]);
            p.buy_price_choice[kk][jj] = static_cast<int>(x[m.var("d_minus", k, j)]);
            if (p.sell_price_choice[kk][jj]) sell_price = ctx.sell_clearing(k, j);
            if (p.buy_price_choice[kk][jj]) buy_price = ctx.buy_clearing(k, j);
        }
        if (x[m.var("b_plus", k)] == 1.0)
            p.bids[kk] = Bid{k, BidSide::sell, sell_price, std::max(0.0, x[m.var("P_plus", k)]), true};
        else if (x[m.var("b_minus", k)] == 1.0)
            p.bids[kk] = Bid{k, BidSide::buy, buy_price, std::max(0.0, x[m.var("P_minus", k)]), true};
    }

    out.soc.assign(S, {});
    out.shared_energy.assign(S, {});
    for (int s = 0; s < ctx.n_prices; ++s)
        for (int l = 0; l < ctx.n_energies; ++l) {
            out.soc[static_cast<std::size_t>(s)].push_back(planned_soc_path(m, ctx, x, s, l));
            std::vector<double> sh;
            for (int k = 0; k < ctx.hours; ++k) {
                const double cap = ctx.config.shared_energy_cap_mode == SharedEnergyCapMode::member_demand
                                       ? ctx.member_demand(k, l)
                                       : x[m.var("P_rec", k, s, l)];
                sh.push_back(std::max(0.0, std::min(cap, x[m.var("P_e", k, s, l)])));
            }
            out.shared_energy[static_cast<std::size_t>(s)].push_back(std::move(sh));
        }
    return out;
}

}  // namespace rec
