#include "rec/core_types.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace rec {

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void require_positive(std::vector<std::string>& out, const char* field, double v) {
    if (!(v > 0.0))
        out.push_back(std::string(field) + " must be > 0 (got " + fmt_num(v) + ")");
}

void require_non_negative(std::vector<std::string>& out, const char* field, double v) {
    if (!(v >= 0.0))
        out.push_back(std::string(field) + " must be >= 0 (got " + fmt_num(v) + ")");
}

void require_unit_interval(std::vector<std::string>& out, const char* field, double v) {
    if (!(v >= 0.0 && v <= 1.0))
        out.push_back(std::string(field) + " must lie in [0, 1] (got " + fmt_num(v) + ")");
}

void require_efficiency(std::vector<std::string>& out, const char* field, double v) {
    if (!(v > 0.0 && v <= 1.0))
        out.push_back(std::string(field) + " must lie in (0, 1] (got " + fmt_num(v) + ")");
}

}  // namespace

std::string to_string(SharedEnergyCapMode mode) {
    return mode == SharedEnergyCapMode::member_demand ? "member_demand" : "rec_exchange";
}

SharedEnergyCapMode shared_energy_cap_mode_from_string(const std::string& text) {
    if (text == "member_demand") return SharedEnergyCapMode::member_demand;
    if (text == "rec_exchange") return SharedEnergyCapMode::rec_exchange;
    throw InputError("unknown shared_energy_cap_mode '" + text + "'");
}

std::vector<std::string> validate_config(const RecConfig& c) {
    std::vector<std::string> out;
    if (c.horizon_hours < 1)
        out.push_back("horizon_hours must be >= 1 (got " + std::to_string(c.horizon_hours) + ")");
    require_positive(out, "p_export_max", c.p_export_max);
    require_positive(out, "p_import_max", c.p_import_max);
    // A zero-size battery is a legal degenerate plant.
    require_non_negative(out, "battery_capacity_kwh", c.battery_capacity_kwh);
    require_non_negative(out, "battery_power_kwh_per_slot", c.battery_power_kwh_per_slot);
    require_efficiency(out, "eta_charge", c.eta_charge);
    require_efficiency(out, "eta_discharge", c.eta_discharge);
    require_unit_interval(out, "soc_initial", c.soc_initial);
    require_unit_interval(out, "soc_final_min", c.soc_final_min);
    require_unit_interval(out, "soc_final_max", c.soc_final_max);
    if (c.soc_final_min > c.soc_final_max)
        out.push_back("soc_final_min must be <= soc_final_max (got " + fmt_num(c.soc_final_min) +
                      " > " + fmt_num(c.soc_final_max) + ")");
    require_non_negative(out, "incentive_shared", c.incentive_shared);
    if (c.penalty_sell && !std::isfinite(*c.penalty_sell))
        out.push_back("penalty_sell must be finite");
    if (c.penalty_buy && !std::isfinite(*c.penalty_buy))
        out.push_back("penalty_buy must be finite");
    if (c.epsilon_max) require_non_negative(out, "epsilon_max", *c.epsilon_max);
    return out;
}

namespace {

RecConfig config_from_json(const nlohmann::json& j) {
    RecConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key) && !j.at(key).is_null()) j.at(key).get_to(field);
    };
    auto get_opt = [&](const char* key, std::optional<double>& field) {
        if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<double>();
    };
    static const char* known[] = {"horizon_hours", "p_export_max", "p_import_max",
                                  "battery_capacity_kwh", "battery_power_kwh_per_slot",
                                  "eta_charge", "eta_discharge", "soc_initial", "soc_final_min",
                                  "soc_final_max", "penalty_sell", "penalty_buy",
                                  "incentive_shared", "epsilon_max", "renewable_only_charging",
                                  "shared_energy_cap_mode"};
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) throw InputError("unknown config key '" + item.key() + "'");
    }
    get("horizon_hours", c.horizon_hours);
    get("p_export_max", c.p_export_max);
    get("p_import_max", c.p_import_max);
    get("battery_capacity_kwh", c.battery_capacity_kwh);
    get("battery_power_kwh_per_slot", c.battery_power_kwh_per_slot);
    get("eta_charge", c.eta_charge);
    get("eta_discharge", c.eta_discharge);
    get("soc_initial", c.soc_initial);
    get("soc_final_min", c.soc_final_min);
    get("soc_final_max", c.soc_final_max);
    get_opt("penalty_sell", c.penalty_sell);
    get_opt("penalty_buy", c.penalty_buy);
    get("incentive_shared", c.incentive_shared);
    get_opt("epsilon_max", c.epsilon_max);
    get("renewable_only_charging", c.renewable_only_charging);
    if (j.contains("shared_energy_cap_mode"))
        c.shared_energy_cap_mode =
            shared_energy_cap_mode_from_string(j.at("shared_energy_cap_mode").get<std::string>());
    return c;
}

}  // namespace

RecConfig config_from_json_text(const std::string& text) {
    try {
        return config_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
}

RecConfig load_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

std::string config_to_json_text(const RecConfig& c) {
    nlohmann::ordered_json j;
    j["horizon_hours"] = c.horizon_hours;
    j["p_export_max"] = c.p_export_max;
    j["p_import_max"] = c.p_import_max;
    j["battery_capacity_kwh"] = c.battery_capacity_kwh;
    j["battery_power_kwh_per_slot"] = c.battery_power_kwh_per_slot;
    j["eta_charge"] = c.eta_charge;
    j["eta_discharge"] = c.eta_discharge;
    j["soc_initial"] = c.soc_initial;
    j["soc_final_min"] = c.soc_final_min;
    j["soc_final_max"] = c.soc_final_max;
    j["penalty_sell"] = c.penalty_sell ? nlohmann::ordered_json(*c.penalty_sell) : nullptr;
    j["penalty_buy"] = c.penalty_buy ? nlohmann::ordered_json(*c.penalty_buy) : nullptr;
    j["incentive_shared"] = c.incentive_shared;
    j["epsilon_max"] = c.epsilon_max ? nlohmann::ordered_json(*c.epsilon_max) : nullptr;
    j["renewable_only_charging"] = c.renewable_only_charging;
    j["shared_energy_cap_mode"] = to_string(c.shared_energy_cap_mode);
    return j.dump(2);
}

std::string to_string(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::pv: return "pv";
        case TrajectoryKind::load: return "load";
        case TrajectoryKind::member_demand: return "member_demand";
        case TrajectoryKind::price_sell_max: return "price_sell_max";
        case TrajectoryKind::price_buy_min: return "price_buy_min";
        case TrajectoryKind::price_export: return "price_export";
        case TrajectoryKind::price_import: return "price_import";
    }
    return "unknown";
}

bool is_price(TrajectoryKind kind) {
    return kind == TrajectoryKind::price_sell_max || kind == TrajectoryKind::price_buy_min ||
           kind == TrajectoryKind::price_export || kind == TrajectoryKind::price_import;
}

void DayTrajectory::validate(std::size_t horizon) const {
    if (values.size() != horizon)
        throw InputError(to_string(kind) + " trajectory has " + std::to_string(values.size()) +
                         " values, expected " + std::to_string(horizon));
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k]) || values[k] < 0.0)
            throw InputError(to_string(kind) + " trajectory: invalid value " + fmt_num(values[k]) +
                             " at slot " + std::to_string(k));
    }
}

ScenarioSet::ScenarioSet(std::vector<TrajectoryKind> kinds, std::vector<Scenario> scenarios,
                         std::vector<double> probabilities)
    : kinds_(std::move(kinds)),
      scenarios_(std::move(scenarios)),
      probabilities_(std::move(probabilities)) {
    if (scenarios_.size() != probabilities_.size())
        throw InputError("scenario set: " + std::to_string(scenarios_.size()) + " scenarios but " +
                         std::to_string(probabilities_.size()) + " probabilities");
    if (scenarios_.empty()) throw InputError("scenario set is empty");
    const std::size_t len = scenarios_.front().channels.empty()
                                ? 0
                                : scenarios_.front().channels.front().size();
    for (const auto& sc : scenarios_) {
        if (sc.channels.size() != kinds_.size())
            throw InputError("scenario set: channel count mismatch");
        for (const auto& ch : sc.channels)
            if (ch.size() != len) throw InputError("scenario set: trajectory length mismatch");
    }
    double sum = 0.0;
    for (double p : probabilities_) {
        if (!(p >= 0.0)) throw InputError("scenario set: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > probability_tolerance)
        throw InputError("scenario set: probabilities sum to " + fmt_num(sum));
}

std::size_t ScenarioSet::horizon() const {
    if (scenarios_.empty() || scenarios_.front().channels.empty()) return 0;
    return scenarios_.front().channels.front().size();
}

std::size_t ScenarioSet::channel_index(TrajectoryKind kind) const {
    for (std::size_t i = 0; i < kinds_.size(); ++i)
        if (kinds_[i] == kind) return i;
    throw InputError("scenario set has no " + to_string(kind) + " channel");
}

double ScenarioSet::value(std::size_t scenario, TrajectoryKind kind, std::size_t hour) const {
    return scenarios_[scenario].channels[channel_index(kind)][hour];
}

ScenarioSet ScenarioSet::truncated(std::size_t horizon) const {
    if (horizon > this->horizon()) throw InputError("cannot extend scenario horizon");
    std::vector<Scenario> out = scenarios_;
    for (auto& sc : out)
        for (auto& ch : sc.channels) ch.resize(horizon);
    return ScenarioSet(kinds_, std::move(out), probabilities_);
}

std::string to_string(BidSide side) { return side == BidSide::sell ? "sell" : "buy"; }

std::vector<std::string> check_bids(const std::vector<Bid>& bids, const RecConfig& config) {
    std::vector<std::string> out;
    std::vector<int> submitted_per_hour(static_cast<std::size_t>(config.horizon_hours), 0);
    for (const Bid& b : bids) {
        const std::string where = "hour " + std::to_string(b.hour) + " " + to_string(b.side);
        if (b.hour < 0 || b.hour >= config.horizon_hours) {
            out.push_back(where + ": hour out of range");
            continue;
        }
        if (b.quantity < 0.0) out.push_back(where + ": negative quantity");
        const double cap = b.side == BidSide::sell ? config.p_export_max : config.p_import_max;
        if (b.quantity > cap) out.push_back(where + ": quantity above exchange limit");
        if (!b.submitted && (b.quantity != 0.0 || b.price != 0.0))
            out.push_back(where + ": unsubmitted bid carries price or quantity");
        if (b.submitted && ++submitted_per_hour[static_cast<std::size_t>(b.hour)] > 1)
            out.push_back(where + ": more than one submitted bid in the hour");
    }
    return out;
}

std::optional<Bid> DayAheadProgram::bid_at(int hour, BidSide side) const {
    const auto& b = bids.at(static_cast<std::size_t>(hour));
    if (b && b->side == side && b->submitted) return b;
    return std::nullopt;
}

std::vector<std::string> check_program(const DayAheadProgram& program, const ScenarioSet& prices) {
    std::vector<std::string> out;
    const std::size_t horizon = program.bids.size();
    const std::size_t sell_ch = prices.channel_index(TrajectoryKind::price_sell_max);
    const std::size_t buy_ch = prices.channel_index(TrajectoryKind::price_buy_min);
    for (std::size_t k = 0; k < horizon; ++k) {
        const auto& bid = program.bids[k];
        auto check_side = [&](const std::vector<int>& choice, BidSide side, std::size_t ch) {
            const int picked = std::accumulate(choice.begin(), choice.end(), 0);
            const bool on = bid && bid->submitted && bid->side == side;
            if (picked != (on ? 1 : 0)) {
                out.push_back("hour " + std::to_string(k) + " " + to_string(side) +
                              ": price choice sums to " + std::to_string(picked));
                return;
            }
            for (std::size_t j = 0; j < choice.size(); ++j)
                if (choice[j] == 1 && on &&
                    prices.scenarios()[j].channels[ch][k] != bid->price)
                    out.push_back("hour " + std::to_string(k) + " " + to_string(side) +
                                  ": bid price differs from the selected candidate");
        };
        check_side(program.sell_price_choice.at(k), BidSide::sell, sell_ch);
        check_side(program.buy_price_choice.at(k), BidSide::buy, buy_ch);
    }
    return out;
}

}  // namespace rec
