#include "rec/exchange.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "rec/csv_io.hpp"

namespace rec {

namespace {

constexpr std::size_t terms_per_line = 6;

void append_terms(std::string& out, const std::vector<Term>& terms, const MilpInstance& m) {
    if (terms.empty()) {
        out += " 0";
        return;
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i > 0 && i % terms_per_line == 0) out += "\n  ";
        const double c = terms[i].coef;
        out += c < 0.0 ? " - " : " + ";
        out += format_double(std::abs(c));
        out += " ";
        out += m.variables()[terms[i].var].name;
    }
}

const char* sense_text(Sense s) {
    switch (s) {
        case Sense::le: return "<=";
        case Sense::ge: return ">=";
        case Sense::eq: return "=";
    }
    return "<=";
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view text, std::size_t line_no) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ParseError("solution line " + std::to_string(line_no) + ": bad number '" + std::string(text) + "'");
    return v;
}

}  // namespace

std::string emit_exchange(const MilpInstance& m) {
    const auto& vars = m.variables();
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].name.empty()) throw MilpError("variable " + std::to_string(i) + " has no name");

    std::string out = "\\ rec day-ahead program\nMaximize\n obj:";
    std::vector<Term> obj;
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (m.objective()[i] != 0.0) obj.push_back({i, m.objective()[i]});
    if (!obj.empty()) append_terms(out, obj, m);
    if (m.objective_constant() != 0.0) {
        out += m.objective_constant() < 0.0 ? " - " : " + ";
        out += format_double(std::abs(m.objective_constant()));
    }
    out += "\nSubject To\n";
    for (const auto& row : m.constraints()) {
        out += " " + row.name + ":";
        append_terms(out, row.terms, m);
        out += " ";
        out += sense_text(row.sense);
        out += " " + format_double(row.rhs) + "\n";
    }
    // every variable gets a bounds line so solvers see all columns
    out += "Bounds\n";
    for (const auto& v : vars) {
        if (v.kind == VarKind::binary && v.lower == 0.0 && v.upper == 1.0) continue;
        const bool lo = std::isfinite(v.lower), up = std::isfinite(v.upper);
        if (!lo && !up)
            out += " " + v.name + " free\n";
        else if (lo && up && v.lower == v.upper)
            out += " " + v.name + " = " + format_double(v.lower) + "\n";
        else if (lo && !up)
            out += " " + v.name + " >= " + format_double(v.lower) + "\n";
        else
            out += " " + (lo ? format_double(v.lower) : std::string("-inf")) + " <= " + v.name + " <= " +
                   format_double(v.upper) + "\n";
    }
    bool any_binary = false;
    for (const auto& v : vars)
        if (v.kind == VarKind::binary) {
            if (!any_binary) out += "Binaries\n";
            any_binary = true;
            out += " " + v.name + "\n";
        }
    out += "End\n";
    return out;
}

std::string emit_symbol_map(const MilpInstance& m) {
    nlohmann::ordered_json vars = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.variables().size(); ++i) {
        const auto& key = m.keys()[i];
        nlohmann::ordered_json e;
        e["name"] = m.variables()[i].name;
        e["symbol"] = key.symbol;
        auto idx = [](int v) { return v < 0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v + 1); };
        e["k"] = idx(key.k);
        e["s"] = idx(key.s);
        e["l"] = idx(key.l);
        e["kind"] = m.variables()[i].kind == VarKind::binary ? "binary" : "continuous";
        vars.push_back(std::move(e));
    }
    nlohmann::ordered_json doc;
    doc["variables"] = std::move(vars);
    return doc.dump(1) + "\n";
}

Solution parse_solution(std::string_view text, const MilpInstance& m) {
    Solution sol;
    bool have_status = false;
    std::vector<double> values(m.variables().size(), 0.0);
    std::vector<char> seen(values.size(), 0);

    std::size_t line_no = 0, pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const std::size_t sp = line.find_first_of(" \t");
        if (sp == std::string_view::npos)
            throw ParseError("solution line " + std::to_string(line_no) + ": expected '<key> <value>'");
        const std::string_view key = line.substr(0, sp);
        const std::string_view val = trim(line.substr(sp));
        if (key == "status") {
            try {
                sol.status = solve_status_from_string(std::string(val));
            } catch (const MilpError&) {
                throw ParseError("unknown solver status '" + std::string(val) + "'");
            }
            have_status = true;
        } else if (key == "objective") {
            parse_number(val, line_no);
        } else if (key == "gap") {
            sol.mip_gap = parse_number(val, line_no);
        } else {
            std::size_t id;
            try {
                id = m.var_by_name(std::string(key));
            } catch (const MilpError&) {
                throw ParseError("solution names unknown variable " + std::string(key));
            }
            values[id] = parse_number(val, line_no);
            seen[id] = 1;
        }
    }
    if (!have_status) throw ParseError("solution has no status line");
    if (sol.status == SolveStatus::infeasible || sol.status == SolveStatus::unbounded) return sol;
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) throw ParseError("solution is missing variable " + m.variables()[i].name);
    sol.values = std::move(values);
    sol.objective_value = evaluate_objective(m, sol.values);
    return sol;
}

std::string format_solution(const Solution& sol, const MilpInstance& m) {
    std::string out = "status " + to_string(sol.status) + "\n";
    if (sol.values.empty()) return out;
    out += "objective " + format_double(sol.objective_value) + "\n";
    out += "gap " + format_double(sol.mip_gap) + "\n";
    for (std::size_t i = 0; i < sol.values.size(); ++i)
        out += m.variables()[i].name + " " + format_double(sol.values[i]) + "\n";
    return out;
}

}  // namespace rec
