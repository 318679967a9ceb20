#include "rec/milp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rec {

std::size_t MilpInstance::add_variable(const std::string& name, VarKind kind, double lower,
                                       double upper, SymbolKey key) {
    if (name.empty()) throw MilpError("variable without a name");
    if (by_name_.count(name)) throw MilpError("duplicate variable name " + name);
    if (!key.symbol.empty() && index_.count(key)) throw MilpError("duplicate symbol key for " + name);
    if (kind == VarKind::binary) {
        lower = std::max(lower, 0.0);
        upper = std::min(upper, 1.0);
    }
    const std::size_t id = variables_.size();
    variables_.push_back({name, kind, lower, upper});
    if (!key.symbol.empty()) index_.emplace(key, id);
    keys_.push_back(std::move(key));
    objective_.push_back(0.0);
    by_name_.emplace(name, id);
    return id;
}

std::size_t MilpInstance::add_constraint(const std::string& name, std::vector<Term> terms,
                                         Sense sense, double rhs) {
    for (const Term& t : terms)
        if (t.var >= variables_.size())
            throw MilpError("constraint " + name + " references undeclared variable " +
                            std::to_string(t.var));
    terms.erase(std::remove_if(terms.begin(), terms.end(), [](const Term& t) { return t.coef == 0.0; }),
                terms.end());
    constraints_.push_back({name, std::move(terms), sense, rhs});
    return constraints_.size() - 1;
}

void MilpInstance::set_objective(std::size_t var, double coef) { objective_.at(var) = coef; }
void MilpInstance::add_objective(std::size_t var, double coef) { objective_.at(var) += coef; }

void MilpInstance::set_bounds(std::size_t var, double lower, double upper) {
    auto& v = variables_.at(var);
    v.lower = lower;
    v.upper = upper;
}

std::size_t MilpInstance::var(const std::string& symbol, int k, int s, int l) const {
    const auto it = index_.find(SymbolKey{symbol, k, s, l});
    if (it == index_.end()) {
        std::ostringstream os;
        os << "no variable " << symbol << "(" << k << "," << s << "," << l << ")";
        throw MilpError(os.str());
    }
    return it->second;
}

bool MilpInstance::has(const std::string& symbol, int k, int s, int l) const {
    return index_.count(SymbolKey{symbol, k, s, l}) > 0;
}

std::size_t MilpInstance::var_by_name(const std::string& name) const {
    const auto it = by_name_.find(name);
    if (it == by_name_.end()) throw MilpError("no variable named " + name);
    return it->second;
}

std::size_t MilpInstance::binary_count() const {
    return static_cast<std::size_t>(std::count_if(variables_.begin(), variables_.end(),
                                                  [](const Variable& v) { return v.kind == VarKind::binary; }));
}

std::vector<std::size_t> MilpInstance::constraints_with_prefix(const std::string& prefix) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < constraints_.size(); ++i)
        if (constraints_[i].name.rfind(prefix, 0) == 0) out.push_back(i);
    return out;
}

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::gap_limit: return "gap_limit";
    }
    return "unknown";
}

SolveStatus solve_status_from_string(const std::string& text) {
    if (text == "optimal") return SolveStatus::optimal;
    if (text == "infeasible") return SolveStatus::infeasible;
    if (text == "unbounded") return SolveStatus::unbounded;
    if (text == "gap_limit") return SolveStatus::gap_limit;
    throw MilpError("unknown solve status '" + text + "'");
}

double evaluate_objective(const MilpInstance& instance, const std::vector<double>& values) {
    double j = instance.objective_constant();
    const auto& c = instance.objective();
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0.0) j += c[i] * values.at(i);
    return j;
}

double row_activity(const Constraint& row, const std::vector<double>& values) {
    double a = 0.0;
    for (const Term& t : row.terms) a += t.coef * values.at(t.var);
    return a;
}

double row_violation(const Constraint& row, const std::vector<double>& values) {
    const double a = row_activity(row, values);
    switch (row.sense) {
        case Sense::le: return std::max(0.0, a - row.rhs);
        case Sense::ge: return std::max(0.0, row.rhs - a);
        case Sense::eq: return std::abs(a - row.rhs);
    }
    return 0.0;
}

AuditReport audit_solution(const MilpInstance& instance, const std::vector<double>& values,
                           double tolerance) {
    AuditReport rep;
    const auto& vars = instance.variables();
    if (values.size() != vars.size()) {
        rep.violations.push_back("solution has " + std::to_string(values.size()) + " values for " +
                                 std::to_string(vars.size()) + " variables");
        rep.max_violation = infinity;
        return rep;
    }
    auto note = [&](double amount, const std::string& what) {
        rep.max_violation = std::max(rep.max_violation, amount);
        if (amount > tolerance) {
            std::ostringstream os;
            os << what << " violated by " << amount;
            rep.violations.push_back(os.str());
        }
    };
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const double x = values[i];
        if (!std::isfinite(x)) {
            note(infinity, "value of " + vars[i].name);
            continue;
        }
        note(std::max(0.0, vars[i].lower - x), "lower bound of " + vars[i].name);
        note(std::max(0.0, x - vars[i].upper), "upper bound of " + vars[i].name);
        if (vars[i].kind == VarKind::binary)
            note(std::min(std::abs(x), std::abs(x - 1.0)), "integrality of " + vars[i].name);
    }
    for (const auto& row : instance.constraints()) note(row_violation(row, values), row.name);
    return rep;
}

RoundedPoint round_binaries(const MilpInstance& instance, const std::vector<double>& values) {
    RoundedPoint out{values, 0.0};
    const auto& vars = instance.variables();
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].kind == VarKind::binary) out.values[i] = values[i] >= 0.5 ? 1.0 : 0.0;
    for (const auto& row : instance.constraints())
        out.max_residual_change = std::max(
            out.max_residual_change, std::abs(row_activity(row, out.values) - row_activity(row, values)));
    return out;
}

}  // namespace rec
