// Solver-agnostic mixed-integer linear program and its solutions.

#ifndef REC_MILP_HPP
#define REC_MILP_HPP

#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace rec {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary };
enum class Sense { le, eq, ge };

struct Term {
    std::size_t var = 0;
    double coef = 0.0;
};

struct Variable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0.0;
    double upper = infinity;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::le;
    double rhs = 0.0;
};

/// Semantic address of a variable: symbol plus (k, s, l) indices, -1 when
/// the symbol does not carry that index.
struct SymbolKey {
    std::string symbol;
    int k = -1;
    int s = -1;
    int l = -1;

    auto tie() const { return std::tie(symbol, k, s, l); }
    bool operator<(const SymbolKey& o) const { return tie() < o.tie(); }
    bool operator==(const SymbolKey& o) const { return tie() == o.tie(); }
};

class MilpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Maximization problem. Variable and constraint ids are insertion order.
class MilpInstance {
public:
    std::size_t add_variable(const std::string& name, VarKind kind, double lower, double upper,
                             SymbolKey key = {});
    std::size_t add_constraint(const std::string& name, std::vector<Term> terms, Sense sense,
                               double rhs);

    void set_objective(std::size_t var, double coef);
    void add_objective(std::size_t var, double coef);
    void set_objective_constant(double c) { objective_constant_ = c; }
    void set_bounds(std::size_t var, double lower, double upper);

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<double>& objective() const { return objective_; }
    double objective_constant() const { return objective_constant_; }
    const std::vector<SymbolKey>& keys() const { return keys_; }

    std::size_t var(const std::string& symbol, int k = -1, int s = -1, int l = -1) const;
    bool has(const std::string& symbol, int k = -1, int s = -1, int l = -1) const;
    std::size_t var_by_name(const std::string& name) const;
    std::size_t binary_count() const;

    /// Ids of constraints whose name starts with `prefix`.
    std::vector<std::size_t> constraints_with_prefix(const std::string& prefix) const;

private:
    std::vector<Variable> variables_;
    std::vector<SymbolKey> keys_;
    std::vector<Constraint> constraints_;
    std::vector<double> objective_;
    double objective_constant_ = 0.0;
    std::map<SymbolKey, std::size_t> index_;
    std::map<std::string, std::size_t> by_name_;
};

enum class SolveStatus { optimal, infeasible, unbounded, gap_limit };

std::string to_string(SolveStatus status);
SolveStatus solve_status_from_string(const std::string& text);

struct Solution {
    SolveStatus status = SolveStatus::infeasible;
    double objective_value = 0.0;
    std::vector<double> values;  // by variable id; empty unless a point is known
    double mip_gap = 0.0;

    double operator[](std::size_t var) const { return values.at(var); }
};

double evaluate_objective(const MilpInstance& instance, const std::vector<double>& values);
double row_activity(const Constraint& row, const std::vector<double>& values);

/// Signed amount by which a row is violated (0 when satisfied).
double row_violation(const Constraint& row, const std::vector<double>& values);

struct AuditReport {
    double max_violation = 0.0;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

/// Independent re-evaluation of every bound, row, and integrality condition.
AuditReport audit_solution(const MilpInstance& instance, const std::vector<double>& values,
                           double tolerance = 1e-6);

/// Binaries snapped to {0,1}. `max_residual_change` is the largest change
/// of any row activity caused by the snapping.
struct RoundedPoint {
    std::vector<double> values;
    double max_residual_change = 0.0;
};

RoundedPoint round_binaries(const MilpInstance& instance, const std::vector<double>& values);

}  // namespace rec

#endif
