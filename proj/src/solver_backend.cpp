#include "rec/solver_backend.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rec/csv_io.hpp"
#include "rec/exchange.hpp"
#include "rec/simplex.hpp"

#ifndef REC_HIGHS_DRIVER
#define REC_HIGHS_DRIVER "tools/highs_solve.py"
#endif

namespace rec {

std::string to_string(Backend backend) {
    return backend == Backend::external ? "external" : "reference";
}

Backend backend_from_string(const std::string& text) {
    if (text == "external") return Backend::external;
    if (text == "reference") return Backend::reference;
    throw SolveError("unknown backend '" + text + "' (expected external or reference)");
}

std::vector<std::string> SolveRequest::validate() const {
    std::vector<std::string> out;
    if (!(time_limit_s > 0.0)) out.push_back("time_limit_s must be > 0");
    if (!(rel_gap >= 0.0)) out.push_back("rel_gap must be >= 0");
    return out;
}

namespace {

constexpr double integrality_tol = 1e-6;
constexpr double row_tol = 1e-6;

// Fixes binaries implied by the rows under the current bounds. Continuous
// bounds are left alone. Returns false when some row cannot be satisfied.
bool propagate_binaries(const MilpInstance& m, std::vector<double>& lo, std::vector<double>& up) {
    const auto& vars = m.variables();
    for (int pass = 0; pass < 20; ++pass) {
        bool changed = false;
        for (const auto& row : m.constraints()) {
            double min_act = 0.0, max_act = 0.0;
            int min_inf = 0, max_inf = 0;
            for (const Term& t : row.terms) {
                const double a = t.coef > 0.0 ? lo[t.var] : up[t.var];
                const double b = t.coef > 0.0 ? up[t.var] : lo[t.var];
                if (std::isfinite(a)) min_act += t.coef * a; else ++min_inf;
                if (std::isfinite(b)) max_act += t.coef * b; else ++max_inf;
            }
            const bool upper_side = row.sense != Sense::ge;  // activity <= rhs
            const bool lower_side = row.sense != Sense::le;  // activity >= rhs
            if (upper_side && min_inf == 0 && min_act > row.rhs + row_tol) return false;
            if (lower_side && max_inf == 0 && max_act < row.rhs - row_tol) return false;

            for (const Term& t : row.terms) {
                if (vars[t.var].kind != VarKind::binary || lo[t.var] == up[t.var]) continue;
                // binary contributes c*lo to min activity when c > 0, c*up when c < 0
                if (upper_side && min_inf == 0) {
                    const double rest = min_act - (t.coef > 0.0 ? t.coef * lo[t.var] : t.coef * up[t.var]);
                    if (t.coef > 0.0 && rest + t.coef > row.rhs + row_tol) {
                        up[t.var] = 0.0;
                        changed = true;
                    } else if (t.coef < 0.0 && rest > row.rhs + row_tol) {
                        lo[t.var] = 1.0;
                        changed = true;
                    }
                }
                if (lo[t.var] == up[t.var]) continue;
                if (lower_side && max_inf == 0) {
                    const double rest = max_act - (t.coef > 0.0 ? t.coef * up[t.var] : t.coef * lo[t.var]);
                    if (t.coef > 0.0 && rest < row.rhs - row_tol) {
                        lo[t.var] = 1.0;
                        changed = true;
                    } else if (t.coef < 0.0 && rest + t.coef < row.rhs - row_tol) {
                        up[t.var] = 0.0;
                        changed = true;
                    }
                }
            }
            if (changed) break;  // activities are stale; restart the sweep
        }
        if (!changed) return true;
    }
    return true;
}

struct Node {
    std::vector<double> lo, up;
};

}  // namespace

Solution reference_solve(const MilpInstance& instance, std::size_t binary_limit, ReferenceStats& stats,
                         const std::vector<double>& start) {
    const std::size_t nbin = instance.binary_count();
    if (nbin > binary_limit)
        throw SolveError("reference_solve refused: instance has " + std::to_string(nbin) +
                         " binary variables, limit is " + std::to_string(binary_limit));
    const auto& vars = instance.variables();
    LpProblem lp = relaxation_of(instance);

    std::vector<Node> stack;
    stack.push_back({lp.lower, lp.upper});
    double best = -infinity;
    std::vector<double> best_x;
    bool have_incumbent = false, unbounded = false;
    if (start.size() == vars.size() && audit_solution(instance, start).ok()) {
        have_incumbent = true;
        best_x = start;
        best = evaluate_objective(instance, start) - instance.objective_constant();
    }

    auto solve_node = [&](const Node& node) {
        lp.lower = node.lo;
        lp.upper = node.up;
        ++stats.lp_solves;
        return solve_lp(lp);
    };
    auto beats = [&](double obj) { return obj > best + 1e-9 * std::max(1.0, std::abs(best)); };

    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        ++stats.nodes;
        if (!propagate_binaries(instance, node.lo, node.up)) {
            ++stats.pruned_by_propagation;
            continue;
        }
        const LpResult relax = solve_node(node);
        if (relax.status == LpStatus::infeasible) {
            ++stats.pruned_by_propagation;
            continue;
        }
        if (relax.status == LpStatus::unbounded) {
            unbounded = true;
            break;
        }
        if (have_incumbent && !beats(relax.objective)) {
            ++stats.pruned_by_bound;
            continue;
        }

        std::size_t branch = vars.size();
        for (std::size_t j = 0; j < vars.size(); ++j) {
            if (vars[j].kind != VarKind::binary) continue;
            const double v = relax.x[j];
            if (std::abs(v - std::round(v)) > integrality_tol) {
                branch = j;
                break;
            }
        }
        if (branch == vars.size()) {
            // integral relaxation: pin the binaries exactly and re-solve the continuous part
            Node leaf = node;
            for (std::size_t j = 0; j < vars.size(); ++j)
                if (vars[j].kind == VarKind::binary) leaf.lo[j] = leaf.up[j] = std::round(relax.x[j]);
            const LpResult fixed = solve_node(leaf);
            if (fixed.status == LpStatus::optimal && (!have_incumbent || beats(fixed.objective))) {
                have_incumbent = true;
                best = fixed.objective;
                best_x = fixed.x;
            }
            continue;
        }
        Node zero = node, one = node;
        zero.up[branch] = 0.0;
        one.lo[branch] = 1.0;
        // explore the side the relaxation leans to first
        if (relax.x[branch] >= 0.5) {
            stack.push_back(std::move(zero));
            stack.push_back(std::move(one));
        } else {
            stack.push_back(std::move(one));
            stack.push_back(std::move(zero));
        }
    }

    Solution sol;
    if (unbounded) {
        sol.status = SolveStatus::unbounded;
        return sol;
    }
    if (!have_incumbent) {
        sol.status = SolveStatus::infeasible;
        return sol;
    }
    sol.status = SolveStatus::optimal;
    sol.values = std::move(best_x);
    sol.objective_value = evaluate_objective(instance, sol.values);
    sol.mip_gap = 0.0;
    return sol;
}

Solution reference_solve(const MilpInstance& instance, std::size_t binary_limit) {
    ReferenceStats stats;
    return reference_solve(instance, binary_limit, stats);
}

std::string default_solver_command() {
    return std::string("python3 '") + REC_HIGHS_DRIVER +
           "' {lp} {sol} --time-limit {time_limit} --gap {gap} --start {start}";
}

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    return out + "'";
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
}

std::filesystem::path fresh_temp_dir() {
    static std::atomic<unsigned> counter{0};
    const auto base = std::filesystem::temp_directory_path();
    for (;;) {
        auto p = base / ("rec-solve-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        if (std::filesystem::create_directories(p)) return p;
    }
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw SolveError("cannot write " + p.string());
    out << text;
}

std::filesystem::path prepare_run_dir(const SolveRequest& req) {
    if (req.run_dir.empty()) return fresh_temp_dir();
    std::filesystem::create_directories(req.run_dir);
    return req.run_dir;
}

}  // namespace

Solution external_solve(const MilpInstance& instance, const SolveRequest& req) {
    const auto errs = req.validate();
    if (!errs.empty()) throw SolveError("invalid solve request: " + errs.front());
    const auto dir = prepare_run_dir(req);
    const auto lp_path = dir / "instance.lp";
    const auto sol_path = dir / "solution.sol";
    write_file(lp_path, emit_exchange(instance));
    std::filesystem::remove(sol_path);
    std::string start_arg = "''";
    if (!req.start.empty()) {
        if (req.start.size() != instance.variables().size())
            throw SolveError("start point has " + std::to_string(req.start.size()) + " values for " +
                             std::to_string(instance.variables().size()) + " variables");
        Solution st;
        st.status = SolveStatus::optimal;
        st.values = req.start;
        st.objective_value = evaluate_objective(instance, req.start);
        write_file(dir / "start.sol", format_solution(st, instance));
        start_arg = shell_quote((dir / "start.sol").string());
    }

    std::string cmd = req.solver_command;
    if (cmd.empty()) {
        const char* env = std::getenv("REC_SOLVER_CMD");
        cmd = env && *env ? env : default_solver_command();
    }
    replace_all(cmd, "{lp}", shell_quote(lp_path.string()));
    replace_all(cmd, "{sol}", shell_quote(sol_path.string()));
    replace_all(cmd, "{time_limit}", format_double(req.time_limit_s));
    replace_all(cmd, "{gap}", format_double(req.rel_gap));
    replace_all(cmd, "{start}", start_arg);
    const auto log_path = dir / "solver.log";
    const std::string full = "( " + cmd + " ) > " + shell_quote(log_path.string()) + " 2>&1";
    const int rc = std::system(full.c_str());
    if (rc != 0)
        throw SolveError("solver command failed (status " + std::to_string(rc) + "): " + cmd + "; see " +
                         log_path.string());

    std::ifstream in(sol_path);
    if (!in) throw SolveError("solver wrote no solution file " + sol_path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_solution(ss.str(), instance);
}

Solution solve(const MilpInstance& instance, const SolveRequest& req) {
    if (req.backend == Backend::external) return external_solve(instance, req);
    const auto errs = req.validate();
    if (!errs.empty()) throw SolveError("invalid solve request: " + errs.front());
    ReferenceStats stats;
    Solution sol = reference_solve(instance, req.binary_limit, stats, req.start);
    if (!req.run_dir.empty()) {
        std::filesystem::create_directories(req.run_dir);
        write_file(req.run_dir / "instance.lp", emit_exchange(instance));
        write_file(req.run_dir / "solution.sol", format_solution(sol, instance));
    }
    return sol;
}

}  // namespace rec
