// Solving MILP instances: an external solver driven through exchange files,
// and an exact built-in reference for desk-scale instances.

#ifndef REC_SOLVER_BACKEND_HPP
#define REC_SOLVER_BACKEND_HPP

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rec/milp.hpp"

namespace rec {

class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Backend { external, reference };

std::string to_string(Backend backend);
Backend backend_from_string(const std::string& text);

struct SolveRequest {
    double time_limit_s = 60.0;
    double rel_gap = 1e-6;
    Backend backend = Backend::external;
    std::size_t binary_limit = 24;  // reference backend only
    // Directory receiving instance.lp / solution.sol; a fresh temporary
    // directory when empty.
    std::filesystem::path run_dir;
    // Command template with {lp}, {sol}, {time_limit}, {gap} and, optionally,
    // {start} placeholders. Empty: REC_SOLVER_CMD from the environment, else
    // the bundled HiGHS driver.
    std::string solver_command;
    // Known feasible point handed to the solver as its first incumbent; by
    // variable id, empty for none. Written to start.sol for external solvers.
    std::vector<double> start;

    std::vector<std::string> validate() const;
};

/// Exact optimum by implicit enumeration of the binary assignments.
///
/// Depth-first branch and bound on the lowest-index fractional binary. A
/// node is discarded when bound propagation over the rows proves it
/// infeasible, or when its continuous relaxation (solved by the simplex)
/// cannot beat the incumbent. Integral leaves are re-solved with the
/// binaries pinned, so the result is the exact optimum up to LP tolerances.
/// The search order is fixed, so equal optima always resolve the same way.
///
/// Throws SolveError when the instance has more than `binary_limit` binaries.
Solution reference_solve(const MilpInstance& instance, std::size_t binary_limit = 24);

struct ReferenceStats {
    std::size_t nodes = 0;
    std::size_t lp_solves = 0;
    std::size_t pruned_by_propagation = 0;
    std::size_t pruned_by_bound = 0;
};

Solution reference_solve(const MilpInstance& instance, std::size_t binary_limit, ReferenceStats& stats,
                         const std::vector<double>& start = {});

/// Writes instance.lp to the run directory, runs the solver command and
/// parses solution.sol.
Solution external_solve(const MilpInstance& instance, const SolveRequest& request);

Solution solve(const MilpInstance& instance, const SolveRequest& request);

/// Command template used when neither the request nor REC_SOLVER_CMD sets one.
std::string default_solver_command();

}  // namespace rec

#endif
