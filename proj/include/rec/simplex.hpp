// Dense bounded-variable primal simplex for small linear programs.
//
// Two phases: artificial variables absorb the initial residual and are
// driven to zero first. Variables may have infinite bounds on either side.
// Pricing is Dantzig's rule, falling back to Bland's rule after a run of
// degenerate pivots, which guarantees termination.

#ifndef REC_SIMPLEX_HPP
#define REC_SIMPLEX_HPP

#include <cstddef>
#include <vector>

#include "rec/milp.hpp"

namespace rec {

/// Maximize cost . x subject to rows and lower <= x <= upper.
struct LpProblem {
    std::vector<double> cost;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<Constraint> rows;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double objective = 0.0;
    std::vector<double> x;
    std::size_t iterations = 0;
};

struct SimplexOptions {
    double optimality_tol = 1e-9;  // reduced costs
    double pivot_tol = 1e-9;
    double feasibility_tol = 1e-7;  // phase-one residual accepted as feasible
    std::size_t degenerate_before_bland = 50;
    std::size_t max_iterations = 200000;
};

LpResult solve_lp(const LpProblem& lp, const SimplexOptions& opt = {});

/// The continuous relaxation of an instance (integrality dropped).
LpProblem relaxation_of(const MilpInstance& instance);

}  // namespace rec

#endif
