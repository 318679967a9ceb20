// Text exchange with external MILP solvers.
//
// Instances go out in CPLEX LP format. Solutions come back in a small
// line-oriented format:
//
//   status <optimal|infeasible|unbounded|gap_limit>
//   objective <value>        (optional)
//   gap <relative gap>       (optional)
//   <variable name> <value>  (one per variable; absent when infeasible/unbounded)

#ifndef REC_EXCHANGE_HPP
#define REC_EXCHANGE_HPP

#include <string>
#include <string_view>

#include "rec/milp.hpp"

namespace rec {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Deterministic LP text: variables by id, constraints by id.
std::string emit_exchange(const MilpInstance& instance);

/// JSON mapping of variable names to (symbol, k, s, l), 1-based indices,
/// null where the symbol carries no such index.
std::string emit_symbol_map(const MilpInstance& instance);

/// The objective value is recomputed from the parsed point; the solver's
/// own objective line is only checked for presence of a number.
Solution parse_solution(std::string_view text, const MilpInstance& instance);

std::string format_solution(const Solution& solution, const MilpInstance& instance);

}  // namespace rec

#endif
