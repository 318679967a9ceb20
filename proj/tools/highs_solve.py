#!/usr/bin/env python3
"""Solve an LP-format MILP with HiGHS and write the rec solution format."""

import argparse
import sys

import highspy


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("lp")
    ap.add_argument("sol")
    ap.add_argument("--time-limit", type=float, default=60.0)
    ap.add_argument("--gap", type=float, default=1e-6)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--start", default="", help="solution file with a feasible starting point")
    args = ap.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", args.time_limit)
    h.setOptionValue("mip_rel_gap", args.gap)
    h.setOptionValue("mip_abs_gap", 1e-9)
    h.setOptionValue("mip_feasibility_tolerance", 1e-9)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    h.setOptionValue("threads", args.threads)
    h.setOptionValue("random_seed", 0)
    if h.readModel(args.lp) != highspy.HighsStatus.kOk:
        print("cannot read " + args.lp, file=sys.stderr)
        return 2
    if args.start:
        names = h.getLp().col_names_
        known = {}
        with open(args.start) as f:
            for line in f:
                parts = line.split()
                if len(parts) == 2 and parts[0] not in ("status", "objective", "gap"):
                    known[parts[0]] = float(parts[1])
        start = highspy.HighsSolution()
        start.col_value = [known.get(n, 0.0) for n in names]
        start.value_valid = True
        h.setSolution(start)
    h.run()
    S = highspy.HighsModelStatus
    if h.getModelStatus() == S.kUnboundedOrInfeasible:
        h.setOptionValue("presolve", "off")
        h.run()

    ms = h.getModelStatus()
    info = h.getInfo()
    has_point = info.primal_solution_status == 2  # feasible
    if ms == S.kOptimal:
        status = "optimal"
    elif ms == S.kInfeasible:
        status = "infeasible"
    elif ms in (S.kUnbounded, S.kUnboundedOrInfeasible):
        status = "unbounded"
    elif has_point:
        status = "gap_limit"
    else:
        print("solver stopped without a solution: " + h.modelStatusToString(ms), file=sys.stderr)
        return 3

    with open(args.sol, "w") as out:
        out.write("status %s\n" % status)
        if status in ("optimal", "gap_limit"):
            gap = info.mip_gap if info.mip_gap == info.mip_gap and info.mip_gap < 1e300 else 0.0
            out.write("objective %r\n" % info.objective_function_value)
            out.write("gap %r\n" % max(0.0, gap))
            names = h.getLp().col_names_
            for name, v in zip(names, h.getSolution().col_value):
                out.write("%s %r\n" % (name, v))
    return 0


if __name__ == "__main__":
    sys.exit(main())
