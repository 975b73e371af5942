#!/usr/bin/env python3
"""Solve an exported LP file with HiGHS and print the optimal objective.

Exit status: 0 solved, 2 not optimal, 3 highspy missing.
"""
import argparse
import sys


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("lp", help="LP file written by `mvrp export-lp`")
    parser.add_argument("--time-limit", type=float, default=120.0)
    args = parser.parse_args()
    try:
        import highspy
    except ImportError:
        print("highspy not available", file=sys.stderr)
        return 3

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", args.time_limit)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.readModel(args.lp)
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        print(f"status {h.modelStatusToString(status)}", file=sys.stderr)
        return 2
    print(f"objective {h.getInfo().objective_function_value:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
