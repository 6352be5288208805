"""Decide every curated problem, cross-validate it, and print a summary table."""
from __future__ import annotations

import argparse
import time

from make_problems import SUITE

from pseudoreach.decision import cross_validate, run


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--horizon", type=int, default=1000)
    args = parser.parse_args()
    print(f"{'problem':34} {'expected':13} {'verdict':13} {'case':15} {'eps*':8} {'N':>4} {'check':6} {'sec':>6}")
    bad = 0
    for name, (problem, outcome, case) in SUITE.items():
        t = time.time()
        v = run(problem)
        rep = cross_validate(v, problem, horizon=args.horizon)
        ok = v.outcome == outcome and (case is None or v.case == case) and rep.consistent
        bad += not ok
        eps = "" if v.epsilon_star is None else str(v.epsilon_star)
        n = "" if v.N is None else v.N
        print(f"{name:34} {outcome:13} {v.outcome:13} {v.case or '':15} {eps:8} {n!s:>4} {'ok' if ok else 'FAIL':6} {time.time() - t:6.2f}")
    print(f"{len(SUITE) - bad}/{len(SUITE)} consistent")


if __name__ == "__main__":
    main()
