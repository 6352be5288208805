"""Time certified Kronecker witnesses for the rotation (3+4i)/5 and shrinking tolerances."""
from __future__ import annotations

import argparse
import random
import time
from fractions import Fraction as F

from pseudoreach.algebraics import AlgebraicComplex
from pseudoreach.robustbuilder import circle_point
from pseudoreach.torus import kronecker_witness


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--targets", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    gamma = AlgebraicComplex(F(3, 5), F(4, 5))
    targets = [circle_point(F(rng.randint(-50, 50), rng.randint(1, 20))) for _ in range(args.targets)]
    for exp in (2, 3, 4, 5):
        delta = F(1, 10 ** exp)
        t = time.time()
        ns = [kronecker_witness([gamma], [(1, 0)], [z], delta) for z in targets]
        print(f"delta=1e-{exp}: max n={max(ns):>8} mean n={sum(ns) / len(ns):>10.1f} time={time.time() - t:.2f}s")


if __name__ == "__main__":
    main()
