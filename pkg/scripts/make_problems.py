"""Write the curated problem suite to problems/*.json (with expected outcomes)."""
from __future__ import annotations

import json
import sys
from fractions import Fraction as F
from pathlib import Path

from pseudoreach.decision import Problem
from pseudoreach.elimination import Halfspace, Hyperplane, TargetSpec
from pseudoreach.serialize import problem_to_json

ROT = [[F(3, 5), F(-4, 5)], [F(4, 5), F(3, 5)]]
HALF_ROT = [[v / 2 for v in row] for row in ROT]


def hs(c, b, strict=False):
    return Halfspace(tuple(F(v) for v in c), F(b), strict)


def one(atom):
    return TargetSpec.single(atom)


def blockdiag(*blocks):
    d = sum(len(b) for b in blocks)
    out = [[F(0)] * d for _ in range(d)]
    pos = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[pos + i][pos + j] = F(v)
        pos += len(b)
    return out


def rotation(t):
    t = F(t)
    d = 1 + t * t
    c, s = (1 - t * t) / d, 2 * t / d
    return [[c, -s], [s, c]]


# name: (problem, expected outcome, expected case or None)
SUITE = {
    "contracting_start_in_target": (Problem([[F(1, 2)]], [1], [0], one(hs([-1], -1))), "Reachable", "BoundedWitness"),
    "contracting_miss": (Problem([[F(1, 2)]], [0], [0], one(hs([-1], -1))), "NotReachable", None),
    "neutral_drift": (Problem([[1]], [0], [0], one(hs([-1], -5))), "Reachable", "Case1"),
    "contracting_hyperplane_hit": (Problem([[F(1, 2)]], [1], [0], one(Hyperplane((F(1),), F(1, 4)))), "Reachable", "BoundedWitness"),
    "affine_limit_point": (Problem([[F(1, 2)]], [0], [1], one(hs([-1], -2))), "Reachable", "Case1"),
    "affine_contracting_miss": (Problem([[F(1, 2)]], [0], [1], one(hs([-1], -3))), "NotReachable", None),
    "flip_sign": (Problem([[-1]], [1], [0], one(hs([1], -1))), "Reachable", "Case1"),
    "flip_contracting_miss": (Problem([[F(-1, 2)]], [1], [0], one(hs([1], -1))), "NotReachable", None),
    "diagonal_disjunction_miss": (
        Problem([[F(1, 2), 0], [0, F(1, 3)]], [1, 1], [0, 0], TargetSpec(((hs([-1, 0], -2),), (hs([0, -1], -2),)))),
        "NotReachable",
        None,
    ),
    "rotation_neutral": (Problem(ROT, [1, 0], [0, 0], one(hs([1, 0], F(-11, 10)))), "Reachable", "Case1"),
    "rotation_contracting_miss": (Problem(HALF_ROT, [1, 0], [0, 0], one(hs([-1, 0], F(-3, 2)))), "NotReachable", None),
    "rotation_and_decay_conjunction": (
        Problem(blockdiag(ROT, [[F(1, 2)]]), [1, 0, 1], [0, 0, 0], TargetSpec(((hs([1, 0, 0], -1), hs([0, 0, -1], F(-1, 4))),))),
        "NotReachable",
        None,
    ),
    "robust_expanding_hit": (Problem([[2]], [0], [0], one(hs([1], -1)), "robust"), "Reachable", "Case1"),
    "robust_expanding_miss": (Problem([[2]], [1], [0], one(hs([1], -1)), "robust"), "NotReachable", None),
    "robust_shear_hit": (Problem([[1, 1], [0, 1]], [0, 1], [0, 0], one(hs([-1, 0], -10)), "robust"), "Reachable", None),
    "robust_rotation_touch": (Problem(ROT, [1, 0], [0, 0], one(hs([1, 0], -1)), "robust"), "Reachable", "Case1"),
    "robust_rotation_miss": (Problem(ROT, [1, 0], [0, 0], one(hs([1, 0], F(-11, 10))), "robust"), "NotReachable", None),
    "robust_jordan_decay_miss": (Problem([[F(1, 2), 1], [0, F(1, 2)]], [0, 1], [0, 0], one(hs([-1, 0], -3)), "robust"), "NotReachable", None),
    "robust_singular_hit": (
        Problem([[F(1, 2), 0], [0, 0]], [4, -1], [0, 0], TargetSpec(((hs([-1, 0], -1), hs([0, -1], 0)),)), "robust"),
        "Reachable",
        "BoundedWitness",
    ),
    "robust_singular_strict_miss": (
        Problem([[F(1, 2), 0], [0, 0]], [4, -1], [0, 0], TargetSpec(((hs([-1, 0], -1), hs([0, -1], 0, strict=True)),)), "robust"),
        "NotReachable",
        None,
    ),
    "coupled_rotations": (
        Problem(blockdiag(ROT, [[F(-7, 25), F(-24, 25)], [F(24, 25), F(-7, 25)]]), [1, 0, 1, 0], [0, 0, 0, 0], one(hs([1, 0, 1, 0], -2)), "robust"),
        "Unsupported",
        None,
    ),
    "shared_block_conjunction": (
        Problem(ROT, [1, 0], [0, 0], TargetSpec(((hs([-1, 0], 0), hs([0, -1], 0)),))),
        "Unsupported",
        None,
    ),
}


def main(out_dir: str = "problems") -> None:
    out = Path(out_dir)
    out.mkdir(exist_ok=True)
    for name, (problem, outcome, case) in SUITE.items():
        data = problem_to_json(problem)
        data["expected"] = {"outcome": outcome, **({"case": case} if case else {})}
        (out / f"{name}.json").write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")
    print(f"wrote {len(SUITE)} problems to {out}")


if __name__ == "__main__":
    main(*sys.argv[1:])
