"""Decision procedures for pseudo-reachability and robust reachability of linear dynamical systems."""
from .decision import Options, Problem, Verdict, cross_validate, decide, decide_robust, run
from .elimination import Halfspace, Hyperplane, IntervalBound, TargetSpec

__all__ = [
    "Halfspace",
    "Hyperplane",
    "IntervalBound",
    "Options",
    "Problem",
    "TargetSpec",
    "Verdict",
    "cross_validate",
    "decide",
    "decide_robust",
    "run",
]
