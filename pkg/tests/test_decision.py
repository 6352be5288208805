import random
from fractions import Fraction as F

import pytest

from pseudoreach.decision import (
    Options,
    Problem,
    bounded_check,
    cross_validate,
    decide,
    decide_robust,
    fm_feasible,
    in_closure,
    run,
)
from pseudoreach.elimination import Halfspace, Hyperplane, TargetSpec, assemble_contact, pseudo_abstraction
from pseudoreach.errors import DimensionMismatch, NotDiagonalisable
from pseudoreach.jordan import real_jordan_form
from pseudoreach.orbitsets import PseudoOrbitDescriptor, exact_reach_oracle

ROT = [[F(3, 5), F(-4, 5)], [F(4, 5), F(3, 5)]]


def ge(b, d=1, i=0):
    c = [F(0)] * d
    c[i] = F(-1)
    return Halfspace(tuple(c), F(-b))


def le(b, d=1, i=0):
    c = [F(0)] * d
    c[i] = F(1)
    return Halfspace(tuple(c), F(b))


def one(atom):
    return TargetSpec.single(atom)


def test_contracting_start_in_target():
    v = decide(Problem([[F(1, 2)]], [1], [0], one(ge(1))))
    assert (v.outcome, v.case, v.witness_n) == ("Reachable", "BoundedWitness", 0)


def test_contracting_miss():
    v = decide(Problem([[F(1, 2)]], [0], [0], one(ge(1))))
    assert v.outcome == "NotReachable"
    assert v.epsilon_star < F(1, 2) or v.epsilon_star == F(1, 2)
    assert v.N is not None
    # the supremum 2 eps (1 - 2^-n) stays below 1 at a quarter
    form = real_jordan_form([[F(1, 2)]])
    for n in range(0, 1001, 50):
        st = exact_reach_oracle(form, [0], [0], F(1, 4), n)
        assert st.radii[0].real() < 1


def test_neutral_drift_case1():
    v = decide(Problem([[1]], [0], [0], one(ge(5))))
    assert (v.outcome, v.case) == ("Reachable", "Case1")


def test_robust_examples():
    hit = decide_robust(Problem([[2]], [0], [0], one(le(-1)), "robust"))
    assert hit.outcome == "Reachable"
    miss = decide_robust(Problem([[2]], [1], [0], one(le(-1)), "robust"))
    assert miss.outcome == "NotReachable"
    shear = decide_robust(Problem([[1, 1], [0, 1]], [0, 1], [0, 0], one(ge(10, 2)), "robust"))
    assert shear.outcome == "Reachable"


def test_bounded_check_examples():
    p = Problem([[F(1, 2)]], [1], [0], one(ge(1)))
    assert bounded_check(p, 5)[0] == 0
    hyper = Problem([[F(1, 2)]], [1], [0], one(Hyperplane((F(1),), F(1, 4))))
    assert bounded_check(hyper, 5)[0] == 2
    miss = Problem([[F(1, 2)]], [0], [0], one(ge(1)))
    w, table = bounded_check(miss, 7)
    assert w is None and len(table) == 8


def test_strict_target_at_start_pseudo():
    # the exact start must lie in S itself; later points only in its closure
    p = Problem([[1]], [0], [0], one(Halfspace((F(-1),), F(0), True)))
    assert bounded_check(p, 0)[0] is None
    assert bounded_check(p, 1)[0] == 1


def test_fm_feasibility():
    assert fm_feasible([((1,), 1, "<="), ((-1,), -1, "<=")], 1)
    assert not fm_feasible([((1,), 1, "<"), ((-1,), -1, "<=")], 1)
    assert fm_feasible([((1, 1), 2, "="), ((1, -1), 0, "<")], 2)
    assert not fm_feasible([((0, 0), 1, "="), ((1, 0), 5, "<=")], 2)


def test_in_closure_restricted_directions():
    clause = (Halfspace((F(0), F(-1)), F(0), True),)  # y > 0
    assert in_closure(clause, (F(1), F(0)))
    assert not in_closure(clause, (F(1), F(0)), [(F(1), F(0))])


def test_problem_validation():
    with pytest.raises(DimensionMismatch):
        Problem([[1, 0], [0, 1]], [0], [0, 0], one(ge(1, 2)))
    with pytest.raises(NotDiagonalisable):
        decide(Problem([[1, 1], [0, 1]], [0, 0], [0, 0], one(ge(1, 2))))


def test_cross_validate_examples():
    cases = [
        Problem([[F(1, 2)]], [1], [0], one(ge(1))),
        Problem([[F(1, 2)]], [0], [0], one(ge(1))),
        Problem([[1]], [0], [0], one(ge(5))),
    ]
    for p in cases:
        v = decide(p)
        rep = cross_validate(v, p, horizon=500)
        assert rep.consistent, rep.checks


def test_unsupported_reported():
    coupled = [[F(3, 5), F(-4, 5), 0, 0], [F(4, 5), F(3, 5), 0, 0], [0, 0, F(-7, 25), F(-24, 25)], [0, 0, F(24, 25), F(-7, 25)]]
    v = run(Problem(coupled, [1, 0, 1, 0], [0, 0, 0, 0], one(le(-2, 4))))
    assert v.outcome == "Unsupported" and "Coupling" in v.reason


def test_orbit_inside_abstraction():
    """Points of the exact reach set satisfy the abstraction's per-block constraints."""
    rng = random.Random(3)
    for m, s in (([[F(1, 2), 0], [0, 2]], [1, -1]), (ROT, [1, 0]), ([[F(-1, 2)]], [3])):
        form = real_jordan_form(m)
        desc = PseudoOrbitDescriptor.build(form, s, [0] * len(s))
        for n in range(0, 12):
            eps = F(rng.randint(1, 8), 8)
            st = exact_reach_oracle(form, s, [0] * len(s), eps, n)
            from pseudoreach.orbitsets import membership_sample

            assert membership_sample(desc, eps, n, st.center_orig)


def test_dropping_a_conjunct_never_loses_reachability():
    d2 = [[F(1, 2), 0], [0, F(1, 3)]]
    both = TargetSpec(((ge(1, 2, 0), ge(1, 2, 1)),))
    first = TargetSpec(((ge(1, 2, 0),),))
    for s in ([1, 1], [1, 0], [0, 0], [2, 2]):
        vb = decide(Problem(d2, s, [0, 0], both))
        vf = decide(Problem(d2, s, [0, 0], first))
        assert not (vb.reachable and not vf.reachable)


def test_scaling_the_atom():
    for p in (Problem([[F(1, 2)]], [0], [1], one(ge(2))), Problem(ROT, [1, 0], [0, 0], one(le(F(-11, 10), 2)))):
        base = decide(p)
        scaled = decide(Problem(p.M, p.s, p.b, p.target.scaled(2), p.mode))
        assert (base.outcome, base.case) == (scaled.outcome, scaled.case)


def test_certificate_replay():
    for p in (
        Problem([[F(1, 2)]], [0], [0], one(ge(1))),
        Problem([[1]], [0], [0], one(ge(5))),
        Problem(ROT, [1, 0], [0, 0], one(le(F(-11, 10), 2)), "robust"),
    ):
        v = decide(p, Options())
        cert = v.certificate
        desc = pseudo_abstraction(real_jordan_form(p.M), p.s, p.b) if p.mode == "pseudo" else None
        if desc is None:
            from pseudoreach.robustbuilder import robust_abstraction

            desc = robust_abstraction(real_jordan_form(p.M), p.s)
        formula = assemble_contact(p.target, desc)
        assert len(cert["samples"]) >= 10
        for row in cert["samples"]:
            atom = formula.branch_for(row["n"]).clauses[row["clause"]][row["atom"]]
            assert atom.holds_at(F(row["eps"]), row["n"]) == row["holds"]
