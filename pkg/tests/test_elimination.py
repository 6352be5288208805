import random
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
from conftest import PYTHAGOREAN, conjugate, jordan_matrix, random_invertible
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudoreach.algebraics import AlgebraicReal
from pseudoreach.asymptotics import ExpPoly, RadExpr, sign_tree
from pseudoreach.decision import Problem, oracle_functional_min
from pseudoreach.elimination import (
    Halfspace,
    Hyperplane,
    IntervalBound,
    TargetSpec,
    assemble_contact,
    eliminate_halfspace,
    eliminate_hyperplane,
    interval_constraints,
    min_functional,
    pseudo_abstraction,
)
from pseudoreach.errors import DimensionMismatch, UnsupportedTargetShape
from pseudoreach.jordan import real_jordan_form

ROT = [[F(3, 5), F(-4, 5)], [F(4, 5), F(3, 5)]]


def desc_of(m, s, b=None):
    b = b if b is not None else [0] * len(s)
    return pseudo_abstraction(real_jordan_form(m), s, b)


def value(atom, eps, n):
    return atom.value(F(eps), n, 50)


def close(x, y, tol=1e-30):
    y = F(y)
    with mpmath.workdps(60):
        return abs(x - mpmath.mpf(y.numerator) / y.denominator) < tol


def test_drift_atom():
    desc = desc_of([[1]], [0])
    (con,) = interval_constraints((Halfspace((F(-1),), F(-5)),))
    (atom,) = eliminate_halfspace(con, desc)
    for eps, n in ((F(1, 3), 4), (F(1), 9), (F(2), 0)):
        assert close(value(atom, eps, n), eps * n - 5)


def test_geometric_radius_atom():
    desc = desc_of([[F(1, 2)]], [0])
    (con,) = interval_constraints((Halfspace((F(-1),), F(-1)),))
    (atom,) = eliminate_halfspace(con, desc)
    for eps, n in ((F(1, 4), 3), (F(1), 1), (F(3), 6)):
        assert close(value(atom, eps, n), eps * 2 * (1 - F(1, 2 ** n)) - 1)


def test_rotation_circle_minimum():
    desc = desc_of(ROT, [1, 0])
    (con,) = interval_constraints((Halfspace((F(1), F(0)), F(-1)),))
    (atom,) = eliminate_halfspace(con, desc)
    # hi - min with min = -|c| |x| - eps n |c|
    for eps, n in ((F(1, 10), 5), (F(1, 2), 12)):
        assert close(value(atom, eps, n), eps * n)
    # the circle minimum never exceeds the orbit's own minimum
    problem = Problem(ROT, [1, 0], [0, 0], TargetSpec.single(Halfspace((F(1), F(0)), F(-1))))
    form = real_jordan_form(ROT)
    for n in range(0, 30, 3):
        orbit_min = oracle_functional_min(problem, form, (1, 0), F(1, 10), n)
        assert -1 - value(atom, F(1, 10), n) <= orbit_min.approx(40) + mpmath.mpf(10) ** -30


def test_hyperplane_identity_system():
    desc = desc_of([[1]], [0])
    atoms = eliminate_hyperplane(Hyperplane((F(1),), F(3)), desc)
    assert len(atoms) == 2
    vals = sorted(float(value(a, F(1, 2), 10)) for a in atoms)
    assert vals == [2.0, 8.0]  # eps n - 3 and 3 + eps n


def test_hyperplane_through_center():
    desc = desc_of([[F(1, 2)]], [F(3)])
    atoms = eliminate_hyperplane(Hyperplane((F(1),), F(3)), desc)
    assert all(a.holds_at(F(1, 8), 0) for a in atoms)


def test_hyperplane_out_of_reach_eventually_false():
    desc = desc_of([[F(1, 2)]], [0])
    atoms = eliminate_hyperplane(Hyperplane((F(1),), F(5)), desc)
    psi = [a.psi() for a in atoms]
    assert not all(p.holds(F(1, 8)) for p in psi)
    assert not all(a.holds_at(F(1, 8), 200) for a in atoms)


def test_assemble_shapes():
    desc = desc_of([[F(1, 2), 0], [0, F(1, 3)]], [1, 1])
    one = assemble_contact(TargetSpec.single(Halfspace((F(1), F(0)), F(0))), desc)
    assert len(one.branches[0].clauses) == 1
    two = assemble_contact(TargetSpec(((Halfspace((F(1), F(0)), F(0)),), (Halfspace((F(0), F(1)), F(0)),))), desc)
    assert len(two.branches[0].clauses) == 2
    rot = desc_of(ROT, [1, 0])
    shared = TargetSpec(((Halfspace((F(1), F(0)), F(0)), Halfspace((F(0), F(1)), F(0))),))
    with pytest.raises(UnsupportedTargetShape):
        assemble_contact(shared, rot)
    with pytest.raises(DimensionMismatch):
        assemble_contact(TargetSpec.single(Halfspace((F(1),), F(0))), rot)


def test_interval_conjunction_on_one_coordinate():
    desc = desc_of([[1]], [0])
    target = TargetSpec(((IntervalBound(0, 1, F(2), F(3)),),))
    formula = assemble_contact(target, desc)
    (clause,) = formula.branches[0].clauses
    assert len(clause) == 2
    assert formula.holds_at(F(1, 2), 6) and not formula.holds_at(F(1, 2), 3)


def test_residue_branches_for_finite_rotation():
    desc = desc_of([[0, -1], [1, 0]], [1, 0])
    formula = assemble_contact(TargetSpec.single(Halfspace((F(1), F(0)), F(-1, 2))), desc)
    assert formula.period == 4
    # without controls the orbit visits (-1, 0) when n = 2 mod 4
    assert [formula.holds_at(F(1, 10 ** 6), n) for n in range(4, 8)] == [False, False, True, False]


# -- properties --------------------------------------------------------------


def _random_pseudo(rng, d):
    blocks, left = [], d
    while left:
        if left >= 2 and rng.random() < 0.5:
            c, s = rng.choice(PYTHAGOREAN)
            rho = rng.choice([F(1), F(1, 2), F(3, 2)])
            blocks.append(("complex", (rho * c, rho * s), 1))
            left -= 2
        else:
            blocks.append(("real", rng.choice([F(1, 2), F(1), F(-1, 2), F(2), F(-1)]), 1))
            left -= 1
    # distinct eigenvalues keep rotations uncoupled
    if len({str(b[1]) for b in blocks}) != len(blocks) or len({b[1][0] / b[1][1] if b[0] == "complex" else b[1] for b in blocks}) != len(blocks):
        return None
    gammas = [b[1] for b in blocks if b[0] == "complex"]
    if len(gammas) > 1:
        return None
    q = random_invertible(rng, d)
    return conjugate(jordan_matrix(blocks), q)


def _sample_points(desc, eps, n, count, rnd):
    """Random points of the abstraction D^n T + c n + d + eps B(n) (floats)."""
    form = desc.form
    p = np.array([[float(v) for v in row] for row in form.basis_P])
    coords = []
    closed = desc.affine
    centers = closed.center(n)
    circles = {j: g for g in desc.closure.circles for j in g.blocks}
    for _ in range(count):
        y = []
        theta = rnd.uniform(0, 2 * np.pi)
        for j, blk in enumerate(form.blocks):
            r = float(desc.radii.radius(j, n)) * float(eps)
            if blk.is_real:
                u = rnd.uniform(-1, 1) * r
                y.append(float(centers[j][0].real()) + u)
            else:
                z = complex(float(centers[j][0].re()), float(centers[j][0].im()))
                if j in circles:
                    # rotate the rotation part freely about the fixed point d
                    dj = complex(float(closed.d[j][0].re()), float(closed.d[j][0].im()))
                    z = dj + (z - dj) * np.exp(1j * theta)
                ang, rad = rnd.uniform(0, 2 * np.pi), r * np.sqrt(rnd.random())
                z += rad * np.exp(1j * ang)
                # the real basis columns (Re v, -Im v) carry (Re z, Im z)
                y.extend([z.real, z.imag])
        coords.append(p @ np.array(y))
    return coords


def test_blockwise_min_equals_grid_min():
    rng = random.Random(11)
    checked = 0
    while checked < 6:
        d = rng.randint(2, 4)
        m = _random_pseudo(rng, d)
        if m is None:
            continue
        form = real_jordan_form(m)
        s = [F(rng.randint(-3, 3)) for _ in range(d)]
        problem = Problem(m, s, [0] * d, TargetSpec.single(Halfspace(tuple(F(1) for _ in range(d)), F(0))))
        a = tuple(F(rng.randint(-3, 3)) for _ in range(d))
        if not any(a):
            continue
        eps, n = F(1, 3), rng.randint(0, 6)
        exact = float(oracle_functional_min(problem, form, a, eps, n))
        # brute force: each block's ball discretised on a grid in the Jordan basis
        pm = np.array([[float(v) for v in row] for row in form.basis_P])
        from pseudoreach.orbitsets import exact_reach_oracle

        st = exact_reach_oracle(form, s, [0] * d, eps, n)
        center = np.array([float(v) for v in st.center_orig])
        av = np.array([float(v) for v in a])
        g = pm.T @ av
        grid_min, pos = av @ center, 0
        for blk, rad in zip(form.blocks, st.radii):
            r = float(rad.real())
            if blk.is_real:
                pts = np.linspace(-r, r, 201)[:, None]
            else:
                t = np.linspace(0, 2 * np.pi, 2001)
                pts = r * np.stack([np.cos(t), np.sin(t)], axis=1)
            grid_min += np.min(pts @ g[pos : pos + blk.dim])
            pos += blk.dim
        assert grid_min >= exact - 1e-9
        assert grid_min - exact < 1e-4 * (1 + abs(exact))
        checked += 1


def test_false_atoms_miss_sampled_points():
    rng = random.Random(5)
    rnd = np.random.default_rng(5)
    tested = 0
    while tested < 5:
        d = rng.randint(2, 4)
        m = _random_pseudo(rng, d)
        if m is None:
            continue
        s = [F(rng.randint(-3, 3)) for _ in range(d)]
        desc = desc_of(m, s)
        a = tuple(F(rng.randint(-2, 2)) for _ in range(d))
        if not any(a):
            continue
        eps = F(1, rng.choice([2, 4, 8]))
        for n in range(0, 61, 6):
            expr = min_functional(desc, a, n % desc.period)
            exact_min = float(sign_tree(expr).evaluate(eps, n, 40))
            pts = _sample_points(desc, eps, n, 2000 if n % 12 == 0 else 200, rnd)
            av = np.array([float(v) for v in a])
            vals = [av @ x for x in pts]
            # no sampled point of the abstraction goes below the eliminated minimum
            assert min(vals) >= exact_min - 1e-7 * (1 + abs(exact_min))
            if expr.is_plain():
                assert abs(float(expr.plain_part().evaluate(eps, n, 30)) - exact_min) < 1e-9 * (1 + abs(exact_min))
        tested += 1


rats = st.fractions(min_value=-10, max_value=10, max_denominator=9)


@settings(max_examples=60, deadline=None)
@given(rats, rats, st.fractions(min_value=0, max_value=10, max_denominator=9))
def test_guarded_square_root_sign(a, b, q):
    """sign(A + B sqrt(Q)) from the guarded tree equals the exact sign."""
    qe = ExpPoly.const(q) if q else ExpPoly.zero()
    expr = RadExpr([qe], {frozenset(): ExpPoly.const(a) if a else ExpPoly.zero(), frozenset({0}): ExpPoly.const(b) if b else ExpPoly.zero()})
    node = sign_tree(expr)
    exact = (AlgebraicReal.from_rational(a) + AlgebraicReal.from_rational(b) * AlgebraicReal.from_rational(q).sqrt()).sign()
    assert node.sign_at(F(1))[0] == exact
    assert node.symbolic_sign(F(1)) == exact
