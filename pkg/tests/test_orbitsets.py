from fractions import Fraction as F

from conftest import random_system, random_vector
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudoreach import rational as rq
from pseudoreach.algebraics import AlgebraicReal
from pseudoreach.jordan import real_jordan_form
from pseudoreach.orbitsets import (
    PseudoOrbitDescriptor,
    RadiusExpr,
    exact_reach_oracle,
    fold_affine,
    membership_sample,
    radius_at,
    reach_oracle_states,
    robust_ball_profile,
)


def direct_sum(m, s, b, n):
    x = rq.vec(s)
    for _ in range(n):
        x = rq.add(rq.mat_vec(m, x), rq.vec(b))
    return x


def test_fold_zero_affine():
    form = real_jordan_form([[F(1, 2)]])
    cf = fold_affine(form, [3], [0])
    assert cf.x_orig == (3,) and cf.c_orig == (0,) and cf.d_orig == (0,)


def test_fold_geometric():
    form = real_jordan_form([[F(1, 2)]])
    cf = fold_affine(form, [0], [1])
    assert cf.x_orig == (-2,) and cf.c_orig == (0,) and cf.d_orig == (2,)
    for n in range(21):
        assert cf.center_orig(n) == direct_sum([[F(1, 2)]], [0], [1], n)


def test_fold_arithmetic():
    cf = fold_affine(real_jordan_form([[1]]), [0], [1])
    assert cf.x_orig == (0,) and cf.c_orig == (1,) and cf.d_orig == (0,)


def test_fold_matches_direct_summation(rng):
    for _ in range(10):
        d = rng.randint(1, 5)
        m, _ = random_system(rng, d)
        s, b = random_vector(rng, d), random_vector(rng, d)
        form = real_jordan_form(m)
        cf = fold_affine(form, s, b)
        for n in range(0, 51, 7):
            x = direct_sum(m, s, b, n)
            assert cf.center_orig(n) == x
            assert cf.center(n) == form.coords(x)


def test_radius_examples():
    assert radius_at(RadiusExpr.of(real_jordan_form([[1]])), 0, 7) == 7
    assert radius_at(RadiusExpr.of(real_jordan_form([[F(1, 2)]])), 0, 3) == F(7, 4)
    for m in ([[1]], [[F(1, 2)]], [[3]], [[0, -1], [1, 0]]):
        assert radius_at(RadiusExpr.of(real_jordan_form(m)), 0, 0) == 0


def test_radius_recurrence(rng):
    for _ in range(5):
        m, _ = random_system(rng, rng.randint(1, 4))
        form = real_jordan_form(m)
        radii = RadiusExpr.of(form)
        for j, blk in enumerate(form.blocks):
            for n in range(12):
                assert radii.radius(j, n + 1) == blk.modulus * radii.radius(j, n) + 1


def test_oracle_examples():
    form = real_jordan_form([[1]])
    st0 = exact_reach_oracle(form, [F(2)], [0], 1, 0)
    assert st0.center_orig == (2,) and all(r.is_zero() for r in st0.radii)
    st5 = exact_reach_oracle(form, [F(2)], [0], 1, 5)
    assert st5.center_orig == (2,) and st5.radii[0].real() == 5
    half = real_jordan_form([[F(1, 2)]])
    st2 = exact_reach_oracle(half, [1], [0], F(1, 4), 2)
    assert st2.center_orig == (F(1, 4),) and st2.radii[0].real() == F(3, 8)


def test_membership_boundary_interior_exterior():
    desc = PseudoOrbitDescriptor.build(real_jordan_form([[F(1, 2)]]), [1], [0])
    eps = F(1, 4)
    assert membership_sample(desc, eps, 2, [F(1, 4) + F(3, 8)])
    assert membership_sample(desc, eps, 2, [F(1, 4)])
    assert not membership_sample(desc, eps, 2, [F(1, 4) + F(3, 8) + F(1, 1000)])
    ident = PseudoOrbitDescriptor.build(real_jordan_form([[1]]), [0], [0])
    assert membership_sample(ident, 1, 5, [-5]) and not membership_sample(ident, 1, 5, [F(-51, 10)])


def test_oracle_states_agree_with_single_shot(rng):
    m, _ = random_system(rng, 3)
    form = real_jordan_form(m)
    s, b = random_vector(rng, 3), random_vector(rng, 3)
    states = list(reach_oracle_states(form, s, b, F(1, 3), 6))
    assert len(states) == 7
    last = exact_reach_oracle(form, s, b, F(1, 3), 6)
    assert states[-1].center_orig == last.center_orig and states[-1].radii == last.radii


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=0, max_value=3, max_denominator=8), st.fractions(min_value=0, max_value=3, max_denominator=8), st.integers(0, 30))
def test_radius_monotone_in_eps(e1, e2, n):
    lo, hi = sorted((e1, e2))
    for m in ([[F(1, 2)]], [[1]], [[F(3, 5), F(-4, 5)], [F(4, 5), F(3, 5)]], [[2]]):
        r = RadiusExpr.of(real_jordan_form(m)).radius(0, n)
        assert r * lo <= r * hi


# -- robust support data -------------------------------------------------


def support_sq_oracle(m, c, n):
    """||(M^n)^T c||^2 by exact matrix power (for blocks already in Jordan coordinates)."""
    mt = [list(r) for r in zip(*rq.mat_pow(m, n))]
    v = rq.mat_vec(mt, c)
    return sum(x * x for x in v)


def profile_value(profile, n):
    total = AlgebraicReal.from_rational(0)
    for rho2, poly in profile:
        total = total + rho2 ** n * sum((coef * n ** k for k, coef in enumerate(poly)), AlgebraicReal.from_rational(0))
    return total


def test_profile_diagonalisable_unit_direction():
    m = [[F(6, 5), F(-8, 5)], [F(8, 5), F(6, 5)]]
    form = real_jordan_form(m)
    profile = robust_ball_profile(form, (1, 0))
    (rho2, poly) = profile[0]
    assert rho2 == 4
    for n in range(8):
        assert profile_value(profile, n) == 4 ** n


def test_profile_jordan_block():
    form = real_jordan_form([[1, 1], [0, 1]])
    for n in range(10):
        # (J^n)^T (1, 0) = (1, n) and (J^n)^T (0, 1) = (0, 1)
        assert profile_value(robust_ball_profile(form, (1, 0)), n) == 1 + n * n
        assert profile_value(robust_ball_profile(form, (0, 1)), n) == 1
        assert support_sq_oracle([[1, 1], [0, 1]], (F(1), F(0)), n) == 1 + n * n


def _alg_matvec_t(m, v):
    zero = AlgebraicReal.from_rational(0)
    return [sum((m[i][j] * v[i] for i in range(len(v))), zero) for j in range(len(m[0]))]


def test_profile_against_matrix_power(rng):
    """Per block ||(J_j^n)^T (P^T c)_j||^2 with J and P from the Jordan form, exact algebraic arithmetic."""
    for _ in range(6):
        d = rng.randint(1, 5)
        m, _ = random_system(rng, d, jordan=True, gaussian=False)
        form = real_jordan_form(m)
        c = random_vector(rng, d)
        w = _alg_matvec_t(form.basis_P, c)
        jm = form.J
        prof = robust_ball_profile(form, c)
        start = max([b.size for b in form.blocks if b.modulus.is_zero()], default=0)
        for n in (start, start + 1, start + 4, start + 9):
            expect = AlgebraicReal.from_rational(0)
            pos = 0
            for blk in form.blocks:
                sl = range(pos, pos + blk.dim)
                sub = [[jm[a][b] for b in sl] for a in sl]
                vec = [w[a] for a in sl]
                for _ in range(n):
                    vec = _alg_matvec_t(sub, vec)
                expect = expect + sum((v * v for v in vec), AlgebraicReal.from_rational(0))
                pos += blk.dim
            assert profile_value(prof, n) == expect
