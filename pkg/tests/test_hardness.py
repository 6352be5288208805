from fractions import Fraction as F

import pytest

from pseudoreach.hardness import LRS, Gauss, build_instance, oracle_min_check
from pseudoreach.errors import NonDiagonalisableLRS, RootsNotEqualModulus
from pseudoreach.simulate import greedy_orbit


def four_term():
    # u = 2^n + (2i)^n / 2 + (-2i)^n / 2, zero at n = 2
    return LRS.exponential_sum([(2, 1), ((0, 2), F(1, 2)), ((0, -2), F(1, 2))])


def test_zero_of_the_sequence():
    u = four_term()
    assert [u.value(n) for n in range(4)] == [2, 2, 0, 8]


@pytest.mark.parametrize(
    "u",
    [
        four_term(),
        LRS.exponential_sum([((0, 1), 1), ((0, -1), 1), (1, 1)]),
        LRS.exponential_sum([((F(3, 5), F(4, 5)), (1, 2)), ((F(3, 5), F(-4, 5)), (1, -2)), (-1, 1)]),
        LRS.exponential_sum([((3, 4), 1), ((3, -4), 1), (5, F(1, 3))]),
        LRS.exponential_sum([((1, 1), (0, 1)), ((1, -1), (0, -1))]),
        LRS.exponential_sum([((F(5, 13), F(12, 13)), 1), ((F(5, 13), F(-12, 13)), 1), ((F(3, 5), F(4, 5)), 2), ((F(3, 5), F(-4, 5)), 2)]),
    ],
)
def test_minimum_equals_normalised_square(u):
    inst = build_instance(u)
    for n in range(51):
        lhs, square = oracle_min_check(inst, n)
        assert lhs == square
        assert (lhs.sign() <= 0) == (u.value(n) == 0)


def test_instance_shape():
    inst = build_instance(four_term())
    # 2*2 and the two conjugate products 2i*(-2i) all give rho^2 = 4
    assert inst.C == F(3, 2)
    assert inst.r == F(1, 2)
    assert inst.eps * inst.eps * sum(v * v for v in inst.c) == F(1, 4)
    assert len(inst.A) == inst.dimension == len(inst.c)


def test_simulated_hit_at_the_zero():
    inst = build_instance(four_term())
    res = greedy_orbit(inst.A, [0] * inst.dimension, inst.s, inst.target, float(inst.eps) * (1 + 1e-9), horizon=10)
    assert res.hit and res.n == 2


def test_from_recurrence():
    # u_{n+2} = -u_n, u = (0, 1, 0, -1, ...)
    u = LRS.from_recurrence([-1, 0], [0, 1])
    assert [u.value(n) for n in range(6)] == [0, 1, 0, -1, 0, 1]
    assert set(u.roots) == {Gauss(F(0), F(1)), Gauss(F(0), F(-1))}


def test_rejections():
    with pytest.raises(ValueError):
        build_instance(LRS.exponential_sum([(1, 1)]))
    with pytest.raises(RootsNotEqualModulus):
        build_instance(LRS.exponential_sum([((0, 1), 1), ((0, -1), 1), (2, 1)]))
    with pytest.raises(NonDiagonalisableLRS):
        LRS.from_recurrence([-1, 2], [0, 1])
