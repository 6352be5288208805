"""Reduction from a Skolem-hard class of recurrences to fixed-epsilon pseudo-reachability.

Given u_n = sum beta_i lam_i^n with all roots of one modulus rho, the square
v_n = u_n^2 is rewritten as c . A^n s + C r^n with r = rho^2.  Dividing by
C (2r)^n gives C = 1 and r = 1/2.  With epsilon = (1 - r) / |c| the minimum of
c . (A^n s + z) + 1 over the accumulated control ball equals the normalised
v_n, so u has a zero iff the halfspace c . z + 1 <= 0 is epsilon-pseudo-reachable.

Roots and coefficients are Gaussian rationals, so every quantity is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from .algebraics import AlgebraicReal
from .elimination import Halfspace, TargetSpec
from .errors import NonDiagonalisableLRS, RootsNotEqualModulus


@dataclass(frozen=True)
class Gauss:
    re: Fraction
    im: Fraction = Fraction(0)

    @staticmethod
    def of(v) -> "Gauss":
        if isinstance(v, Gauss):
            return v
        if isinstance(v, (tuple, list)):
            return Gauss(Fraction(v[0]), Fraction(v[1]))
        if isinstance(v, complex):
            return Gauss(Fraction(v.real), Fraction(v.imag))
        return Gauss(Fraction(v), Fraction(0))

    def __add__(self, o):
        o = Gauss.of(o)
        return Gauss(self.re + o.re, self.im + o.im)

    def __mul__(self, o):
        o = Gauss.of(o)
        return Gauss(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __pow__(self, n: int):
        out, base = Gauss(Fraction(1)), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "Gauss":
        return Gauss(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def scale(self, q) -> "Gauss":
        return Gauss(self.re * q, self.im * q)


@dataclass(frozen=True)
class LRS:
    """u_n = sum_i coeffs[i] * roots[i]^n, a real sequence."""

    roots: tuple[Gauss, ...]
    coeffs: tuple[Gauss, ...]

    @staticmethod
    def exponential_sum(terms: Sequence[tuple]) -> "LRS":
        merged: dict[Gauss, Gauss] = {}
        for root, coef in terms:
            root, coef = Gauss.of(root), Gauss.of(coef)
            merged[root] = merged.get(root, Gauss(Fraction(0))) + coef
        items = [(r, c) for r, c in merged.items() if c.abs2() != 0]
        return LRS(tuple(r for r, _ in items), tuple(c for _, c in items))

    @staticmethod
    def from_recurrence(a: Sequence, initial: Sequence) -> "LRS":
        """u_{n+d} = a_1 u_n + ... + a_d u_{n+d-1}; the characteristic polynomial must split over Q(i)."""
        d = len(a)
        if len(initial) != d:
            raise ValueError("need one initial value per recurrence coefficient")
        x = sympy.Symbol("x")
        poly = x ** d - sum(sympy.Rational(str(Fraction(a[k]))) * x ** k for k in range(d))
        _, factors = sympy.factor_list(poly, x, extension=sympy.I)
        roots = []
        for f, mult in factors:
            p = sympy.Poly(f, x)
            if p.degree() != 1:
                raise ValueError("characteristic polynomial does not split over the Gaussian rationals")
            if mult > 1:
                raise NonDiagonalisableLRS("repeated characteristic root")
            c1, c0 = p.all_coeffs()
            root = sympy.nsimplify(-c0 / c1)
            roots.append(root)
        vander = sympy.Matrix([[r ** k for r in roots] for k in range(d)])
        beta = vander.LUsolve(sympy.Matrix([sympy.Rational(str(Fraction(v))) for v in initial]))

        def gauss(z) -> Gauss:
            z = sympy.nsimplify(sympy.expand(z))
            re, im = z.as_real_imag()
            return Gauss(Fraction(str(sympy.nsimplify(re))), Fraction(str(sympy.nsimplify(im))))

        return LRS.exponential_sum([(gauss(r), gauss(b)) for r, b in zip(roots, beta)])

    def value_complex(self, n: int) -> Gauss:
        total = Gauss(Fraction(0))
        for r, c in zip(self.roots, self.coeffs):
            total = total + c * (r ** n)
        return total

    def value(self, n: int) -> Fraction:
        v = self.value_complex(n)
        if v.im != 0:
            raise ValueError("sequence is not real")
        return v.re


@dataclass(frozen=True, eq=False)
class HardnessInstance:
    A: tuple
    s: tuple
    c: tuple
    eps: AlgebraicReal
    target: TargetSpec
    r: Fraction
    source: LRS
    C: Fraction
    rho2: Fraction
    rotations: tuple[Gauss, ...]

    @property
    def dimension(self) -> int:
        return len(self.s)

    def normalised_square(self, n: int) -> Fraction:
        """u_n^2 / (C (2 rho^2)^n)."""
        return self.source.value(n) ** 2 / (self.C * (2 * self.rho2) ** n)


def build_instance(u: LRS) -> HardnessInstance:
    if not u.roots:
        raise ValueError("the zero sequence has no instance")
    rho2 = u.roots[0].abs2()
    if any(r.abs2() != rho2 for r in u.roots):
        raise RootsNotEqualModulus("all roots must have the same modulus")
    if rho2 == 0:
        raise RootsNotEqualModulus("roots must be non-zero")
    if all(r.im == 0 for r in u.roots):
        raise ValueError("sequence has no non-real roots; the reduction needs them")
    # v_n = u_n^2 grouped by products of roots
    groups: dict[Gauss, Gauss] = {}
    for ra, ca in zip(u.roots, u.coeffs):
        for rb, cb in zip(u.roots, u.coeffs):
            mu = ra * rb
            groups[mu] = groups.get(mu, Gauss(Fraction(0))) + ca * cb
    big_c = groups.pop(Gauss(rho2), Gauss(Fraction(0)))
    if big_c.im != 0 or big_c.re <= 0:
        raise ValueError("coefficient of rho^2n must be positive")
    C = big_c.re
    scale = 1 / (2 * rho2)
    blocks_A, s, c, rots = [], [], [], []
    for mu, beta in sorted(groups.items(), key=lambda kv: (kv[0].re, kv[0].im)):
        if beta.abs2() == 0 or mu.im < 0:
            continue
        b = beta.scale(1 / C)
        if mu.im == 0:
            # real negative product -rho^2
            if b.im != 0:
                raise ValueError("real root product with non-real coefficient")
            blocks_A.append(((mu.re * scale,),))
            s.append(b.re)
            c.append(Fraction(1))
        else:
            g = mu.scale(scale)
            blocks_A.append(((g.re, -g.im), (g.im, g.re)))
            s.extend([2 * b.re, 2 * b.im])
            c.extend([Fraction(1), Fraction(0)])
            rots.append(mu)
    d = len(s)
    A = [[Fraction(0)] * d for _ in range(d)]
    pos = 0
    for blk in blocks_A:
        k = len(blk)
        for i in range(k):
            for j in range(k):
                A[pos + i][pos + j] = blk[i][j]
        pos += k
    r = Fraction(1, 2)
    norm_c = AlgebraicReal.from_rational(sum(v * v for v in c)).sqrt()
    eps = AlgebraicReal.from_rational(1 - r) / norm_c
    target = TargetSpec.single(Halfspace(tuple(c), Fraction(-1)))
    return HardnessInstance(tuple(tuple(row) for row in A), tuple(s), tuple(c), eps, target, r, u, C, rho2, tuple(rots))


def _mat_vec(a, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def oracle_min_check(inst: HardnessInstance, n: int) -> tuple[AlgebraicReal, Fraction]:
    """(min over the accumulated ball of c.(A^n s + z) + 1, normalised u_n^2), both exact."""
    x = list(inst.s)
    for _ in range(n):
        x = _mat_vec(inst.A, x)
    lin = sum((ci * xi for ci, xi in zip(inst.c, x)), Fraction(0))
    norm_c = AlgebraicReal.from_rational(sum(v * v for v in inst.c)).sqrt()
    radius = inst.eps * ((1 - inst.r ** n) / (1 - inst.r))
    lhs = AlgebraicReal.from_rational(lin + 1) - norm_c * radius
    return lhs, inst.normalised_square(n)
