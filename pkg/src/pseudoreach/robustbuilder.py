"""Matrix builder for robust reachability with non-diagonalisable matrices.

``f(n, z)`` is M^n with the rotation part gamma_i^n of each complex Jordan
block replaced by a free point alpha_i of the unit circle.  On a complex block
of size k the (l, l+m) entry of J^n is binom(n, m) lam^(n-m); the builder uses
binom(n, m) rho^n alpha lam^(-m) instead, so f(n, Gamma^n) = M^n.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from . import rational as rq
from .algebraics import AlgebraicComplex, AlgebraicReal, as_algebraic
from .elimination import AbstractionDescriptor
from .errors import DimensionMismatch, NotOnUnitCircle
from .jordan import RealJordanForm
from .torus import closure_T, rotation_of

ZERO = AlgebraicReal.from_rational(0)


def _as_unit(p) -> AlgebraicComplex:
    z = p if isinstance(p, AlgebraicComplex) else AlgebraicComplex(p[0], p[1])
    if not (z.re * z.re + z.im * z.im) == 1:
        raise NotOnUnitCircle("builder argument must lie on the unit circle")
    return z


def circle_point(t) -> AlgebraicComplex:
    """Rational point ((1 - t^2), 2t) / (1 + t^2) of the unit circle."""
    t = Fraction(t)
    d = 1 + t * t
    return AlgebraicComplex((1 - t * t) / d, 2 * t / d)


@dataclass(frozen=True, eq=False)
class MatrixBuilder:
    form: RealJordanForm
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def complex_blocks(self) -> tuple[int, ...]:
        return tuple(j for j, b in enumerate(self.form.blocks) if not b.is_real)

    def rotations(self) -> tuple[AlgebraicComplex, ...]:
        return tuple(rotation_of(self.form.blocks[j]) for j in self.complex_blocks)

    def gamma_power(self, n: int) -> tuple[AlgebraicComplex, ...]:
        return tuple(g ** n for g in self.rotations())

    def _vu(self, j: int):
        if j not in self._cache:
            blk = self.form.blocks[j]
            conv = (lambda e: AlgebraicComplex(e.real(), 0)) if blk.is_real else (lambda e: e.to_complex())
            v = [[conv(e) for e in col] for col in blk.chain]
            u = [[conv(e * blk.coordinate_scale) for e in row] for row in blk.dual]
            if blk.modulus.is_zero():
                inv_pows = []  # nilpotent powers are handled directly in block_power
            else:
                lam_inv = blk.lam.inverse()
                inv_pows = [conv(lam_inv ** m) for m in range(blk.size)]
            self._cache[j] = (v, u, inv_pows)
        return self._cache[j]

    def block_power(self, j: int, n: int, alpha: AlgebraicComplex | None) -> list[list[AlgebraicComplex]]:
        """Size-by-size complex matrix: J_j^n, with gamma^n replaced by alpha if given."""
        blk = self.form.blocks[j]
        _, _, inv_pows = self._vu(j)
        if blk.is_real:
            lead = AlgebraicComplex(blk.eigenvalue ** n if n or not blk.eigenvalue.is_zero() else 1, 0)
        else:
            lead = AlgebraicComplex(blk.modulus ** n, 0) * alpha
        k = blk.size
        out = [[AlgebraicComplex(0, 0)] * k for _ in range(k)]
        for ell in range(k):
            for c in range(ell, k):
                m = c - ell
                if comb(n, m) == 0:
                    continue
                if blk.is_real and blk.eigenvalue.is_zero():
                    val = AlgebraicComplex(1 if n == m else 0, 0)
                else:
                    val = lead * inv_pows[m]
                out[ell][c] = val * comb(n, m)
        return out

    def build_f(self, n: int, z: Sequence | None = None) -> tuple[tuple[AlgebraicReal, ...], ...]:
        """f(n, z) in the original coordinates; z lists one unit-circle point per complex block."""
        cb = self.complex_blocks
        if z is None:
            alphas = dict(zip(cb, self.gamma_power(n)))
        else:
            if len(z) != len(cb):
                raise DimensionMismatch("one circle point per complex block is required")
            alphas = dict(zip(cb, (_as_unit(p) for p in z)))
        d = self.form.dimension
        out = [[ZERO] * d for _ in range(d)]
        for j, blk in enumerate(self.form.blocks):
            v, u, _ = self._vu(j)
            f = self.block_power(j, n, alphas.get(j))
            # V F U, keeping the real part
            vf = [[sum((v[ell][r] * f[ell][c] for ell in range(blk.size) if not f[ell][c].re.is_zero() or not f[ell][c].im.is_zero()), AlgebraicComplex(0, 0)) for c in range(blk.size)] for r in range(d)]
            for r in range(d):
                for col in range(d):
                    acc = ZERO
                    for c in range(blk.size):
                        acc = acc + (vf[r][c] * u[c][col]).re
                    out[r][col] = out[r][col] + acc
        return tuple(tuple(row) for row in out)

    def delta_solution(self, n: int, z: Sequence, x) -> "DeltaSolution":
        cb = self.complex_blocks
        if len(z) != len(cb):
            raise DimensionMismatch("one circle point per complex block is required")
        coords = self.form.coords(x)
        d = self.form.dimension
        delta = [ZERO] * d
        per_block = []
        for j, p in zip(cb, z):
            alpha = _as_unit(p)
            gamma = rotation_of(self.form.blocks[j])
            g_n = gamma ** n
            factor = (alpha - g_n) * g_n.inverse()
            blk = self.form.blocks[j]
            v, _, _ = self._vu(j)
            entries = tuple(factor * c.to_complex() for c in coords[j])
            per_block.append(entries)
            for ell in range(blk.size):
                for r in range(d):
                    delta[r] = delta[r] + (v[ell][r] * entries[ell]).re
        return DeltaSolution(tuple(delta), tuple(per_block))


@dataclass(frozen=True)
class DeltaSolution:
    """Delta with f(n, z) x = M^n x + M^n Delta; ``blocks`` holds the complex block coordinates."""

    delta: tuple[AlgebraicReal, ...]
    blocks: tuple[tuple[AlgebraicComplex, ...], ...]


def build_f(form: RealJordanForm, n: int, z: Sequence | None = None):
    return MatrixBuilder(form).build_f(n, z)


def delta_solution(form: RealJordanForm, n: int, z: Sequence, x) -> DeltaSolution:
    return MatrixBuilder(form).delta_solution(n, z, x)


def robust_abstraction(form: RealJordanForm, s, relation_bound: int = 20) -> AbstractionDescriptor:
    """Descriptor of {f(n, z) s : z in the torus closure} plus the image of the per-block control balls."""
    closure = closure_T(form, relation_bound)
    return AbstractionDescriptor("robust", form, closure, form.coords(s), rq.vec(s))


def apply(matrix, vector) -> tuple[AlgebraicReal, ...]:
    return tuple(sum((a * as_algebraic(b) for a, b in zip(row, vector)), ZERO) for row in matrix)
