"""Closed forms for pseudo-orbit reachability sets and their exact oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import rational as rq
from .algebraics import AlgebraicReal, FieldElement, NumberField
from .errors import NotDiagonalisable
from .jordan import Block, RealJordanForm


@dataclass(frozen=True, eq=False)
class AffineClosedForm:
    """Orbit of x -> Mx + b from s, written as M^n x + c n + d.

    ``x``, ``c`` and ``d`` are per-block coordinates; the ``*_orig`` fields
    hold the same data in the original rational coordinates.
    """

    form: RealJordanForm
    x: tuple[tuple[FieldElement, ...], ...]
    c: tuple[tuple[FieldElement, ...], ...]
    d: tuple[tuple[FieldElement, ...], ...]
    x_orig: rq.Vector
    c_orig: rq.Vector
    d_orig: rq.Vector

    def center(self, n: int) -> tuple[tuple[FieldElement, ...], ...]:
        out = []
        for b, xj, cj, dj in zip(self.form.blocks, self.x, self.c, self.d):
            lam_n = b.lam ** n
            out.append(tuple(lam_n * xv + cv * n + dv for xv, cv, dv in zip(xj, cj, dj)))
        return tuple(out)

    def center_orig(self, n: int) -> rq.Vector:
        mx = rq.mat_vec(rq.mat_pow(self.form.matrix, n), self.x_orig)
        return tuple(a + ci * n + di for a, ci, di in zip(mx, self.c_orig, self.d_orig))


def _is_one(b: Block) -> bool:
    return b.is_real and b.eigenvalue == 1


def fold_affine(form: RealJordanForm, s, b) -> AffineClosedForm:
    """Fold the affine term into the closed form (diagonalisable matrices only)."""
    if not form.is_diagonalisable:
        raise NotDiagonalisable("affine folding needs a diagonalisable matrix")
    s, b = rq.vec(s), rq.vec(b)
    n = form.dimension
    # spectral projector onto the eigenvalue-one eigenspace (a rational matrix)
    e1 = [[Fraction(0)] * n for _ in range(n)]
    for blk in form.blocks:
        if _is_one(blk):
            v, u = blk.chain[0], blk.dual[0]
            for i in range(n):
                for j in range(n):
                    e1[i][j] += v[i].coeffs[0] * u[j].coeffs[0]
    c_orig = rq.mat_vec(e1, b)
    shifted = [[(Fraction(int(i == j)) - form.matrix[i][j]) + e1[i][j] for j in range(n)] for i in range(n)]
    d_orig = rq.solve(shifted, rq.sub(b, c_orig))
    x_orig = rq.sub(s, d_orig)

    beta, zeta0 = form.coords(b), form.coords(s)
    xs, cs, ds = [], [], []
    for blk, bj, sj in zip(form.blocks, beta, zeta0):
        zero = blk.field.zero()
        if _is_one(blk):
            cs.append(bj)
            ds.append(tuple(zero for _ in bj))
            xs.append(sj)
        else:
            denom = (blk.lam * -1 + 1).inverse()
            dj = tuple(v * denom for v in bj)
            cs.append(tuple(zero for _ in bj))
            ds.append(dj)
            xs.append(tuple(a - d for a, d in zip(sj, dj)))
    return AffineClosedForm(form, tuple(xs), tuple(cs), tuple(ds), x_orig, c_orig, d_orig)


@dataclass(frozen=True, eq=False)
class RadiusExpr:
    """Per-block radius r_j(n) = sum_{i<n} rho_j^i of the accumulated control ball (unit budget)."""

    moduli: tuple[AlgebraicReal, ...]
    fields: tuple[NumberField, ...]

    @staticmethod
    def of(form: RealJordanForm) -> "RadiusExpr":
        return RadiusExpr(
            tuple(b.modulus for b in form.blocks),
            tuple(NumberField.of_real(b.modulus) for b in form.blocks),
        )

    def radius_field(self, j: int, n: int) -> FieldElement:
        """Closed form (rho^n - 1)/(rho - 1), or n when rho = 1, in Q(rho)."""
        fld = self.fields[j]
        if self.moduli[j] == 1:
            return fld.const(n)
        rho = fld.gen()
        return (rho ** n - 1) / (rho - 1)

    def radius(self, j: int, n: int) -> AlgebraicReal:
        return self.radius_field(j, n).real()


def radius_at(radii: RadiusExpr, j: int, n: int) -> AlgebraicReal:
    return radii.radius(j, n)


@dataclass(frozen=True, eq=False)
class PseudoOrbitDescriptor:
    """The epsilon-pseudo-orbit at step n: a product of per-block balls around the exact orbit."""

    form: RealJordanForm
    affine: AffineClosedForm
    radii: RadiusExpr

    @staticmethod
    def build(form: RealJordanForm, s, b) -> "PseudoOrbitDescriptor":
        return PseudoOrbitDescriptor(form, fold_affine(form, s, b), RadiusExpr.of(form))


@dataclass(frozen=True, eq=False)
class OracleState:
    center_orig: rq.Vector
    centers: tuple[tuple[FieldElement, ...], ...]
    radii: tuple[FieldElement, ...]


def reach_oracle_states(form: RealJordanForm, s, b, eps, n_max: int):
    """Yield the oracle state for n = 0, 1, ..., n_max: c <- M c + b, r <- rho r + eps."""
    center = rq.vec(s)
    b = rq.vec(b)
    fields = [NumberField.of_real(blk.modulus) for blk in form.blocks]
    radii = [f.zero() for f in fields]
    rhos = [f.gen() for f in fields]
    eps = Fraction(eps)
    for n in range(n_max + 1):
        if n:
            center = rq.add(rq.mat_vec(form.matrix, center), b)
            radii = [rho * r + eps for rho, r in zip(rhos, radii)]
        yield OracleState(center, form.coords(center), tuple(radii))


def exact_reach_oracle(form: RealJordanForm, s, b, eps, n: int) -> OracleState:
    """Iterate centres and per-block radii directly from (s, 0)."""
    *_, last = reach_oracle_states(form, s, b, eps, n)
    return last


def membership_sample(descriptor: PseudoOrbitDescriptor, eps, n: int, point) -> bool:
    """Exact test whether a rational point lies in the epsilon-pseudo-orbit set at step n."""
    form = descriptor.form
    pc = form.coords(point)
    centers = descriptor.affine.center(n)
    for j, (blk, p, c) in enumerate(zip(form.blocks, pc, centers)):
        r = descriptor.radii.radius(j, n) * Fraction(eps)
        dist2 = AlgebraicReal.from_rational(0)
        for pv, cv in zip(p, c):
            dist2 = dist2 + (pv - cv).abs2()
        if dist2 > r * r:
            return False
    return True


# ---------------------------------------------------------------------------
# polynomial helpers shared with the robust construction


@lru_cache(maxsize=None)
def binomial_poly(m: int) -> tuple[Fraction, ...]:
    """Coefficients (low to high) of binom(n, m) as a polynomial in n."""
    coeffs = [Fraction(1)]
    for i in range(m):
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] += c
            nxt[k] -= c * i
        coeffs = nxt
    fact = math.factorial(m)
    return tuple(c / fact for c in coeffs)


def field_poly_add(a: list, b: list, zero) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero) for i in range(n)]


def field_poly_mul(a: list, b: list, zero) -> list:
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return out


def transposed_power_rows(block: Block, weights) -> list[list[FieldElement]]:
    """Rows of (J^n)^T w divided by lam^n, each as a polynomial in n over the block field."""
    lam = block.lam
    zero = block.field.zero()
    inv = lam.inverse()
    rows = []
    for k in range(block.size):
        acc = [zero]
        for ell in range(k + 1):
            if not weights[ell]:
                continue
            coef = weights[ell] * inv ** (k - ell)
            acc = field_poly_add(acc, [coef * c for c in binomial_poly(k - ell)], zero)
        rows.append(acc)
    return rows


def abs2_poly(coeffs: list[FieldElement]) -> list[AlgebraicReal]:
    """Coefficients of |p(n)|^2 for real n, from the coefficients of p."""
    zero = AlgebraicReal.from_rational(0)
    if not coeffs:
        return [zero]
    fld = coeffs[0].field
    if fld.is_real:
        sq = field_poly_mul(coeffs, coeffs, fld.zero())
        return [c.real() for c in sq]
    re = [c.re() for c in coeffs]
    im = [c.im() for c in coeffs]
    out = [zero] * (2 * len(coeffs) - 1)
    for a in range(len(coeffs)):
        for b in range(len(coeffs)):
            if coeffs[a] and coeffs[b]:
                out[a + b] = out[a + b] + re[a] * re[b] + im[a] * im[b]
    return out


def robust_ball_profile(form: RealJordanForm, direction) -> tuple[tuple[AlgebraicReal, tuple[AlgebraicReal, ...]], ...]:
    """Per block (rho^2, S_j): ||(J_j^n)^T w_j||^2 = rho_j^(2n) S_j(n), w the direction in Jordan coordinates.

    Nilpotent blocks get S_j = 0, which is exact once n reaches the block size.
    """
    weights = form.functional(direction)
    out = []
    for blk, w in zip(form.blocks, weights):
        total = [AlgebraicReal.from_rational(0)]
        if blk.modulus != 0:
            for row in transposed_power_rows(blk, w):
                sq = abs2_poly(row)
                n = max(len(total), len(sq))
                total = [(total[i] if i < len(total) else 0) + (sq[i] if i < len(sq) else 0) for i in range(n)]
        while len(total) > 1 and total[-1].is_zero():
            total.pop()
        out.append((blk.modulus * blk.modulus, tuple(total)))
    return tuple(out)
