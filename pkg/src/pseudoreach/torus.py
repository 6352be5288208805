"""Multiplicative relations among unit complex numbers and orbit closures on the torus.

Roots of unity are detected exactly.  Relations among the remaining numbers
are searched exhaustively over integer vectors with entries bounded by the
search bound, filtered numerically in two stages and confirmed exactly.  A
small LLL reduction proposes further candidates beyond the box.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
import sympy
from mpmath import iv

from .algebraics import AlgebraicComplex, AlgebraicReal, as_algebraic, is_root_of_unity
from .errors import PointNotInClosure, UnsupportedTorusCoupling

MAX_COMBINATIONS = 5_000_000


def _iv_of(q: Fraction):
    return iv.mpf(q.numerator) / q.denominator


def _iv_alg(a: AlgebraicReal, bits: int):
    lo, hi = a.enclosure(bits)
    return iv.mpf([_iv_of(lo).a, _iv_of(hi).b])


def angle_interval(z: AlgebraicComplex, bits: int = 200):
    """Rigorous enclosure of arg(z) / (2 pi) in [0, 1)."""
    with _prec(bits + 20):
        a = iv.atan2(_iv_alg(z.im, bits), _iv_alg(z.re, bits)) / (2 * iv.pi)
        if a.b < 0:
            a = a + 1
        return a


class _prec:
    def __init__(self, bits: int):
        self.bits = bits

    def __enter__(self):
        self.saved = iv.prec
        iv.prec = self.bits

    def __exit__(self, *exc):
        iv.prec = self.saved


def _mid(x) -> mpmath.mpf:
    lo, hi = x._mpi_
    return (mpmath.mpf(lo) + mpmath.mpf(hi)) / 2


# ---------------------------------------------------------------------------
# integer lattice utilities


def _hnf_basis(vectors: Sequence[Sequence[int]], dim: int) -> list[tuple[int, ...]]:
    """Row-style Hermite basis of the integer span."""
    rows = [list(v) for v in vectors if any(v)]
    basis = []
    col = 0
    while rows and col < dim:
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for k in range(dim):
                    r[k] -= q * piv[k]
            nz = [r for r in nz if r[col] != 0]
        piv = nz[0]
        if piv[col] < 0:
            piv[:] = [-v for v in piv]
        basis.append(tuple(piv))
        rows = [r for r in rows if r is not piv and any(r)]
        col += 1
    return basis


def _kernel_mod(ms: Sequence[int], modulus: int) -> list[tuple[int, ...]]:
    """Basis of {a : sum a_i m_i = 0 mod modulus}."""
    r = len(ms)
    gens = [tuple(modulus if j == i else 0 for j in range(r)) for i in range(r)]
    row = list(ms) + [modulus]
    n = len(row)
    u = [[int(i == j) for j in range(n)] for i in range(n)]  # columns transform
    row = list(row)
    # column operations reducing row to (g, 0, ..., 0)
    for j in range(1, n):
        while row[j] != 0:
            q = row[0] // row[j]
            row[0] -= q * row[j]
            for i in range(n):
                u[i][0] -= q * u[i][j]
            row[0], row[j] = row[j], row[0]
            for i in range(n):
                u[i][0], u[i][j] = u[i][j], u[i][0]
    for j in range(1, n):
        gens.append(tuple(u[i][j] for i in range(r)))
    return _hnf_basis(gens, r)


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """Textbook LLL reduction over exact rationals."""
    b = [list(map(int, v)) for v in basis]
    n = len(b)

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    def gso():
        bstar, mu = [], [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = Fraction(dot(b[i], bstar[j])) / dot(bstar[j], bstar[j]) if any(bstar[j]) else Fraction(0)
                v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
            bstar.append(v)
        return bstar, mu

    bstar, mu = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                bstar, mu = gso()
        if dot(bstar[k], bstar[k]) >= (delta - mu[k][k - 1] ** 2) * dot(bstar[k - 1], bstar[k - 1]):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bstar, mu = gso()
            k = max(k - 1, 1)
    return b


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RelationLattice:
    """Integer vectors a with prod gamma_i^a_i = 1, found up to ``search_bound``."""

    gammas: tuple[AlgebraicComplex, ...]
    orders: tuple[int | None, ...]
    generators: tuple[tuple[int, ...], ...]
    search_bound: int
    coupled: bool

    def contains(self, vector: Sequence[int]) -> bool:
        if not self.generators:
            return not any(vector)
        basis = self.generators
        rows = [list(r) for r in basis]
        m = sympy.Matrix(rows).T
        sol = m.gauss_jordan_solve(sympy.Matrix(list(vector)))
        try:
            params = sol[0]
        except Exception:
            return False
        return all(v.is_integer for v in params) if not sol[1] else False


def _exact_relation_order(gammas: Sequence[AlgebraicComplex], a: Sequence[int]) -> int | None:
    prod = AlgebraicComplex(1, 0)
    for g, e in zip(gammas, a):
        if e:
            prod = prod * (g ** e)
    try:
        return is_root_of_unity(prod)
    except Exception:
        return None


def _totient_values(bound: int) -> list[int]:
    qs, q = [], 1
    limit = 2 * bound * bound + 2
    while q <= limit:
        if sympy.totient(q) <= bound:
            qs.append(q)
        q += 1
    return qs


def find_relations(gammas: Sequence[AlgebraicComplex], bound: int = 20, use_lll: bool = True) -> RelationLattice:
    gammas = tuple(gammas)
    k = len(gammas)
    orders = tuple(is_root_of_unity(g) for g in gammas)
    roots = [i for i, o in enumerate(orders) if o is not None]
    free = [i for i, o in enumerate(orders) if o is None]
    generators: list[tuple[int, ...]] = []

    if roots:
        period = math.lcm(*(orders[i] for i in roots))
        ms = []
        for i in roots:
            q = orders[i]
            t = angle_interval(gammas[i], 80)
            p = int(mpmath.nint(_mid(t) * q)) % q
            ms.append(p * (period // q))
        for vec in _kernel_mod(ms, period):
            full = [0] * k
            for idx, v in zip(roots, vec):
                full[idx] = v
            generators.append(tuple(full))

    coupled = False
    searched = bound
    if free:
        deg_bound = 1
        for i in free:
            deg_bound *= 2 * gammas[i].re.degree
        deg_bound = min(deg_bound, 64)
        denominators = _totient_values(deg_bound)
        with mpmath.workdps(60):
            ts = [_mid(angle_interval(gammas[i], 260)) for i in free]
        m = len(free)
        searched = bound
        while (2 * searched + 1) ** m > MAX_COMBINATIONS:
            searched -= 1
        candidates = _box_candidates(ts, searched, denominators)
        if use_lll and m >= 2:
            candidates += _lll_candidates(ts, denominators)
        seen = set()
        for a in candidates:
            a = tuple(int(v) for v in a)
            if a in seen or not any(a):
                continue
            seen.add(a)
            full_gammas = [gammas[i] for i in free]
            order = _exact_relation_order(full_gammas, a)
            if order is not None:
                coupled = True
                full = [0] * k
                for idx, v in zip(free, a):
                    full[idx] = v * order
                generators.append(tuple(full))
    gens = _hnf_basis(generators, k)
    return RelationLattice(gammas, orders, tuple(gens), searched, coupled)


def _box_candidates(ts: Sequence, bound: int, denominators: Sequence[int]) -> list[tuple[int, ...]]:
    m = len(ts)
    t_float = np.array([float(t) for t in ts])
    rng = np.arange(-bound, bound + 1)
    grids = np.meshgrid(*([rng] * m), indexing="ij")
    a = np.stack([g.ravel() for g in grids], axis=1)
    # canonical sign: first non-zero entry positive, and primitive
    nz_first = np.argmax(a != 0, axis=1)
    first = a[np.arange(len(a)), nz_first]
    a = a[first > 0]
    g = np.gcd.reduce(np.abs(a), axis=1)
    a = a[g == 1]
    s = a @ t_float
    keep = np.zeros(len(a), dtype=bool)
    for q in denominators:
        v = q * s
        keep |= np.abs(v - np.round(v)) < 1e-7 * q
    out = []
    with mpmath.workdps(60):
        for row in a[keep]:
            exact = mpmath.fsum(int(x) * t for x, t in zip(row, ts))
            if any(abs(q * exact - mpmath.nint(q * exact)) < mpmath.mpf(10) ** -40 for q in denominators):
                out.append(tuple(int(x) for x in row))
    return out


def _lll_candidates(ts: Sequence, denominators: Sequence[int]) -> list[tuple[int, ...]]:
    m = len(ts)
    out = []
    with mpmath.workdps(60):
        scale = mpmath.mpf(10) ** 30
        for q in denominators[:8]:
            basis = []
            for i, t in enumerate(ts):
                row = [int(i == j) for j in range(m)] + [int(mpmath.nint(scale * q * t))]
                basis.append(row)
            basis.append([0] * m + [int(scale)])
            for row in lll_reduce(basis)[:m]:
                a = row[:m]
                if any(a):
                    exact = mpmath.fsum(x * t for x, t in zip(a, ts))
                    if abs(q * exact - mpmath.nint(q * exact)) < mpmath.mpf(10) ** -40:
                        gg = math.gcd(*a)
                        a = [x // gg for x in a]
                        first = next(x for x in a if x)
                        if first < 0:
                            a = [-x for x in a]
                        out.append(tuple(a))
    return out


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusGroup:
    """Blocks sharing one rotation, with the closure type of that rotation's orbit."""

    kind: str  # "fixed", "finite" or "circle"
    blocks: tuple[int, ...]
    order: int  # period of the rotation for finite groups, 1 for fixed, 0 for circles
    gamma: AlgebraicComplex | None = None


@dataclass(frozen=True, eq=False)
class TorusClosure:
    groups: tuple[TorusGroup, ...]
    period: int
    lattice: RelationLattice

    @property
    def circles(self) -> tuple[TorusGroup, ...]:
        return tuple(g for g in self.groups if g.kind == "circle")

    def group_of(self, block: int) -> TorusGroup:
        for g in self.groups:
            if block in g.blocks:
                return g
        raise KeyError(block)

    def describe(self, coords) -> list[dict]:
        """Exact orbit data per group for block coordinates ``coords`` (as from ``form.coords``).

        Finite groups list gamma^k x_j for k below the group order; circle groups
        give the squared radius of each block coordinate vector.
        """
        out = []
        for g in self.groups:
            xs = {j: [_as_complex(v) for v in coords[j]] for j in g.blocks}
            if g.kind == "circle":
                out.append({"kind": "circle", "radius2": {j: sum((v.abs2() for v in xs[j]), AlgebraicReal.from_rational(0)) for j in g.blocks}})
                continue
            rot = g.gamma if g.gamma is not None else AlgebraicComplex(1, 0)
            points, p = [], AlgebraicComplex(1, 0)
            for _ in range(max(g.order, 1)):
                points.append({j: tuple(p * v for v in xs[j]) for j in g.blocks})
                p = p * rot
            out.append({"kind": g.kind, "points": points})
        return out


def _as_complex(v) -> AlgebraicComplex:
    return v.to_complex() if not v.field.is_real else AlgebraicComplex(v.real(), 0)


def rotation_of(block) -> AlgebraicComplex:
    lam = block.eigenvalue
    rho = block.modulus
    if block.is_real:
        return AlgebraicComplex(-1 if lam.sign() < 0 else 1, 0)
    return AlgebraicComplex(lam.re / rho, lam.im / rho)


def closure_T(form, bound: int = 20) -> TorusClosure:
    """Closure of the rotation orbit of the Jordan form, grouped by equal rotations."""
    groups: list[TorusGroup] = []
    circle_gammas: list[AlgebraicComplex] = []
    circle_blocks: list[list[int]] = []
    fixed: list[int] = []
    finite: dict[int, list[int]] = {}
    finite_gammas: dict[int, AlgebraicComplex] = {}
    for j, blk in enumerate(form.blocks):
        if blk.modulus == 0:
            continue
        if blk.is_real:
            if blk.eigenvalue.sign() > 0:
                fixed.append(j)
            else:
                finite.setdefault(2, []).append(j)
                finite_gammas[2] = AlgebraicComplex(-1, 0)
            continue
        gamma = rotation_of(blk)
        for idx, g in enumerate(circle_gammas):
            if g == gamma:
                circle_blocks[idx].append(j)
                break
        else:
            circle_gammas.append(gamma)
            circle_blocks.append([j])
    lattice = find_relations(circle_gammas, bound)
    if fixed:
        groups.append(TorusGroup("fixed", tuple(fixed), 1, AlgebraicComplex(1, 0)))
    for order, blocks in finite.items():
        groups.append(TorusGroup("finite", tuple(blocks), order, finite_gammas[order]))
    for gamma, blocks, order in zip(circle_gammas, circle_blocks, lattice.orders):
        if order is None:
            groups.append(TorusGroup("circle", tuple(blocks), 0, gamma))
        else:
            groups.append(TorusGroup("finite", tuple(blocks), order, gamma))
    if lattice.coupled:
        raise UnsupportedTorusCoupling("multiplicative relation among rotations that are not roots of unity")
    orders = [g.order for g in groups if g.kind == "finite"]
    period = math.lcm(*orders) if orders else 1
    return TorusClosure(tuple(groups), period, lattice)


# ---------------------------------------------------------------------------


def _pair(p) -> tuple[AlgebraicReal, AlgebraicReal]:
    if isinstance(p, AlgebraicComplex):
        return p.re, p.im
    return as_algebraic(p[0]), as_algebraic(p[1])


def kronecker_witness(
    gammas: Sequence[AlgebraicComplex],
    x: Sequence,
    z: Sequence,
    delta,
    n_min: int = 0,
    step: int = 1,
    n_max: int = 10_000_000,
) -> int:
    """Least n >= n_min in n_min + step*N with ||R^n x - z|| < delta, certified by interval arithmetic."""
    xs = [_pair(p) for p in x]
    zs = [_pair(p) for p in z]
    for (xr, xi), (zr, zi) in zip(xs, zs):
        if not (xr * xr + xi * xi) == (zr * zr + zi * zi):
            raise PointNotInClosure("target point is not on the orbit closure")
    delta = Fraction(delta)
    bits = 200
    with _prec(bits + 40):
        thetas = [2 * iv.pi * angle_interval(g, bits) for g in gammas]
        phis = [iv.atan2(_iv_alg(xi, bits), _iv_alg(xr, bits)) for xr, xi in xs]
        radii = [iv.sqrt(_iv_alg(xr, bits) ** 2 + _iv_alg(xi, bits) ** 2) for xr, xi in xs]
        targets = [(_iv_alg(zr, bits), _iv_alg(zi, bits)) for zr, zi in zs]
    with mpmath.workdps(40):
        t_hp = [_mid(t) / (2 * mpmath.pi) for t in thetas]
        ph_hp = [_mid(p) / (2 * mpmath.pi) for p in phis]
    r_f = [float(_mid(r)) for r in radii]
    z_f = [(float(zr), float(zi)) for zr, zi in zs]
    d_f = float(delta)

    def certify(n: int) -> bool:
        with _prec(bits + 40):
            total = iv.mpf(0)
            for th, ph, r, (zr, zi) in zip(thetas, phis, radii, targets):
                ang = th * n + ph
                total += (r * iv.cos(ang) - zr) ** 2 + (r * iv.sin(ang) - zi) ** 2
            return total.b < _iv_of(delta * delta).a

    chunk = 100_000
    start = n_min
    while start <= n_max:
        ns = start + step * np.arange(chunk, dtype=np.int64)
        dist2 = np.zeros(chunk)
        for t, ph, r, (zr, zi) in zip(t_hp, ph_hp, r_f, z_f):
            # fractional turns computed as exact-ish integer multiples of a split angle
            hi = float(t)
            lo = float(t - mpmath.mpf(hi))
            frac = np.mod(ns * hi, 1.0) + np.mod(ns * lo, 1.0) + float(ph)
            ang = 2 * np.pi * np.mod(frac, 1.0)
            dist2 += (r * np.cos(ang) - zr) ** 2 + (r * np.sin(ang) - zi) ** 2
        for idx in np.nonzero(dist2 < (0.9 * d_f) ** 2)[0]:
            n = int(ns[idx])
            if n <= n_max and certify(n):
                return n
        start += step * chunk
    raise ValueError("no witness found below n_max")
