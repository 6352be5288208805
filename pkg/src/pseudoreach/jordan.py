"""Real Jordan normal form of rational matrices.

Eigenvector chains are computed symbolically over ``Q[t]/f`` for each
irreducible factor ``f`` of the characteristic polynomial and then embedded
at every root of ``f``.  A complex conjugate pair is represented once, by the
root with positive imaginary part; its real coordinates are ``(Re z, Im z)``
where the complex coordinate is ``z = 2 u . x`` for the dual row ``u``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy
from sympy import Poly, QQ
from sympy.polys.matrices import DomainMatrix

from .algebraics import (
    AlgebraicComplex,
    AlgebraicReal,
    FieldElement,
    NumberField,
    as_algebraic,
    complex_roots,
    isolate_real_roots,
)
from .errors import DimensionMismatch, NotDiagonalisable

RationalMatrix = tuple[tuple[Fraction, ...], ...]


def as_rational_matrix(matrix) -> RationalMatrix:
    rows = tuple(tuple(Fraction(v) for v in row) for row in matrix)
    if not rows or any(len(r) != len(rows) for r in rows):
        raise DimensionMismatch("matrix must be square and non-empty")
    return rows


def charpoly(matrix: RationalMatrix) -> list[Fraction]:
    """Characteristic polynomial det(tI - M), coefficients low to high."""
    n = len(matrix)
    dm = DomainMatrix([[QQ(v.numerator, v.denominator) for v in row] for row in matrix], (n, n), QQ)
    return [Fraction(int(c.numerator), int(c.denominator)) for c in reversed(dm.charpoly())]


def _factor_rational(coeffs: Sequence[Fraction]) -> list[tuple[tuple[Fraction, ...], int]]:
    x = sympy.Symbol("t")
    p = Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], x, domain=QQ)
    out = []
    for f, mult in p.factor_list()[1]:
        cs = [Fraction(int(c.p), int(c.q)) for c in reversed(f.all_coeffs())]
        lc = cs[-1]
        out.append((tuple(c / lc for c in cs), mult))
    return out


def _mat_eval(coeffs: Sequence[Fraction], matrix: RationalMatrix) -> list[list[Fraction]]:
    n = len(matrix)
    acc = [[Fraction(0)] * n for _ in range(n)]
    for c in reversed(coeffs):
        acc = [[sum(acc[i][k] * matrix[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            acc[i][i] += c
    return acc


def is_diagonalisable(matrix) -> bool:
    """True iff the squarefree part of the characteristic polynomial annihilates M."""
    m = as_rational_matrix(matrix)
    cp = charpoly(m)
    sqf = [Fraction(1)]
    for f, _ in _factor_rational(cp):
        sqf = _poly_mul(sqf, list(f))
    value = _mat_eval(sqf, m)
    return all(v == 0 for row in value for v in row)


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


# ---------------------------------------------------------------------------
# linear algebra over a number field


def _matmul(a, b, zero):
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = zero
            for k in range(m):
                if a[i][k] and b[k][j]:
                    acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def _transpose(a):
    return [list(r) for r in zip(*a)]


def _kernel(a, field_: NumberField) -> list[list[FieldElement]]:
    """Basis of {v : a v = 0} via reduced row echelon form."""
    rows = [list(r) for r in a]
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [field_.zero() for _ in range(ncols)]
        v[fcol] = field_.one()
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fcol]
        basis.append(v)
    return basis


def _inverse(a, field_: NumberField):
    n = len(a)
    aug = [list(a[i]) + [field_.one() if i == j else field_.zero() for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c])
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = aug[c][c].inverse()
        aug[c] = [v * inv for v in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


class _Echelon:
    """Incrementally maintained echelon basis used for independence tests."""

    def __init__(self):
        self.rows: list[tuple[int, list]] = []

    def add(self, v) -> bool:
        v = list(v)
        for p, row in self.rows:
            if v[p]:
                f = v[p]
                v = [x - f * y for x, y in zip(v, row)]
        p = next((i for i, x in enumerate(v) if x), None)
        if p is None:
            return False
        inv = v[p].inverse()
        self.rows.append((p, [x * inv for x in v]))
        return True


def _matvec(a, v, zero):
    return [functools.reduce(lambda acc, t: acc + t, (x * y for x, y in zip(row, v) if x and y), zero) for row in a]


def _jordan_chains(a, mult: int, field_: NumberField) -> list[list[list[FieldElement]]]:
    """Jordan chains [v_1 .. v_p] of the nilpotent part, with a v_1 = 0 and a v_k = v_{k-1}."""
    zero = field_.zero()
    kernels = [[]]
    power = a
    while len(kernels[-1]) < mult:
        kernels.append(_kernel(power, field_))
        power = _matmul(power, a, zero)
    chains: list[list] = []
    for level in range(len(kernels) - 1, 0, -1):
        ech = _Echelon()
        for v in kernels[level - 1]:
            ech.add(v)
        for ch in chains:
            if len(ch) >= level:
                ech.add(ch[level - 1])
        for v in kernels[level]:
            if ech.add(v):
                chain = [v]
                for _ in range(level - 1):
                    chain.insert(0, _matvec(a, chain[0], zero))
                chains.append(chain)
    return chains


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Block:
    """One real Jordan block together with its chain and dual rows."""

    kind: str  # "real" or "complex"
    eigenvalue: AlgebraicReal | AlgebraicComplex
    size: int
    modulus: AlgebraicReal
    field: NumberField
    chain: tuple[tuple[FieldElement, ...], ...]
    dual: tuple[tuple[FieldElement, ...], ...]

    @property
    def is_real(self) -> bool:
        return self.kind == "real"

    @property
    def dim(self) -> int:
        return self.size if self.is_real else 2 * self.size

    @property
    def lam(self) -> FieldElement:
        return self.field.gen()

    @property
    def coordinate_scale(self) -> int:
        return 1 if self.is_real else 2


def _block_cmp(a: Block, b: Block) -> int:
    c = -a.modulus.compare(b.modulus)
    if c:
        return c
    if a.kind != b.kind:
        return -1 if a.is_real else 1
    if a.size != b.size:
        return -1 if a.size > b.size else 1
    if a.is_real:
        return -a.eigenvalue.compare(b.eigenvalue)
    c = -a.eigenvalue.re.compare(b.eigenvalue.re)
    return c or -a.eigenvalue.im.compare(b.eigenvalue.im)


@dataclass(frozen=True, eq=False)
class RealJordanForm:
    """M = P J P^-1 with J block diagonal in real Jordan form."""

    matrix: RationalMatrix
    blocks: tuple[Block, ...]
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.matrix)

    @property
    def is_diagonalisable(self) -> bool:
        return all(b.size == 1 for b in self.blocks)

    def coords(self, vector) -> tuple[tuple[FieldElement, ...], ...]:
        """Per-block coordinates (complex coordinate ``2 u . x`` for complex blocks)."""
        vec = [Fraction(v) for v in vector]
        if len(vec) != self.dimension:
            raise DimensionMismatch("vector length does not match matrix")
        out = []
        for b in self.blocks:
            zero = b.field.zero()
            s = b.coordinate_scale
            out.append(tuple(sum((u[i] * vec[i] for i in range(len(vec)) if vec[i]), zero) * s for u in b.dual))
        return tuple(out)

    def functional(self, a) -> tuple[tuple[FieldElement, ...], ...]:
        """Per-block weights ``a . v_k`` so that ``a . x = sum Re(weight * coord)``."""
        vec = [Fraction(v) for v in a]
        if len(vec) != self.dimension:
            raise DimensionMismatch("functional length does not match matrix")
        out = []
        for b in self.blocks:
            zero = b.field.zero()
            out.append(tuple(sum((v[i] * vec[i] for i in range(len(vec)) if vec[i]), zero) for v in b.chain))
        return tuple(out)

    def _real_columns(self):
        cols, rows = [], []
        for b in self.blocks:
            for v, u in zip(b.chain, b.dual):
                if b.is_real:
                    cols.append([e.real() for e in v])
                    rows.append([e.real() for e in u])
                else:
                    cols.append([e.re() for e in v])
                    cols.append([-e.im() for e in v])
                    rows.append([e.re() * 2 for e in u])
                    rows.append([e.im() * 2 for e in u])
        return cols, rows

    @property
    def basis_P(self) -> tuple[tuple[AlgebraicReal, ...], ...]:
        if "P" not in self._cache:
            cols, rows = self._real_columns()
            self._cache["P"] = tuple(tuple(c[i] for c in cols) for i in range(self.dimension))
            self._cache["Pinv"] = tuple(tuple(r) for r in rows)
        return self._cache["P"]

    @property
    def basis_P_inv(self) -> tuple[tuple[AlgebraicReal, ...], ...]:
        self.basis_P
        return self._cache["Pinv"]

    @property
    def J(self) -> tuple[tuple[AlgebraicReal, ...], ...]:
        n = self.dimension
        zero, one = AlgebraicReal.from_rational(0), AlgebraicReal.from_rational(1)
        out = [[zero] * n for _ in range(n)]
        pos = 0
        for b in self.blocks:
            if b.is_real:
                for k in range(b.size):
                    out[pos + k][pos + k] = b.eigenvalue
                    if k + 1 < b.size:
                        out[pos + k][pos + k + 1] = one
            else:
                a, c = b.eigenvalue.re, b.eigenvalue.im
                for k in range(b.size):
                    i = pos + 2 * k
                    out[i][i], out[i][i + 1] = a, -c
                    out[i + 1][i], out[i + 1][i + 1] = c, a
                    if k + 1 < b.size:
                        out[i][i + 2] = one
                        out[i + 1][i + 3] = one
            pos += b.dim
        return tuple(tuple(r) for r in out)


def real_jordan_form(matrix) -> RealJordanForm:
    m = as_rational_matrix(matrix)
    n = len(m)
    blocks: list[Block] = []
    for f, mult in _factor_rational(charpoly(m)):
        real_roots = isolate_real_roots(f)
        cplx = complex_roots(f)
        first = real_roots[0] if real_roots else cplx[0]
        base = NumberField(f, first)
        theta = base.gen()
        a = [[base.const(m[i][j]) - (theta if i == j else 0) for j in range(n)] for i in range(n)]
        chains = _jordan_chains(a, mult, base)
        vs = [v for ch in chains for v in ch]
        apow = a
        for _ in range(mult - 1):
            apow = _matmul(apow, a, base.zero())
        ws = _kernel(_transpose(apow), base)
        gram = _matmul(ws, _transpose(vs), base.zero())
        us = _matmul(_inverse(gram, base), ws, base.zero())
        for emb in list(real_roots) + list(cplx):
            fe = base.with_generator(emb)
            rewrap = lambda vec: tuple(FieldElement(fe, e.coeffs) for e in vec)
            is_real = isinstance(emb, AlgebraicReal)
            rho = abs(emb) if is_real else fe.gen().abs()
            start = 0
            for ch in chains:
                blocks.append(
                    Block(
                        kind="real" if is_real else "complex",
                        eigenvalue=emb,
                        size=len(ch),
                        modulus=rho,
                        field=fe,
                        chain=tuple(rewrap(v) for v in ch),
                        dual=tuple(rewrap(u) for u in us[start : start + len(ch)]),
                    )
                )
                start += len(ch)
    blocks.sort(key=functools.cmp_to_key(_block_cmp))
    return RealJordanForm(matrix=m, blocks=tuple(blocks))


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DRSplit:
    """Diagonalisable case: each block is rho * R with R a rotation or a sign."""

    form: RealJordanForm
    scales: tuple[AlgebraicReal, ...]
    rotations: tuple[AlgebraicComplex, ...]

    @property
    def blocks(self) -> tuple[Block, ...]:
        return self.form.blocks


def dr_split(form: RealJordanForm) -> DRSplit:
    if not form.is_diagonalisable:
        raise NotDiagonalisable("matrix has a non-trivial Jordan block")
    scales, rots = [], []
    for b in form.blocks:
        scales.append(b.modulus)
        if b.is_real:
            sgn = -1 if b.eigenvalue.sign() < 0 else 1
            rots.append(AlgebraicComplex(sgn, 0))
        else:
            rots.append(AlgebraicComplex(b.eigenvalue.re / b.modulus, b.eigenvalue.im / b.modulus))
    return DRSplit(form=form, scales=tuple(scales), rotations=tuple(rots))


def _apply(matrix, vector):
    return tuple(sum((as_algebraic(x) * as_algebraic(y) for x, y in zip(row, vector)), AlgebraicReal.from_rational(0)) for row in matrix)


def conjugate_problem(form: RealJordanForm, s, b, target):
    """Rewrite start, affine term and target in the real Jordan basis."""
    from .elimination import Halfspace, Hyperplane, TargetSpec

    pinv, p = form.basis_P_inv, form.basis_P
    s2 = _apply(pinv, s)
    b2 = _apply(pinv, b)
    pt = list(zip(*p))

    def norm(c):
        return tuple(sum((as_algebraic(x) * as_algebraic(y) for x, y in zip(col, c)), AlgebraicReal.from_rational(0)) for col in pt)

    clauses = []
    for clause in target.clauses:
        atoms = []
        for atom in clause:
            for hs in atom.halfspaces():
                atoms.append(Halfspace(norm(hs.c), hs.b, hs.strict) if isinstance(hs, Halfspace) else Hyperplane(norm(hs.c), hs.b))
        clauses.append(tuple(atoms))
    return s2, b2, TargetSpec(tuple(clauses))
