"""Exact rational vectors and matrices as tuples of Fractions."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]


def vec(values) -> Vector:
    return tuple(Fraction(v) for v in values)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def mat_vec(m: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vector:
    if len(m[0]) != len(v):
        raise DimensionMismatch("matrix and vector sizes differ")
    return tuple(sum((a * b for a, b in zip(row, v) if a and b), Fraction(0)) for row in m)


def mat_mul(a, b) -> Matrix:
    bt = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col) if x and y), Fraction(0)) for col in bt) for row in a)


def mat_pow(m, n: int) -> Matrix:
    result = identity(len(m))
    base = tuple(tuple(r) for r in m)
    while n:
        if n & 1:
            result = mat_mul(result, base)
        n >>= 1
        if n:
            base = mat_mul(base, base)
    return result


def dot(a, b) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def add(a, b) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def sub(a, b) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def scale(a, s) -> Vector:
    return tuple(x * s for x in a)


def solve(a, b) -> Vector:
    """Solve a x = b for invertible square a."""
    n = len(a)
    aug = [list(map(Fraction, a[i])) + [Fraction(b[i])] for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [v / p for v in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return tuple(row[n] for row in aug)


def inverse(a) -> Matrix:
    n = len(a)
    cols = [solve(a, [Fraction(int(i == j)) for i in range(n)]) for j in range(n)]
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def column_space(a) -> list[Vector]:
    """A basis of the column space of a."""
    cols = [list(c) for c in zip(*a)]
    basis: list[list[Fraction]] = []
    pivots: list[int] = []
    out = []
    for col in cols:
        v = list(col)
        for p, row in zip(pivots, basis):
            if v[p]:
                f = v[p] / row[p]
                v = [x - f * y for x, y in zip(v, row)]
        p = next((i for i, x in enumerate(v) if x), None)
        if p is not None:
            basis.append(v)
            pivots.append(p)
            out.append(tuple(col))
    return out
