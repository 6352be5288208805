"""Random system generators shared by the test suite."""
from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from pseudoreach import rational as rq

# rotations with rational cosine and sine
PYTHAGOREAN = [(F(3, 5), F(4, 5)), (F(5, 13), F(12, 13)), (F(8, 17), F(15, 17)), (F(7, 25), F(24, 25)), (F(20, 29), F(21, 29))]
REAL_EIGS = [F(1), F(-1), F(1, 2), F(2), F(-1, 3), F(3, 2), F(-2), F(2, 3), F(0)]
MODULI = [F(1), F(1, 2), F(2), F(3, 4), F(4, 3)]


def jordan_matrix(blocks) -> list[list[F]]:
    """Real Jordan matrix from ("real", lam, size) and ("complex", (re, im), size) blocks."""
    dim = sum(size * (1 if kind == "real" else 2) for kind, _, size in blocks)
    out = [[F(0)] * dim for _ in range(dim)]
    pos = 0
    for kind, lam, size in blocks:
        if kind == "real":
            for k in range(size):
                out[pos + k][pos + k] = F(lam)
                if k + 1 < size:
                    out[pos + k][pos + k + 1] = F(1)
            pos += size
        else:
            a, b = F(lam[0]), F(lam[1])
            for k in range(size):
                p = pos + 2 * k
                out[p][p], out[p][p + 1], out[p + 1][p], out[p + 1][p + 1] = a, -b, b, a
                if k + 1 < size:
                    out[p][p + 2] = out[p + 1][p + 3] = F(1)
            pos += 2 * size
    return out


def random_invertible(rng: random.Random, d: int, spread: int = 2) -> list[list[F]]:
    while True:
        q = [[F(rng.randint(-spread, spread)) for _ in range(d)] for _ in range(d)]
        for i in range(d):
            q[i][i] += spread + 1
        try:
            rq.inverse(q)
            return q
        except Exception:
            continue


def conjugate(j, q) -> list[list[F]]:
    return [list(r) for r in rq.mat_mul(rq.mat_mul(q, j), rq.inverse(q))]


def random_blocks(rng: random.Random, dim: int, jordan: bool = False, gaussian: bool = True) -> list:
    """Block list filling ``dim``; complex eigenvalues are rho * rotation, or 1 + i style Gaussians."""
    blocks, left, used = [], dim, set()
    while left:
        size = 2 if jordan and rng.random() < 0.4 else 1
        if left >= 2 * size and rng.random() < 0.5:
            if gaussian and rng.random() < 0.25:
                lam = (F(rng.choice([1, -1])), F(rng.choice([1, 2])))
            else:
                c, s = rng.choice(PYTHAGOREAN)
                rho = rng.choice(MODULI)
                lam = (rho * c * rng.choice([1, -1]), rho * s)
            if lam in used:
                continue
            used.add(lam)
            blocks.append(("complex", lam, size))
            left -= 2 * size
        else:
            size = min(size, left)
            lam = rng.choice(REAL_EIGS)
            if lam in used or (lam == 0 and size > 1):
                continue
            used.add(lam)
            blocks.append(("real", lam, size))
            left -= size
    return blocks


def random_system(rng: random.Random, dim: int, jordan: bool = False, gaussian: bool = True):
    blocks = random_blocks(rng, dim, jordan, gaussian)
    return conjugate(jordan_matrix(blocks), random_invertible(rng, dim)), blocks


def random_vector(rng: random.Random, d: int, spread: int = 3) -> list[F]:
    return [F(rng.randint(-spread, spread), rng.choice([1, 2, 3])) for _ in range(d)]


@pytest.fixture
def rng():
    return random.Random(20240611)
