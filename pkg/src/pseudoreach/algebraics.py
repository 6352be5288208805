"""Exact real and complex algebraic numbers and simple number fields.

A real algebraic number is stored as an irreducible primitive integer polynomial
(coefficients low to high, positive leading coefficient) and a rational
isolating interval ``(lo, hi)`` containing exactly one root.  Rational numbers
use a linear minimal polynomial and the degenerate interval ``lo == hi``.

Narrowing an isolating interval never changes the value, hash or equality of a
number, so it is cached on the instance.  ``AlgebraicReal.refine`` returns a
fresh copy for callers that want an explicit new value.

Resultants, factorisation and real-root isolation are delegated to sympy.
"""
from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import Callable, Sequence

import sympy
from sympy import Poly, QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from .errors import DivisionByZero, NegativeInput, NotOnUnitCircle, ZeroPolynomial

_X, _Y = sympy.symbols("x y")

Number = "AlgebraicReal | Fraction | int"


# ---------------------------------------------------------------------------
# small dense polynomial helpers (coefficients low -> high)

def _trim(c: list) -> list:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _primitive_int(coeffs: Sequence) -> tuple[int, ...]:
    """Scale rational coefficients to a primitive integer polynomial with positive lc."""
    cs = [Fraction(c) for c in coeffs]
    cs = _trim(cs)
    if all(c == 0 for c in cs):
        raise ZeroPolynomial("zero polynomial")
    den = 1
    for c in cs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in cs]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    ints = [v // g for v in ints]
    if ints[-1] < 0:
        ints = [-v for v in ints]
    return tuple(ints)


def _peval(coeffs: Sequence, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _to_sympy(coeffs: Sequence[int]) -> Poly:
    return Poly.from_list([int(c) for c in reversed(coeffs)], _X, domain=ZZ)


def _from_sympy(p: Poly) -> tuple[int, ...]:
    return _primitive_int([int(c) for c in reversed(p.all_coeffs())])


def _rat(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(int(v.p), int(v.q))


def _srat(v: Fraction):
    return sympy.Rational(v.numerator, v.denominator)


def _irreducible_factors(coeffs: Sequence[int]) -> list[tuple[int, ...]]:
    p = _to_sympy(coeffs)
    if p.degree() <= 0:
        return []
    out = []
    for f, _ in p.factor_list()[1]:
        if f.degree() >= 1:
            t = _from_sympy(f)
            if t not in out:
                out.append(t)
    return out


@functools.lru_cache(maxsize=4096)
def _isolating_intervals(coeffs: tuple[int, ...]) -> tuple[tuple[Fraction, Fraction], ...]:
    """Isolating intervals of the real roots of an irreducible polynomial."""
    p = _to_sympy(coeffs)
    return tuple((_rat(a), _rat(b)) for (a, b), _ in p.intervals())


def _count_roots(coeffs: tuple[int, ...], lo: Fraction, hi: Fraction) -> int:
    if lo == hi:
        return 1 if _peval(coeffs, lo) == 0 else 0
    return int(_to_sympy(coeffs).count_roots(_srat(lo), _srat(hi)))


def _resultant_y(pa: Sequence[int], biv: dict[tuple[int, int], int]) -> tuple[int, ...]:
    """Res_y(pa(y), Q(y, x)) for Q given as {(deg_y, deg_x): coeff}."""
    P = Poly.from_dict({(i, 0): int(c) for i, c in enumerate(pa) if c}, _Y, _X, domain=ZZ)
    Q = Poly.from_dict({k: int(v) for k, v in biv.items() if v}, _Y, _X, domain=ZZ)
    r = P.resultant(Q)
    if isinstance(r, Poly):
        coeffs = r.as_poly(_X).all_coeffs()
    else:
        coeffs = Poly(r, _X).all_coeffs()
    return tuple(int(c) for c in reversed(coeffs))


def _biv_sum(pb: Sequence[int]) -> dict:
    """pb(x - y)."""
    out: dict = {}
    for k, c in enumerate(pb):
        for i in range(k + 1):
            key = (k - i, i)
            out[key] = out.get(key, 0) + c * math.comb(k, i) * (-1) ** (k - i)
    return out


def _biv_prod(pb: Sequence[int]) -> dict:
    """y^deg pb(x / y)."""
    d = len(pb) - 1
    return {(d - k, k): c for k, c in enumerate(pb) if c}


def _biv_mean(pb: Sequence[int]) -> dict:
    """pb(2x - y): roots (r_i + r_j) / 2 after elimination."""
    out: dict = {}
    for k, c in enumerate(pb):
        for i in range(k + 1):
            key = (k - i, i)
            out[key] = out.get(key, 0) + c * math.comb(k, i) * 2 ** i * (-1) ** (k - i)
    return out


def _biv_halfdiff(pb: Sequence[int]) -> dict:
    """pb(y + 2x): roots (r_j - r_i) / 2 after elimination."""
    out: dict = {}
    for k, c in enumerate(pb):
        for i in range(k + 1):
            key = (k - i, i)
            out[key] = out.get(key, 0) + c * math.comb(k, i) * 2 ** i
    return out


def _sqrt_bounds(q: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Rationals l <= sqrt(q) <= u with u - l <= 2^-bits (q >= 0)."""
    if q == 0:
        return Fraction(0), Fraction(0)
    num, den = q.numerator, q.denominator
    s = math.isqrt(num * den * 4 ** bits)
    scale = den * 2 ** bits
    return Fraction(s, scale), Fraction(s + 1, scale)


# interval arithmetic on Fraction pairs

def _imul(a, b):
    ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(ps), max(ps)


def _iadd(a, b):
    return a[0] + b[0], a[1] + b[1]


def _ihorner(coeffs: Sequence[Fraction], box: tuple[Fraction, Fraction]):
    acc = (Fraction(coeffs[-1]), Fraction(coeffs[-1]))
    for c in reversed(coeffs[:-1]):
        acc = _iadd(_imul(acc, box), (c, c))
    return acc


def _cmul(a, b):
    """Product of complex boxes (re_iv, im_iv)."""
    re = _iadd(_imul(a[0], b[0]), _ineg(_imul(a[1], b[1])))
    im = _iadd(_imul(a[0], b[1]), _imul(a[1], b[0]))
    return re, im


def _ineg(a):
    return -a[1], -a[0]


def _chorner(coeffs: Sequence[Fraction], box):
    c = Fraction(coeffs[-1])
    acc = ((c, c), (Fraction(0), Fraction(0)))
    for c in reversed(coeffs[:-1]):
        acc = _cmul(acc, box)
        acc = ((acc[0][0] + c, acc[0][1] + c), acc[1])
    return acc


# ---------------------------------------------------------------------------


class AlgebraicReal:
    """An exact real algebraic number."""

    __slots__ = ("minpoly", "_iv")

    def __init__(self, minpoly: Sequence[int], lo: Fraction, hi: Fraction, _trusted: bool = False):
        if _trusted:
            self.minpoly = tuple(minpoly)
            self._iv = (lo, hi)
            return
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("empty isolating interval")
        candidates = [f for f in _irreducible_factors(_primitive_int(minpoly)) if _count_roots(f, lo, hi)]
        total = sum(_count_roots(f, lo, hi) for f in candidates)
        if total != 1:
            raise ValueError("interval does not isolate exactly one root")
        f = candidates[0]
        made = _make_from_factor(f, lo, hi)
        self.minpoly, self._iv = made.minpoly, made._iv

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_rational(q) -> "AlgebraicReal":
        q = Fraction(q)
        return AlgebraicReal((-q.numerator, q.denominator), q, q, _trusted=True)

    @staticmethod
    def roots_of(coeffs: Sequence) -> list["AlgebraicReal"]:
        return isolate_real_roots(coeffs)

    # -- basic properties ---------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @property
    def is_rational(self) -> bool:
        return len(self.minpoly) == 2

    @property
    def rational(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("not rational")
        return self._iv[0]

    @property
    def lo(self) -> Fraction:
        return self._iv[0]

    @property
    def hi(self) -> Fraction:
        return self._iv[1]

    def _bisect(self) -> None:
        lo, hi = self._iv
        if lo == hi:
            return
        mid = (lo + hi) / 2
        s = _sign(_peval(self.minpoly, mid))
        if s == 0:  # cannot happen for irreducible polynomials of degree >= 2
            self._iv = (mid, mid)
        elif s == _sign(_peval(self.minpoly, lo)):
            self._iv = (mid, hi)
        else:
            self._iv = (lo, mid)

    def _narrow(self, width: Fraction) -> tuple[Fraction, Fraction]:
        while self._iv[1] - self._iv[0] > width:
            self._bisect()
        return self._iv

    def _away_from_zero(self) -> tuple[Fraction, Fraction]:
        while self._iv[0] <= 0 <= self._iv[1]:
            self._bisect()
        return self._iv

    def refine(self, width) -> "AlgebraicReal":
        out = AlgebraicReal(self.minpoly, *self._iv, _trusted=True)
        out._narrow(Fraction(width))
        return out

    def enclosure(self, bits: int = 64) -> tuple[Fraction, Fraction]:
        return self._narrow(Fraction(1, 2 ** bits))

    def approx(self, digits: int = 30):
        import mpmath

        lo, hi = self._narrow(Fraction(1, 10 ** (digits + 5)))
        with mpmath.workdps(digits + 10):
            return mpmath.mpf(lo.numerator) / lo.denominator / 2 + mpmath.mpf(hi.numerator) / hi.denominator / 2

    def __float__(self) -> float:
        lo, hi = self._narrow(Fraction(1, 2 ** 60))
        return float((lo + hi) / 2)

    # -- comparison ---------------------------------------------------------

    def _cmp_rational(self, r: Fraction) -> int:
        lo, hi = self._iv
        if lo == hi:
            return _sign(lo - r)
        if r <= lo:
            return 1
        if r >= hi:
            return -1
        s = _sign(_peval(self.minpoly, r))
        if s == _sign(_peval(self.minpoly, lo)):
            self._iv = (r, hi)
            return 1
        self._iv = (lo, r)
        return -1

    def compare(self, other) -> int:
        if not isinstance(other, AlgebraicReal):
            return self._cmp_rational(Fraction(other))
        if other.is_rational:
            return self._cmp_rational(other.rational)
        if self.is_rational:
            return -other._cmp_rational(self.rational)
        if self.minpoly == other.minpoly:
            lo = max(self._iv[0], other._iv[0])
            hi = min(self._iv[1], other._iv[1])
            if lo < hi and _sign(_peval(self.minpoly, lo)) != _sign(_peval(self.minpoly, hi)):
                return 0
        while True:
            a, b = self._iv, other._iv
            if a[1] <= b[0]:
                return -1
            if b[1] <= a[0]:
                return 1
            self._bisect()
            other._bisect()

    def sign(self) -> int:
        return self._cmp_rational(Fraction(0))

    def is_zero(self) -> bool:
        return self.is_rational and self._iv[0] == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational and self._iv[0] == other
        if not isinstance(other, AlgebraicReal):
            return NotImplemented
        if self.minpoly != other.minpoly:
            return False
        return self.compare(other) == 0

    def __hash__(self) -> int:
        if self.is_rational:
            return hash(self._iv[0])
        return hash(self.minpoly)

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "AlgebraicReal":
        if self.is_rational:
            return AlgebraicReal.from_rational(-self.rational)
        p = _primitive_int([c * (-1) ** i for i, c in enumerate(self.minpoly)])
        return AlgebraicReal(p, -self._iv[1], -self._iv[0], _trusted=True)

    def __abs__(self) -> "AlgebraicReal":
        return -self if self.sign() < 0 else self

    def _shift(self, r: Fraction) -> "AlgebraicReal":
        # minpoly of a + r is p(x - r)
        shifted = [Fraction(0)] * len(self.minpoly)
        for k, c in enumerate(self.minpoly):
            for i in range(k + 1):
                shifted[i] += c * math.comb(k, i) * (-r) ** (k - i)
        return AlgebraicReal(_primitive_int(shifted), self._iv[0] + r, self._iv[1] + r, _trusted=True)

    def _scale(self, r: Fraction) -> "AlgebraicReal":
        if r == 0:
            return AlgebraicReal.from_rational(0)
        p = _primitive_int([c / r ** i for i, c in enumerate(self.minpoly)])
        lo, hi = self._iv[0] * r, self._iv[1] * r
        if r < 0:
            lo, hi = hi, lo
        return AlgebraicReal(p, lo, hi, _trusted=True)

    def __add__(self, other) -> "AlgebraicReal":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if other.is_rational:
            if self.is_rational:
                return AlgebraicReal.from_rational(self.rational + other.rational)
            return self._shift(other.rational)
        if self.is_rational:
            return other._shift(self.rational)
        res = _resultant_y(self.minpoly, _biv_sum(other.minpoly))
        return _select(res, lambda: _iadd(self._iv, other._iv), (self, other))

    __radd__ = __add__

    def __sub__(self, other) -> "AlgebraicReal":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "AlgebraicReal":
        return (-self) + other

    def __mul__(self, other) -> "AlgebraicReal":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if other.is_rational:
            if self.is_rational:
                return AlgebraicReal.from_rational(self.rational * other.rational)
            return self._scale(other.rational)
        if self.is_rational:
            return other._scale(self.rational)
        res = _resultant_y(self.minpoly, _biv_prod(other.minpoly))
        return _select(res, lambda: _imul(self._iv, other._iv), (self, other))

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicReal":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if self.is_rational:
            return AlgebraicReal.from_rational(1 / self.rational)
        lo, hi = self._away_from_zero()
        p = _primitive_int(list(reversed(self.minpoly)))
        return AlgebraicReal(p, 1 / hi, 1 / lo, _trusted=True)

    def __truediv__(self, other) -> "AlgebraicReal":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "AlgebraicReal":
        return _coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "AlgebraicReal":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return AlgebraicReal.from_rational(1)
        if n == 1:
            return self
        if self.is_rational:
            return AlgebraicReal.from_rational(self.rational ** n)
        self._away_from_zero()
        res = _resultant_y(self.minpoly, {(n, 0): -1, (0, 1): 1})

        def box():
            lo, hi = self._iv
            if lo >= 0 or n % 2 == 1:
                return lo ** n, hi ** n
            return hi ** n, lo ** n

        return _select(res, box, (self,))

    def sqrt(self) -> "AlgebraicReal":
        s = self.sign()
        if s < 0:
            raise NegativeInput("square root of a negative number")
        if s == 0:
            return self
        p = [0] * (2 * len(self.minpoly) - 1)
        for i, c in enumerate(self.minpoly):
            p[2 * i] = c

        def box():
            lo, hi = self._iv
            w = hi - lo
            bits = 8 if w == 0 else max(8, -int(math.floor(math.log2(w))) + 4)
            return _sqrt_bounds(lo, bits)[0], _sqrt_bounds(hi, bits)[1]

        return _select(tuple(p), box, (self,))

    def __repr__(self) -> str:
        if self.is_rational:
            return f"AlgebraicReal({self.rational})"
        return f"AlgebraicReal(minpoly={list(self.minpoly)}, ~{float(self):.12g})"


def _coerce(v) -> AlgebraicReal | None:
    if isinstance(v, AlgebraicReal):
        return v
    if isinstance(v, (int, Fraction)):
        return AlgebraicReal.from_rational(v)
    return None


def as_algebraic(v) -> AlgebraicReal:
    out = _coerce(v)
    if out is None:
        raise TypeError(f"cannot coerce {type(v).__name__} to AlgebraicReal")
    return out


def _make_from_factor(f: tuple[int, ...], lo: Fraction, hi: Fraction) -> AlgebraicReal:
    """Root of irreducible ``f`` known to be the unique root in [lo, hi]."""
    if len(f) == 2:
        return AlgebraicReal.from_rational(Fraction(-f[0], f[1]))
    for a, b in _isolating_intervals(f):
        if b < lo or a > hi:
            continue
        # pick the sympy interval inside [lo, hi] or shrink to the intersection
        nlo, nhi = max(a, lo), min(b, hi)
        if nlo < nhi and _sign(_peval(f, nlo)) != _sign(_peval(f, nhi)):
            return AlgebraicReal(f, nlo, nhi, _trusted=True)
    raise AssertionError("root not found in enclosure")


def _select(poly: Sequence[int], enclosure: Callable[[], tuple], operands: Sequence[AlgebraicReal]) -> AlgebraicReal:
    """Identify the root of ``poly`` that lies inside a shrinking enclosure."""
    factors = _irreducible_factors(_primitive_int(poly))
    while True:
        lo, hi = enclosure()
        hits = [(f, _count_roots(f, lo, hi)) for f in factors]
        hits = [(f, k) for f, k in hits if k]
        if len(hits) == 1 and hits[0][1] == 1:
            f = hits[0][0]
            if len(f) == 2:
                return AlgebraicReal.from_rational(Fraction(-f[0], f[1]))
            if lo < hi:
                return AlgebraicReal(f, lo, hi, _trusted=True)
        for op in operands:
            lo_, hi_ = op._iv
            op._narrow((hi_ - lo_) / 4 if hi_ > lo_ else Fraction(0))


def isolate_real_roots(coeffs: Sequence) -> list[AlgebraicReal]:
    """All distinct real roots of a rational polynomial, in increasing order."""
    p = _primitive_int(coeffs)
    roots: list[AlgebraicReal] = []
    for f in _irreducible_factors(p):
        if len(f) == 2:
            roots.append(AlgebraicReal.from_rational(Fraction(-f[0], f[1])))
            continue
        for a, b in _isolating_intervals(f):
            roots.append(AlgebraicReal(f, a, b, _trusted=True))
    roots.sort(key=functools.cmp_to_key(lambda u, v: u.compare(v)))
    return roots


def root_near(coeffs: Sequence, approx, tol: float = 1e-20) -> AlgebraicReal:
    """The real root of ``coeffs`` closest to a high-precision approximation."""
    import mpmath

    roots = isolate_real_roots(coeffs)
    if not roots:
        raise ValueError("no real roots")
    with mpmath.workdps(60):
        dist = sorted(((abs(r.approx(50) - approx), i) for i, r in enumerate(roots)))
    if dist[0][0] > tol or (len(dist) > 1 and dist[1][0] < 10 * tol):
        raise ValueError("ambiguous root identification")
    return roots[dist[0][1]]


# ---------------------------------------------------------------------------


class AlgebraicComplex:
    """A complex algebraic number stored by its real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = as_algebraic(re)
        self.im = as_algebraic(im)

    def __add__(self, other):
        other = _ccoerce(other)
        return AlgebraicComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicComplex(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_ccoerce(other))

    def __mul__(self, other):
        other = _ccoerce(other)
        if other.im.is_zero():
            return AlgebraicComplex(self.re * other.re, self.im * other.re)
        if self.im.is_zero():
            return AlgebraicComplex(self.re * other.re, self.re * other.im)
        return AlgebraicComplex(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def conjugate(self) -> "AlgebraicComplex":
        return AlgebraicComplex(self.re, -self.im)

    def abs2(self) -> AlgebraicReal:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> AlgebraicReal:
        return self.abs2().sqrt()

    def inverse(self) -> "AlgebraicComplex":
        n = self.abs2()
        if n.is_zero():
            raise DivisionByZero("inverse of zero")
        return AlgebraicComplex(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * _ccoerce(other).inverse()

    def __pow__(self, n: int) -> "AlgebraicComplex":
        if n < 0:
            return self.inverse() ** (-n)
        result = AlgebraicComplex(1, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, (AlgebraicComplex, AlgebraicReal, int, Fraction)):
            return NotImplemented
        other = _ccoerce(other)
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"AlgebraicComplex({self.re!r}, {self.im!r})"


def _ccoerce(v) -> AlgebraicComplex:
    if isinstance(v, AlgebraicComplex):
        return v
    return AlgebraicComplex(v, 0)


@functools.lru_cache(maxsize=None)
def _chebyshev_minus_one(k: int) -> tuple[int, ...]:
    """Coefficients of T_k(y) - 1."""
    t_prev, t = [1], [0, 1]
    if k == 0:
        return (0,)
    for _ in range(k - 1):
        nxt = [0] + [2 * c for c in t]
        for i, c in enumerate(t_prev):
            nxt[i] -= c
        t_prev, t = t, nxt
    out = list(t)
    out[0] -= 1
    return tuple(out)


def _divides(m: Sequence[int], p: Sequence[int]) -> bool:
    return _to_sympy(p).rem(_to_sympy(m)).is_zero


def is_root_of_unity(z: AlgebraicComplex) -> int | None:
    """Least k >= 1 with z^k = 1, or None; ``z`` must lie on the unit circle."""
    if not z.abs2() == 1:
        raise NotOnUnitCircle("modulus is not one")
    deg_bound = 2 * z.re.degree
    for k in range(1, 2 * deg_bound * deg_bound + 3):
        if sympy.totient(k) > deg_bound:
            continue
        poly = _chebyshev_minus_one(k)
        if z.re.is_rational:
            if _peval(poly, z.re.rational) == 0:
                return k
        elif _divides(z.re.minpoly, poly):
            return k
    return None


# ---------------------------------------------------------------------------
# number fields Q(theta) with a fixed complex embedding of theta


def _pmul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pmod(a: list[Fraction], f: Sequence[Fraction]) -> list[Fraction]:
    """Remainder modulo a monic polynomial."""
    a = list(a)
    d = len(f) - 1
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i]
        if c:
            for j in range(d + 1):
                a[i - d + j] -= c * f[j]
    out = a[:d] if d > 0 else []
    out += [Fraction(0)] * (d - len(out))
    return out


def _pdivmod(a: list[Fraction], b: list[Fraction]):
    a = _trim(list(a))
    b = _trim(list(b))
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lb = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / lb
        q[i] = c
        if c:
            for j, y in enumerate(b):
                a[i + j] -= c * y
    r = _trim(a[: len(b) - 1] or [Fraction(0)])
    return q, r


def _psub(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


def _pinv_mod(a: list[Fraction], f: Sequence[Fraction]) -> list[Fraction]:
    """Inverse of ``a`` modulo irreducible ``f`` via the extended Euclidean algorithm."""
    r0, r1 = list(f), _trim(list(a))
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while not (len(r1) == 1 and r1[0] == 0):
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _trim(_psub(s0, _pmul(q, s1)))
    if len(r0) != 1:
        raise DivisionByZero("element is not invertible")
    return [c / r0[0] for c in _pmod(s0 + [Fraction(0)] * len(f), f)]


class NumberField:
    """Q(theta) for an irreducible monic ``modulus`` with one embedding of theta."""

    __slots__ = ("modulus", "generator", "degree", "is_real")

    def __init__(self, modulus: Sequence, generator):
        mod = [Fraction(c) for c in modulus]
        lc = mod[-1]
        self.modulus = tuple(c / lc for c in mod)
        self.degree = len(self.modulus) - 1
        if isinstance(generator, AlgebraicComplex) and generator.im.is_zero():
            generator = generator.re
        self.is_real = not isinstance(generator, AlgebraicComplex)
        self.generator = as_algebraic(generator) if self.is_real else generator

    @staticmethod
    def rationals() -> "NumberField":
        return NumberField((0, 1), AlgebraicReal.from_rational(0))

    @staticmethod
    def of_real(a: AlgebraicReal) -> "NumberField":
        return NumberField(a.minpoly, a)

    def __eq__(self, other) -> bool:
        return isinstance(other, NumberField) and self.modulus == other.modulus and self.generator == other.generator

    def __hash__(self) -> int:
        return hash(self.modulus)

    def element(self, coeffs) -> "FieldElement":
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > self.degree:
            cs = _pmod(cs, self.modulus)
        cs += [Fraction(0)] * (self.degree - len(cs))
        return FieldElement(self, tuple(cs))

    def const(self, q) -> "FieldElement":
        return self.element([Fraction(q)])

    def zero(self) -> "FieldElement":
        return self.const(0)

    def one(self) -> "FieldElement":
        return self.const(1)

    def gen(self) -> "FieldElement":
        if self.degree == 1:
            return self.const(-self.modulus[0])
        return self.element([0, 1])

    def with_generator(self, generator) -> "NumberField":
        return NumberField(self.modulus, generator)

    def __repr__(self) -> str:
        return f"NumberField(modulus={[str(c) for c in self.modulus]}, generator={self.generator!r})"


class FieldElement:
    """An element of a NumberField, a polynomial in theta of degree below the field degree."""

    __slots__ = ("field", "coeffs", "_cache")

    def __init__(self, field: NumberField, coeffs: tuple[Fraction, ...]):
        self.field = field
        self.coeffs = coeffs
        self._cache: dict = {}

    def _wrap(self, coeffs) -> "FieldElement":
        return FieldElement(self.field, tuple(coeffs))

    def _lift(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            return other
        return self.field.const(other)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.field.const(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other):
        other = self._lift(other)
        return self._wrap(a + b for a, b in zip(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-a for a in self.coeffs)

    def __sub__(self, other):
        other = self._lift(other)
        return self._wrap(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._wrap(a * other for a in self.coeffs)
        if self.field.degree == 1:
            return self._wrap((self.coeffs[0] * other.coeffs[0],))
        return self._wrap(_pmod(_pmul(self.coeffs, other.coeffs), self.field.modulus))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if self.field.degree == 1:
            return self._wrap((1 / self.coeffs[0],))
        return self._wrap(_pinv_mod(list(self.coeffs), self.field.modulus))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero")
            return self._wrap(a / other for a in self.coeffs)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- embedding ----------------------------------------------------------

    def _enclose_real(self, bits: int):
        g = self.field.generator
        return _ihorner(self.coeffs, g.enclosure(bits))

    def _enclose_complex(self, bits: int):
        g = self.field.generator
        box = (g.re.enclosure(bits), g.im.enclosure(bits))
        return _chorner(self.coeffs, box)

    def enclosure(self, bits: int = 64):
        """Rigorous rational enclosure of the embedded value (interval or complex box)."""
        if self.field.is_real:
            return self._enclose_real(bits)
        return self._enclose_complex(bits)

    def _norm_poly(self) -> tuple[int, ...]:
        """Squarefree polynomial whose roots are the conjugates of this element."""
        d = self.field.degree
        cols = []
        cur = list(self.coeffs)
        t = [Fraction(0), Fraction(1)] if d > 1 else None
        for _ in range(d):
            cols.append(cur)
            if t is not None:
                cur = _pmod(_pmul(cur, t), self.field.modulus)
        rows = [[QQ(cols[j][i].numerator, cols[j][i].denominator) for j in range(d)] for i in range(d)]
        cp = DomainMatrix(rows, (d, d), QQ).charpoly()
        coeffs = [Fraction(int(c.numerator), int(c.denominator)) for c in reversed(cp)]
        p = _to_sympy(_primitive_int(coeffs))
        return _from_sympy(p.sqf_part())

    def _select_with(self, poly: Sequence[int], which: int) -> AlgebraicReal:
        factors = _irreducible_factors(_primitive_int(poly))
        bits = 24
        while True:
            enc = self.enclosure(bits)
            if self.field.is_real:
                lo, hi = enc
            elif which == 0:
                lo, hi = enc[0]
            elif which == 1:
                lo, hi = enc[1]
            else:
                re, im = enc
                sq = _iadd(_isq(re), _isq(im))
                lo, hi = sq
            hits = [(f, _count_roots(f, lo, hi)) for f in factors]
            hits = [(f, k) for f, k in hits if k]
            if len(hits) == 1 and hits[0][1] == 1:
                f = hits[0][0]
                if len(f) == 2:
                    return AlgebraicReal.from_rational(Fraction(-f[0], f[1]))
                if lo < hi:
                    return _make_from_factor(f, lo, hi)
            bits *= 2

    def real(self) -> AlgebraicReal:
        """The embedded value; only valid in a real field."""
        if not self.field.is_real:
            raise ValueError("complex field: use re() / im()")
        if "re" not in self._cache:
            if self.is_rational():
                self._cache["re"] = AlgebraicReal.from_rational(self.coeffs[0])
            else:
                self._cache["re"] = self._select_with(self._norm_poly(), 0)
        return self._cache["re"]

    def re(self) -> AlgebraicReal:
        if self.field.is_real:
            return self.real()
        if "re" not in self._cache:
            if self.is_rational():
                self._cache["re"] = AlgebraicReal.from_rational(self.coeffs[0])
            else:
                m = self._norm_poly()
                self._cache["re"] = self._select_with(_resultant_y(m, _biv_mean(m)), 0)
        return self._cache["re"]

    def im(self) -> AlgebraicReal:
        if self.field.is_real or self.is_rational():
            return AlgebraicReal.from_rational(0)
        if "im" not in self._cache:
            m = self._norm_poly()
            p = _resultant_y(m, _biv_halfdiff(m))
            q = _rotate_imaginary(p)
            self._cache["im"] = self._select_with(q, 1)
        return self._cache["im"]

    def abs2(self) -> AlgebraicReal:
        if self.field.is_real:
            v = self.real()
            return v * v
        if "abs2" not in self._cache:
            if self.is_rational():
                self._cache["abs2"] = AlgebraicReal.from_rational(self.coeffs[0] ** 2)
            else:
                m = self._norm_poly()
                self._cache["abs2"] = self._select_with(_resultant_y(m, _biv_prod(m)), 2)
        return self._cache["abs2"]

    def abs(self) -> AlgebraicReal:
        if self.field.is_real:
            return abs(self.real())
        if "abs" not in self._cache:
            self._cache["abs"] = self.abs2().sqrt()
        return self._cache["abs"]

    def to_complex(self) -> AlgebraicComplex:
        return AlgebraicComplex(self.re(), self.im())

    def __complex__(self) -> complex:
        enc = self.enclosure(60)
        if self.field.is_real:
            return complex(float((enc[0] + enc[1]) / 2))
        return complex(float((enc[0][0] + enc[0][1]) / 2), float((enc[1][0] + enc[1][1]) / 2))

    def __repr__(self) -> str:
        return f"FieldElement({[str(c) for c in self.coeffs]})"


def _isq(a):
    lo, hi = a
    if lo >= 0:
        return lo * lo, hi * hi
    if hi <= 0:
        return hi * hi, lo * lo
    return Fraction(0), max(lo * lo, hi * hi)


def _rotate_imaginary(p: Sequence[int]) -> tuple[int, ...]:
    """From P(x) with a root set symmetric under negation, a real Q with Q(t) = 0 iff P(i t) = 0."""
    nz = [k for k, c in enumerate(p) if c]
    parity = nz[0] % 2
    out = []
    for k, c in enumerate(p):
        if k % 2 != parity:
            if c:
                raise AssertionError("root set not symmetric")
            out.append(0)
        else:
            out.append(c * (-1) ** ((k - parity) // 2))
    return _primitive_int(out)


def complex_roots(modulus: Sequence) -> list[AlgebraicComplex]:
    """Roots with positive imaginary part of an irreducible rational polynomial."""
    import mpmath

    m = _primitive_int(modulus)
    deg = len(m) - 1
    if deg < 2:
        return []
    re_poly = _resultant_y(m, _biv_mean(m))
    im_poly = _rotate_imaginary(_resultant_y(m, _biv_halfdiff(m)))
    dps = 80
    while True:
        with mpmath.workdps(dps):
            approx = mpmath.polyroots(list(reversed(m)), maxsteps=400, extraprec=4 * dps)
            tol = mpmath.mpf(10) ** (-(dps // 2))
            try:
                out = []
                for z in approx:
                    if mpmath.im(z) > tol:
                        out.append(AlgebraicComplex(root_near(re_poly, mpmath.re(z), tol), root_near(im_poly, mpmath.im(z), tol)))
                return out
            except ValueError:
                dps *= 2
