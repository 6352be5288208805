"""Exponential polynomials in n with coefficients polynomial in epsilon.

An ``ExpPoly`` is a finite sum ``sum_i q_i(eps, n) * base_i^n`` with distinct
positive algebraic bases and non-zero coefficient polynomials ``q_i``.  The
module decides eventual signs for a fixed epsilon, certifies a horizon ``N``
after which the sign is constant, and describes the eventual truth of an atom
as a function of epsilon (``PsiCondition``).

Expressions with square roots of eventually non-negative radicands are
handled by ``RadExpr`` and a sign tree built from the identity
``sign(A + B sqrt(Q)) = sign(A) * sign(A^2 - B^2 Q)`` when ``A`` and ``B``
have opposite signs.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
from mpmath import iv

from .algebraics import AlgebraicReal, as_algebraic, isolate_real_roots
from .errors import NonPositiveBase, ZeroPolynomial

RELATIONS = ("<", "<=", "=", ">=", ">")
ZERO = AlgebraicReal.from_rational(0)
ONE = AlgebraicReal.from_rational(1)


def relation_holds(sign: int, rel: str) -> bool:
    return {
        "<": sign < 0,
        "<=": sign <= 0,
        "=": sign == 0,
        ">=": sign >= 0,
        ">": sign > 0,
    }[rel]


def _interval_sign(coeffs: Sequence[AlgebraicReal], eps: Fraction) -> int:
    """Sign of sum c_e eps^e, using interval bounds first and exact arithmetic as fallback."""
    nz = [(e, c) for e, c in enumerate(coeffs) if not c.is_zero()]
    if not nz:
        return 0
    if len(nz) == 1:
        e, c = nz[0]
        return c.sign() * (1 if e == 0 else ((eps > 0) - (eps < 0)) ** e)
    for bits in (32, 96, 256):
        lo = hi = Fraction(0)
        for e, c in nz:
            a, b = c.enclosure(bits)
            p = eps ** e
            lo, hi = (lo + a * p, hi + b * p) if p >= 0 else (lo + b * p, hi + a * p)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
    total = ZERO
    for e, c in nz:
        total = total + c * (eps ** e)
    return total.sign()


def _eval_eps(coeffs: Sequence[AlgebraicReal], eps) -> AlgebraicReal:
    total = ZERO
    for e, c in enumerate(coeffs):
        if not c.is_zero():
            total = total + c * (eps ** e if not isinstance(eps, AlgebraicReal) else eps ** e)
    return total


# ---------------------------------------------------------------------------


class Poly2:
    """Polynomial in (eps, n) with algebraic coefficients; keys are (eps_degree, n_degree)."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms: dict[tuple[int, int], AlgebraicReal] = {}
        for k, v in (terms or {}).items():
            v = as_algebraic(v)
            if not v.is_zero():
                self.terms[k] = v

    @staticmethod
    def const(c) -> "Poly2":
        return Poly2({(0, 0): c})

    @staticmethod
    def monomial(c, eps_degree: int = 0, n_degree: int = 0) -> "Poly2":
        return Poly2({(eps_degree, n_degree): c})

    @staticmethod
    def in_n(coeffs: Sequence, eps_degree: int = 0) -> "Poly2":
        return Poly2({(eps_degree, k): c for k, c in enumerate(coeffs)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Poly2") -> "Poly2":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return Poly2(out)

    def __neg__(self) -> "Poly2":
        return Poly2({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Poly2") -> "Poly2":
        return self + (-other)

    def __mul__(self, other) -> "Poly2":
        if not isinstance(other, Poly2):
            other = as_algebraic(other)
            return Poly2({k: v * other for k, v in self.terms.items()})
        out: dict = {}
        for (e1, k1), a in self.terms.items():
            for (e2, k2), b in other.terms.items():
                key = (e1 + e2, k1 + k2)
                prod = a * b
                out[key] = out[key] + prod if key in out else prod
        return Poly2(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly2) and self.terms.keys() == other.terms.keys() and all(self.terms[k] == other.terms[k] for k in self.terms)

    def __hash__(self):
        return hash(frozenset(self.terms))

    @property
    def n_degree(self) -> int:
        return max((k for _, k in self.terms), default=0)

    @property
    def eps_degree(self) -> int:
        return max((e for e, _ in self.terms), default=0)

    def eps_poly(self, k: int) -> tuple[AlgebraicReal, ...]:
        """Coefficient of n^k as a univariate polynomial in eps."""
        deg = self.eps_degree
        return tuple(self.terms.get((e, k), ZERO) for e in range(deg + 1))

    def at_eps(self, eps) -> "Poly2":
        out: dict = {}
        for k in range(self.n_degree + 1):
            coeffs = self.eps_poly(k)
            if any(not c.is_zero() for c in coeffs):
                out[(0, k)] = _eval_eps(coeffs, eps)
        return Poly2(out)

    def n_coeffs(self) -> list[AlgebraicReal]:
        """Coefficients in n (requires no eps dependence)."""
        return [self.terms.get((0, k), ZERO) for k in range(self.n_degree + 1)]

    def sorted_items(self):
        return sorted(self.terms.items())

    def __repr__(self) -> str:
        return "Poly2(" + ", ".join(f"eps^{e} n^{k}: {v!r}" for (e, k), v in self.sorted_items()) + ")"


def _base_cmp(a: AlgebraicReal, b: AlgebraicReal) -> int:
    return -a.compare(b)


class ExpPoly:
    """sum_i q_i(eps, n) base_i^n in normal form: bases distinct, positive, descending."""

    __slots__ = ("terms", "_approx")

    def __init__(self, terms: Sequence[tuple[AlgebraicReal, Poly2]] = ()):
        self.terms = tuple(terms)
        self._approx: dict = {}

    @staticmethod
    def normalize(raw: Iterable[tuple[Poly2, object]]) -> "ExpPoly":
        """Merge equal bases, drop zero coefficients and sort bases in decreasing order."""
        bases: list[AlgebraicReal] = []
        coeffs: list[Poly2] = []
        for poly, base in raw:
            base = as_algebraic(base)
            if base.sign() <= 0:
                raise NonPositiveBase("bases must be positive")
            for i, b in enumerate(bases):
                if b == base:
                    coeffs[i] = coeffs[i] + poly
                    break
            else:
                bases.append(base)
                coeffs.append(poly)
        pairs = [(b, c) for b, c in zip(bases, coeffs) if not c.is_zero()]
        pairs.sort(key=functools.cmp_to_key(lambda x, y: _base_cmp(x[0], y[0])))
        return ExpPoly(pairs)

    @staticmethod
    def zero() -> "ExpPoly":
        return ExpPoly(())

    @staticmethod
    def const(c) -> "ExpPoly":
        return ExpPoly.normalize([(Poly2.const(c), ONE)])

    @staticmethod
    def term(c, base, eps_degree: int = 0, n_degree: int = 0) -> "ExpPoly":
        return ExpPoly.normalize([(Poly2.monomial(c, eps_degree, n_degree), base)])

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        return ExpPoly.normalize([(c, b) for b, c in self.terms] + [(c, b) for b, c in other.terms])

    def __neg__(self) -> "ExpPoly":
        return ExpPoly([(b, -c) for b, c in self.terms])

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return self + (-other)

    def __mul__(self, other) -> "ExpPoly":
        if isinstance(other, ExpPoly):
            return ExpPoly.normalize([(c1 * c2, b1 * b2) for b1, c1 in self.terms for b2, c2 in other.terms])
        if isinstance(other, Poly2):
            return ExpPoly.normalize([(c * other, b) for b, c in self.terms])
        other = as_algebraic(other)
        if other.is_zero():
            return ExpPoly.zero()
        return ExpPoly([(b, c * other) for b, c in self.terms])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExpPoly)
            and len(self.terms) == len(other.terms)
            and all(b1 == b2 and c1 == c2 for (b1, c1), (b2, c2) in zip(self.terms, other.terms))
        )

    def __hash__(self):
        return hash(len(self.terms))

    @property
    def eps_degree(self) -> int:
        return max((c.eps_degree for _, c in self.terms), default=0)

    def at_eps(self, eps) -> "ExpPoly":
        return ExpPoly.normalize([(c.at_eps(eps), b) for b, c in self.terms])

    def lex_coefficients(self) -> list[tuple[AlgebraicReal, int, tuple[AlgebraicReal, ...]]]:
        """(base, n-degree, eps-polynomial) in decreasing order of growth."""
        out = []
        for b, c in self.terms:
            for k in range(c.n_degree, -1, -1):
                ep = c.eps_poly(k)
                if any(not v.is_zero() for v in ep):
                    out.append((b, k, ep))
        return out

    # -- numeric evaluation -------------------------------------------------

    def _approximations(self, dps: int):
        if dps not in self._approx:
            self._approx[dps] = [
                (b.approx(dps + 10), [((e, k), v.approx(dps + 10)) for (e, k), v in c.sorted_items()]) for b, c in self.terms
            ]
        return self._approx[dps]

    def evaluate(self, eps, n: int, dps: int = 50):
        """High-precision value at (eps, n)."""
        with mpmath.workdps(dps + 20):
            e_val = mpmath.mpf(Fraction(eps).numerator) / Fraction(eps).denominator if not isinstance(eps, AlgebraicReal) else eps.approx(dps + 10)
            total = mpmath.mpf(0)
            for b, items in self._approximations(dps):
                s = mpmath.mpf(0)
                for (e, k), v in items:
                    s += v * e_val ** e * mpmath.mpf(n) ** k
                total += s * b ** n
            return +total

    def __repr__(self) -> str:
        return "ExpPoly[" + "; ".join(f"({c!r}) * {b!r}^n" for b, c in self.terms) + "]"


# ---------------------------------------------------------------------------
# eventual sign at a fixed epsilon


@dataclass(frozen=True)
class EventualSign:
    """Eventual truth of ``p(n) rel 0``: for every n > N the sign of p(n) is ``sign``."""

    truth: bool
    sign: int
    N: int
    certificate: dict = field(default_factory=dict, compare=False)


def _abs_upper(c: AlgebraicReal, bits: int = 40) -> Fraction:
    lo, hi = c.enclosure(bits)
    return max(abs(lo), abs(hi))


def _abs_lower(c: AlgebraicReal, bits: int = 40) -> Fraction:
    c.sign()
    lo, hi = c.enclosure(bits)
    while lo <= 0 <= hi:
        bits *= 2
        lo, hi = c.enclosure(bits)
    return min(abs(lo), abs(hi))


def _ratio_upper(small: AlgebraicReal, big: AlgebraicReal) -> Fraction:
    """Rational u with small/big <= u < 1, assuming 0 < small < big."""
    bits = 48
    while True:
        _, hi = small.enclosure(bits)
        lo, _ = big.enclosure(bits)
        if lo > 0 and hi < lo:
            u = hi / lo
            # round up to a short dyadic to keep the interval evaluations cheap
            den = 2 ** 60
            u_d = Fraction(math.ceil(u * den), den)
            if u_d < 1:
                return u_d
            return u
        bits *= 2


class _iv_prec:
    """Temporarily set the precision of the interval context."""

    def __init__(self, bits: int):
        self.bits = bits

    def __enter__(self):
        self.saved = iv.prec
        iv.prec = self.bits

    def __exit__(self, *exc):
        iv.prec = self.saved


def _to_iv(q: Fraction):
    return iv.mpf(q.numerator) / q.denominator


def _single_term_horizon(coeffs: list[AlgebraicReal]) -> tuple[int, dict]:
    """Largest integer N with no sign change of the polynomial beyond N."""
    k = len(coeffs) - 1
    if k == 0:
        return 0, {"method": "constant"}
    if all(c.is_rational for c in coeffs):
        roots = isolate_real_roots([c.rational for c in coeffs])
        if not roots:
            return 0, {"method": "no-real-roots"}
        top = roots[-1]
        lo, hi = top.enclosure(32)
        n = math.floor(lo)
        while n + 1 <= top:
            n += 1
        while n > top:
            n -= 1
        return max(0, n), {"method": "largest-root", "root": float(top)}
    lead = _abs_lower(coeffs[-1])
    bound = 1 + max(_abs_upper(c) for c in coeffs[:-1]) / lead
    return max(0, math.ceil(bound)), {"method": "cauchy-bound", "bound": str(bound)}


def compute_N(p: ExpPoly) -> tuple[int, dict]:
    """Certified horizon for an epsilon-free exponential polynomial.

    Returns N with sign(p(n)) constant and non-zero for all n > N.
    """
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has no dominant term")
    if p.eps_degree:
        raise ValueError("substitute epsilon first")
    (r1, q1), rest = p.terms[0], p.terms[1:]
    c1 = q1.n_coeffs()
    if not rest:
        return _single_term_horizon(c1)
    k = len(c1) - 1
    lead = _abs_lower(c1[-1])
    b1 = sum((_abs_upper(c) for c in c1[:-1]), Fraction(0))
    n1 = max(1, math.ceil(2 * b1 / lead))
    parts = []
    n2 = 1
    for ri, qi in rest:
        ci = qi.n_coeffs()
        cbound = sum((_abs_upper(c) for c in ci), Fraction(0))
        u = _ratio_upper(ri, r1)
        e = len(ci) - 1 - k
        if e > 0:
            n2 = max(n2, math.ceil(e / (1 - u)))
        parts.append((2 * cbound / lead, e, u))

    def lhs_upper(n: int) -> bool:
        total = iv.mpf(0)
        ln = iv.log(iv.mpf(n))
        for coef, e, u in parts:
            total += _to_iv(coef) * iv.exp(e * ln + n * iv.log(_to_iv(u)))
        return total.b < 1

    start = max(n1, n2, 1)
    with _iv_prec(256):
        if lhs_upper(start):
            hi = start
        else:
            lo_fail, step = start, 1
            while True:
                cand = start + step
                if lhs_upper(cand):
                    hi = cand
                    break
                lo_fail, step = cand, step * 2
            while hi - lo_fail > 1:
                mid = (lo_fail + hi) // 2
                if lhs_upper(mid):
                    hi = mid
                else:
                    lo_fail = mid
    N = hi - 1
    return N, {
        "method": "dominance",
        "dominant_degree": k,
        "leading_lower": str(lead),
        "lower_sum_upper": str(b1),
        "n1": n1,
        "n2": n2,
        "ratios": [str(u) for _, _, u in parts],
        "N": N,
    }


def eventual_sign_at(p: ExpPoly, eps, rel: str = ">") -> EventualSign:
    """Eventual truth of ``p(eps, n) rel 0`` as n grows, with a certified horizon."""
    q = p.at_eps(eps) if p.eps_degree else p
    if q.is_zero():
        return EventualSign(relation_holds(0, rel), 0, 0, {"dominant": None})
    base, poly = q.terms[0]
    coeffs = poly.n_coeffs()
    s = coeffs[-1].sign()
    N, deriv = compute_N(q)
    cert = {"dominant_base": base, "dominant_degree": len(coeffs) - 1, "sign": s, "derivation": deriv}
    return EventualSign(relation_holds(s, rel), s, N, cert)


# ---------------------------------------------------------------------------
# sign trees and the epsilon condition


class SignNode:
    """Eventual sign of an expression, as a function of epsilon."""

    def sign_at(self, eps) -> tuple[int, int]:
        raise NotImplementedError

    def leaves(self) -> list["Leaf"]:
        raise NotImplementedError

    def evaluate(self, eps, n: int, dps: int = 50):
        raise NotImplementedError

    def critical_polys(self) -> list[tuple[AlgebraicReal, ...]]:
        out = []
        for leaf in self.leaves():
            for _, _, ep in leaf.expr.lex_coefficients():
                if len(ep) > 1:
                    out.append(ep)
        return out


@dataclass(eq=False)
class Leaf(SignNode):
    expr: ExpPoly

    def __post_init__(self):
        self._memo: dict = {}

    def eventual(self, eps) -> EventualSign:
        key = Fraction(eps) if not isinstance(eps, AlgebraicReal) else eps
        if key not in self._memo:
            self._memo[key] = eventual_sign_at(self.expr, eps, ">")
        return self._memo[key]

    def sign_at(self, eps) -> tuple[int, int]:
        ev = self.eventual(eps)
        return ev.sign, ev.N

    def symbolic_sign(self, eps) -> int:
        """Sign via the lexicographic epsilon polynomials (no horizon computed)."""
        for _, _, ep in self.expr.lex_coefficients():
            s = _interval_sign(ep, Fraction(eps))
            if s:
                return s
        return 0

    def leaves(self):
        return [self]

    def evaluate(self, eps, n: int, dps: int = 50):
        return self.expr.evaluate(eps, n, dps)


@dataclass(eq=False)
class Radical(SignNode):
    """E = A + B sqrt(Q) with Q eventually non-negative; ``C`` is A^2 - B^2 Q."""

    a: SignNode
    b: SignNode
    q: Leaf
    c: SignNode

    def sign_at(self, eps) -> tuple[int, int]:
        sq, nq = self.q.sign_at(eps)
        if sq < 0:
            raise ValueError("radicand eventually negative")
        sa, na = self.a.sign_at(eps)
        if sq == 0:
            return sa, max(na, nq)
        sb, nb = self.b.sign_at(eps)
        n = max(na, nb, nq)
        if sb == 0 or sa == sb:
            return sa, n
        if sa == 0:
            return sb, n
        sc, nc = self.c.sign_at(eps)
        return sa * sc, max(n, nc)

    def symbolic_sign(self, eps) -> int:
        sq = self.q.symbolic_sign(eps)
        sa = self.a.symbolic_sign(eps)
        if sq == 0:
            return sa
        sb = self.b.symbolic_sign(eps)
        if sb == 0 or sa == sb:
            return sa
        if sa == 0:
            return sb
        return sa * self.c.symbolic_sign(eps)

    def leaves(self):
        return self.a.leaves() + self.b.leaves() + [self.q] + self.c.leaves()

    def evaluate(self, eps, n: int, dps: int = 50):
        with mpmath.workdps(dps + 20):
            qv = self.q.evaluate(eps, n, dps)
            return self.a.evaluate(eps, n, dps) + self.b.evaluate(eps, n, dps) * mpmath.sqrt(max(qv, 0))


class RadExpr:
    """sum_S coeff_S * prod_{i in S} sqrt(radicand_i), coefficients and radicands ExpPolys."""

    __slots__ = ("radicands", "terms")

    def __init__(self, radicands: Sequence[ExpPoly], terms: dict[frozenset, ExpPoly] | None = None):
        self.radicands = tuple(radicands)
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    @staticmethod
    def plain(radicands: Sequence[ExpPoly], e: ExpPoly) -> "RadExpr":
        return RadExpr(radicands, {frozenset(): e})

    def __add__(self, other: "RadExpr") -> "RadExpr":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return RadExpr(self.radicands, out)

    def __neg__(self) -> "RadExpr":
        return RadExpr(self.radicands, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "RadExpr") -> "RadExpr":
        return self + (-other)

    def __mul__(self, other: "RadExpr") -> "RadExpr":
        out: dict = {}
        for s1, c1 in self.terms.items():
            for s2, c2 in other.terms.items():
                coef = c1 * c2
                for i in s1 & s2:
                    coef = coef * self.radicands[i]
                key = s1 ^ s2
                out[key] = out[key] + coef if key in out else coef
        return RadExpr(self.radicands, out)

    def scale(self, e: ExpPoly) -> "RadExpr":
        return RadExpr(self.radicands, {k: v * e for k, v in self.terms.items()})

    def present(self) -> set[int]:
        return set().union(*self.terms.keys()) if self.terms else set()

    def is_plain(self) -> bool:
        return not self.present()

    def plain_part(self) -> ExpPoly:
        return self.terms.get(frozenset(), ExpPoly.zero())


def sign_tree(e: RadExpr) -> SignNode:
    present = e.present()
    if not present:
        return Leaf(e.plain_part())
    k = max(present)
    a = RadExpr(e.radicands, {s: v for s, v in e.terms.items() if k not in s})
    b = RadExpr(e.radicands, {s - {k}: v for s, v in e.terms.items() if k in s})
    q = e.radicands[k]
    c = a * a - (b * b).scale(q)
    return Radical(sign_tree(a), sign_tree(b), Leaf(q), sign_tree(c))


# ---------------------------------------------------------------------------


@dataclass(eq=False)
class PsiAtom:
    node: SignNode
    rel: str
    label: str = ""

    def holds(self, eps) -> bool:
        return relation_holds(self.node.symbolic_sign(eps), self.rel)

    def eventual(self, eps) -> tuple[bool, int]:
        s, n = self.node.sign_at(eps)
        return relation_holds(s, self.rel), n


@dataclass(eq=False)
class PsiCondition:
    """Disjunction of conjunctions of atoms, each atom eventually constant in n."""

    clauses: tuple[tuple[PsiAtom, ...], ...]

    def holds(self, eps) -> bool:
        return any(all(a.holds(eps) for a in clause) for clause in self.clauses)

    def atoms(self) -> list[PsiAtom]:
        return [a for clause in self.clauses for a in clause]

    def critical_polys(self) -> list[tuple[AlgebraicReal, ...]]:
        out = []
        for a in self.atoms():
            out.extend(a.node.critical_polys())
        return out


def psi_of_eps(p: ExpPoly, rel: str) -> PsiCondition:
    """The condition on epsilon under which ``p(eps, n) rel 0`` holds for all large n."""
    return PsiCondition(((PsiAtom(Leaf(p), rel),),))


def branches(p: ExpPoly, rel: str) -> list[dict]:
    """Explicit branch listing: the first non-vanishing lexicographic coefficient decides."""
    out = []
    lex = p.lex_coefficients()
    for j, (b, k, ep) in enumerate(lex):
        out.append({"zero": [(str(float(bb)), kk) for bb, kk, _ in lex[:j]], "base": b, "n_degree": k, "eps_poly": ep, "rel": rel})
    out.append({"all_zero": True, "value": relation_holds(0, rel)})
    return out


def small_eps_bound(polys: Sequence[Sequence[AlgebraicReal]]) -> Fraction:
    """Rational r in (0, 1] such that no polynomial has a root in (0, r)."""
    r = Fraction(1)
    for ep in polys:
        nz = [(e, c) for e, c in enumerate(ep) if not c.is_zero()]
        if len(nz) <= 1:
            continue
        m, cm = nz[0]
        low = _abs_lower(cm)
        rest = sum((_abs_upper(c) for _, c in nz[1:]), Fraction(0))
        r = min(r, low / rest)
    return r


def sample_eps(psi: PsiCondition) -> Fraction:
    return small_eps_bound(psi.critical_polys()) / 2


def forall_eps(psi: PsiCondition) -> bool:
    """True iff psi(eps) holds for every eps > 0 (psi is monotone in eps)."""
    return psi.holds(sample_eps(psi))
