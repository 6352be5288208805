"""Targets, the abstraction of the reach set, and quantifier elimination over it.

Targets are unions of clauses.  A clause is a conjunction of linear atoms.
Atoms that share a linear functional (up to positive scaling) are merged into
one interval constraint ``lo (<|<=) a.x (<|<=) hi``.  Distinct functionals in a
clause must act on disjoint groups of Jordan blocks, so the image of the
abstraction under the clause's functionals is a product of intervals and the
clause reduces to comparisons of each functional's minimum and maximum.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import rational as rq
from .algebraics import AlgebraicReal, as_algebraic
from .asymptotics import (
    ExpPoly,
    Poly2,
    PsiAtom,
    PsiCondition,
    RadExpr,
    SignNode,
    relation_holds,
    sign_tree,
)
from .errors import DimensionMismatch, UnsupportedTargetShape
from .jordan import RealJordanForm
from .orbitsets import AffineClosedForm, RadiusExpr, binomial_poly, fold_affine, robust_ball_profile
from .torus import TorusClosure, closure_T

ZERO = AlgebraicReal.from_rational(0)
ONE = AlgebraicReal.from_rational(1)


# ---------------------------------------------------------------------------
# target atoms


@dataclass(frozen=True)
class Halfspace:
    """c . x <= b, or c . x < b when strict."""

    c: tuple
    b: object
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(self.c))
        if all(as_algebraic(v).is_zero() for v in self.c):
            raise ValueError("halfspace normal must be non-zero")

    def halfspaces(self) -> tuple["Halfspace", ...]:
        return (self,)

    def holds(self, x, relaxed: bool = False) -> bool:
        v = rq.dot(self.c, x)
        return v <= self.b if (relaxed or not self.strict) else v < self.b


@dataclass(frozen=True)
class Hyperplane:
    """c . x = b."""

    c: tuple
    b: object

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(self.c))
        if all(as_algebraic(v).is_zero() for v in self.c):
            raise ValueError("hyperplane normal must be non-zero")

    def halfspaces(self) -> tuple["Hyperplane", ...]:
        return (self,)

    def holds(self, x, relaxed: bool = False) -> bool:
        return rq.dot(self.c, x) == self.b


@dataclass(frozen=True)
class IntervalBound:
    """lo (<|<=) x[coord] (<|<=) hi; a missing side is unbounded."""

    coord: int
    dim: int
    lo: Fraction | None = None
    hi: Fraction | None = None
    lo_strict: bool = False
    hi_strict: bool = False

    def halfspaces(self) -> tuple[Halfspace, ...]:
        e = tuple(Fraction(int(i == self.coord)) for i in range(self.dim))
        out = []
        if self.hi is not None:
            out.append(Halfspace(e, Fraction(self.hi), self.hi_strict))
        if self.lo is not None:
            out.append(Halfspace(tuple(-v for v in e), -Fraction(self.lo), self.lo_strict))
        return tuple(out)

    @property
    def c(self) -> tuple:
        return tuple(Fraction(int(i == self.coord)) for i in range(self.dim))

    def holds(self, x, relaxed: bool = False) -> bool:
        return all(h.holds(x, relaxed) for h in self.halfspaces())


Atom = Halfspace | Hyperplane | IntervalBound


@dataclass(frozen=True)
class TargetSpec:
    """Union of clauses, each clause a conjunction of atoms."""

    clauses: tuple[tuple[Atom, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))

    @staticmethod
    def single(atom: Atom) -> "TargetSpec":
        return TargetSpec(((atom,),))

    @property
    def dimension(self) -> int:
        for clause in self.clauses:
            for atom in clause:
                return len(atom.c)
        return 0

    def check_dimension(self, d: int) -> None:
        for clause in self.clauses:
            for atom in clause:
                if len(atom.c) != d:
                    raise DimensionMismatch("target atom dimension differs from the system")

    def contains(self, x) -> bool:
        return any(all(a.holds(x) for a in clause) for clause in self.clauses)

    def scaled(self, factor) -> "TargetSpec":
        """Same set with every halfspace and hyperplane written with scaled coefficients."""
        factor = Fraction(factor)
        out = []
        for clause in self.clauses:
            atoms = []
            for atom in clause:
                for h in atom.halfspaces():
                    c = tuple(Fraction(v) * factor for v in h.c)
                    if isinstance(h, Halfspace):
                        atoms.append(Halfspace(c, Fraction(h.b) * factor, h.strict))
                    else:
                        atoms.append(Hyperplane(c, Fraction(h.b) * factor))
            out.append(tuple(atoms))
        return TargetSpec(tuple(out))


@dataclass(frozen=True)
class IntervalConstraint:
    """lo (<|<=) a.x (<|<=) hi for a normalised functional a."""

    a: tuple
    lo: Fraction | None
    hi: Fraction | None
    lo_strict: bool = False
    hi_strict: bool = False

    def empty(self) -> bool:
        if self.lo is None or self.hi is None:
            return False
        return self.lo > self.hi or (self.lo == self.hi and (self.lo_strict or self.hi_strict))


def _normalise(c) -> tuple[tuple[Fraction, ...], Fraction]:
    c = tuple(Fraction(v) for v in c)
    lead = next(v for v in c if v != 0)
    t = abs(lead)
    t = t if lead > 0 else -t
    return tuple(v / t for v in c), t


def interval_constraints(clause: Sequence[Atom]) -> list[IntervalConstraint]:
    """Merge the clause's atoms into one interval constraint per functional."""
    acc: dict[tuple, list] = {}
    order: list[tuple] = []
    for atom in clause:
        for h in atom.halfspaces():
            a, t = _normalise(h.c)
            b = Fraction(h.b) / abs(t)
            if a not in acc:
                acc[a] = [None, False, None, False]
                order.append(a)
            slot = acc[a]
            sides = []
            if isinstance(h, Hyperplane):
                sides = [("hi", b / (1 if t > 0 else -1), False), ("lo", b / (1 if t > 0 else -1), False)]
            elif t > 0:
                sides = [("hi", b, h.strict)]
            else:
                sides = [("lo", -b, h.strict)]
            for side, val, strict in sides:
                if side == "hi":
                    if slot[2] is None or val < slot[2] or (val == slot[2] and strict):
                        slot[2], slot[3] = val, strict
                else:
                    if slot[0] is None or val > slot[0] or (val == slot[0] and strict):
                        slot[0], slot[1] = val, strict
    return [IntervalConstraint(a, acc[a][0], acc[a][2], acc[a][1], acc[a][3]) for a in order]


# ---------------------------------------------------------------------------
# abstraction


@dataclass(frozen=True, eq=False)
class AbstractionDescriptor:
    """Over-approximation of the epsilon-reach set at step n.

    ``mode`` is "pseudo" (orbit with per-step perturbations, affine term
    folded into ``affine``) or "robust" (perturbed start, ``b = 0``).
    """

    mode: str
    form: RealJordanForm
    closure: TorusClosure
    x: tuple
    s: rq.Vector
    affine: AffineClosedForm | None = None
    radii: RadiusExpr | None = None
    ball_profiles: dict = field(default_factory=dict)

    @property
    def period(self) -> int:
        return self.closure.period

    def unit_of(self, j: int) -> int:
        """Index of the independent unit containing block j (circle groups couple their blocks)."""
        for gi, g in enumerate(self.closure.groups):
            if g.kind == "circle" and j in g.blocks:
                return -1 - gi
        return j

    def min_start(self) -> int:
        """Least n from which the closed forms describing the abstraction are valid."""
        m = 0
        for blk in self.form.blocks:
            if blk.modulus == 0:
                m = max(m, blk.size if self.mode == "robust" else 1)
        return m


def pseudo_abstraction(form: RealJordanForm, s, b, relation_bound: int = 20) -> AbstractionDescriptor:
    affine = fold_affine(form, s, b)
    closure = closure_T(form, relation_bound)
    return AbstractionDescriptor("pseudo", form, closure, affine.x, rq.vec(s), affine, RadiusExpr.of(form))


# ---------------------------------------------------------------------------
# minima of linear functionals


class _MinBuilder:
    def __init__(self):
        self.plain: list = []
        self.radicals: list[tuple[ExpPoly, ExpPoly]] = []

    def add(self, coeffs, base, eps_degree: int = 0) -> None:
        coeffs = [as_algebraic(c) for c in coeffs]
        if any(not c.is_zero() for c in coeffs):
            self.plain.append((Poly2.in_n(coeffs, eps_degree), as_algebraic(base)))

    def add_radical(self, coef: ExpPoly, radicand: ExpPoly) -> None:
        if not coef.is_zero() and not radicand.is_zero():
            self.radicals.append((coef, radicand))

    def build(self) -> RadExpr:
        radicands = [r for _, r in self.radicals]
        terms = {frozenset(): ExpPoly.normalize(self.plain)}
        for i, (coef, _) in enumerate(self.radicals):
            terms[frozenset({i})] = coef
        return RadExpr(radicands, terms)


def _poly_mul(a: list, b: list) -> list:
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _poly_add(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO) for i in range(n)]


def _trim(p: list) -> list:
    p = list(p)
    while len(p) > 1 and p[-1].is_zero():
        p.pop()
    return p


def _circle_min(builder: _MinBuilder, parts: list, eps_degree: int = 0) -> None:
    """Add -|sum_j rho_j^n g_j(n)| for complex polynomials g_j = re_j + i im_j."""
    by_mod: list[list] = []
    for rho, re, im in parts:
        for entry in by_mod:
            if entry[0] == rho:
                entry[1] = _poly_add(entry[1], re)
                entry[2] = _poly_add(entry[2], im)
                break
        else:
            by_mod.append([rho, list(re), list(im)])
    by_mod = [(rho, _trim(re), _trim(im)) for rho, re, im in by_mod]
    by_mod = [e for e in by_mod if any(not c.is_zero() for c in e[1] + e[2])]
    if not by_mod:
        return
    if len(by_mod) == 1:
        rho, re, im = by_mod[0]
        sq = _trim(_poly_add(_poly_mul(re, re), _poly_mul(im, im)))
        if len(sq) == 1:
            builder.add([-sq[0].sqrt()], rho, eps_degree)
            return
        coef = ExpPoly.normalize([(Poly2.monomial(-1, eps_degree), rho)])
        builder.add_radical(coef, ExpPoly.normalize([(Poly2.in_n(sq), ONE)]))
        return
    raw = []
    for rp, rep, imp in by_mod:
        for rq_, req, imq in by_mod:
            raw.append((Poly2.in_n(_poly_add(_poly_mul(rep, req), _poly_mul(imp, imq))), rp * rq_))
    builder.add_radical(ExpPoly.normalize([(Poly2.monomial(-1, eps_degree), ONE)]), ExpPoly.normalize(raw))


def _field_re_im(values) -> tuple[list, list]:
    re, im = [], []
    for v in values:
        if v.field.is_real:
            re.append(v.real())
            im.append(ZERO)
        else:
            re.append(v.re())
            im.append(v.im())
    return re, im


def _block_poly(desc: AbstractionDescriptor, j: int, omega) -> list:
    """Coefficients (in n) of G_j with a.(J_j^n x_j) = lam^n G_j(n), over the block field."""
    blk = desc.form.blocks[j]
    xj = desc.x[j]
    zero = blk.field.zero()
    if desc.mode == "pseudo":
        return [sum((w * v for w, v in zip(omega, xj)), zero)]
    inv = blk.lam.inverse()
    out = [zero] * blk.size
    for k in range(blk.size):
        if xj[k].is_zero():
            continue
        for ell in range(k + 1):
            if omega[ell].is_zero():
                continue
            coef = omega[ell] * (inv ** (k - ell)) * xj[k]
            for i, c in enumerate(binomial_poly(k - ell)):
                out[i] = out[i] + coef * c
    return out


def min_functional(desc: AbstractionDescriptor, a, residue: int = 0) -> RadExpr:
    """min of a.v over the abstraction at step n, for n = residue mod period and n >= min_start."""
    form = desc.form
    omegas = form.functional(a)
    builder = _MinBuilder()
    if desc.mode == "pseudo":
        aff = desc.affine
        builder.add([rq.dot(a, aff.d_orig), rq.dot(a, aff.c_orig)], ONE)
    for group in desc.closure.groups:
        if group.kind == "circle":
            parts = []
            for j in group.blocks:
                re, im = _field_re_im(_block_poly(desc, j, omegas[j]))
                parts.append((form.blocks[j].modulus, re, im))
            _circle_min(builder, parts)
            continue
        for j in group.blocks:
            blk = form.blocks[j]
            g = _block_poly(desc, j, omegas[j])
            if blk.is_real:
                sign = -1 if (blk.eigenvalue.sign() < 0 and residue % 2) else 1
                builder.add([c.real() * sign for c in g], blk.modulus)
            else:
                rot = blk.lam ** residue
                scale = (blk.modulus ** residue).inverse() if residue else ONE
                builder.add([(rot * c).re() * scale for c in g], blk.modulus)
    _control_min(builder, desc, omegas, a)
    return builder.build()


def _control_min(builder: _MinBuilder, desc: AbstractionDescriptor, omegas, a) -> None:
    form = desc.form
    if desc.mode == "pseudo":
        for j, blk in enumerate(form.blocks):
            om = omegas[j][0]
            mag = abs(om.real()) if om.field.is_real else om.abs()
            if mag.is_zero():
                continue
            rho = blk.modulus
            if rho == 0:
                builder.add([-mag], ONE, eps_degree=1)
            elif rho == 1:
                builder.add([ZERO, -mag], ONE, eps_degree=1)
            else:
                k = mag / (rho - 1)
                builder.add([-k], rho, eps_degree=1)
                builder.add([k], ONE, eps_degree=1)
        return
    key = tuple(Fraction(v) for v in a)
    if key not in desc.ball_profiles:
        desc.ball_profiles[key] = robust_ball_profile(form, a)
    for blk, (_, sq) in zip(form.blocks, desc.ball_profiles[key]):
        if blk.modulus == 0:
            continue
        sq = _trim(list(sq))
        if all(c.is_zero() for c in sq):
            continue
        if len(sq) == 1:
            builder.add([-sq[0].sqrt()], blk.modulus, eps_degree=1)
        else:
            coef = ExpPoly.normalize([(Poly2.monomial(-1, 1), blk.modulus)])
            builder.add_radical(coef, ExpPoly.normalize([(Poly2.in_n(sq), ONE)]))


# ---------------------------------------------------------------------------
# contact formula


@dataclass(eq=False)
class ContactAtom:
    """expr (rel) 0, with expr a radical expression in (eps, n)."""

    expr: RadExpr
    rel: str
    label: str
    node: SignNode = field(init=False)

    def __post_init__(self):
        self.node = sign_tree(self.expr)

    def psi(self) -> PsiAtom:
        return PsiAtom(self.node, self.rel, self.label)

    def value(self, eps, n: int, dps: int = 50):
        return self.node.evaluate(Fraction(eps), n, dps)

    def holds_at(self, eps, n: int, dps: int = 60) -> bool:
        v = self.value(eps, n, dps)
        tiny = 10 ** (-(dps // 2))
        if abs(v) < tiny:
            return relation_holds(0, self.rel)
        return relation_holds(1 if v > 0 else -1, self.rel)


@dataclass(eq=False)
class ContactBranch:
    """The contact formula restricted to n = residue mod period."""

    residue: int
    clauses: tuple[tuple[ContactAtom, ...], ...]

    def psi(self) -> PsiCondition:
        return PsiCondition(tuple(tuple(a.psi() for a in clause) for clause in self.clauses))

    def holds_at(self, eps, n: int) -> bool:
        return any(all(a.holds_at(eps, n) for a in clause) for clause in self.clauses)


@dataclass(eq=False)
class ContactFormula:
    period: int
    branches: tuple[ContactBranch, ...]
    min_start: int = 0

    def branch_for(self, n: int) -> ContactBranch:
        return self.branches[n % self.period]

    def holds_at(self, eps, n: int) -> bool:
        return self.branch_for(n).holds_at(eps, n)


def _show(a) -> str:
    return "(" + ", ".join(str(v) for v in a) + ")"


def eliminate_halfspace(constraint: IntervalConstraint, desc: AbstractionDescriptor, residue: int = 0) -> list[ContactAtom]:
    """Atoms expressing that the abstraction meets the constraint's set, one per bounded side."""
    atoms = []
    a = constraint.a
    if constraint.hi is not None:
        m = min_functional(desc, a, residue)
        hi = RadExpr.plain(m.radicands, ExpPoly.const(constraint.hi))
        atoms.append(ContactAtom(hi - m, ">" if constraint.hi_strict else ">=", f"min {_show(a)}.x {'<' if constraint.hi_strict else '<='} {constraint.hi}"))
    if constraint.lo is not None:
        m = min_functional(desc, tuple(-v for v in a), residue)
        lo = RadExpr.plain(m.radicands, ExpPoly.const(-constraint.lo))
        atoms.append(ContactAtom(lo - m, ">" if constraint.lo_strict else ">=", f"max {_show(a)}.x {'>' if constraint.lo_strict else '>='} {constraint.lo}"))
    return atoms


def eliminate_hyperplane(atom: Hyperplane, desc: AbstractionDescriptor, residue: int = 0) -> list[ContactAtom]:
    a, t = _normalise(atom.c)
    b = Fraction(atom.b) / t
    return eliminate_halfspace(IntervalConstraint(a, b, b), desc, residue)


def _check_disjoint(constraints: list[IntervalConstraint], desc: AbstractionDescriptor) -> None:
    used: set[int] = set()
    for con in constraints:
        omegas = desc.form.functional(con.a)
        units = {desc.unit_of(j) for j, om in enumerate(omegas) if any(not w.is_zero() for w in om)}
        if used & units:
            raise UnsupportedTargetShape("conjunction of atoms acting on a shared block")
        used |= units


def assemble_contact(target: TargetSpec, desc: AbstractionDescriptor) -> ContactFormula:
    target.check_dimension(desc.form.dimension)
    groups = []
    for clause in target.clauses:
        cons = interval_constraints(clause)
        if any(c.empty() for c in cons):
            continue
        _check_disjoint(cons, desc)
        groups.append(cons)
    branches = []
    for r in range(desc.period):
        clauses = []
        for ci, cons in enumerate(groups):
            atoms = []
            for con in cons:
                for atom in eliminate_halfspace(con, desc, r):
                    atom.label = f"clause {ci}: {atom.label}"
                    atoms.append(atom)
            clauses.append(tuple(atoms))
        branches.append(ContactBranch(r, tuple(clauses)))
    return ContactFormula(desc.period, tuple(branches), desc.min_start())
