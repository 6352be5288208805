"""Decision procedures for pseudo-reachability and robust reachability."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import rational as rq
from . import serialize as ser
from .algebraics import AlgebraicComplex, AlgebraicReal
from .asymptotics import sample_eps
from .elimination import (
    AbstractionDescriptor,
    ContactFormula,
    Hyperplane,
    TargetSpec,
    assemble_contact,
    pseudo_abstraction,
)
from .errors import DimensionMismatch, NotDiagonalisable, Unsupported
from .jordan import RealJordanForm, real_jordan_form
from .robustbuilder import robust_abstraction
from .torus import kronecker_witness

MODES = ("pseudo", "robust")


@dataclass(frozen=True)
class Problem:
    M: tuple
    s: tuple
    b: tuple
    target: TargetSpec
    mode: str = "pseudo"
    relation_bound: int = 20

    def __post_init__(self):
        m = tuple(tuple(Fraction(v) for v in row) for row in self.M)
        d = len(m)
        if d == 0 or any(len(row) != d for row in m):
            raise DimensionMismatch("matrix must be square and non-empty")
        object.__setattr__(self, "M", m)
        object.__setattr__(self, "s", rq.vec(self.s))
        object.__setattr__(self, "b", rq.vec(self.b) if self.b is not None else tuple(Fraction(0) for _ in range(d)))
        if len(self.s) != d or len(self.b) != d:
            raise DimensionMismatch("start and affine vectors must match the matrix")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode == "robust" and any(self.b):
            raise ValueError("robust mode requires b = 0")
        self.target.check_dimension(d)

    @property
    def dimension(self) -> int:
        return len(self.M)


@dataclass(frozen=True)
class Options:
    max_halvings: int = 60
    witness: bool = True
    witness_delta: Fraction = Fraction(1, 1000)
    witness_n_max: int = 1_000_000
    replay_points: int = 5


@dataclass
class Verdict:
    outcome: str  # "Reachable", "NotReachable" or "Unsupported"
    case: str | None = None  # "Case1" or "BoundedWitness"
    witness_n: int | None = None
    epsilon_star: Fraction | None = None
    N: int | None = None
    reason: str | None = None
    certificate: dict = field(default_factory=dict)

    @property
    def reachable(self) -> bool:
        return self.outcome == "Reachable"

    def to_json(self) -> dict:
        out = {"outcome": self.outcome, "certificate": self.certificate}
        if self.case:
            out["case"] = self.case
        if self.witness_n is not None:
            out["witness_n"] = self.witness_n
        if self.epsilon_star is not None:
            out["epsilon_star"] = ser.rat(self.epsilon_star)
        if self.N is not None:
            out["N"] = self.N
        if self.reason:
            out["reason"] = self.reason
        return out


# ---------------------------------------------------------------------------
# exact membership of orbit points in target closures


def fm_feasible(constraints: Sequence[tuple[Sequence[Fraction], Fraction, str]], nvars: int) -> bool:
    """Feasibility of {a.t (<=|<|=) b} over the rationals by Fourier-Motzkin elimination."""
    rows = [([Fraction(v) for v in a], Fraction(b), kind) for a, b, kind in constraints]
    # equalities first: substitute a pivot variable
    while True:
        eq = next((r for r in rows if r[2] == "="), None)
        if eq is None:
            break
        rows.remove(eq)
        a, b, _ = eq
        piv = next((i for i, v in enumerate(a) if v != 0), None)
        if piv is None:
            if b != 0:
                return False
            continue
        new = []
        for a2, b2, k2 in rows:
            f = a2[piv] / a[piv]
            new.append(([x - f * y for x, y in zip(a2, a)], b2 - f * b, k2))
        rows = new
    for var in range(nvars):
        pos = [r for r in rows if r[0][var] > 0]
        neg = [r for r in rows if r[0][var] < 0]
        rest = [r for r in rows if r[0][var] == 0]
        for ap, bp, kp in pos:
            for an, bn, kn in neg:
                fp, fn = ap[var], -an[var]
                a = [x / fp + y / fn for x, y in zip(ap, an)]
                a[var] = Fraction(0)
                rest.append((a, bp / fp + bn / fn, "<" if "<" in (kp, kn) else "<="))
        rows = rest
    return all((b > 0) if kind == "<" else (b >= 0) for _, b, kind in rows)


def _clause_rows(clause) -> list[tuple[tuple[Fraction, ...], Fraction, str]]:
    rows = []
    for atom in clause:
        for h in atom.halfspaces():
            if isinstance(h, Hyperplane):
                rows.append((tuple(Fraction(v) for v in h.c), Fraction(h.b), "="))
            else:
                rows.append((tuple(Fraction(v) for v in h.c), Fraction(h.b), "<" if h.strict else "<="))
    return rows


def in_closure(clause, point, directions: Sequence[Sequence[Fraction]] | None = None) -> bool:
    """Is ``point`` in the closure of clause intersected with point + span(directions)?

    ``directions`` = None means the whole space.
    """
    rows = _clause_rows(clause)
    if not all((rq.dot(a, point) == b) if k == "=" else (rq.dot(a, point) <= b) for a, b, k in rows):
        return False
    if directions is None:
        d = len(point)
        directions = [tuple(Fraction(int(i == j)) for i in range(d)) for j in range(d)]
    directions = list(directions)
    # y = point + sum t_i v_i must satisfy the clause; feasibility over t
    cons = []
    for a, b, k in rows:
        coeffs = [rq.dot(a, v) for v in directions]
        cons.append((coeffs, b - rq.dot(a, point), k))
    return fm_feasible(cons, len(directions))


def orbit_point(problem: Problem, n: int) -> rq.Vector:
    x = problem.s
    for _ in range(n):
        x = rq.add(rq.mat_vec(problem.M, x), problem.b)
    return x


def bounded_check(problem: Problem, N: int) -> tuple[int | None, list[dict]]:
    """Smallest n <= N whose orbit point is reachable for every epsilon, with a table of checks."""
    table = []
    x = problem.s
    mn = rq.identity(problem.dimension)
    # a singular robust matrix only moves perturbations inside its column space
    singular = problem.mode == "robust" and _det(problem.M) == 0
    for n in range(N + 1):
        if n:
            x = rq.add(rq.mat_vec(problem.M, x), problem.b)
            if singular:
                mn = rq.mat_mul(problem.M, mn)
        if problem.mode == "pseudo" and n == 0:
            hit = problem.target.contains(x)
        else:
            dirs = rq.column_space(mn) if singular else None
            hit = any(in_closure(clause, x, dirs) for clause in problem.target.clauses)
        table.append({"n": n, "point": [ser.rat(v) for v in x], "hit": hit})
        if hit:
            return n, table
    return None, table


def _det(m) -> Fraction:
    n = len(m)
    a = [list(r) for r in m]
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


# ---------------------------------------------------------------------------


def _jordan_summary(form: RealJordanForm) -> list[dict]:
    return [
        {"kind": b.kind, "size": b.size, "eigenvalue": ser.alg(b.eigenvalue), "modulus": ser.alg(b.modulus)}
        for b in form.blocks
    ]


def _torus_summary(desc: AbstractionDescriptor) -> dict:
    cl = desc.closure
    return {
        "period": cl.period,
        "groups": [{"kind": g.kind, "blocks": list(g.blocks), "order": g.order} for g in cl.groups],
        "relation_bound": cl.lattice.search_bound,
        "relations": [list(v) for v in cl.lattice.generators],
    }


def _contact_summary(formula: ContactFormula) -> list[dict]:
    return [
        {
            "residue": br.residue,
            "clauses": [[{"label": a.label, "rel": a.rel, "expr": ser.radexpr(a.expr)} for a in clause] for clause in br.clauses],
        }
        for br in formula.branches
    ]


def _replay_samples(formula: ContactFormula, eps_values: Sequence[Fraction], ns: Sequence[int]) -> list[dict]:
    out = []
    for eps in eps_values:
        for n in ns:
            br = formula.branch_for(n)
            for ci, clause in enumerate(br.clauses):
                for ai, atom in enumerate(clause):
                    out.append({"eps": ser.rat(eps), "n": n, "residue": br.residue, "clause": ci, "atom": ai, "holds": atom.holds_at(eps, n)})
    return out


def _kronecker(desc: AbstractionDescriptor, target: TargetSpec, residue: int, clause_index: int, n_min: int, options: Options):
    """Time at which the rotations come close to the minimisers of the first atom of the clause."""
    from .elimination import interval_constraints

    circles = desc.closure.circles
    if not circles or desc.mode != "pseudo":
        return None
    clauses = [c for c in target.clauses if not any(k.empty() for k in interval_constraints(c))]
    cons = interval_constraints(clauses[clause_index])
    if not cons:
        return None
    a = cons[0].a if cons[0].hi is not None else tuple(-v for v in cons[0].a)
    omegas = desc.form.functional(a)
    gammas, xs, zs = [], [], []
    for g in circles:
        kap = None
        for j in g.blocks:
            k = omegas[j][0] * desc.x[j][0]
            kap = k if kap is None else kap + k
        if len(g.blocks) != 1 or kap.is_zero():
            continue
        re, im = kap.re(), kap.im()
        mod = kap.abs()
        gammas.append(g.gamma)
        xs.append((1, 0))
        zs.append(AlgebraicComplex(-re / mod, im / mod))
    if not gammas:
        return None
    start = n_min + ((residue - n_min) % desc.period)
    try:
        n = kronecker_witness(gammas, xs, zs, options.witness_delta, start, desc.period, options.witness_n_max)
    except ValueError:
        return None
    return {"n": n, "delta": ser.rat(options.witness_delta), "rotations": len(gammas)}


def dichotomy(problem: Problem, desc: AbstractionDescriptor, options: Options) -> Verdict:
    formula = assemble_contact(problem.target, desc)
    cert: dict = {
        "schema": ser.SCHEMA,
        "mode": problem.mode,
        "problem": ser.problem_to_json(problem),
        "jordan": _jordan_summary(desc.form),
        "torus": _torus_summary(desc),
        "contact": _contact_summary(formula),
    }
    psis = [br.psi() for br in formula.branches]
    samples = [sample_eps(p) for p in psis]
    foralls = [p.holds(e) for p, e in zip(psis, samples)]
    cert["psi"] = [{"residue": r, "sample_eps": ser.rat(e), "holds_for_all_eps": f} for r, (e, f) in enumerate(zip(samples, foralls))]

    if any(foralls):
        r = foralls.index(True)
        eps = samples[r]
        clause_idx = next(i for i, clause in enumerate(psis[r].clauses) if all(a.holds(eps) for a in clause))
        horizon = 0
        for atom in psis[r].clauses[clause_idx]:
            horizon = max(horizon, atom.eventual(eps)[1])
        cert["case1"] = {"residue": r, "clause": clause_idx, "eps": ser.rat(eps), "horizon": horizon}
        if options.witness:
            cert["case1"]["kronecker"] = _kronecker(desc, problem.target, r, clause_idx, max(horizon + 1, formula.min_start), options)
        cert["samples"] = _replay_samples(formula, [eps, Fraction(1)], [horizon + 1 + k * desc.period + r for k in range(options.replay_points)])
        return Verdict("Reachable", case="Case1", certificate=cert)

    # Case 2: a concrete epsilon where every branch fails eventually
    eps, halvings = Fraction(1), 0
    while any(p.holds(eps) for p in psis):
        halvings += 1
        eps /= 2
        if halvings >= options.max_halvings:
            eps = min(samples) if samples else eps
            break
    horizons = []
    for r, psi in enumerate(psis):
        for ci, clause in enumerate(psi.clauses):
            for ai, atom in enumerate(clause):
                truth, n_atom = atom.eventual(eps)
                horizons.append({"residue": r, "clause": ci, "atom": ai, "eventually": truth, "N": n_atom})
    n_cert = max([h["N"] for h in horizons] + [formula.min_start - 1, 0])
    cert["case2"] = {"epsilon_star": ser.rat(eps), "halvings": halvings, "N": n_cert, "atoms": horizons}
    witness, table = bounded_check(problem, n_cert)
    cert["bounded_check"] = table
    cert["samples"] = _replay_samples(formula, [eps, eps / 2], [n_cert + 1 + k for k in range(options.replay_points)])
    if witness is not None:
        return Verdict("Reachable", case="BoundedWitness", witness_n=witness, epsilon_star=eps, N=n_cert, certificate=cert)
    return Verdict("NotReachable", epsilon_star=eps, N=n_cert, certificate=cert)


def decide(problem: Problem, options: Options | None = None) -> Verdict:
    options = options or Options()
    if problem.mode == "robust":
        return decide_robust(problem, options)
    form = real_jordan_form(problem.M)
    if not form.is_diagonalisable:
        raise NotDiagonalisable("pseudo-reachability requires a diagonalisable matrix")
    desc = pseudo_abstraction(form, problem.s, problem.b, problem.relation_bound)
    return dichotomy(problem, desc, options)


def decide_robust(problem: Problem, options: Options | None = None) -> Verdict:
    options = options or Options()
    if problem.mode != "robust":
        problem = Problem(problem.M, problem.s, problem.b, problem.target, "robust", problem.relation_bound)
    form = real_jordan_form(problem.M)
    desc = robust_abstraction(form, problem.s, problem.relation_bound)
    return dichotomy(problem, desc, options)


def run(problem: Problem, options: Options | None = None) -> Verdict:
    """decide, with unsupported inputs reported as an Unsupported verdict."""
    try:
        return decide(problem, options)
    except Unsupported as exc:
        return Verdict("Unsupported", reason=f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------------------
# cross validation


@dataclass
class ValidationReport:
    consistent: bool
    checks: list[dict] = field(default_factory=list)


def oracle_functional_min(problem: Problem, form: RealJordanForm, a, eps, n: int) -> AlgebraicReal:
    """Exact min of a.x over the epsilon reach set at step n (per-block Euclidean control balls).

    Pseudo mode: product of balls of radius eps * r_j(n) around the orbit point.
    Robust mode: M^n applied to the ball product around the start.
    """
    from .orbitsets import exact_reach_oracle, robust_ball_profile

    eps = Fraction(eps)
    omegas = form.functional(a)
    if problem.mode == "pseudo":
        st = exact_reach_oracle(form, problem.s, problem.b, eps, n)
        total = AlgebraicReal.from_rational(rq.dot(a, st.center_orig))
        for om, rad in zip(omegas, st.radii):
            w = om[0]
            mag = abs(w.real()) if w.field.is_real else w.abs()
            total = total - mag * rad.real()
        return total
    total = AlgebraicReal.from_rational(rq.dot(a, orbit_point(problem, n)))
    for blk, (rho2, sq) in zip(form.blocks, robust_ball_profile(form, a)):
        if blk.modulus == 0:
            if n < blk.size:
                raise ValueError("oracle needs n >= size for nilpotent blocks")
            continue
        val = sum((c * n ** k for k, c in enumerate(sq)), AlgebraicReal.from_rational(0))
        if not val.is_zero():
            total = total - (blk.modulus ** n) * val.sqrt() * eps
    return total


def separated(problem: Problem, form: RealJordanForm, eps, n: int) -> bool:
    """Exact check that the epsilon reach set at step n misses every clause of the target."""
    from .elimination import interval_constraints

    for clause in problem.target.clauses:
        missed = False
        for con in interval_constraints(clause):
            if con.empty():
                missed = True
                break
            if con.hi is not None:
                m = oracle_functional_min(problem, form, con.a, eps, n)
                if (m >= con.hi) if con.hi_strict else (m > con.hi):
                    missed = True
                    break
            if con.lo is not None:
                mx = -oracle_functional_min(problem, form, tuple(-v for v in con.a), eps, n)
                if (mx <= con.lo) if con.lo_strict else (mx < con.lo):
                    missed = True
                    break
        if not missed:
            return False
    return True


def cross_validate(
    verdict: Verdict,
    problem: Problem,
    eps_grid: Sequence = (Fraction(1), Fraction(1, 4), Fraction(1, 16)),
    horizon: int = 500,
    separation_samples: Sequence[int] | None = None,
) -> ValidationReport:
    from .simulate import greedy_orbit, robust_search

    form = real_jordan_form(problem.M)
    checks = []

    def simulate(eps):
        if problem.mode == "pseudo":
            return greedy_orbit(problem.M, problem.b, problem.s, problem.target, float(eps), horizon, "jordan", form)
        return robust_search(problem.M, problem.s, problem.target, float(eps), horizon, "jordan", form)

    if verdict.outcome == "Reachable":
        ok = True
        for eps in eps_grid:
            res = simulate(eps)
            checks.append({"check": "simulator hit", "eps": ser.rat(eps), "hit": res.hit, "n": res.n})
            ok &= res.hit
        return ValidationReport(ok, checks)
    if verdict.outcome == "NotReachable":
        eps = verdict.epsilon_star / 2
        res = simulate(eps)
        checks.append({"check": "simulator miss", "eps": ser.rat(eps), "hit": res.hit, "n": res.n})
        ok = not res.hit
        ns = separation_samples if separation_samples is not None else [verdict.N + 1 + k * k for k in range(20)]
        for n in ns:
            sep = separated(problem, form, eps, n)
            checks.append({"check": "separation", "n": n, "separated": sep})
            ok &= sep
        return ValidationReport(ok, checks)
    return ValidationReport(True, [{"check": "skipped", "reason": verdict.reason}])
