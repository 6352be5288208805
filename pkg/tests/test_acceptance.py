"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""
import random
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import mpmath
import pytest
from conftest import conjugate, random_invertible, random_system, random_vector

from pseudoreach import rational as rq
from pseudoreach.algebraics import AlgebraicComplex
from pseudoreach.asymptotics import sample_eps
from pseudoreach.decision import Problem, cross_validate, run
from pseudoreach.elimination import Halfspace, Hyperplane, TargetSpec, assemble_contact, pseudo_abstraction
from pseudoreach.hardness import LRS, build_instance, oracle_min_check
from pseudoreach.jordan import real_jordan_form
from pseudoreach.orbitsets import RadiusExpr, fold_affine, reach_oracle_states
from pseudoreach.robustbuilder import MatrixBuilder, apply, circle_point, robust_abstraction
from pseudoreach.torus import kronecker_witness

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "scripts"))
from make_problems import SUITE  # noqa: E402


@pytest.fixture
def report(capsys):
    def emit(criterion: str, ok: bool, detail: str = ""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {criterion}{': ' + detail if detail else ''}")
        assert ok, detail

    return emit


def test_closed_form_matches_oracle(report):
    rng = random.Random(1)
    start, mismatches, checked = time.time(), 0, 0
    for _ in range(200):
        d = rng.randint(1, 6)
        m, _ = random_system(rng, d)
        s, b = random_vector(rng, d), random_vector(rng, d)
        form = real_jordan_form(m)
        closed = fold_affine(form, s, b)
        radii = RadiusExpr.of(form)
        n_max = 100
        for k, eps in enumerate((F(1, 3), F(1), F(2))):
            for n, st in enumerate(reach_oracle_states(form, s, b, eps, n_max)):
                if k == 0:
                    mismatches += st.centers != closed.center(n) or st.center_orig != closed.center_orig(n)
                for j in range(len(form.blocks)):
                    mismatches += st.radii[j] != radii.radius_field(j, n) * eps
                checked += 1
    elapsed = time.time() - start
    report("1 closed form = oracle", mismatches == 0 and elapsed < 120, f"{checked} states, {mismatches} mismatches, {elapsed:.1f}s")


HARD = [
    LRS.exponential_sum([(2, 1), ((0, 2), F(1, 2)), ((0, -2), F(1, 2))]),
    LRS.exponential_sum([((0, 1), 1), ((0, -1), 1), (1, 1)]),
    LRS.exponential_sum([((3, 4), 1), ((3, -4), 1), (5, F(1, 3))]),
    LRS.exponential_sum([((1, 1), (0, 1)), ((1, -1), (0, -1))]),
    LRS.exponential_sum([((F(3, 5), F(4, 5)), (1, 2)), ((F(3, 5), F(-4, 5)), (1, -2)), (-1, 1)]),
    LRS.exponential_sum([((F(5, 13), F(12, 13)), 1), ((F(5, 13), F(-12, 13)), 1), ((F(3, 5), F(4, 5)), 2), ((F(3, 5), F(-4, 5)), 2)]),
]


def test_hardness_identity(report):
    bad, zeros = 0, 0
    for u in HARD:
        inst = build_instance(u)
        for n in range(51):
            lhs, v = oracle_min_check(inst, n)
            bad += lhs != v
            if u.value(n) == 0:
                zeros += 1
                bad += lhs.sign() > 0
    report("2 hardness identity", bad == 0 and zeros > 0, f"{len(HARD)} instances, {zeros} zeros, {bad} violations")


def test_decision_suite(report):
    wrong, notes = [], []
    for name, (problem, outcome, case) in SUITE.items():
        v = run(problem)
        if v.outcome != outcome or (case and v.case != case):
            wrong.append(f"{name}: {v.outcome}/{v.case}")
            continue
        if outcome == "NotReachable":
            rng = random.Random(name)
            ns = sorted(rng.sample(range(v.N + 1, v.N + 501), 20))
            rep = cross_validate(v, problem, horizon=1000, separation_samples=ns)
            if not rep.consistent:
                wrong.append(f"{name}: cross validation failed")
            notes.append(name)
    report("3 decision suite", not wrong, f"{len(SUITE)} problems, {len(notes)} misses validated" + ("; " + ", ".join(wrong) if wrong else ""))


def _descriptor(problem):
    form = real_jordan_form(problem.M)
    if problem.mode == "robust":
        return robust_abstraction(form, problem.s, problem.relation_bound)
    return pseudo_abstraction(form, problem.s, problem.b, problem.relation_bound)


def _numeric_sign(node, eps, n):
    """Sign at 200 digits; a value that moves when precision rises is cancellation noise, i.e. zero."""
    v = node.evaluate(eps, n, 200)
    if v == 0:
        return 0
    finer = node.evaluate(eps, n, 260)
    if abs(v - finer) > abs(finer) * mpmath.mpf(10) ** -100:
        return 0
    return 1 if v > 0 else -1


def test_dichotomy_horizons(report):
    violations, atoms, points = [], 0, 0
    for name, (problem, outcome, _) in SUITE.items():
        if outcome == "Unsupported":
            continue
        v = run(problem)
        formula = assemble_contact(problem.target, _descriptor(problem))
        if "case2" in v.certificate:
            eps = F(v.certificate["case2"]["epsilon_star"])
            recorded = {(a["residue"], a["clause"], a["atom"]): a["N"] for a in v.certificate["case2"]["atoms"]}
        else:
            eps, recorded = None, {}
        for r, branch in enumerate(formula.branches):
            e = eps if eps is not None else sample_eps(branch.psi())
            for ci, clause in enumerate(branch.clauses):
                for ai, atom in enumerate(clause):
                    sign, n_cert = atom.node.sign_at(e)
                    if (r, ci, ai) in recorded and recorded[(r, ci, ai)] != n_cert:
                        violations.append(f"{name}: recorded N differs")
                    atoms += 1
                    with mpmath.workdps(280):
                        for n in range(n_cert + 1, n_cert + 1001):
                            points += 1
                            if _numeric_sign(atom.node, e, n) != sign:
                                violations.append(f"{name} atom {ai} n={n}")
                                break
    report("4 dichotomy horizons", not violations, f"{atoms} atoms, {points} points, {len(violations)} violations" + ("; " + ", ".join(violations[:5]) if violations else ""))


def test_matrix_builder_identities(report):
    rng = random.Random(5)
    bad, start = 0, time.time()
    for _ in range(50):
        d = rng.randint(1, 6)
        m, _ = random_system(rng, d, jordan=True, gaussian=False)
        form = real_jordan_form(m)
        builder = MatrixBuilder(form)
        x = random_vector(rng, d)
        mn = [[F(int(i == j)) for j in range(d)] for i in range(d)]
        for n in range(31):
            if n:
                mn = rq.mat_mul(m, mn)
            f = builder.build_f(n, builder.gamma_power(n))
            bad += any(f[i][j] != mn[i][j] for i in range(d) for j in range(d))
            z = [circle_point(F(rng.randint(-9, 9), rng.randint(1, 9))) for _ in builder.complex_blocks]
            sol = builder.delta_solution(n, z, x)
            lhs = apply(builder.build_f(n, z), x)
            rhs = [a + b for a, b in zip(apply(mn, x), apply(mn, sol.delta))]
            bad += any(u != w for u, w in zip(lhs, rhs))
    report("5 matrix builder identities", bad == 0, f"50 matrices, {bad} violations, {time.time() - start:.1f}s")


def test_kronecker_witnesses(report):
    rng = random.Random(6)
    gamma = AlgebraicComplex(F(3, 5), F(4, 5))
    start, bad = time.time(), 0
    for _ in range(10):
        z = circle_point(F(rng.randint(-50, 50), rng.randint(1, 20)))
        n = kronecker_witness([gamma], [(1, 0)], [z], F(1, 1000))
        with mpmath.workdps(60):
            w = mpmath.mpc(mpmath.mpf(3) / 5, mpmath.mpf(4) / 5) ** n
            zc = mpmath.mpc(z.re.approx(60), z.im.approx(60))
            bad += not abs(w - zc) < mpmath.mpf(1) / 1000
    elapsed = time.time() - start
    report("6 kronecker witnesses", bad == 0 and elapsed < 30, f"10 targets, {bad} failures, {elapsed:.1f}s")


def _conjugated(problem, q):
    qinv_t = [list(r) for r in zip(*rq.inverse(q))]
    clauses = []
    for clause in problem.target.clauses:
        atoms = []
        for atom in clause:
            for h in atom.halfspaces():
                c = tuple(rq.mat_vec(qinv_t, h.c))
                atoms.append(Hyperplane(c, h.b) if isinstance(h, Hyperplane) else Halfspace(c, h.b, h.strict))
        clauses.append(tuple(atoms))
    return Problem(conjugate(problem.M, q), rq.mat_vec(q, problem.s), rq.mat_vec(q, problem.b), TargetSpec(tuple(clauses)), problem.mode, problem.relation_bound)


def test_invariance(report):
    rng = random.Random(7)
    flips = []
    suite = [(k, p) for k, (p, o, _) in SUITE.items()]
    for k in range(10):
        for name, p in suite:
            q = random_invertible(rng, p.dimension)
            if run(_conjugated(p, q)).outcome != run(p).outcome:
                flips.append(f"conjugation {k} {name}")
    for name, p in suite:
        base = run(p).outcome
        for factor in (F(2), F(1, 3), F(7, 5)):
            if run(Problem(p.M, p.s, p.b, p.target.scaled(factor), p.mode, p.relation_bound)).outcome != base:
                flips.append(f"scaling {name}")
    for _ in range(30):
        d = rng.randint(1, 4)
        m, _ = random_system(rng, d)
        form = real_jordan_form(m)
        s, b = random_vector(rng, d), random_vector(rng, d)
        low = list(reach_oracle_states(form, s, b, F(1, 4), 30))
        high = list(reach_oracle_states(form, s, b, F(3, 4), 30))
        for a, c in zip(low, high):
            if any(x.real() > y.real() for x, y in zip(a.radii, c.radii)):
                flips.append("radius monotonicity")
    report("7 invariance", not flips, f"{len(flips)} violations" + ("; " + ", ".join(flips[:5]) if flips else ""))
