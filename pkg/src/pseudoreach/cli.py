"""Command line interface: ``pseudoreach <command> [options]``.

Exit codes: 0 reachable, 1 not reachable, 2 unsupported input, 3 error.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import serialize as ser
from .errors import PseudoReachError, Unsupported

EXIT = {"Reachable": 0, "NotReachable": 1, "Unsupported": 2}
EXIT_ERROR = 3


def _env(flag: str, default=None):
    return os.environ.get("PSEUDOREACH_" + flag.upper().replace("-", "_"), default)


def _problem_files(paths: list[str]) -> list[Path]:
    out = []
    for p in paths:
        path = Path(p)
        out.extend(sorted(path.glob("*.json")) if path.is_dir() else [path])
    return out


def _load(path: Path, relation_bound: int | None, mode: str | None):
    from .decision import Problem

    p = ser.load_problem(path)
    if relation_bound is not None or mode is not None:
        p = Problem(p.M, p.s, p.b, p.target, mode or p.mode, relation_bound if relation_bound is not None else p.relation_bound)
    return p


def _decide_one(args: tuple) -> tuple[str, dict, int]:
    path, relation_bound, mode = args
    from .decision import decide_robust, run

    try:
        problem = _load(Path(path), relation_bound, mode)
        if problem.mode == "robust":
            try:
                verdict = decide_robust(problem)
            except Unsupported as exc:
                from .decision import Verdict

                verdict = Verdict("Unsupported", reason=f"{type(exc).__name__}: {exc}")
        else:
            verdict = run(problem)
    except Unsupported as exc:
        return str(path), {"outcome": "Unsupported", "reason": f"{type(exc).__name__}: {exc}"}, EXIT["Unsupported"]
    except (PseudoReachError, ValueError, OSError) as exc:
        return str(path), {"outcome": "Error", "reason": f"{type(exc).__name__}: {exc}"}, EXIT_ERROR
    return str(path), verdict.to_json(), EXIT[verdict.outcome]


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + ("" if text.endswith("\n") else "\n"))
    else:
        sys.stdout.write(text + ("" if text.endswith("\n") else "\n"))


def cmd_decide(args, mode: str | None) -> int:
    files = _problem_files(args.problem)
    jobs = int(args.jobs or 1)
    work = [(str(f), args.relation_bound, mode) for f in files]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_decide_one, work))
    else:
        results = [_decide_one(w) for w in work]
    if len(results) == 1:
        _, payload, code = results[0]
        _write(ser.dumps(payload), args.out)
        if payload.get("reason"):
            print(payload["reason"], file=sys.stderr)
        return code
    payload = [{"file": f, **p} for f, p, _ in results]
    _write(ser.dumps(payload), args.out)
    return max(code for _, _, code in results)


def cmd_simulate(args) -> int:
    from .jordan import real_jordan_form
    from .simulate import emit_csv, greedy_orbit, robust_search

    problem = _load(Path(args.problem), None, None)
    if args.eps is not None:
        eps = float(Fraction(args.eps))
    else:
        fixed = ser.load_json(args.problem).get("fixed_eps")
        eps = float(ser.parse_alg(fixed)) if fixed is not None else None
    if eps is None or eps <= 0:
        print("simulate needs --eps > 0", file=sys.stderr)
        return EXIT_ERROR
    if args.horizon is not None:
        horizon = int(args.horizon)
    else:
        horizon = int(ser.problem_options(ser.load_json(args.problem)).get("horizon", 1000))
    form = real_jordan_form(problem.M) if args.control == "jordan" else None
    if problem.mode == "robust":
        res = robust_search(problem.M, problem.s, problem.target, eps, horizon, args.control, form, record=True)
    else:
        res = greedy_orbit(problem.M, problem.b, problem.s, problem.target, eps, horizon, args.control, form, record=True)
    _write(emit_csv(res.rows), args.out)
    print(f"hit at n={res.n}" if res.hit else f"no hit up to n={horizon}", file=sys.stderr)
    return 0 if res.hit else 1


def _jnf_json(form) -> list:
    return [
        {"kind": b.kind, "size": b.size, "eigenvalue": ser.alg(b.eigenvalue), "modulus": ser.alg(b.modulus)}
        for b in form.blocks
    ]


def cmd_jnf(args) -> int:
    from .jordan import real_jordan_form

    problem = _load(Path(args.problem), None, None)
    form = real_jordan_form(problem.M)
    payload = {
        "blocks": _jnf_json(form),
        "diagonalisable": form.is_diagonalisable,
        "basis": [[ser.alg(v) for v in row] for row in form.basis_P],
        "basis_inverse": [[ser.alg(v) for v in row] for row in form.basis_P_inv],
    }
    _write(ser.dumps(payload), args.out)
    return 0


def cmd_torus(args) -> int:
    from .jordan import real_jordan_form
    from .torus import closure_T

    problem = _load(Path(args.problem), args.relation_bound, None)
    form = real_jordan_form(problem.M)
    try:
        cl = closure_T(form, problem.relation_bound)
    except Unsupported as exc:
        _write(ser.dumps({"outcome": "Unsupported", "reason": str(exc)}), args.out)
        return EXIT["Unsupported"]
    payload = {
        "period": cl.period,
        "groups": [{"kind": g.kind, "blocks": list(g.blocks), "order": g.order} for g in cl.groups],
        "relations": [list(v) for v in cl.lattice.generators],
        "relation_bound": cl.lattice.search_bound,
    }
    _write(ser.dumps(payload), args.out)
    return 0


def cmd_inspect(args) -> int:
    from .elimination import assemble_contact, pseudo_abstraction
    from .jordan import real_jordan_form
    from .orbitsets import fold_affine
    from .robustbuilder import robust_abstraction

    problem = _load(Path(args.problem), args.relation_bound, None)
    form = real_jordan_form(problem.M)
    payload = {"problem": ser.problem_to_json(problem), "jordan": _jnf_json(form)}
    if problem.mode == "pseudo" and form.is_diagonalisable:
        closed = fold_affine(form, problem.s, problem.b)
        payload["closed_form"] = {
            "x": [ser.rat(v) for v in closed.x_orig],
            "c": [ser.rat(v) for v in closed.c_orig],
            "d": [ser.rat(v) for v in closed.d_orig],
            "radius_moduli": [ser.alg(b.modulus) for b in form.blocks],
        }
    try:
        if problem.mode == "robust":
            desc = robust_abstraction(form, problem.s, problem.relation_bound)
        else:
            desc = pseudo_abstraction(form, problem.s, problem.b, problem.relation_bound)
        formula = assemble_contact(problem.target, desc)
    except Unsupported as exc:
        payload["unsupported"] = f"{type(exc).__name__}: {exc}"
        _write(ser.dumps(payload), args.out)
        return EXIT["Unsupported"]
    payload["period"] = formula.period
    payload["branches"] = [
        {"residue": br.residue, "clauses": [[f"{a.label}  [{a.rel} 0]" for a in clause] for clause in br.clauses]}
        for br in formula.branches
    ]
    _write(ser.dumps(payload), args.out)
    return 0


def cmd_hardness(args) -> int:
    from .decision import Problem
    from .hardness import LRS, build_instance

    data = ser.load_json(args.lrs)
    if "terms" in data:
        terms = [((ser.parse_rat(r[0]), ser.parse_rat(r[1])), (ser.parse_rat(c[0]), ser.parse_rat(c[1]))) for r, c in data["terms"]]
        u = LRS.exponential_sum(terms)
    else:
        u = LRS.from_recurrence([ser.parse_rat(v) for v in data["recurrence"]], [ser.parse_rat(v) for v in data["initial"]])
    inst = build_instance(u)
    problem = Problem(inst.A, inst.s, [0] * inst.dimension, inst.target)
    payload = ser.problem_to_json(problem)
    payload["fixed_eps"] = ser.alg(inst.eps)
    payload["note"] = "fixed-epsilon instance; explore with the simulate command"
    _write(ser.dumps(payload), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pseudoreach", description="Pseudo-reachability and robust reachability for linear dynamical systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, relation=True):
        p.add_argument("--out", default=_env("out"), help="output file (default stdout)")
        if relation:
            env = _env("relation-bound")
            p.add_argument("--relation-bound", type=int, default=int(env) if env else None, help="bound on multiplicative relation search")

    for name, help_ in (("decide", "decide pseudo-reachability (mode from the file)"), ("robust", "decide robust reachability")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("problem", nargs="+", help="problem files or directories")
        p.add_argument("--jobs", type=int, default=int(_env("jobs", 1)), help="parallel workers for batches")
        common(p)
    p = sub.add_parser("simulate", help="greedy floating point search for a fixed epsilon, CSV output")
    p.add_argument("problem")
    p.add_argument("--eps", default=_env("eps"), help="control radius (default: the file's fixed_eps, if any)")
    env_h = _env("horizon")
    p.add_argument("--horizon", type=int, default=int(env_h) if env_h else None, help="steps to search (default: options.horizon, else 1000)")
    p.add_argument("--control", choices=("euclidean", "jordan"), default="euclidean")
    common(p, relation=False)
    for name, help_ in (("inspect", "show the contact formula"), ("jnf", "real Jordan form"), ("torus", "rotation relations and torus closure")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("problem")
        common(p, relation=name != "jnf")
    p = sub.add_parser("hardness-gen", help="fixed-epsilon instance from a recurrence")
    p.add_argument("lrs", help="JSON with 'terms' [[root, coeff], ...] (Gaussian pairs) or 'recurrence' and 'initial'")
    common(p, relation=False)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "decide":
            return cmd_decide(args, None)
        if args.command == "robust":
            return cmd_decide(args, "robust")
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "jnf":
            return cmd_jnf(args)
        if args.command == "torus":
            return cmd_torus(args)
        if args.command == "inspect":
            return cmd_inspect(args)
        if args.command == "hardness-gen":
            return cmd_hardness(args)
    except Unsupported as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT["Unsupported"]
    except (PseudoReachError, ValueError, OSError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
