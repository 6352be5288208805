"""JSON encoding of problems, numbers, expressions and verdicts (schema 1)."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .algebraics import AlgebraicComplex, AlgebraicReal
from .asymptotics import ExpPoly, RadExpr
from .elimination import Halfspace, Hyperplane, IntervalBound, TargetSpec
from .errors import ParseError, UnknownAtomKind

SCHEMA = 1


def rat(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rat(v, where: str = "value") -> Fraction:
    if isinstance(v, bool) or v is None:
        raise ParseError(f"{where}: not a rational: {v!r}")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10 ** 12)
    try:
        return Fraction(str(v).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: not a rational: {v!r}") from exc


def alg(a) -> object:
    if isinstance(a, AlgebraicComplex):
        return {"re": alg(a.re), "im": alg(a.im)}
    if not isinstance(a, AlgebraicReal):
        return rat(a)
    if a.is_rational:
        return rat(a.rational)
    lo, hi = a.enclosure(64)
    return {"minpoly": [rat(c) for c in a.minpoly], "lo": rat(lo), "hi": rat(hi)}


def parse_alg(v) -> AlgebraicReal:
    if isinstance(v, dict):
        if "re" in v:
            raise ParseError("expected a real algebraic number")
        return AlgebraicReal([parse_rat(c) for c in v["minpoly"]], parse_rat(v["lo"]), parse_rat(v["hi"]))
    return AlgebraicReal.from_rational(parse_rat(v))


def exppoly(p: ExpPoly) -> list:
    out = []
    for base, poly in p.terms:
        out.append({"base": alg(base), "coeffs": [[e, k, alg(c)] for (e, k), c in poly.sorted_items()]})
    return out


def radexpr(e: RadExpr) -> dict:
    return {
        "radicands": [exppoly(r) for r in e.radicands],
        "terms": [{"radicals": sorted(k), "coeff": exppoly(v)} for k, v in sorted(e.terms.items(), key=lambda kv: sorted(kv[0]))],
    }


# ---------------------------------------------------------------------------


def atom_to_json(atom) -> dict:
    if isinstance(atom, Halfspace):
        return {"kind": "halfspace", "c": [rat(v) for v in atom.c], "b": rat(atom.b), "strict": atom.strict}
    if isinstance(atom, Hyperplane):
        return {"kind": "hyperplane", "c": [rat(v) for v in atom.c], "b": rat(atom.b)}
    out = {"kind": "interval", "coord": atom.coord, "dim": atom.dim, "lo_strict": atom.lo_strict, "hi_strict": atom.hi_strict}
    out["lo"] = None if atom.lo is None else rat(atom.lo)
    out["hi"] = None if atom.hi is None else rat(atom.hi)
    return out


def atom_from_json(d: dict, dim: int | None = None, where: str = "atom"):
    if not isinstance(d, dict):
        raise ParseError(f"{where}: atom must be an object")
    kind = d.get("kind")
    try:
        if kind == "halfspace":
            return Halfspace(_rats(d["c"], f"{where}.c"), parse_rat(d["b"], f"{where}.b"), bool(d.get("strict", False)))
        if kind == "hyperplane":
            return Hyperplane(_rats(d["c"], f"{where}.c"), parse_rat(d["b"], f"{where}.b"))
        if kind == "interval":
            lo, hi = d.get("lo"), d.get("hi")
            return IntervalBound(
                int(d["coord"]),
                int(d.get("dim", dim or 0)),
                None if lo is None else parse_rat(lo, f"{where}.lo"),
                None if hi is None else parse_rat(hi, f"{where}.hi"),
                bool(d.get("lo_strict", False)),
                bool(d.get("hi_strict", False)),
            )
    except KeyError as exc:
        raise ParseError(f"{where}: missing field {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{where}: {exc}") from exc
    raise UnknownAtomKind(f"{where}: unknown atom kind {kind!r}")


def _rats(values, where: str) -> tuple[Fraction, ...]:
    if not isinstance(values, list):
        raise ParseError(f"{where}: expected a list")
    return tuple(parse_rat(v, f"{where}[{i}]") for i, v in enumerate(values))


def target_to_json(t: TargetSpec) -> dict:
    return {"dnf": [{"atoms": [atom_to_json(a) for a in clause]} for clause in t.clauses]}


def target_from_json(d: dict, dim: int | None = None) -> TargetSpec:
    try:
        clauses = d["dnf"]
        if not isinstance(clauses, list):
            raise TypeError
    except (KeyError, TypeError) as exc:
        raise ParseError("target: needs a list 'dnf' of clauses") from exc
    out = []
    for i, clause in enumerate(clauses):
        atoms = clause.get("atoms") if isinstance(clause, dict) else None
        if not isinstance(atoms, list):
            raise ParseError(f"target.dnf[{i}]: needs a list 'atoms'")
        out.append(tuple(atom_from_json(a, dim, f"target.dnf[{i}].atoms[{j}]") for j, a in enumerate(atoms)))
    return TargetSpec(tuple(out))


def problem_to_json(p, horizon: int | None = None) -> dict:
    options = {"relation_bound": p.relation_bound}
    if horizon is not None:
        options["horizon"] = horizon
    return {
        "schema": SCHEMA,
        "mode": p.mode,
        "matrix": [[rat(v) for v in row] for row in p.M],
        "affine": [rat(v) for v in p.b],
        "start": [rat(v) for v in p.s],
        "target": target_to_json(p.target),
        "options": options,
    }


def problem_from_json(d: dict):
    from .decision import Problem

    if not isinstance(d, dict):
        raise ParseError("problem must be a JSON object")
    if d.get("schema", SCHEMA) != SCHEMA:
        raise ParseError(f"schema: unsupported version {d.get('schema')!r}")
    for key in ("matrix", "start", "target"):
        if key not in d:
            raise ParseError(f"missing field {key!r}")
    rows = d["matrix"]
    if not isinstance(rows, list) or not rows:
        raise ParseError("matrix: expected a non-empty list of rows")
    m = [_rats(row, f"matrix[{i}]") for i, row in enumerate(rows)]
    s = _rats(d["start"], "start")
    b = _rats(d["affine"], "affine") if "affine" in d else tuple(Fraction(0) for _ in s)
    target = target_from_json(d["target"], len(s))
    options = d.get("options", {}) or {}
    try:
        bound = int(options.get("relation_bound", 20))
    except (TypeError, ValueError) as exc:
        raise ParseError("options.relation_bound: expected an integer") from exc
    mode = d.get("mode", "pseudo")
    if mode not in ("pseudo", "robust"):
        raise ParseError(f"mode: expected 'pseudo' or 'robust', got {mode!r}")
    return Problem(m, s, b, target, mode, bound)


def problem_options(d: dict) -> dict:
    return dict(d.get("options", {}) or {})


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_problem(path):
    return problem_from_json(load_json(path))


parse_problem = load_problem


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)
