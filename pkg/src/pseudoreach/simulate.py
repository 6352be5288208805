"""Floating-point exploration of pseudo-orbits and perturbed orbits for a fixed epsilon.

The simulators are heuristics.  A reported hit is a concrete controlled orbit
(checked with a tolerance); a miss proves nothing.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np

from .elimination import Halfspace, Hyperplane, TargetSpec

# strict atoms must clear their boundary by this much (floats cannot see openness)
STRICT_MARGIN = 1e-7


@dataclass(frozen=True)
class SimulationConfig:
    eps: float
    horizon: int = 1000
    control: str = "euclidean"  # or "jordan": one ball per real Jordan block
    tolerance: float = 1e-9


@dataclass
class SimulationResult:
    hit: bool
    n: int | None
    rows: list = field(default_factory=list)


def _atoms(target: TargetSpec) -> list[list[tuple[np.ndarray, float, str]]]:
    out = []
    for clause in target.clauses:
        rows = []
        for atom in clause:
            for h in atom.halfspaces():
                kind = "eq" if isinstance(h, Hyperplane) else ("lt" if isinstance(h, Halfspace) and h.strict else "le")
                rows.append((np.array([float(v) for v in h.c]), float(h.b), kind))
        out.append(rows)
    return out


def _violations(atoms, x: np.ndarray) -> list[tuple[float, int]]:
    """Per clause: (largest normalised violation, index of the worst atom)."""
    res = []
    for rows in atoms:
        worst, idx = -np.inf, -1
        for i, (c, b, kind) in enumerate(rows):
            v = (c @ x - b) / np.linalg.norm(c)
            if kind == "eq":
                v = abs(v)
            elif kind == "lt":
                v += STRICT_MARGIN
            if v > worst:
                worst, idx = v, i
        res.append((worst, idx))
    return res


def target_distance(target: TargetSpec, x) -> float:
    x = np.asarray(x, dtype=float)
    return max(0.0, min(v for v, _ in _violations(_atoms(target), x))) if target.clauses else np.inf


class _Controls:
    """Steepest descent directions of a linear functional inside the control set."""

    def __init__(self, dim: int, control: str, form=None):
        self.control = control
        if control == "jordan":
            if form is None:
                raise ValueError("jordan control set needs the real Jordan form")
            self.P = np.array([[float(v) for v in row] for row in form.basis_P])
            self.slices = []
            pos = 0
            for blk in form.blocks:
                self.slices.append(slice(pos, pos + blk.dim))
                pos += blk.dim
        self.dim = dim

    def descent(self, g: np.ndarray, eps: float, needed: float = np.inf) -> np.ndarray:
        """u in the eps control set minimising g . u, shortened so g . u >= -needed."""
        if self.control == "euclidean":
            nrm = np.linalg.norm(g)
            if nrm == 0:
                return np.zeros(self.dim)
            u = -eps * g / nrm
        else:
            h = self.P.T @ g
            w = np.zeros(self.dim)
            for sl in self.slices:
                nrm = np.linalg.norm(h[sl])
                if nrm > 0:
                    w[sl] = -eps * h[sl] / nrm
            u = self.P @ w
        gain = -(g @ u)
        if gain > needed > 0:
            u = u * (needed / gain)
        return u


def _direction(atoms, y: np.ndarray):
    """(distance, normal of the worst atom, signed gap c.y - b of that atom) for the nearest clause."""
    viol = _violations(atoms, y)
    ci = int(np.argmin([v for v, _ in viol]))
    dist, ai = viol[ci]
    c, b, kind = atoms[ci][ai]
    gap = c @ y - b
    if kind == "eq" and gap < 0:
        c, gap = -c, -gap
    elif kind == "lt":
        gap += 2 * STRICT_MARGIN * np.linalg.norm(c)
    return dist, c, gap


def greedy_orbit(
    M,
    b,
    s,
    target: TargetSpec,
    eps: float,
    horizon: int = 1000,
    control: str = "euclidean",
    form=None,
    tolerance: float = 1e-9,
    record: bool = False,
    plan: bool = True,
) -> SimulationResult:
    """Steer x -> Mx + b + u, |u| <= eps, towards the target.

    A one-step greedy pass runs first.  If it misses and ``plan`` is set, each
    final time T is tried with the open-loop controls that are optimal for the
    worst atom of the nearest clause at T.
    """
    m = np.array([[float(v) for v in row] for row in M])
    bv = np.array([float(v) for v in b])
    x = np.array([float(v) for v in s])
    atoms = _atoms(target)
    ctl = _Controls(len(x), control, form)
    rows = []
    if not atoms:
        return SimulationResult(False, None, rows)
    dist = _direction(atoms, x)[0]
    if record:
        rows.append((0, x.copy(), np.zeros_like(x), max(dist, 0.0)))
    if dist <= tolerance:
        return SimulationResult(True, 0, rows)
    for n in range(1, horizon + 1):
        y = m @ x + bv
        if not np.all(np.isfinite(y)):
            break
        _, c, gap = _direction(atoms, y)
        u = ctl.descent(c, eps, gap)
        x = y + u
        dist = _direction(atoms, x)[0]
        if record:
            rows.append((n, x.copy(), u, max(dist, 0.0)))
        if dist <= tolerance:
            return SimulationResult(True, n, rows)
    if plan:
        planned = planned_orbit(m, bv, np.array([float(v) for v in s]), atoms, ctl, eps, horizon, tolerance, record)
        if planned.hit:
            return planned
    return SimulationResult(False, None, rows)


def planned_orbit(m, bv, x0, atoms, ctl, eps, horizon, tolerance, record) -> SimulationResult:
    free = x0.copy()  # orbit without controls
    for T in range(1, horizon + 1):
        free = m @ free + bv
        if not np.all(np.isfinite(free)):
            break
        _, c, gap = _direction(atoms, free)
        # u_i pushes along (M^(T-1-i))^T c
        gs = [c]
        for _ in range(T - 1):
            gs.append(m.T @ gs[-1])
        x = x0.copy()
        rows = [(0, x.copy(), np.zeros_like(x), 0.0)] if record else []
        for i in range(T):
            u = ctl.descent(gs[T - 1 - i], eps)
            x = m @ x + bv + u
            if record:
                rows.append((i + 1, x.copy(), u, max(_direction(atoms, x)[0], 0.0)))
        if _direction(atoms, x)[0] <= tolerance:
            return SimulationResult(True, T, rows)
    return SimulationResult(False, None, [])


def robust_search(
    M,
    s,
    target: TargetSpec,
    eps: float,
    horizon: int = 1000,
    control: str = "euclidean",
    form=None,
    tolerance: float = 1e-9,
    record: bool = False,
) -> SimulationResult:
    """Look for delta with |delta| <= eps and M^n (s + delta) in the target."""
    m = np.array([[float(v) for v in row] for row in M])
    x0 = np.array([float(v) for v in s])
    atoms = _atoms(target)
    ctl = _Controls(len(x0), control, form)
    mn = np.eye(len(x0))
    rows = []
    if not atoms:
        return SimulationResult(False, None, rows)
    for n in range(horizon + 1):
        if n:
            mn = m @ mn
        if not np.all(np.isfinite(mn)):
            break
        y = mn @ x0
        _, c, gap = _direction(atoms, y)
        delta = ctl.descent(mn.T @ c, eps, gap)
        x = y + mn @ delta
        dist = _direction(atoms, x)[0]
        if record:
            rows.append((n, x.copy(), delta, max(dist, 0.0)))
        if dist <= tolerance:
            return SimulationResult(True, n, rows)
    return SimulationResult(False, None, rows)


def emit_csv(rows: Sequence, out: TextIO | None = None) -> str:
    """Write rows (n, state, control, distance) as CSV; vectors are space separated."""
    buf = out if out is not None else io.StringIO()
    w = csv.writer(buf)
    w.writerow(["n", "state", "control", "distance"])
    for n, x, u, d in rows:
        w.writerow([n, " ".join(f"{v:.12g}" for v in x), " ".join(f"{v:.12g}" for v in u), f"{d:.12g}"])
    return buf.getvalue() if out is None else ""
