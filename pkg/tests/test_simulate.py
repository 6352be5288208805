import csv
import io
from fractions import Fraction as F

import numpy as np
from hypothesis import given, settings, strategies as st

from pseudoreach.elimination import Halfspace, TargetSpec
from pseudoreach.jordan import real_jordan_form
from pseudoreach.simulate import emit_csv, greedy_orbit, robust_search, target_distance

GE5 = TargetSpec.single(Halfspace((F(-1),), F(-5)))
GE1 = TargetSpec.single(Halfspace((F(-1),), F(-1)))


def test_drift_reaches_after_fifty_steps():
    res = greedy_orbit([[1]], [0], [0], GE5, 0.1, horizon=100)
    assert res.hit and res.n == 50


def test_contracting_never_reaches():
    assert not greedy_orbit([[F(1, 2)]], [0], [0], GE1, 0.4, horizon=200).hit


def test_start_inside():
    res = greedy_orbit([[F(1, 2)]], [0], [1], GE1, 0.1, record=True)
    assert res.hit and res.n == 0 and len(res.rows) == 1


def test_robust_search_expanding():
    le = TargetSpec.single(Halfspace((F(1),), F(-1)))
    assert robust_search([[2]], [0], le, 0.01, horizon=20).hit
    assert not robust_search([[2]], [1], le, 0.5, horizon=20).hit


def test_csv_layout():
    res = greedy_orbit([[1]], [0], [0], GE5, 1.0, horizon=10, record=True)
    text = emit_csv(res.rows)
    assert text.endswith("\n")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["n", "state", "control", "distance"]
    assert [int(r[0]) for r in rows[1:]] == list(range(res.n + 1))
    assert float(rows[-1][3]) == 0.0


def test_target_distance():
    assert target_distance(GE1, [0.25]) == 0.75
    assert target_distance(GE1, [3]) == 0.0


blocks_matrix = [[F(1, 2), 1, 0], [0, F(1, 2), 0], [0, 0, 3]]


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.integers(-5, 5), min_size=3, max_size=3),
    st.sampled_from([0.05, 0.3, 1.0]),
    st.sampled_from(["euclidean", "jordan"]),
)
def test_controls_stay_in_the_ball(c, eps, control):
    if not any(c):
        return
    conj = [[1, 1, 0], [0, 1, 2], [1, 0, 1]]
    q = np.array(conj, dtype=float)
    m = q @ np.array([[float(v) for v in row] for row in blocks_matrix]) @ np.linalg.inv(q)
    mf = [[F(v).limit_denominator(10 ** 6) for v in row] for row in m]
    target = TargetSpec.single(Halfspace(tuple(F(v) for v in c), F(-50)))
    form = real_jordan_form(mf) if control == "jordan" else None
    res = greedy_orbit(mf, [0, 0, 0], [1, 0, 0], target, eps, horizon=15, control=control, form=form, record=True)
    if control == "euclidean":
        for _, _, u, _ in res.rows:
            assert np.linalg.norm(u) <= eps * (1 + 1e-9)
    else:
        pinv = np.array([[float(v) for v in row] for row in form.basis_P_inv])
        for _, _, u, _ in res.rows:
            w = pinv @ u
            pos = 0
            for blk in form.blocks:
                assert np.linalg.norm(w[pos:pos + blk.dim]) <= eps * (1 + 1e-9)
                pos += blk.dim
