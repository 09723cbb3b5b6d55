import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trisector.analysis import envelope_oracle
from trisector.geometry import (
    FocusError,
    FramedPoint,
    envelope_point,
    find_axis_crossings,
    find_self_intersections,
    find_tangent_events,
    find_tangent_through_focus,
    iterate_curve,
    parabola_source,
    seed_curve,
    series_source,
    theta_point,
    trace,
)
from trisector.solver import solve_branch
from trisector.verify import curvature_identity_error

coord = st.floats(-20, 20, allow_nan=False)
angle = st.floats(0, 2 * math.pi)


def framed(x, y, a):
    return FramedPoint.make(0.0, (x, y), (math.cos(a), math.sin(a)))


def close(p, q, tol):
    return math.hypot(p[0] - q[0], p[1] - q[1]) <= tol


def test_envelope_of_focus_tangent_is_unframeable():
    fp = FramedPoint.make(0, (0, 0), (0, 1))
    with pytest.raises(FocusError):
        envelope_point(fp)
    assert theta_point(fp).p == (0.0, -1.0) and theta_point(fp).degenerate


def test_framed_point_rejects_focus_and_bad_tangent():
    with pytest.raises(FocusError):
        FramedPoint(0.0, (0.0, 1.0), (1.0, 0.0))
    with pytest.raises(ValueError):
        FramedPoint(0.0, (1.0, 1.0), (1.0, 1.0))


def test_envelope_examples():
    e = envelope_point(FramedPoint.make(0, (0, 1 / 3), (1, 0)))
    assert close(e.p, (0, -1 / 3), 1e-15) and close(e.u, (1, 0), 1e-15)
    assert close(envelope_point(FramedPoint.make(0, (5, 0), (1, 0))).p, (0, -1), 1e-15)
    fp = FramedPoint.make(0.5, (0.5, 1 / 12), (1, -1))
    arc = lambda t: (t, 1 / 3 - t * t, 1.0, -2 * t)
    assert close(envelope_point(fp).p, envelope_oracle(fp, arc), 1e-9)


def test_theta_fixed_point_and_focus_tangent():
    fp = FramedPoint.make(0, (0, 1 / 3), (1, 0))
    th = theta_point(fp)
    assert close(th.p, fp.p, 1e-15) and close(th.u, fp.u, 1e-15)
    # tangent line through the focus: direction from p to (0, 1)
    p = (2.0, -3.0)
    img = theta_point(FramedPoint.make(0, p, (0 - p[0], 1 - p[1])))
    assert close(img.p, (0, -1), 1e-12) and img.degenerate


@settings(max_examples=1000)
@given(coord, coord, angle)
def test_orientation_invariance(x, y, a):
    if math.hypot(x, y - 1) < 1e-6:
        return
    fp = framed(x, y, a)
    try:
        e1, e2 = theta_point(fp), theta_point(fp.flipped())
    except FocusError:
        # the envelope point is (0, -1), whose mirror image is the focus
        assert close(envelope_point(fp).p, (0, -1), 1e-9)
        return
    assert close(e1.p, e2.p, 1e-9)
    assert abs(abs(e1.u[0] * e2.u[0] + e1.u[1] * e2.u[1]) - 1) <= 1e-9


@given(coord, coord, angle)
def test_envelope_lies_on_circle_and_corollary(x, y, a):
    if math.hypot(x, y - 1) < 1e-3:
        return
    fp = framed(x, y, a)
    try:
        th = theta_point(fp)
    except FocusError:
        return
    if th.degenerate:
        assert close(th.p, (0, -1), 1e-12)
        return
    beta = (th.p[0], -th.p[1])
    r = math.hypot(x, y - 1)
    assert abs(math.hypot(beta[0] - x, beta[1] - y) - r) <= 1e-9 * max(1.0, r)
    # beta - focus is parallel to the normal J(u)
    n = fp.normal
    cross = (beta[0]) * n[1] - (beta[1] - 1) * n[0]
    assert abs(cross) <= 1e-8 * max(1.0, r)


def test_corollary_on_traced_curve(alpha5):
    rng = random.Random(3)
    for _ in range(200):
        t = rng.uniform(-1, 1)
        fp = alpha5.source.frame(t)
        th = theta_point(fp)
        n = fp.normal
        cross = th.p[0] * n[1] - (-th.p[1] - 1) * n[0]
        assert abs(cross) <= 1e-8 * max(1.0, math.hypot(*th.p))


def test_curvature_identity():
    assert max(curvature_identity_error(t) for t in np.linspace(-1.5, 1.5, 31)) < 1e-4


def test_seed_curve_examples():
    c = seed_curve("parabola", (-1, 1), 3)
    assert np.allclose(c.p[[0, len(c) // 2, -1]], [(-1, -2 / 3), (0, 1 / 3), (1, -2 / 3)])
    assert close(parabola_source().frame(0.0).u, (1, 0), 0)
    sol = solve_branch("conjugate", 4)
    fp = series_source(sol).frame(0.1)
    assert fp.p[1] == pytest.approx(sol.f_series.eval_float(0.1), abs=1e-15)


def test_iterate_checkpoints():
    seed = seed_curve("parabola", (-1, 1), 401)
    a5 = iterate_curve(seed, 5)
    assert a5.generation == 5
    p = a5.frame_near(1 / 32).p
    assert abs(p[0] - 0.92795) <= 1e-3 and abs(p[1] - 2.82373) <= 1e-3
    q = a5.source.frame(-0.0858323).p
    assert close(q, (2.2336, -4.39928), 2e-3)
    one = iterate_curve(seed, 1).frame_near(0.0)
    assert close(one.p, (0, 1 / 3), 1e-15)


def test_trace_is_continuous(alpha5):
    dots = np.abs(np.sum(alpha5.u[1:] * alpha5.u[:-1], axis=1))
    assert np.all(np.arccos(np.clip(dots, -1, 1)) <= 0.2 + 1e-9)
    assert np.all(np.diff(alpha5.t) > 0)
    # orientation is carried continuously, not only up to sign
    assert np.all(np.sum(alpha5.u[1:] * alpha5.u[:-1], axis=1) > 0)


def test_tangent_events(alpha5):
    ev = find_tangent_events(alpha5)
    verticals = [e for e in ev if e.kind == "vertical_tangent" and e.location[0] > 0]
    v0 = min(verticals, key=lambda e: abs(e.params[0]))
    assert close(v0.location, (0.524251, -0.243883), 1e-3)
    horizontals = sorted((e for e in ev if e.kind == "horizontal_tangent" and e.params[0] >= 0),
                         key=lambda e: e.params[0])
    assert close(horizontals[0].location, (0, 1 / 3), 1e-12)
    assert abs(horizontals[1].location[1]) > 1
    for e in ev:
        assert e.residual <= 1e-9


def test_axis_crossings(alpha5):
    ev = sorted((e for e in find_axis_crossings(alpha5) if e.params[0] >= -1e-15),
                key=lambda e: e.params[0])
    assert close(ev[0].location, (0, 1 / 3), 1e-12)
    assert close(ev[1].location, (0, -1), 1e-2)
    assert abs(ev[2].location[1]) > 3


def test_self_intersection(alpha5):
    ev = find_self_intersections(alpha5)
    x0 = min(ev, key=lambda e: math.hypot(e.location[0], e.location[1] + 1))
    assert close(x0.location, (0, -1), 1e-2)
    (d1, d2) = x0.tangent_dirs
    target = (0.902272, -0.431168)
    ang = min(math.acos(min(1, abs(d[0] * target[0] + d[1] * target[1]))) for d in (d1, d2))
    assert ang <= 1e-2
    # the two branches are mirror images across the y-axis
    mirrored = (-d2[0], d2[1])
    assert math.acos(min(1, abs(d1[0] * mirrored[0] + d1[1] * mirrored[1]))) <= 1e-2


def test_tangent_through_focus(alpha5):
    ev = [e for e in find_tangent_through_focus(alpha5) if e.location[0] > 0]
    e = min(ev, key=lambda e: math.hypot(e.location[0] - 0.464045, e.location[1] - 0.0289289))
    assert close(e.location, (0.464045, 0.0289289), 1e-3)
    assert close(theta_point(alpha5.frame_near(e.params[0])).p, (0, -1), 1e-6)


def test_focus_tangent_on_parabola_matches_dense_scan():
    c = trace(parabola_source(0), -1, 1, 2001)
    found = sorted(e.params[0] for e in find_tangent_through_focus(c))
    t = np.linspace(-1, 1, 100_001)
    # <(t, 1/3 - t^2) - (0, 1), J(1, -2t)> with J(u) = (2t, 1)
    g = t * 2 * t + (1 / 3 - t * t - 1)
    brute = t[:-1][np.sign(g[:-1]) != np.sign(g[1:])]
    assert len(found) == len(brute) == 2
    assert np.allclose(found, brute, atol=1e-4)
    assert np.allclose(np.abs(found), math.sqrt(2 / 3), atol=1e-10)


def test_events_reproducible(alpha5):
    c2 = trace(parabola_source(5), -1.0, 1.0, 4001)
    assert np.array_equal(c2.p, alpha5.p)
    assert find_tangent_events(c2) == find_tangent_events(alpha5)
    assert find_self_intersections(c2) == find_self_intersections(alpha5)


def test_csv_format():
    c = seed_curve("parabola", (-1, 1), 3)
    lines = c.to_csv().splitlines()
    assert lines[0] == "t,x,y,ux,uy"
    row = next(r for r in lines[1:] if r.startswith("0,"))
    assert row.split(",")[2] == "0.33333333333333331"
