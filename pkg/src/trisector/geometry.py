"""Envelope map, the Theta operator and traced curves.

A curve is handled through framed points ``(t, p, u)``: a parameter, a
position and a unit tangent.  The envelope of the circles centred on a curve
and passing through the focus ``(0, 1)`` has, at parameter ``t``, a position
and tangent depending only on the framed point at ``t``.  Iterating the
reflected envelope is therefore a pointwise map and needs no derivatives
beyond the first.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .solver import BranchSolution

__all__ = [
    "FOCUS",
    "FocusError",
    "TruncationError",
    "FramedPoint",
    "FeatureEvent",
    "CurveSource",
    "SampledCurve",
    "envelope_point",
    "theta_point",
    "parabola_source",
    "series_source",
    "seed_curve",
    "trace",
    "iterate_curve",
    "find_tangent_events",
    "find_axis_crossings",
    "find_line_crossings",
    "find_tangent_through_focus",
    "find_self_intersections",
]

log = logging.getLogger(__name__)

FOCUS = (0.0, 1.0)
UNIT_TOL = 1e-12


class FocusError(ValueError):
    """A framed point sits exactly on the focus."""


class TruncationError(ValueError):
    """A truncated series is evaluated outside the range where it can be trusted."""


@dataclass(frozen=True)
class FramedPoint:
    t: float
    p: tuple[float, float]
    u: tuple[float, float]
    # the tangent line of the preimage passed through the focus
    degenerate: bool = False

    def __post_init__(self) -> None:
        if self.p == FOCUS:
            raise FocusError(f"framed point at the focus (t={self.t})")
        if abs(math.hypot(*self.u) - 1.0) > UNIT_TOL:
            raise ValueError(f"tangent {self.u} is not a unit vector")

    @classmethod
    def make(cls, t: float, p: Sequence[float], u: Sequence[float], degenerate: bool = False):
        n = math.hypot(u[0], u[1])
        if n == 0.0:
            raise ValueError("zero tangent vector")
        return cls(float(t), (float(p[0]), float(p[1])), (u[0] / n, u[1] / n), degenerate)

    @property
    def normal(self) -> tuple[float, float]:
        return (-self.u[1], self.u[0])

    def flipped(self) -> FramedPoint:
        return FramedPoint(self.t, self.p, (-self.u[0], -self.u[1]), self.degenerate)


def _envelope(fp: FramedPoint, focus: tuple[float, float]) -> tuple[float, float, float, float, bool]:
    px, py = fp.p
    ux, uy = fp.u
    nx, ny = -uy, ux
    dx, dy = px - focus[0], py - focus[1]
    r = math.hypot(dx, dy)
    if r == 0.0:
        raise FocusError(f"framed point at the focus (t={fp.t})")
    c = dx * nx + dy * ny
    bx, by = focus[0] + 2.0 * c * nx, focus[1] + 2.0 * c * ny
    wx, wy = dx / r, dy / r
    wu = wx * ux + wy * uy
    wn = wx * nx + wy * ny
    tx, ty = -wu * nx - wn * ux, -wu * ny - wn * uy
    tn = math.hypot(tx, ty)
    return bx, by, tx / tn, ty / tn, c == 0.0


def envelope_point(fp: FramedPoint, focus: tuple[float, float] = FOCUS) -> FramedPoint:
    """Point and unit tangent of the envelope of circles through ``focus``.

    Position ``focus + 2 <p - focus, n> n`` with ``n = J(u)``; tangent
    ``-<w, u> n - <w, n> u`` with ``w`` the unit vector from the focus to
    ``p``.  Both are unchanged when ``u`` is flipped, so the orientation of
    a traced envelope has to be carried along by continuity.

    When the tangent line of ``fp`` passes through the focus the envelope
    point is the focus itself, which cannot be framed; ``FocusError`` is
    raised.  ``theta_point`` handles that case.
    """
    bx, by, tx, ty, degenerate = _envelope(fp, focus)
    return FramedPoint(fp.t, (bx, by), (tx, ty), degenerate)


def theta_point(fp: FramedPoint) -> FramedPoint:
    """Envelope point reflected in the x-axis, position and tangent.

    A degenerate input (tangent line through the focus) maps to ``(0, -1)``
    and the result is flagged.
    """
    bx, by, tx, ty, degenerate = _envelope(fp, FOCUS)
    return FramedPoint(fp.t, (bx, -by), (tx, -ty), degenerate)


# -- curve sources --------------------------------------------------------------


@dataclass(frozen=True)
class CurveSource:
    """An analytic seed followed by ``iterations`` applications of Theta.

    ``frame(t)`` recomputes the whole chain from the seed, so every sample of
    a traced curve is exact up to floating-point roundoff.
    """

    seed: Callable[[float], FramedPoint]
    iterations: int
    descriptor: str

    def frame(self, t: float) -> FramedPoint | None:
        fp = self.seed(t)
        degenerate = False
        for _ in range(self.iterations):
            try:
                fp = theta_point(fp)
            except FocusError:
                return None
            degenerate = degenerate or fp.degenerate
        if degenerate and not fp.degenerate:
            fp = FramedPoint(fp.t, fp.p, fp.u, True)
        return fp

    def deeper(self, extra: int = 1) -> CurveSource:
        return CurveSource(self.seed, self.iterations + extra, self.descriptor)


def parabola_source(iterations: int = 0) -> CurveSource:
    """The concave seed ``(t, 1/3 - t^2)`` with its exact tangent."""

    def seed(t: float) -> FramedPoint:
        return FramedPoint.make(t, (t, 1.0 / 3.0 - t * t), (1.0, -2.0 * t))

    return CurveSource(seed, iterations, "parabola")


def series_source(solution: BranchSolution, iterations: int = 0, trust: float = 0.1) -> CurveSource:
    """Graph ``(t, f(t))`` of a solved branch, tangent from the series derivative.

    Raises ``TruncationError`` where the value at order K and at order K-2
    differ by more than ``trust`` relative.
    """
    f = solution.f_series
    coeffs = f.floats()
    lower = coeffs[: max(1, len(coeffs) - 2)]
    dcoeffs = [i * c for i, c in enumerate(coeffs)][1:]

    def horner(cs: Sequence[float], x: float) -> float:
        acc = 0.0
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    def seed(t: float) -> FramedPoint:
        y = horner(coeffs, t)
        y_low = horner(lower, t)
        if abs(y - y_low) > trust * max(abs(y), 1e-300):
            raise TruncationError(f"series of order {f.order} untrusted at t={t}")
        return FramedPoint.make(t, (t, y), (1.0, horner(dcoeffs, t)))

    return CurveSource(seed, iterations, f"series({solution.branch.value}, K={f.order})")


# -- sampled curves ---------------------------------------------------------------


@dataclass
class SampledCurve:
    """Samples of one generation of the Theta iteration, parameter-ordered.

    Tangent orientation is chosen for continuity between neighbours, so sign
    changes of a tangent component mark genuine crossings of the tangent line
    through that direction.
    """

    t: np.ndarray
    p: np.ndarray
    u: np.ndarray
    generation: int
    seed_descriptor: str
    source: CurveSource | None = None
    degenerate: np.ndarray | None = None
    gaps: list[tuple[float, float]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("sample parameters must be strictly increasing")
        if self.degenerate is None:
            self.degenerate = np.zeros(len(self.t), dtype=bool)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def samples(self) -> list[FramedPoint]:
        return [
            FramedPoint(float(t), (float(p[0]), float(p[1])), (float(u[0]), float(u[1])), bool(d))
            for t, p, u, d in zip(self.t, self.p, self.u, self.degenerate)
        ]

    def frame_near(self, t: float, reference: Sequence[float] | None = None) -> FramedPoint:
        """Recompute the framed point at ``t``, oriented like ``reference``.

        Without a reference the tangent of the nearest stored sample is used.
        """
        if self.source is None:
            raise ValueError("curve has no analytic source to recompute from")
        fp = self.source.frame(t)
        if fp is None:
            raise FocusError(f"chain passes through the focus at t={t}")
        if reference is None:
            i = int(np.clip(np.searchsorted(self.t, t), 0, len(self.t) - 1))
            if i > 0 and abs(self.t[i - 1] - t) < abs(self.t[i] - t):
                i -= 1
            reference = self.u[i]
        if fp.u[0] * reference[0] + fp.u[1] * reference[1] < 0:
            fp = fp.flipped()
        return fp

    def restrict(self, t_min: float, t_max: float) -> SampledCurve:
        keep = (self.t >= t_min) & (self.t <= t_max)
        return SampledCurve(
            self.t[keep], self.p[keep], self.u[keep], self.generation,
            self.seed_descriptor, self.source, self.degenerate[keep],
            [g for g in self.gaps if g[0] >= t_min and g[1] <= t_max],
        )

    def to_csv(self) -> str:
        lines = ["t,x,y,ux,uy"]
        for t, p, u in zip(self.t, self.p, self.u):
            lines.append(",".join(f"{v:.17g}" for v in (t, p[0], p[1], u[0], u[1])))
        return "\n".join(lines) + "\n"


def _orient(us: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out = []
    prev = None
    for u in us:
        if prev is not None and u[0] * prev[0] + u[1] * prev[1] < 0:
            u = (-u[0], -u[1])
        out.append(u)
        prev = u
    return out


def trace(
    source: CurveSource,
    t_min: float,
    t_max: float,
    n_samples: int = 4001,
    angle_bound: float = 0.2,
    arc_bound: float | None = 0.05,
    min_step: float = 1e-12,
    max_samples: int = 2_000_000,
) -> SampledCurve:
    """Sample ``source`` on ``[t_min, t_max]`` with adaptive refinement.

    Midpoints are inserted, each recomputed through the full chain, wherever
    neighbouring tangent lines turn by more than ``angle_bound`` radians or
    neighbouring points are farther apart than ``arc_bound``.
    """
    if n_samples < 2 or not t_max > t_min:
        raise ValueError("need at least two samples on a nondegenerate interval")
    ts = np.linspace(t_min, t_max, n_samples).tolist()
    frames: dict[float, FramedPoint | None] = {}
    for t in ts:
        frames[t] = source.frame(t)

    gaps: list[tuple[float, float]] = []
    pending = True
    while pending:
        pending = False
        good = [t for t in ts if frames[t] is not None]
        new: list[float] = []
        for a, b in zip(good, good[1:]):
            fa, fb = frames[a], frames[b]
            if b - a < min_step:
                continue
            dot = abs(fa.u[0] * fb.u[0] + fa.u[1] * fb.u[1])
            turn = math.acos(min(1.0, dot))
            dist = math.hypot(fb.p[0] - fa.p[0], fb.p[1] - fa.p[1])
            if turn > angle_bound or (arc_bound is not None and dist > arc_bound):
                new.append(0.5 * (a + b))
        if new:
            if len(frames) + len(new) > max_samples:
                raise RuntimeError("refinement exceeded the sample budget")
            pending = True
            for t in new:
                frames[t] = source.frame(t)
            ts = sorted(frames)
    for a, b in zip(ts, ts[1:]):
        if frames[a] is None or frames[b] is None:
            gaps.append((a, b))
    good = [frames[t] for t in ts if frames[t] is not None]
    if len(good) < len(ts):
        log.warning("%d samples hit the focus and were dropped", len(ts) - len(good))
    us = _orient([fp.u for fp in good])
    return SampledCurve(
        np.array([fp.t for fp in good]),
        np.array([fp.p for fp in good]),
        np.array(us),
        source.iterations,
        source.descriptor,
        source,
        np.array([fp.degenerate for fp in good], dtype=bool),
        gaps,
    )


def seed_curve(
    kind: str | BranchSolution = "parabola",
    domain: tuple[float, float] = (-1.0, 1.0),
    n_samples: int = 4001,
    **kwargs,
) -> SampledCurve:
    """Generation-0 curve from the parabola or from a solved series branch."""
    if isinstance(kind, BranchSolution):
        source = series_source(kind, 0)
    elif kind == "parabola":
        source = parabola_source(0)
    else:
        raise ValueError(f"unknown seed kind {kind!r}")
    return trace(source, domain[0], domain[1], n_samples, **kwargs)


def iterate_curve(seed: SampledCurve, n: int, **kwargs) -> SampledCurve:
    """Apply Theta ``n`` times, resampling adaptively through the full chain."""
    if n < 1:
        raise ValueError("need at least one iteration")
    if seed.source is None:
        raise ValueError("seed curve has no analytic source")
    kwargs.setdefault("n_samples", len(seed))
    return trace(seed.source.deeper(n), float(seed.t[0]), float(seed.t[-1]), **kwargs)


# -- events -----------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureEvent:
    kind: str
    params: tuple[float, ...]
    location: tuple[float, float]
    tangent_dirs: tuple[tuple[float, float], ...]
    # 1 for a sign change, 2 for a touch without crossing
    multiplicity: int = 1
    residual: float = 0.0
    label: str = ""

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "params": list(self.params),
            "location": list(self.location),
            "tangent_dirs": [list(d) for d in self.tangent_dirs],
            "multiplicity": self.multiplicity,
            "residual": self.residual,
            "label": self.label,
        }


Quantity = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _focus_quantity(focus: tuple[float, float]) -> Quantity:
    def q(p: np.ndarray, u: np.ndarray) -> np.ndarray:
        # <p - focus, J(u)>
        return (p[..., 0] - focus[0]) * (-u[..., 1]) + (p[..., 1] - focus[1]) * u[..., 0]

    return q


_QUANTITIES: dict[str, Quantity] = {
    "axis_crossing": lambda p, u: p[..., 0],
    "vertical_tangent": lambda p, u: u[..., 0],
    "horizontal_tangent": lambda p, u: u[..., 1],
    "tangent_through_focus": _focus_quantity(FOCUS),
}


def _scan(
    c: SampledCurve,
    kind: str,
    quantity: Quantity,
    param_tol: float = 1e-12,
    merge_tol: float = 1e-7,
    label: str = "",
) -> list[FeatureEvent]:
    vals = quantity(c.p, c.u)
    events: list[FeatureEvent] = []
    n = len(c)
    gap_after = set()
    for a, b in c.gaps:
        gap_after.add(int(np.searchsorted(c.t, a, side="right")) - 1)

    def at(t: float, ref) -> tuple[float, FramedPoint]:
        fp = c.frame_near(t, ref)
        v = float(quantity(np.array(fp.p), np.array(fp.u)))
        return v, fp

    for i in range(n):
        v = vals[i]
        if v == 0.0:
            if 0 < i < n - 1:
                mult = 1 if vals[i - 1] * vals[i + 1] < 0 else 2
            else:
                mult = 1
            loc = (float(c.p[i, 0]) + 0.0, float(c.p[i, 1]) + 0.0)
            tan = (float(c.u[i, 0]), float(c.u[i, 1]))
            events.append(FeatureEvent(kind, (float(c.t[i]),), loc, (tan,), mult, 0.0, label))
            continue
        if i + 1 >= n or i in gap_after:
            continue
        w = vals[i + 1]
        if v * w >= 0.0 or w == 0.0:
            continue
        lo, hi = float(c.t[i]), float(c.t[i + 1])
        vlo = v
        ref = c.u[i]
        fp_mid = None
        if c.source is None:
            # linear interpolation on a bare polyline
            s = v / (v - w)
            tm = lo + s * (hi - lo)
            pm = c.p[i] + s * (c.p[i + 1] - c.p[i])
            um = c.u[i] + s * (c.u[i + 1] - c.u[i])
            um = um / np.linalg.norm(um)
            events.append(FeatureEvent(kind, (tm,), tuple(map(float, pm)), (tuple(map(float, um)),), 1, 0.0, label))
            continue
        vm = vlo
        while hi - lo > param_tol:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            vm, fp_mid = at(mid, ref)
            if vm == 0.0:
                lo = hi = mid
                break
            if (vm > 0) == (vlo > 0):
                lo, vlo = mid, vm
                ref = fp_mid.u
            else:
                hi = mid
        tm = 0.5 * (lo + hi)
        vm, fp_mid = at(tm, ref)
        events.append(
            FeatureEvent(kind, (tm,), fp_mid.p, (fp_mid.u,), 1, abs(vm), label)
        )
    return _merge(events, merge_tol)


def _merge(events: list[FeatureEvent], tol: float) -> list[FeatureEvent]:
    events.sort(key=lambda e: e.params[0])
    out: list[FeatureEvent] = []
    for e in events:
        if out and e.params[0] - out[-1].params[0] < tol:
            prev = out[-1]
            out[-1] = FeatureEvent(
                prev.kind, prev.params, prev.location, prev.tangent_dirs,
                prev.multiplicity + e.multiplicity, max(prev.residual, e.residual), prev.label,
            )
            continue
        out.append(e)
    return out


def find_tangent_events(c: SampledCurve, **kw) -> list[FeatureEvent]:
    """Vertical and horizontal tangent events, ordered by parameter."""
    ev = _scan(c, "vertical_tangent", _QUANTITIES["vertical_tangent"], **kw)
    ev += _scan(c, "horizontal_tangent", _QUANTITIES["horizontal_tangent"], **kw)
    return sorted(ev, key=lambda e: (e.params[0], e.kind))


def find_axis_crossings(c: SampledCurve, **kw) -> list[FeatureEvent]:
    """Crossings of the y-axis (sign changes of the x coordinate)."""
    return _scan(c, "axis_crossing", _QUANTITIES["axis_crossing"], **kw)


def find_line_crossings(c: SampledCurve, level: float, **kw) -> list[FeatureEvent]:
    """Crossings of the horizontal line ``y = level``."""
    return _scan(c, "line_crossing", lambda p, u: p[..., 1] - level, label=f"y={level:g}", **kw)


def find_tangent_through_focus(
    c: SampledCurve, focus: tuple[float, float] = FOCUS, **kw
) -> list[FeatureEvent]:
    """Parameters whose tangent line passes through ``focus``.

    With the default focus these are exactly the parameters that the next
    Theta step sends to ``(0, -1)``.
    """
    return _scan(c, "tangent_through_focus", _focus_quantity(focus), **kw)


# -- self-intersections -----------------------------------------------------------


def _segment_hits(p: np.ndarray) -> list[tuple[int, int]]:
    """Index pairs ``(i, j)``, ``j > i + 1``, of properly crossing segments."""
    a = p[:-1]
    b = p[1:]
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    d = b - a
    hits: list[tuple[int, int]] = []
    m = len(a)
    for i in range(m - 2):
        j0 = i + 2
        cand = (
            (lo[j0:, 0] <= hi[i, 0]) & (hi[j0:, 0] >= lo[i, 0])
            & (lo[j0:, 1] <= hi[i, 1]) & (hi[j0:, 1] >= lo[i, 1])
        )
        idx = np.nonzero(cand)[0]
        if not len(idx):
            continue
        js = idx + j0
        # orientation tests
        di = d[i]
        o1 = di[0] * (a[js, 1] - a[i, 1]) - di[1] * (a[js, 0] - a[i, 0])
        o2 = di[0] * (b[js, 1] - a[i, 1]) - di[1] * (b[js, 0] - a[i, 0])
        dj = d[js]
        o3 = dj[:, 0] * (a[i, 1] - a[js, 1]) - dj[:, 1] * (a[i, 0] - a[js, 0])
        o4 = dj[:, 0] * (b[i, 1] - a[js, 1]) - dj[:, 1] * (b[i, 0] - a[js, 0])
        ok = (o1 * o2 < 0) & (o3 * o4 < 0)
        hits.extend((i, int(j)) for j in js[ok])
    return hits


def _intersect(p1, p2, q1, q2) -> tuple[float, float] | None:
    d1 = (p2[0] - p1[0], p2[1] - p1[1])
    d2 = (q2[0] - q1[0], q2[1] - q1[1])
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if den == 0.0:
        return None
    rx, ry = q1[0] - p1[0], q1[1] - p1[1]
    s = (rx * d2[1] - ry * d2[0]) / den
    r = (rx * d1[1] - ry * d1[0]) / den
    return s, r


def _refine_crossing(c: SampledCurve, i: int, j: int, tol: float, max_iter: int = 200):
    """Shrink both parameter brackets around a polyline crossing."""
    a0, a1 = float(c.t[i]), float(c.t[i + 1])
    b0, b1 = float(c.t[j]), float(c.t[j + 1])
    pa0, pa1 = tuple(c.p[i]), tuple(c.p[i + 1])
    pb0, pb1 = tuple(c.p[j]), tuple(c.p[j + 1])
    ua, ub = c.u[i], c.u[j]
    for _ in range(max_iter):
        if max(a1 - a0, b1 - b0) <= tol:
            break
        am, bm = 0.5 * (a0 + a1), 0.5 * (b0 + b1)
        fa = c.frame_near(am, ua)
        fb = c.frame_near(bm, ub)
        sides_a = [((a0, pa0), (am, fa.p)), ((am, fa.p), (a1, pa1))]
        sides_b = [((b0, pb0), (bm, fb.p)), ((bm, fb.p), (b1, pb1))]
        best = None
        for sa in sides_a:
            for sb in sides_b:
                sr = _intersect(sa[0][1], sa[1][1], sb[0][1], sb[1][1])
                if sr is None:
                    continue
                s, r = sr
                # distance outside [0, 1] on either segment; 0 for a proper hit
                out = max(0.0, -s, s - 1.0) + max(0.0, -r, r - 1.0)
                if best is None or out < best[0]:
                    best = (out, sa, sb)
        if best is None:
            break
        _, sa, sb = best
        (a0, pa0), (a1, pa1) = sa
        (b0, pb0), (b1, pb1) = sb
        ua, ub = fa.u, fb.u
    sr = _intersect(pa0, pa1, pb0, pb1)
    s, r = sr if sr is not None else (0.5, 0.5)
    ta = a0 + s * (a1 - a0)
    tb = b0 + r * (b1 - b0)
    fa = c.frame_near(ta, ua)
    fb = c.frame_near(tb, ub)
    loc = (0.5 * (fa.p[0] + fb.p[0]), 0.5 * (fa.p[1] + fb.p[1]))
    gap = math.hypot(fa.p[0] - fb.p[0], fa.p[1] - fb.p[1])
    return ta, tb, loc, fa.u, fb.u, gap


def find_self_intersections(c: SampledCurve, param_tol: float = 1e-13) -> list[FeatureEvent]:
    """Transverse self-crossings of the traced polyline, refined on the chain."""
    events = []
    for i, j in _segment_hits(c.p):
        if c.source is None:
            sr = _intersect(c.p[i], c.p[i + 1], c.p[j], c.p[j + 1])
            s, r = sr
            ta = c.t[i] + s * (c.t[i + 1] - c.t[i])
            tb = c.t[j] + r * (c.t[j + 1] - c.t[j])
            loc = tuple(map(float, c.p[i] + s * (c.p[i + 1] - c.p[i])))
            events.append(FeatureEvent("self_intersection", (float(ta), float(tb)), loc,
                                       (tuple(c.u[i]), tuple(c.u[j]))))
            continue
        ta, tb, loc, ua, ub, gap = _refine_crossing(c, i, j, param_tol)
        events.append(FeatureEvent("self_intersection", (ta, tb), loc, (ua, ub), 1, gap))
    events.sort(key=lambda e: e.params)
    return events


def events_sorted(events: Iterable[FeatureEvent]) -> list[FeatureEvent]:
    return sorted(events, key=lambda e: e.params[0])
