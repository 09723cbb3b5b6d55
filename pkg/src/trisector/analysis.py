"""Verifications built on the solver and the geometry kernel.

* the y-axis crossing census of the conjugate curve with its interleaved
  horizontal/vertical tangent points,
* local minima of the squared distance from a point to a traced curve,
* the exact annihilator search for low-degree polynomial relations,
* an independent envelope solver used as an oracle for the closed form.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .field import ONE, ZERO, Qs3
from .geometry import (
    FramedPoint,
    SampledCurve,
    find_axis_crossings,
    find_line_crossings,
    find_tangent_events,
)
from .linalg import matvec, nullspace, rref
from .series import TruncSeries
from .solver import BranchSolution

__all__ = [
    "Check",
    "CensusReport",
    "crossing_census",
    "distance_profile",
    "golden_section",
    "AnnihilatorResult",
    "annihilator_rank",
    "jet_matrix",
    "synthetic_control",
    "relation_in_span",
    "envelope_oracle",
    "NonRegularError",
]

INSUFFICIENT = "insufficient trace"


# -- census -----------------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass
class CensusReport:
    depth: int
    crossings: list[tuple[float, float]]
    horizontals: list[tuple[float, tuple[float, float]]]
    verticals: list[tuple[float, tuple[float, float]]]
    focus_line_points: list[tuple[float, tuple[float, float], float]]
    checks: list[Check] = field(default_factory=list)
    verdict: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "verdict": self.verdict,
            "crossings": [list(c) for c in self.crossings],
            "horizontals": [[u, list(p)] for u, p in self.horizontals],
            "verticals": [[s, list(p)] for s, p in self.verticals],
            "focus_line_points": [[r, list(p), lv] for r, p, lv in self.focus_line_points],
            "checks": [asdict(c) for c in self.checks],
        }


def crossing_census(c: SampledCurve, depth: int = 2) -> CensusReport:
    """Harvest C_n, H_n, V_n, P_n on ``t >= 0`` and check their interleaving.

    C_n are y-axis crossings, H_n horizontal and V_n vertical tangent points,
    P_n crossings of the lines ``y = 1`` and ``y = -1``.  The quadruple checks
    ``t_n < u_n < s_n < t_{n+1}`` run for ``n < depth``; the first quadruple
    is allowed ``t_0 = u_0`` since the curve starts on the axis with a
    horizontal tangent.  Growth of V_n and H_n is checked as a doubling ratio
    on absolute values.
    """
    half = c.restrict(0.0, float(c.t[-1]))
    cross = find_axis_crossings(half)
    tang = find_tangent_events(half)
    hor = [e for e in tang if e.kind == "horizontal_tangent"]
    ver = [e for e in tang if e.kind == "vertical_tangent"]
    lines = sorted(
        find_line_crossings(half, 1.0) + find_line_crossings(half, -1.0),
        key=lambda e: e.params[0],
    )

    C = [(e.params[0], e.location[1]) for e in cross]
    H = [(e.params[0], e.location) for e in hor]
    V = [(e.params[0], e.location) for e in ver]
    P = [(e.params[0], e.location, 1.0 if e.label == "y=1" else -1.0) for e in lines]
    report = CensusReport(depth, C, H, V, P)
    checks = report.checks
    complete = True

    # crossings C_0 .. C_depth
    if len(C) < depth + 1:
        complete = False
    for n in range(min(len(C), depth + 1)):
        y = C[n][1]
        want = 1 if n % 2 == 0 else -1
        checks.append(Check(f"sign_alternation[{n}]", (y > 0) - (y < 0) == want, abs(y),
                            f"y(t_{n}) = {y:.6g}"))
        if n >= 1:
            bound = 2.0 ** (n - 1)
            gap = abs(y - 1.0) - bound
            checks.append(Check(f"distance_from_one[{n}]", gap >= 0, gap,
                                f"|y(t_{n}) - 1| = {abs(y - 1.0):.6g} >= {bound:g}"))
        if n + 1 < min(len(C), depth + 1):
            y2 = C[n + 1][1]
            gap = abs(y2) - abs(y)
            checks.append(Check(f"crossing_growth[{n}]", gap > 0, gap,
                                f"|y(t_{n})| = {abs(y):.6g} < |y(t_{n + 1})| = {abs(y2):.6g}"))
    if len(C) > 2 and depth >= 2:
        gap = abs(C[2][1]) - 3.0
        checks.append(Check("crossing_2_beyond_3", gap > 0, gap, f"|y(t_2)| = {abs(C[2][1]):.6g}"))
    if len(H) > 1 and depth >= 1:
        gap = abs(H[1][1][1]) - 1.0
        checks.append(Check("horizontal_1_beyond_1", gap > 0, gap, f"|y(u_1)| = {abs(H[1][1][1]):.6g}"))

    # quadruples t_n < u_n < s_n < t_{n+1}
    for n in range(depth):
        if n + 1 >= len(C) or n >= len(H) or n >= len(V):
            complete = False
            break
        tn, un, sn, tn1 = C[n][0], H[n][0], V[n][0], C[n + 1][0]
        first_ok = tn <= un if n == 0 else tn < un
        ok = first_ok and un < sn < tn1
        margin = min(un - tn, sn - un, tn1 - sn)
        checks.append(Check(f"interleaving[{n}]", ok, margin,
                            f"t={tn:.6g} u={un:.6g} s={sn:.6g} t'={tn1:.6g}"))

    # doubling of |x(s_n)| and |y(u_n)|
    for n in range(depth - 1):
        if n + 1 >= len(V) or n + 1 >= len(H):
            complete = False
            break
        x0, x1 = abs(V[n][1][0]), abs(V[n + 1][1][0])
        checks.append(Check(f"vertical_doubling[{n}]", x1 > 2 * x0, x1 - 2 * x0,
                            f"|x(s_{n + 1})| = {x1:.6g} vs 2|x(s_{n})| = {2 * x0:.6g}"))
        y0, y1 = abs(H[n][1][1]), abs(H[n + 1][1][1])
        checks.append(Check(f"horizontal_doubling[{n}]", y1 > 2 * y0, y1 - 2 * y0,
                            f"|y(u_{n + 1})| = {y1:.6g} vs 2|y(u_{n})| = {2 * y0:.6g}"))

    if not all(ch.passed for ch in checks):
        report.verdict = "fail"
    elif not complete:
        report.verdict = INSUFFICIENT
    else:
        report.verdict = "pass"
    return report


# -- distance profile -------------------------------------------------------------


GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """Minimizer of a unimodal ``f`` on ``[a, b]`` to within ``tol``."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def distance_profile(
    q: Sequence[float], c: SampledCurve, tol: float = 1e-10
) -> list[tuple[float, float]]:
    """Interior local minima of ``t -> |q - c(t)|^2``, sorted by parameter."""
    qx, qy = float(q[0]), float(q[1])
    d2 = (c.p[:, 0] - qx) ** 2 + (c.p[:, 1] - qy) ** 2

    def at(t: float) -> float:
        if c.source is None:
            x = np.interp(t, c.t, c.p[:, 0])
            y = np.interp(t, c.t, c.p[:, 1])
        else:
            fp = c.source.frame(t)
            x, y = fp.p
        return (x - qx) ** 2 + (y - qy) ** 2

    out = []
    for i in range(1, len(c) - 1):
        if d2[i] < d2[i - 1] and d2[i] <= d2[i + 1]:
            t = golden_section(at, float(c.t[i - 1]), float(c.t[i + 1]), tol)
            out.append((t, at(t)))
    return out


# -- annihilator ------------------------------------------------------------------


@dataclass
class AnnihilatorResult:
    degree: int
    jet_length: int
    unknowns: int
    rank: int
    nullity: int
    basis: list[dict[tuple[int, int], Qs3]]
    shift: Fraction = Fraction(1, 3)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "jet_length": self.jet_length,
            "unknowns": self.unknowns,
            "rank": self.rank,
            "nullity": self.nullity,
            "shift": str(self.shift),
            "basis": [
                {f"{i},{j}": v.to_string() for (i, j), v in sorted(b.items()) if v}
                for b in self.basis
            ],
        }


def monomials(D: int) -> list[tuple[int, int]]:
    """Exponent pairs ``(i, j)`` with ``i + j <= D``, graded."""
    return [(i, d - i) for d in range(D + 1) for i in range(d, -1, -1)]


def jet_matrix(
    y: TruncSeries, D: int, K: int, shift: Fraction | Qs3 = Fraction(1, 3)
) -> tuple[list[list[Qs3]], list[tuple[int, int]]]:
    """Rows ``k = 0..K``; column ``(i, j)`` holds ``[x^k] x^i (y - shift)^j``."""
    if y.order < K:
        raise ValueError(f"series of order {y.order} is too short for {K + 1} jet rows")
    base = y.truncate(K) - Qs3.coerce(shift)
    powers = [TruncSeries.constant(ONE, K)]
    for _ in range(D):
        powers.append(powers[-1] * base)
    cols = monomials(D)
    columns = [powers[j].shift(i).coeffs for i, j in cols]
    rows = [[col[k] for col in columns] for k in range(K + 1)]
    return rows, cols


def annihilator_rank(
    f: BranchSolution | TruncSeries,
    D: int,
    K: int | None = None,
    shift: Fraction | Qs3 = Fraction(1, 3),
) -> AnnihilatorResult:
    """Exact search for ``P`` of total degree ``<= D`` with ``P(x, f(x)) = O(x^(K+1))``.

    ``P`` is written in the basis ``x^i (y - shift)^j``.  A zero nullity rules
    out every such relation on the first ``K + 1`` jet conditions.
    """
    y = f.f_series if isinstance(f, BranchSolution) else f
    shift_q = Qs3.coerce(shift)
    if not shift_q.is_rational():
        raise ValueError("the basis shift must be rational")
    M = (D + 1) * (D + 2) // 2
    if K is None:
        K = M + 10
    if y.order < K:
        raise ValueError(
            f"degree {D} needs the series through x^{K}; solve to order >= {K + (K % 2)}"
        )
    rows, cols = jet_matrix(y, D, K, shift)
    rank, basis = nullspace(rows, len(cols))
    for v in basis:
        if any(matvec(rows, v)):
            raise ArithmeticError("null space vector fails the jet conditions")
    named = [dict(zip(cols, v)) for v in basis]
    return AnnihilatorResult(D, K, M, rank, len(basis), named, shift_q.a)


def relation_in_span(relation: dict[tuple[int, int], Qs3], result: AnnihilatorResult) -> bool:
    """True when ``relation`` is an exact combination of the null space basis."""
    cols = monomials(result.degree)
    target = [Qs3.coerce(relation.get(c, ZERO)) for c in cols]
    if not result.basis:
        return not any(target)
    vecs = [[b[c] for c in cols] for b in result.basis]
    r0 = len(rref(vecs)[1])
    r1 = len(rref(vecs + [target])[1])
    return r0 == r1


def _random_q3(rng: random.Random, span: int = 5) -> Qs3:
    return Qs3(Fraction(rng.randint(-span, span), rng.randint(1, span)),
               Fraction(rng.randint(-span, span), rng.randint(1, span)))


def synthetic_control(
    rng: random.Random, D: int, K: int
) -> tuple[TruncSeries, dict[tuple[int, int], Qs3], Fraction]:
    """A series with a known relation of total degree exactly ``D``.

    The relation is ``-Y + C(x) + A(x) Y^2 + B(x) Y^3 = 0`` with
    ``Y = y - shift`` and ``C(0) = 0``; its unique power-series root is found
    by fixed-point iteration, one exact order per sweep.
    """
    shift = Fraction(rng.randint(-3, 3), rng.randint(1, 4))
    rel: dict[tuple[int, int], Qs3] = {(0, 1): Qs3(-1)}
    for i in range(1, D + 1):
        rel[(i, 0)] = _random_q3(rng)
    if D >= 2:
        for i in range(0, D - 1):
            rel[(i, 2)] = _random_q3(rng)
    if D >= 3 and rng.random() < 0.5:
        for i in range(0, D - 2):
            rel[(i, 3)] = _random_q3(rng)
    # force total degree D through the pure-x term
    while not rel[(D, 0)]:
        rel[(D, 0)] = _random_q3(rng)

    def poly(j: int) -> TruncSeries:
        return TruncSeries([rel.get((i, j), ZERO) for i in range(D + 1)], K)

    C, A, B = poly(0), poly(2), poly(3)
    Y = TruncSeries.zero(K)
    for _ in range(K + 1):
        Y2 = Y * Y
        Y = C + A * Y2 + B * (Y2 * Y)
    y = Y + Qs3(shift)
    return y, rel, shift


# -- envelope oracle --------------------------------------------------------------


class NonRegularError(ValueError):
    """Both derivative components vanish."""


def envelope_oracle(
    fp: FramedPoint,
    local_curve: Callable[[float], tuple[float, float, float, float]],
) -> tuple[float, float]:
    """Envelope point from the circle equation and its t-derivative.

    ``local_curve(t)`` returns ``(a, b, a', b')``.  With
    ``F = -1 + x^2 + y^2 - 2 x a - 2 (y - 1) b`` and ``F_t = 0`` linear in
    ``x, y``, one variable is eliminated and the remaining quadratic solved;
    its root at the focus ``(0, 1)`` is discarded.
    """
    a, b, da, db = local_curve(fp.t)
    if da == 0.0 and db == 0.0:
        raise NonRegularError(f"curve is not regular at t={fp.t}")

    def F_coeffs_in_y(r: float) -> tuple[float, float, float]:
        # x = (1 - y) r ;  F = -1 + (1-y)^2 r^2 + y^2 - 2 (1-y) r a - 2 (y-1) b
        c2 = r * r + 1.0
        c1 = -2.0 * r * r + 2.0 * r * a - 2.0 * b
        c0 = -1.0 + r * r - 2.0 * r * a + 2.0 * b
        return c2, c1, c0

    def F_coeffs_in_x(s: float) -> tuple[float, float, float]:
        # y = 1 - x s ;  F = -1 + x^2 + (1 - x s)^2 - 2 x a + 2 x s b
        c2 = 1.0 + s * s
        c1 = -2.0 * s - 2.0 * a + 2.0 * s * b
        c0 = 0.0
        return c2, c1, c0

    if abs(da) >= abs(db):
        r = db / da
        c2, c1, c0 = F_coeffs_in_y(r)
        # y = 1 is always a root (the focus); the other is c0 / c2 by Vieta
        y = c0 / c2
        return ((1.0 - y) * r, y)
    s = da / db
    c2, c1, _ = F_coeffs_in_x(s)
    x = -c1 / c2  # the other root is x = 0
    return (x, 1.0 - x * s)
