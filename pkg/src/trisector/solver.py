"""Order-by-order Taylor solution of the trisector functional equations.

The curve is the graph of an even function ``f`` with ``f(0) = 1/3`` and the
reparametrization ``t(x)`` is odd.  Both must satisfy, identically in ``x``::

    (t - x)^2 + (f(t) + f(x))^2 - x^2 - (f(x) - 1)^2 = 0
    t - x + (f(x) + f(t)) f'(t) = 0

The lowest orders give a nonlinear system for ``lambda = t'(0)`` and
``m2 = f''(0)/2`` with two conjugate roots; every later pair
``(m_{2j}, lambda_{2j-1})`` solves a 2x2 linear system over Q(sqrt3).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .field import ONE, ZERO, Qs3, Qs3Like
from .series import TruncSeries

__all__ = [
    "Branch",
    "BranchSolution",
    "SingularSystemError",
    "seed_solutions",
    "seed_equations",
    "solve_branch",
    "conjugate_solution",
    "residual_orders",
    "residuals_vanish",
    "branch_determinant_floats",
]

log = logging.getLogger(__name__)

THIRD = Fraction(1, 3)


class Branch(str, Enum):
    TRISECTOR = "trisector"
    CONJUGATE = "conjugate"

    def other(self) -> Branch:
        return Branch.CONJUGATE if self is Branch.TRISECTOR else Branch.TRISECTOR


class SingularSystemError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BranchSolution:
    branch: Branch
    f_series: TruncSeries
    t_series: TruncSeries
    order: int
    # keyed by the index k of the f-coefficient m_k fixed at that step
    determinants: dict[int, Qs3] = field(default_factory=dict)
    seed: tuple[Qs3, Qs3] = (ZERO, ZERO)

    @property
    def m(self) -> tuple[Qs3, ...]:
        return self.f_series.coeffs

    @property
    def lam(self) -> tuple[Qs3, ...]:
        return self.t_series.coeffs

    def to_json(self) -> dict:
        return {
            "branch": self.branch.value,
            "order": self.order,
            "seed": {"lambda": self.seed[0].to_string(), "q2": self.seed[1].to_string()},
            "f": self.f_series.to_json(),
            "t": self.t_series.to_json(),
            "determinants": {str(k): d.to_string() for k, d in sorted(self.determinants.items())},
        }


# -- seed ---------------------------------------------------------------------


def seed_equations(lam: Qs3Like, q2: Qs3Like) -> tuple[Qs3, Qs3]:
    """Left-hand sides of the two lowest-order equations for ``(lambda, q2)``."""
    lam = Qs3.coerce(lam)
    q2 = Qs3.coerce(q2)
    e1 = lam - 1 + Fraction(4, 3) * lam * q2
    e2 = lam * lam - 2 * lam + Fraction(4, 3) * (lam * lam + 2) * q2
    return e1, e2


def _sqrt_rational(r: Fraction) -> Qs3:
    """Square root of a non-negative rational inside Q(sqrt3), if it exists."""
    from math import isqrt

    def exact_sqrt(q: Fraction) -> Fraction | None:
        n, d = q.numerator, q.denominator
        rn, rd = isqrt(n), isqrt(d)
        if rn * rn == n and rd * rd == d:
            return Fraction(rn, rd)
        return None

    if r < 0:
        raise ValueError("negative discriminant")
    s = exact_sqrt(r)
    if s is not None:
        return Qs3(s, 0)
    s = exact_sqrt(r / 3)
    if s is not None:
        return Qs3(0, s)
    raise ValueError(f"sqrt({r}) is not in Q(sqrt3)")


def seed_solutions() -> tuple[tuple[Qs3, Qs3], tuple[Qs3, Qs3]]:
    """Both exact roots ``(lambda, q2)``; the trisector (convex) root first.

    The first equation gives ``q2 = 3 (1 - lambda) / (4 lambda)``; putting it
    into the second and clearing ``lambda`` leaves ``lambda^2 + 2 lambda - 2 = 0``.
    """
    a, b, c = Fraction(1), Fraction(2), Fraction(-2)
    root = _sqrt_rational(b * b - 4 * a * c)
    out = []
    for s in (1, -1):
        lam = (Qs3(-b) + s * root) / (2 * a)
        q2 = 3 * (1 - lam) / (4 * lam)
        out.append((lam, q2))
    return out[0], out[1]


# -- affine coefficients ------------------------------------------------------


class _Affine:
    """``c + u*U + v*V`` for the two unknowns of the current step."""

    __slots__ = ("c", "u", "v")

    def __init__(self, c: Qs3 = ZERO, u: Qs3 = ZERO, v: Qs3 = ZERO) -> None:
        self.c, self.u, self.v = c, u, v

    def is_const(self) -> bool:
        return not self.u and not self.v

    def __add__(self, o: _Affine) -> _Affine:
        return _Affine(self.c + o.c, self.u + o.u, self.v + o.v)

    def __sub__(self, o: _Affine) -> _Affine:
        return _Affine(self.c - o.c, self.u - o.u, self.v - o.v)

    def __mul__(self, o: _Affine) -> _Affine:
        if self.is_const():
            k = self.c
            return _Affine(k * o.c, k * o.u, k * o.v)
        if o.is_const():
            k = o.c
            return _Affine(k * self.c, k * self.u, k * self.v)
        # a genuine quadratic term would mean the schedule is wrong
        raise ArithmeticError("unknowns entered a coefficient nonlinearly")

    def scale(self, k: Qs3Like) -> _Affine:
        return _Affine(self.c * k, self.u * k, self.v * k)

    def value(self, U: Qs3, V: Qs3) -> Qs3:
        return self.c + self.u * U + self.v * V


_A0 = _Affine()


def _const(x: Qs3) -> _Affine:
    return _Affine(x)


def _conv(a: list[_Affine], b: list[_Affine], n: int) -> _Affine:
    acc = _A0
    for i in range(n + 1):
        x, y = a[i], b[n - i]
        if (x.is_const() and not x.c) or (y.is_const() and not y.c):
            continue
        acc = acc + x * y
    return acc


# -- recursion ----------------------------------------------------------------


def solve_branch(branch: Branch | str, order: int) -> BranchSolution:
    """Exact Taylor coefficients of ``f`` and ``t`` through ``x**order``.

    At step ``j`` the unknowns ``m_{2j}`` and ``lambda_{2j-1}`` are carried
    as affine symbols through the coefficient of ``x**(2j)`` in the first
    residual and of ``x**(2j-1)`` in the second.  Those two coefficients are
    the lowest ones still undetermined; together they form the linear
    system whose determinant is recorded under key ``2j``.
    """
    branch = Branch(branch)
    if order < 2 or order % 2:
        raise ValueError(f"order must be an even integer >= 2, got {order}")
    roots = seed_solutions()
    lam1, q2 = roots[0] if branch is Branch.TRISECTOR else roots[1]

    K = order
    m: list[_Affine] = [_A0] * (K + 2)
    lam: list[_Affine] = [_A0] * (K + 2)
    m[0] = _const(Qs3(THIRD))
    m[2] = _const(q2)
    lam[1] = _const(lam1)

    # pw[k][n]: coefficient of x^n in t(x)^k
    pw: list[list[_Affine]] = [[_A0] * (K + 1) for _ in range(K + 1)]
    pw[0][0] = _const(ONE)

    def fill_column(n: int) -> None:
        pw[1][n] = lam[n]
        for k in range(2, n + 1):
            acc = _A0
            # t^k = t * t^(k-1); t has only odd powers, t^(k-1) starts at k-1
            for i in range(1, n - k + 2, 2):
                rest = pw[k - 1][n - i]
                if rest.is_const() and not rest.c:
                    continue
                acc = acc + lam[i] * rest
            pw[k][n] = acc

    fill_column(1)
    fill_column(2)

    determinants: dict[int, Qs3] = {}
    for j in range(2, K // 2 + 1):
        n_hi, n_lo = 2 * j, 2 * j - 1
        m[n_hi] = _Affine(ZERO, ONE, ZERO)
        lam[n_lo] = _Affine(ZERO, ZERO, ONE)
        fill_column(n_lo)
        fill_column(n_hi)

        r1, r2 = _residual_coefficients(m, lam, pw, n_hi, n_lo)
        a11, a12, b1 = r1.u, r1.v, -r1.c
        a21, a22, b2 = r2.u, r2.v, -r2.c
        det = a11 * a22 - a12 * a21
        if not det:
            raise SingularSystemError(f"singular system at order {n_hi} ({branch.value})")
        U = (b1 * a22 - a12 * b2) / det
        V = (a11 * b2 - a21 * b1) / det
        determinants[n_hi] = det
        log.debug("step %d: det=%s", n_hi, det)

        m[n_hi] = _const(U)
        lam[n_lo] = _const(V)
        for n in (n_lo, n_hi):
            for k in range(n + 1):
                cell = pw[k][n]
                if not cell.is_const():
                    pw[k][n] = _const(cell.value(U, V))

    f_series = TruncSeries([c.c for c in m[: K + 1]], K)
    t_series = TruncSeries([c.c for c in lam[: K + 1]], K)
    return BranchSolution(branch, f_series, t_series, K, determinants, (lam1, q2))


def _residual_coefficients(m, lam, pw, n_hi: int, n_lo: int) -> tuple[_Affine, _Affine]:
    N = n_hi
    one = _const(ONE)
    # coefficients of f(t(x)) and f'(t(x)) = sum_k (k+1) m_{k+1} t^k
    ft: list[_Affine] = []
    fpt: list[_Affine] = []
    for n in range(N + 1):
        acc = m[0] if n == 0 else _A0
        for k in range(2, n + 1, 2):
            acc = acc + m[k] * pw[k][n]
        accp = _A0
        for k in range(1, n + 1, 2):
            accp = accp + m[k + 1].scale(k + 1) * pw[k][n]
        ft.append(acc)
        fpt.append(accp)
    S = [ft[n] + m[n] for n in range(N + 1)]
    tau = [lam[n] - (one if n == 1 else _A0) for n in range(N + 1)]
    g = [m[n] - (one if n == 0 else _A0) for n in range(N + 1)]

    r1 = _conv(tau, tau, n_hi) + _conv(S, S, n_hi) - _conv(g, g, n_hi)
    if n_hi == 2:
        r1 = r1 - one
    r2 = tau[n_lo] + _conv(S, fpt, n_lo)
    return r1, r2


# -- derived views ------------------------------------------------------------


def conjugate_solution(sol: BranchSolution) -> BranchSolution:
    """Apply sqrt3 -> -sqrt3 to every stored number and swap the branch."""
    return BranchSolution(
        sol.branch.other(),
        sol.f_series.conj(),
        sol.t_series.conj(),
        sol.order,
        {k: d.conj() for k, d in sol.determinants.items()},
        (sol.seed[0].conj(), sol.seed[1].conj()),
    )


def residual_orders(sol: BranchSolution) -> tuple[TruncSeries, TruncSeries]:
    """Both functional-equation residuals, recomputed with generic series ops.

    The first residual is exact through ``x**K``; the second loses one order
    to the derivative and is exact through ``x**(K-1)``.
    """
    f = sol.f_series
    t = sol.t_series
    K = sol.order
    x = TruncSeries.monomial(ONE, 1, K)
    ft = f.compose(t)
    first = (t - x) * (t - x) + (ft + f) * (ft + f) - x * x - (f - 1) * (f - 1)
    fp = f.derive()
    fpt = fp.compose(t.truncate(K - 1))
    second = (t - x).truncate(K - 1) + (f + ft).truncate(K - 1) * fpt
    return first, second


def residuals_vanish(sol: BranchSolution) -> bool:
    first, second = residual_orders(sol)
    return first.is_zero() and second.is_zero()


def branch_determinant_floats(sol: BranchSolution) -> dict[int, float]:
    return {k: float(d) for k, d in sorted(sol.determinants.items())}
