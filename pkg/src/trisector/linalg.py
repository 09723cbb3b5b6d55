"""Exact row reduction over Q(sqrt3)."""

from __future__ import annotations

from typing import Sequence

from .field import ONE, ZERO, Qs3


def rref(rows: Sequence[Sequence[Qs3]]) -> tuple[list[list[Qs3]], list[int]]:
    """Reduced row echelon form and the pivot columns.

    Pivots are the first nonzero entry found scanning down a column; with
    exact arithmetic any nonzero pivot is as good as another.
    """
    a = [list(r) for r in rows]
    if not a:
        return a, []
    n_rows, n_cols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for col in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if a[i][col]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][col].inverse()
        a[r] = [x * inv if x else ZERO for x in a[r]]
        for i in range(n_rows):
            if i != r and a[i][col]:
                k = a[i][col]
                row_r = a[r]
                a[i] = [x - k * y if y else x for x, y in zip(a[i], row_r)]
        pivots.append(col)
        r += 1
    return a, pivots


def nullspace(rows: Sequence[Sequence[Qs3]], n_cols: int | None = None) -> tuple[int, list[list[Qs3]]]:
    """Rank and a basis of the right null space.

    Each basis vector has a 1 in its free column and is zero in the other
    free columns.
    """
    if n_cols is None:
        n_cols = len(rows[0])
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    basis = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        v = [ZERO] * n_cols
        v[free] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][free]
        basis.append(v)
    return len(pivots), basis


def matvec(rows: Sequence[Sequence[Qs3]], v: Sequence[Qs3]) -> list[Qs3]:
    out = []
    for row in rows:
        acc = ZERO
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return out
