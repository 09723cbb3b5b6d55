"""Truncated power series with exact Q(sqrt3) coefficients."""

from __future__ import annotations

from typing import Iterable

from .field import ONE, ZERO, Qs3, Qs3Like

__all__ = ["TruncSeries"]


class TruncSeries:
    """``sum(c[i] x**i for i in 0..order)``, everything above ``order`` unknown.

    Binary operations truncate to the smaller of the two orders, so a result
    never claims more precision than its inputs carry.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Qs3Like], order: int | None = None) -> None:
        cs = [Qs3.coerce(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("series order must be non-negative")
        if len(cs) > order + 1:
            cs = cs[: order + 1]
        else:
            cs.extend([ZERO] * (order + 1 - len(cs)))
        self.coeffs: tuple[Qs3, ...] = tuple(cs)

    @classmethod
    def zero(cls, order: int) -> TruncSeries:
        return cls([], order)

    @classmethod
    def constant(cls, c: Qs3Like, order: int) -> TruncSeries:
        return cls([c], order)

    @classmethod
    def monomial(cls, c: Qs3Like, power: int, order: int) -> TruncSeries:
        cs: list[Qs3Like] = [ZERO] * (order + 1)
        if power <= order:
            cs[power] = c
        return cls(cs, order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> Qs3:
        return self.coeffs[i]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def truncate(self, order: int) -> TruncSeries:
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {order}")
        return TruncSeries(self.coeffs[: order + 1], order)

    def _lift(self, other) -> TruncSeries:
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries.constant(other, self.order)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> TruncSeries:
        other = self._lift(other)
        k = min(self.order, other.order)
        return TruncSeries([self.coeffs[i] + other.coeffs[i] for i in range(k + 1)], k)

    __radd__ = __add__

    def __sub__(self, other) -> TruncSeries:
        other = self._lift(other)
        k = min(self.order, other.order)
        return TruncSeries([self.coeffs[i] - other.coeffs[i] for i in range(k + 1)], k)

    def __rsub__(self, other) -> TruncSeries:
        return self._lift(other) - self

    def __neg__(self) -> TruncSeries:
        return TruncSeries([-c for c in self.coeffs], self.order)

    def __mul__(self, other) -> TruncSeries:
        if not isinstance(other, TruncSeries):
            c = Qs3.coerce(other)
            return TruncSeries([c * a for a in self.coeffs], self.order)
        k = min(self.order, other.order)
        a = self.coeffs
        b = other.coeffs
        nz_a = [i for i in range(k + 1) if a[i]]
        nz_b = [j for j in range(k + 1) if b[j]]
        out = [ZERO] * (k + 1)
        for i in nz_a:
            ai = a[i]
            for j in nz_b:
                if i + j > k:
                    break
                out[i + j] = out[i + j] + ai * b[j]
        return TruncSeries(out, k)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> TruncSeries:
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = TruncSeries.constant(ONE, self.order)
        for _ in range(n):
            result = result * self
        return result

    def shift(self, n: int) -> TruncSeries:
        """Multiply by ``x**n`` keeping the order."""
        return TruncSeries([ZERO] * n + list(self.coeffs[: self.order + 1 - n]), self.order)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, or None for the zero series."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return None

    # -- calculus ----------------------------------------------------------

    def derive(self) -> TruncSeries:
        if self.order < 1:
            raise ValueError("derivative needs a series of order >= 1")
        return TruncSeries(
            [i * self.coeffs[i] for i in range(1, self.order + 1)], self.order - 1
        )

    def compose(self, inner: TruncSeries) -> TruncSeries:
        """``self(inner(x))`` by Horner's rule in the truncated ring.

        ``inner`` must vanish at the origin; the result has the smaller of
        the two orders.
        """
        if inner.coeffs[0]:
            raise ValueError("composition needs an inner series with zero constant term")
        k = min(self.order, inner.order)
        inner = inner.truncate(k)
        acc = TruncSeries.constant(self.coeffs[k], k)
        for i in range(k - 1, -1, -1):
            acc = acc * inner
            acc = acc + self.coeffs[i]
        return acc

    def conj(self) -> TruncSeries:
        return TruncSeries([c.conj() for c in self.coeffs], self.order)

    # -- numeric bridge ------------------------------------------------------

    def floats(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    def eval_float(self, x0: float) -> float:
        acc = 0.0
        for c in reversed(self.floats()):
            acc = acc * x0 + c
        return acc

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [c.to_string() for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> TruncSeries:
        return cls([Qs3.parse(s) for s in data["coeffs"]], int(data["order"]))

    def __repr__(self) -> str:
        terms = [f"({c})*x^{i}" for i, c in enumerate(self.coeffs) if c]
        body = " + ".join(terms) if terms else "0"
        return f"TruncSeries({body} + O(x^{self.order + 1}))"

