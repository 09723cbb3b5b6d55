"""Exact arithmetic in the quadratic field Q(sqrt 3).

Elements are stored as a pair of reduced rationals ``(a, b)`` meaning
``a + b*sqrt(3)``.  Python's ``Fraction`` keeps both parts canonical, so
equality and hashing are structural.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Union

__all__ = ["Qs3", "ZERO", "ONE", "SQRT3", "Qs3Like"]

Qs3Like = Union["Qs3", int, Fraction]

_TERM_RE = re.compile(
    r"^\s*(?P<a>[+-]?\d+(?:/\d+)?)\s*(?:(?P<b>[+-]\s*\d+(?:/\d+)?)\s*\*\s*sqrt3)?\s*$"
)


class Qs3:
    """The number ``a + b*sqrt(3)`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a: Rational | int = 0, b: Rational | int = 0) -> None:
        self.a = a if type(a) is Fraction else Fraction(a)
        self.b = b if type(b) is Fraction else Fraction(b)

    @classmethod
    def coerce(cls, x: Qs3Like) -> Qs3:
        if isinstance(x, Qs3):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x, 0)
        raise TypeError(f"cannot convert {type(x).__name__} to Qs3")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: Qs3Like) -> Qs3:
        if isinstance(other, Qs3):
            return Qs3(self.a + other.a, self.b + other.b)
        if isinstance(other, (int, Fraction)):
            return Qs3(self.a + other, self.b)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other: Qs3Like) -> Qs3:
        if isinstance(other, Qs3):
            return Qs3(self.a - other.a, self.b - other.b)
        if isinstance(other, (int, Fraction)):
            return Qs3(self.a - other, self.b)
        return NotImplemented

    def __rsub__(self, other: Qs3Like) -> Qs3:
        if isinstance(other, (int, Fraction)):
            return Qs3(other - self.a, -self.b)
        return NotImplemented

    def __mul__(self, other: Qs3Like) -> Qs3:
        if isinstance(other, Qs3):
            a, b, c, d = self.a, self.b, other.a, other.b
            if not b and not d:
                return Qs3(a * c, 0)
            return Qs3(a * c + 3 * b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return Qs3(self.a * other, self.b * other)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self) -> Qs3:
        return Qs3(-self.a, -self.b)

    def __pos__(self) -> Qs3:
        return self

    def norm(self) -> Fraction:
        """Field norm ``a^2 - 3 b^2`` (product with the conjugate)."""
        return self.a * self.a - 3 * self.b * self.b

    def inverse(self) -> Qs3:
        n = self.norm()
        if n == 0:
            # the norm vanishes only at zero since sqrt(3) is irrational
            raise ZeroDivisionError("division by zero in Q(sqrt3)")
        return Qs3(self.a / n, -self.b / n)

    def __truediv__(self, other: Qs3Like) -> Qs3:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt3)")
            return Qs3(self.a / other, self.b / other)
        if isinstance(other, Qs3):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other: Qs3Like) -> Qs3:
        return Qs3.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> Qs3:
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> Qs3:
        """Galois conjugate ``a - b*sqrt(3)``."""
        return Qs3(self.a, -self.b)

    # -- comparison --------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Qs3):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def sign(self) -> int:
        """Exact sign of the real number, decided without floating point."""
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: the larger of a^2 and 3b^2 wins
        n = a * a - 3 * b * b
        return sa if n > 0 else sb

    def __lt__(self, other: Qs3Like) -> bool:
        return (self - Qs3.coerce(other)).sign() < 0

    def __le__(self, other: Qs3Like) -> bool:
        return (self - Qs3.coerce(other)).sign() <= 0

    def __gt__(self, other: Qs3Like) -> bool:
        return (self - Qs3.coerce(other)).sign() > 0

    def __ge__(self, other: Qs3Like) -> bool:
        return (self - Qs3.coerce(other)).sign() >= 0

    def __abs__(self) -> Qs3:
        return -self if self.sign() < 0 else self

    def is_rational(self) -> bool:
        return self.b == 0

    # -- conversion --------------------------------------------------------

    def __float__(self) -> float:
        """Double-precision value of ``a + b*sqrt(3)``, good to about one ulp.

        The number is approximated by an integer multiple of ``2**-k``, with
        ``k`` grown until 64 significant bits are certain; cancellation
        between the two parts therefore cannot lose precision.
        """
        a, b = self.a, self.b
        if not b:
            return float(a)
        k = 64 + max(0, b.denominator.bit_length() - b.numerator.bit_length())
        while True:
            scaled = self._scaled(k)
            # |error| of the scaled value is below 2
            if abs(scaled) >= 1 << 66:
                return float(Fraction(scaled, 1 << k))
            k += 64

    def _scaled(self, k: int) -> int:
        a, b = self.a, self.b
        ia = (a.numerator << k) // a.denominator
        num = (3 * b.numerator * b.numerator) << (2 * k)
        root = math.isqrt(num // (b.denominator * b.denominator))
        return ia + (root if b > 0 else -root)

    def __repr__(self) -> str:
        return f"Qs3({self.a!s}, {self.b!s})"

    def __str__(self) -> str:
        return self.to_string()

    def to_string(self) -> str:
        """Serialize as ``"p/q+r/s*sqrt3"`` with explicit signs.

        Integers are written without a denominator, e.g. ``"2+0*sqrt3"``.
        """
        b = self.b
        sign = "-" if b < 0 else "+"
        return f"{self.a}{sign}{abs(b)}*sqrt3"

    @classmethod
    def parse(cls, text: str) -> Qs3:
        m = _TERM_RE.match(text)
        if m is None:
            raise ValueError(f"not a Q(sqrt3) literal: {text!r}")
        b = m["b"]
        return cls(Fraction(m["a"]), Fraction(b.replace(" ", "")) if b else 0)


ZERO = Qs3(0, 0)
ONE = Qs3(1, 0)
SQRT3 = Qs3(0, 1)
