import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trisector.field import ONE, SQRT3, ZERO, Qs3

small = st.fractions(min_value=-50, max_value=50, max_denominator=60)
elements = st.builds(Qs3, small, small)
nonzero = elements.filter(bool)

S = SQRT3


def test_canonical_form():
    x = Qs3(Fraction(2, -4), Fraction(6, 9))
    assert x.a == Fraction(-1, 2) and x.a.denominator == 2
    assert x == Qs3(Fraction(-1, 2), Fraction(2, 3))
    assert not Qs3(0, 0) and Qs3(0, 1)


def test_arith_examples():
    assert (1 + S) * (-1 + S) == Qs3(2)
    assert Qs3(1) / (1 + S) == (S - 1) / 2
    assert Fraction(3, 8) * (S - 1) + Fraction(3, 8) * (-S - 1) == Qs3(Fraction(-3, 4))
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_conj_examples():
    assert (Fraction(3, 8) * (S - 1)).conj() == Fraction(3, 8) * (-S - 1)
    assert Qs3(Fraction(1, 3)).conj() == Qs3(Fraction(1, 3))
    x = Qs3(Fraction(17, 88), Fraction(10, 88))
    assert x.conj().conj() == x


def test_sign_examples():
    assert (7 - 4 * S).sign() == 1
    assert (-1 - S).sign() == -1
    assert Qs3(0, 0).sign() == 0
    # a case where a float round trip would be ambiguous: 97 - 56 sqrt3 ~ 0.00893
    assert (97 - 56 * S).sign() == 1 and (56 * S - 97).sign() == -1


def test_float_examples():
    assert float(Fraction(3, 8) * (S - 1)) == pytest.approx(0.2745190528383290, abs=1e-15)
    assert float(Fraction(-3, 8) * (1 + S)) == pytest.approx(-1.0245190528383290, abs=1e-15)
    assert float(Qs3(Fraction(1, 3))) == 1 / 3


def test_string_round_trip():
    x = Fraction(-27, 704) * (13 + 7 * S)
    assert x.to_string() == "-351/704-189/704*sqrt3"
    assert Qs3.parse(x.to_string()) == x
    assert Qs3.parse("5") == Qs3(5)


@given(elements, elements, elements)
def test_ring_laws(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@given(nonzero)
def test_inverse(x):
    assert x * (1 / x) == ONE


@given(elements, elements)
def test_conj_is_homomorphism(x, y):
    assert (x * y).conj() == x.conj() * y.conj()
    assert (x + y).conj() == x.conj() + y.conj()


@settings(max_examples=1000)
@given(elements)
def test_sign_times_conj_sign_is_norm_sign(x):
    n = x.norm()
    assert x.sign() * x.conj().sign() == (n > 0) - (n < 0)


@settings(max_examples=300)
@given(elements)
def test_float_within_four_ulp(x):
    naive = float(x.a) + float(x.b) * math.sqrt(3.0)
    got = float(x)
    scale = max(abs(float(x.a)), abs(float(x.b) * math.sqrt(3.0)), abs(got))
    assert abs(got - naive) <= 4 * math.ulp(scale)


@given(elements, elements)
def test_order_agrees_with_floats(x, y):
    if abs(float(x) - float(y)) > 1e-9:
        assert (x < y) == (float(x) < float(y))
