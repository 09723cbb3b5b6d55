from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trisector.field import ONE, SQRT3, Qs3
from trisector.series import TruncSeries

S = SQRT3
K = 6
coef = st.builds(Qs3, st.fractions(-9, 9, max_denominator=9), st.fractions(-9, 9, max_denominator=9))


def series(order=K, zero_constant=False):
    return st.lists(coef, min_size=order + 1, max_size=order + 1).map(
        lambda cs: TruncSeries(([Qs3(0)] + cs[1:]) if zero_constant else cs, order))


def test_examples():
    one_x = TruncSeries([1, 1], 2)
    assert one_x * one_x == TruncSeries([1, 2, 1], 2)
    a = TruncSeries([Fraction(1, 3), 0, -1], 4)
    assert (a - a).is_zero()
    f = TruncSeries([Fraction(1, 3), 0, Fraction(-3, 8) * (1 + S)], 4)
    assert f * TruncSeries.constant(ONE, 4) == f


def test_compose_examples():
    x2 = TruncSeries.monomial(ONE, 2, 4)
    assert x2.compose(TruncSeries([0, 2], 4)) == TruncSeries.monomial(Qs3(4), 2, 4)
    A = TruncSeries([Fraction(1, 3), 0, Fraction(-3, 8) * (1 + S)], 2)
    B = TruncSeries([0, -(1 + S)], 2)
    got = A.compose(B)
    assert got[2] == Fraction(-3, 8) * (10 + 6 * S)
    assert got[0] == Qs3(Fraction(1, 3))
    ident = TruncSeries([0, 1], 4)
    assert f_like().compose(ident) == f_like()
    with pytest.raises(ValueError):
        A.compose(TruncSeries([1, 1], 2))


def f_like():
    return TruncSeries([Fraction(1, 3), 0, Fraction(-3, 8) * (1 + S), 0,
                        Fraction(-27, 704) * (13 + 7 * S)], 4)


def test_derive_examples():
    f = TruncSeries([Fraction(1, 3), 0, Fraction(-3, 8) * (1 + S)], 2)
    assert f.derive() == TruncSeries([0, Fraction(-3, 4) * (1 + S)], 1)
    assert TruncSeries.constant(Qs3(5), 3).derive().is_zero()
    assert TruncSeries.monomial(ONE, 3, 3).derive() == TruncSeries.monomial(Qs3(3), 2, 2)


def test_eval_float_examples():
    f = f_like()
    assert f.eval_float(0.0) == pytest.approx(1 / 3)
    s3 = 3 ** 0.5
    expect = 1 / 3 - 0.375 * (1 + s3) * 0.01 - 27 / 704 * (13 + 7 * s3) * 1e-4
    assert f.eval_float(0.1) == pytest.approx(expect, abs=1e-15)
    assert TruncSeries.zero(3).eval_float(5.0) == 0.0


def test_truncation_follows_weakest_operand():
    a = TruncSeries([1, 1, 1, 1], 3)
    b = TruncSeries([1, 1], 1)
    assert (a * b).order == 1 and (a + b).order == 1


def test_json_round_trip():
    f = f_like()
    assert TruncSeries.from_json(f.to_json()) == f


@settings(max_examples=40)
@given(series(), series(), series())
def test_mul_ring_laws(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=40)
@given(series(), series())
def test_leibniz(a, b):
    assert (a * b).derive() == a.derive() * b.truncate(K - 1) + a.truncate(K - 1) * b.derive()


@settings(max_examples=40)
@given(series(), series(zero_constant=True), series(zero_constant=True))
def test_compose_associative(a, b, c):
    assert a.compose(b).compose(c) == a.compose(b.compose(c))
