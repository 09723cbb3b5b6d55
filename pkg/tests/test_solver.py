from dataclasses import replace
from fractions import Fraction

import pytest

from trisector.field import SQRT3, Qs3
from trisector.series import TruncSeries
from trisector.solver import (
    Branch,
    branch_determinant_floats,
    conjugate_solution,
    residual_orders,
    residuals_vanish,
    seed_equations,
    seed_solutions,
    solve_branch,
)

S = SQRT3


def test_seed_roots_exact():
    tri, con = seed_solutions()
    assert tri == (S - 1, Fraction(3, 8) * (S - 1))
    assert con == (-S - 1, Fraction(3, 8) * (-S - 1))
    for lam, q2 in (tri, con):
        assert seed_equations(lam, q2) == (Qs3(0), Qs3(0))


def test_conjugate_checkpoints():
    sol = solve_branch("conjugate", 4)
    assert sol.m[2] == Fraction(-3, 8) * (1 + S)
    assert sol.m[4] == Fraction(-27, 704) * (13 + 7 * S)
    assert sol.lam[1] == -(1 + S)
    assert sol.lam[3] == Fraction(27, 88) * (17 + 10 * S)


def test_trisector_checkpoints():
    sol2 = solve_branch("trisector", 2)
    assert sol2.m[2] == Fraction(3, 8) * (S - 1)
    assert sol2.lam[1] == S - 1
    sol4 = solve_branch("trisector", 4)
    assert sol4.m[4] == Fraction(-27, 704) * (13 - 7 * S)


def test_order_validation():
    for bad in (0, 3, 7):
        with pytest.raises(ValueError):
            solve_branch("conjugate", bad)


def test_parity(sol20):
    for sol in sol20.values():
        assert sol.m[0] == Qs3(Fraction(1, 3))
        assert all(not c for c in sol.m[1::2])
        assert all(not c for c in sol.lam[0::2])


@pytest.mark.parametrize("branch,order", [("conjugate", 4), ("trisector", 8)])
def test_residuals_small(branch, order):
    first, second = residual_orders(solve_branch(branch, order))
    assert first.is_zero() and first.order == order
    assert second.is_zero() and second.order == order - 1


def test_residuals_k20(sol20):
    assert all(residuals_vanish(s) for s in sol20.values())


def test_corrupted_m2_is_detected():
    sol = solve_branch("conjugate", 4)
    coeffs = list(sol.m)
    coeffs[2] = coeffs[2] + 1
    bad = replace(sol, f_series=TruncSeries(coeffs, 4))
    first, _ = residual_orders(bad)
    assert first[2] != 0


def test_duality(sol20):
    tri, con = sol20[Branch.TRISECTOR], sol20[Branch.CONJUGATE]
    image = conjugate_solution(tri)
    assert image.f_series == con.f_series and image.t_series == con.t_series
    assert image.determinants == con.determinants
    assert image.seed == con.seed
    back = conjugate_solution(image)
    assert back.f_series == tri.f_series and back.branch is Branch.TRISECTOR


def test_determinants_nonzero_and_conjugate(sol20):
    tri, con = sol20[Branch.TRISECTOR], sol20[Branch.CONJUGATE]
    assert set(con.determinants) == set(range(4, 21, 2))
    assert all(d for d in con.determinants.values())
    assert all(d for d in tri.determinants.values())
    assert float(tri.determinants[4]) == pytest.approx(float(con.determinants[4].conj()))


def test_conjugate_determinants_negative(sol20):
    dets = branch_determinant_floats(sol20[Branch.CONJUGATE])
    assert all(v < 0 for k, v in dets.items() if k <= 10)


def test_d4_exact_value():
    # raw determinant of the step fixing (m_4, lambda_3); see the notes on normalization
    d4 = solve_branch("conjugate", 4).determinants[4]
    assert d4 == -12 - Fraction(28, 3) * S


def test_deterministic():
    a = solve_branch("conjugate", 10)
    b = solve_branch("conjugate", 10)
    assert a.to_json() == b.to_json()
