from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from blp.errors import DimensionError, ParseError, SingularError
from blp.numeric import (
    determinant, format_rational, identity, matrix, matvec, parse_rational, rank,
    solve_consistent_system, solve_square_system, to_rational, vector,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=7)


def test_identity_solve():
    assert solve_square_system(identity(2), [3, F(-1, 2)]) == (3, F(-1, 2))


def test_moment_system_k1_has_indicator_solution():
    # unknowns tau_1, tau_2; rows are the p = 0, 1, 2 moments
    M = [[1, 1], [1, 2], [1, 4]]
    assert solve_consistent_system(M, [1, 1, 1]) == (1, 0)


def test_rank_deficient_is_singular():
    with pytest.raises(SingularError):
        solve_square_system([[1, 1], [2, 2]], [1, 2])


def test_inconsistent_overdetermined_is_singular():
    with pytest.raises(SingularError):
        solve_consistent_system([[1], [1]], [1, 2])


@pytest.mark.parametrize("M, det", [
    (identity(3), 1),
    ([[1, 1], [2, 2]], 0),
    ([[1, 1], [1, 2]], 1),
    ([[0, 2], [3, 0]], -6),
    ([], 1),
])
def test_determinant(M, det):
    assert determinant(M) == det


def test_rational_tokens():
    assert parse_rational("2/4") == F(1, 2)
    assert parse_rational("-3/7") == F(-3, 7)
    assert format_rational(F(6, -4)) == "-3/2"
    assert format_rational(F(5)) == "5"
    for bad in ("1.5", "1/0", "abc", "1/-2", ""):
        with pytest.raises(ParseError):
            parse_rational(bad)


def test_floats_are_rejected():
    with pytest.raises(ParseError):
        to_rational(0.5)
    with pytest.raises(ParseError):
        to_rational(True)
    assert to_rational("7/14") == F(1, 2)


def test_dimension_errors_are_eager():
    with pytest.raises(DimensionError):
        vector([1, 2], 3)
    with pytest.raises(DimensionError):
        matrix([[1, 2], [3]], ncols=2)


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(
    st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=n, max_size=n),
    st.lists(rationals, min_size=n, max_size=n),
)))
def test_solve_round_trip_and_singularity_agree(data):
    M, r = data
    if determinant(M) == 0:
        with pytest.raises(SingularError):
            solve_square_system(M, r)
        assert rank(M) < len(M)
    else:
        v = solve_square_system(M, r)
        assert matvec(M, v) == tuple(r)


@given(rationals, rationals)
def test_arithmetic_stays_canonical(a, b):
    for q in (a + b, a * b, a - b):
        assert q.denominator > 0
        assert parse_rational(format_rational(q)) == q
