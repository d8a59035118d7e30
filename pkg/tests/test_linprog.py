from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from blp.errors import DimensionError
from blp.linprog import EQ, GE, LE, LinearModel, LpProblem, Status, solve_lp
from blp.numeric import dot


def test_simple_minimum():
    out = solve_lp(LpProblem([-1, -1], [[1, 1]], [1], [LE]))
    assert out.status is Status.OPTIMAL and out.value == -1
    assert dot([1, 1], out.primal) == 1


def test_infeasible_with_farkas_vector():
    p = LpProblem([0], [[1]], [-1], [LE])
    out = solve_lp(p)
    assert out.status is Status.INFEASIBLE
    y = out.farkas
    # y <= 0 on <= rows, y.A <= 0 on nonnegative columns, y.b > 0
    assert y[0] <= 0 and y[0] * 1 <= 0 and y[0] * -1 > 0


def test_follower_dual_at_half():
    # dual of min -y s.t. y <= x at x = 1/2
    out = solve_lp(LpProblem([-F(1, 2)], [[-1]], [-1], [LE], sense="max"))
    assert out.value == F(-1, 2) and out.primal == (1,)
    primal = solve_lp(LpProblem([-1], [[1]], [F(1, 2)], [LE]))
    assert primal.value == out.value
    assert primal.dual == (-1,)


def test_unbounded_ray():
    out = solve_lp(LpProblem([-1, 0], [[1, -1]], [1], [LE]))
    assert out.status is Status.UNBOUNDED
    d = out.ray
    assert d[0] - d[1] <= 0 and -d[0] < 0 and min(d) >= 0


def test_free_variable_reaches_negative_values():
    lp = LinearModel()
    (x,) = lp.add_variables(1, free=True)
    lp.add_constraint([(x, 1)], GE, -3)
    out = lp.solve({x: 1})
    assert out.value == -3 and out.primal == (-3,)


def test_unbounded_region_with_finite_objective():
    lp = LinearModel()
    x, y = lp.add_variables(2)
    lp.add_constraint([(x, 1), (y, -1)], LE, 1)
    out = lp.solve({x: 1, y: 1})
    assert out.status is Status.OPTIMAL and out.value == 0


def test_equality_rows_and_malformed_problem():
    out = solve_lp(LpProblem([1, 2], [[1, 1]], [3], [EQ]))
    assert out.value == 3 and out.primal == (3, 0)
    with pytest.raises(DimensionError):
        LpProblem([1, 2], [[1]], [3], [EQ])
    with pytest.raises(ValueError):
        LpProblem([1], [[1]], [3], ["<"])


def test_repeat_solves_are_identical():
    p = LpProblem([-1, -1, -1], [[1, 1, 0], [0, 1, 1], [1, 0, 1]], [1, 1, 1], [LE] * 3)
    assert solve_lp(p) == solve_lp(p)


small = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@given(
    st.integers(1, 3).flatmap(lambda n: st.tuples(
        st.lists(small, min_size=n, max_size=n),
        st.lists(st.lists(small, min_size=n, max_size=n), min_size=1, max_size=3),
        st.lists(st.fractions(min_value=0, max_value=5, max_denominator=3), min_size=3, max_size=3),
        st.lists(st.sampled_from([LE, GE, EQ]), min_size=3, max_size=3),
        st.sampled_from(["min", "max"]),
    ))
)
def test_optimality_certificates(data):
    c, A, b, rels, sense = data
    b, rels = b[: len(A)], rels[: len(A)]
    out = solve_lp(LpProblem(c, A, b, rels, sense))
    if out.status is Status.OPTIMAL:
        x, u = out.primal, out.dual
        assert all(v >= 0 for v in x)
        for row, rhs, rel, ui in zip(A, b, rels, u):
            lhs = dot(row, x)
            assert {LE: lhs <= rhs, GE: lhs >= rhs, EQ: lhs == rhs}[rel]
            # complementary slackness
            assert ui * (lhs - rhs) == 0
            sgn = 1 if sense == "min" else -1
            if rel == LE:
                assert sgn * ui <= 0
            if rel == GE:
                assert sgn * ui >= 0
        for j in range(len(c)):
            reduced = c[j] - sum(ui * row[j] for ui, row in zip(u, A))
            sgn = 1 if sense == "min" else -1
            assert sgn * reduced >= 0
            assert reduced * x[j] == 0
        assert out.value == dot(c, x) == dot(b, u)
    elif out.status is Status.INFEASIBLE:
        y = out.farkas
        assert dot(y, b) > 0
        for j in range(len(c)):
            assert sum(yi * row[j] for yi, row in zip(y, A)) <= 0
    else:
        d = out.ray
        assert all(v >= 0 for v in d)
        sgn = 1 if sense == "min" else -1
        assert sgn * dot(c, d) < 0
