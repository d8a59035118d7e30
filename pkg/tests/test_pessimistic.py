from fractions import Fraction as F
from math import comb

import pytest

from blp.errors import PreconditionViolated, RelaxedA1Refused
from blp.generate import generate
from blp.instance import BlpInstance, coupling_view, fixture_t1, fixture_t2
from blp.geometry import enumerate_cells
from blp.numeric import dot, matvec
from blp.optimistic import solve_optimistic
from blp.oracle import pessimistic_1d_sweep, pessimistic_candidates, pessimistic_evaluate
from blp.pessimistic import (
    _reaction_rows, build_hyperplanes, build_vertex_maps, is_solid, lifted_space,
    normalize_epigraph, solve_pessimistic,
)
from blp.reduction import Graph, reduce_mis
from blp.valuefn import reaction_max


def test_t2():
    res = solve_pessimistic(fixture_t2())
    assert (res.status, res.value, res.x) == ("optimal", F(-1, 2), (F(1, 2),))
    assert res.verified_pointwise


@pytest.mark.parametrize("space", ["wt", "xt"])
@pytest.mark.parametrize("faces", [False, True])
def test_t2_every_mode(space, faces):
    res = solve_pessimistic(fixture_t2(), space=space, strict_faces=faces)
    assert res.value == F(-1, 2) and res.x == (F(1, 2),)


def test_epigraph_identity_and_bounds():
    t2 = fixture_t2()
    assert normalize_epigraph(t2).instance is t2
    norm = normalize_epigraph(t2.replace(leader_cost_y=[1]))
    assert norm.theta_bounds == (0, 1)
    ext = norm.instance
    assert ext.n_l == 2 and ext.leader_cost_x == (-1, 1) and not any(ext.leader_cost_y)
    assert len(coupling_view(ext).coupling_rows) == 2


def test_epigraph_objective_matches_manual_evaluation():
    inst = fixture_t2().replace(leader_cost_y=[1])
    res = solve_pessimistic(inst)
    # leader pays -x + max y = 0 for every feasible x; ties go to x = 0
    assert res.value == 0
    x = res.x
    assert res.value == -x[0] + reaction_max(inst, x, [1])
    assert pessimistic_evaluate(inst, x).value == res.value


def test_vertex_maps_and_hyperplane_bounds():
    # n_f = 2, m_f = 1 with a nonzero follower objective
    inst = BlpInstance(
        1, 2, [[1], [0]], [[0, 0], [1, 1]], [1, 1], [-1], [0, 0],
        [[-1]], [[1, 1]], [0], [1, -1], sense="pessimistic",
    )
    space = lifted_space(inst, "wt")
    maps = build_vertex_maps(inst, space)
    assert len(maps) <= comb(inst.n_f + inst.m_f, inst.n_f - 1) == 3
    hs = build_hyperplanes(inst, space, maps)
    assert len(hs) <= (inst.m_f + 1) * len(maps)
    rows = _reaction_rows(inst, space)
    for vm in maps:
        assert 0 in vm.basis.indices
        z = (F(1, 3), F(-1, 5))
        v = vm.at(z)
        for i in vm.basis.indices:
            m, rc, r0 = rows[i]
            assert sum(a * b for a, b in zip(m, v)) == sum(a * b for a, b in zip(rc, z)) + r0


def test_t2_hyperplanes_with_zero_follower_objective():
    inst = fixture_t2()
    space = lifted_space(inst, "wt")
    maps = build_vertex_maps(inst, space)
    # the value row is vacuous, so bases come from y >= 0 and y <= -w
    assert [vm.basis.indices for vm in maps] == [(1,), (2,)]
    assert len(build_hyperplanes(inst, space, maps)) <= 2 * len(maps)


def test_basis_sets_match_direct_feasibility():
    inst = generate("random-pessimistic", 3, 1, 2, 2, 1)
    assert any(inst.follower_cost)
    space = lifted_space(inst, "wt")
    maps = build_vertex_maps(inst, space)
    cells = enumerate_cells(build_hyperplanes(inst, space, maps), space.dimension, space.bounding_box)
    for cell in cells:
        *w, t = cell.interior_point
        for vm in maps:
            v = vm.at(cell.interior_point)
            direct = (
                all(q >= 0 for q in v)
                and all(a <= b - wk for a, b, wk in zip(matvec(inst.follower_G, v), inst.follower_h, w))
                and dot(inst.follower_cost, v) == t
            )
            assert vm.feasible_at(cell.interior_point) == direct


def test_no_coupling_rows_is_one_lp():
    inst = fixture_t2().replace(leader_A=[[1]], leader_G=[[0]], leader_h=[1])
    res = solve_pessimistic(inst)
    assert res.value == -1 and res.x == (1,)


def test_unique_response_matches_optimistic():
    # y = x is the only response, so both senses coincide
    inst = BlpInstance(
        1, 1, [[1], [0]], [[0], [1]], [1, F(2, 3)], [-1], [0],
        [[-1], [1]], [[1], [-1]], [0, 0], [1], sense="pessimistic",
    )
    pes = solve_pessimistic(inst)
    opt = solve_optimistic(inst.replace(sense="optimistic"))
    assert pes.value == opt.value == F(-2, 3)


def test_thin_domain_in_leader_space():
    # R is nonempty only on the line t = x in (x, t) coordinates
    inst = BlpInstance(
        1, 1, [[1], [0]], [[0], [1]], [1, F(1, 2)], [-1], [0],
        [[-1], [1]], [[1], [-1]], [0, 0], [1], sense="pessimistic",
    )
    assert not is_solid(inst, lifted_space(inst, "xt"))
    assert is_solid(inst, lifted_space(inst, "wt"))
    want = pessimistic_1d_sweep(inst)
    for space in ("auto", "wt", "xt"):
        res = solve_pessimistic(inst, space=space)
        assert (res.value, res.x) == (want.value, want.x) == (F(-1, 2), (F(1, 2),))


def test_preconditions():
    with pytest.raises(PreconditionViolated):
        solve_pessimistic(fixture_t1())
    with pytest.raises(RelaxedA1Refused):
        solve_pessimistic(reduce_mis(Graph(2, ((0, 1),))))


@pytest.mark.parametrize("seed", range(6))
def test_wt_and_xt_agree(seed):
    inst = generate("random-pessimistic", seed, 2, 1 + seed % 2, 1 + seed % 2, 1)
    a = solve_pessimistic(inst, space="wt")
    b = solve_pessimistic(inst, space="xt")
    assert (a.status, a.value) == (b.status, b.value)


@pytest.mark.parametrize("seed", range(8))
def test_sandwich_against_candidates(seed):
    inst = generate("random-pessimistic", 50 + seed, 2, 2, 2, 1)
    res = solve_pessimistic(inst)
    pts = pessimistic_candidates(inst, extra_points=res.candidates)
    feasible = []
    for x in pts:
        ev = pessimistic_evaluate(inst, x)
        if ev.feasible:
            feasible.append(ev.value)
    if res.optimal:
        assert all(res.value <= v for v in feasible)
        ev = pessimistic_evaluate(inst, res.x)
        assert ev.feasible and ev.value == res.value
    else:
        assert not feasible


@pytest.mark.parametrize("seed", range(10))
def test_matches_sweep_in_one_dimension(seed):
    inst = generate("random-pessimistic", 200 + seed, 1, 2, 2, 2)
    a = solve_pessimistic(inst)
    b = pessimistic_1d_sweep(inst)
    assert (a.status, a.value) == (b.status, b.value)
