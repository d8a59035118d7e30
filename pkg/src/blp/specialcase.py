"""Bilevel instances that collapse to easier problems.

When the leader and follower share the follower objective (``d_l = d_f``)
and there are no coupling rows, the follower's choice is exactly what the
leader wants and the problem is a single LP. When they are opposed
(``d_l = -d_f``) the leader minimizes ``c_l.x - phi(x)``, a concave
function, so some vertex of the leader set is optimal. Both hold for
either tie-breaking sense since every optimal response gives the same
leader objective.
"""
from __future__ import annotations

from .errors import NoVertices, PreconditionViolated
from .geometry import enumerate_vertices
from .instance import BlpInstance, coupling_view
from .linprog import Status, terms
from .numeric import dot
from .optimistic import high_point_model
from .results import INFEASIBLE, OPTIMAL, OptimisticResult
from .valuefn import PwlConvexFunction, solve_follower

SENSE_NOTE = "result holds for both optimistic and pessimistic senses"


def _check(inst: BlpInstance, sign: int, label: str) -> None:
    if coupling_view(inst).coupling_rows:
        raise PreconditionViolated(f"{label} requires an instance without coupling rows")
    if inst.leader_cost_y != tuple(sign * v for v in inst.follower_cost):
        want = "d_l = d_f" if sign > 0 else "d_l = -d_f"
        raise PreconditionViolated(f"{label} requires {want} entrywise")


def is_minmin(inst: BlpInstance) -> bool:
    try:
        _check(inst, 1, "min-min")
    except PreconditionViolated:
        return False
    return True


def is_minmax(inst: BlpInstance) -> bool:
    try:
        _check(inst, -1, "min-max")
    except PreconditionViolated:
        return False
    return True


def solve_minmin(inst: BlpInstance) -> OptimisticResult:
    _check(inst, 1, "min-min")
    lp, x, y = high_point_model(inst)
    out = lp.solve(terms(x, inst.leader_cost_x) + terms(y, inst.leader_cost_y))
    if out.status is Status.INFEASIBLE:
        return OptimisticResult(INFEASIBLE, lp_count=1, method="minmin", notes=(SENSE_NOTE,))
    if out.status is Status.UNBOUNDED:
        raise PreconditionViolated("min-min LP is unbounded; assumption A1 fails")
    xs, ys = out.primal[: inst.n_l], out.primal[inst.n_l:]
    return OptimisticResult(OPTIMAL, out.value, xs, ys, None, 1, "minmin", (SENSE_NOTE,))


def solve_minmax(inst: BlpInstance, pwl: PwlConvexFunction | None = None) -> OptimisticResult:
    """Minimize ``c_l.x - phi(x)`` over the vertices of the leader set.

    ``phi`` comes from ``pwl`` when given, otherwise from one follower LP
    per vertex.
    """
    _check(inst, -1, "min-max")
    verts = enumerate_vertices(coupling_view(inst).leader_set())
    if not verts:
        raise NoVertices("the leader set has no extreme point")
    best = None
    lps = 0
    for v in verts:
        if pwl is None:
            phi, y = solve_follower(inst, v)
            lps += 1
        else:
            phi, y = pwl(v), None
        key = (dot(inst.leader_cost_x, v) - phi, v)
        if best is None or key < best[0]:
            best = (key, y)
    (value, x), y = best
    if y is None:
        y = solve_follower(inst, x)[1]
        lps += 1
    return OptimisticResult(OPTIMAL, value, x, y, None, lps, "minmax", (SENSE_NOTE,))
