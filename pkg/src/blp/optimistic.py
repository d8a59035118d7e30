"""Optimistic bilevel LP by enumerating value-function pieces.

Fixing which affine piece of ``phi`` is active turns the value-function
constraint ``d_f.y <= phi(x)`` into a single linear cut, so the bilevel
problem splits into one LP per piece; the best LP optimum is the answer.
"""
from __future__ import annotations

from .errors import BlpError, RelaxedA1Refused
from .instance import SATISFIED, BlpInstance, validate_a1
from .linprog import LE, LinearModel, Status, terms
from .numeric import dot
from .results import OptimisticResult
from .valuefn import PwlConvexFunction, build_pwl, eval_phi_direct


def require_a1(inst: BlpInstance, force: bool) -> None:
    if force:
        return
    report = validate_a1(inst)
    if report.a1_status != SATISFIED:
        raise RelaxedA1Refused(f"assumption A1 is {report.a1_status}: {'; '.join(report.notes)}")


def high_point_model(inst: BlpInstance, coupling: bool = True):
    """``(x, y) >= 0`` with leader rows (optionally without coupling rows)
    and follower feasibility."""
    lp = LinearModel()
    x = lp.add_variables(inst.n_l)
    y = lp.add_variables(inst.n_f)
    for a, g, h in zip(inst.leader_A, inst.leader_G, inst.leader_h):
        if not coupling and any(g):
            continue
        lp.add_constraint(terms(x, a) + terms(y, g), LE, h)
    for a, g, h in zip(inst.follower_A, inst.follower_G, inst.follower_h):
        lp.add_constraint(terms(x, a) + terms(y, g), LE, h)
    return lp, x, y


def solve_optimistic(inst: BlpInstance, pwl: PwlConvexFunction | None = None, force: bool = False) -> OptimisticResult:
    require_a1(inst, force)
    if pwl is None:
        pwl = build_pwl(inst)
    objective = terms(range(inst.n_l), inst.leader_cost_x) + terms(range(inst.n_l, inst.n_l + inst.n_f), inst.leader_cost_y)

    best = None
    lp_count = 0
    for i, (slope, offset) in enumerate(pwl.pieces):
        lp, x, y = high_point_model(inst)
        # d_f.y - slope.x <= offset
        lp.add_constraint(terms(y, inst.follower_cost) + terms(x, (-s for s in slope)), LE, offset)
        out = lp.solve(objective)
        lp_count += 1
        if out.status is Status.INFEASIBLE:
            continue
        if out.status is Status.UNBOUNDED:
            raise BlpError(f"piece {i} subproblem is unbounded; the instance violates A1")
        xs, ys = out.primal[: inst.n_l], out.primal[inst.n_l:]
        key = (out.value, i, xs)
        if best is None or key < best[0]:
            best = (key, xs, ys)
    if best is None:
        return OptimisticResult("infeasible", lp_count=lp_count)
    (value, piece, _), xs, ys = best
    return OptimisticResult("optimal", value, xs, ys, piece, lp_count)


def bilevel_feasible(inst: BlpInstance, x, y) -> bool:
    """Independent check that ``y`` is follower-optimal at ``x`` and all
    leader rows hold for ``(x, y)``."""
    if any(v < 0 for v in x) or any(v < 0 for v in y):
        return False
    rows = list(zip(inst.follower_A, inst.follower_G, inst.follower_h))
    rows += zip(inst.leader_A, inst.leader_G, inst.leader_h)
    if any(dot(a, x) + dot(g, y) > h for a, g, h in rows):
        return False
    return eval_phi_direct(inst, x) == dot(inst.follower_cost, y)
