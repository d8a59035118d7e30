"""Reference procedures that share no shortcut with the main solvers.

* :func:`optimistic_oracle` enumerates complementarity patterns of the
  follower's KKT system instead of dual vertices.
* :func:`pessimistic_evaluate` decides pessimistic feasibility of a single
  leader decision with one LP per coupling row.
* :func:`pessimistic_1d_sweep` solves one-leader-variable pessimistic
  instances exactly by locating every kink of the functions involved.
"""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import product
from typing import NamedTuple, Sequence

from .errors import InfeasibleAt, SizeGuard, UnboundedAbove, UnboundedBelow
from .geometry import enumerate_vertices
from .instance import BlpInstance, coupling_view
from .linprog import EQ, LE, LinearModel, Status, terms
from .numeric import ZERO, dot
from .optimistic import require_a1
from .results import INFEASIBLE, OPTIMAL, OptimisticResult, PessimisticResult
from .valuefn import _check_leader_point, reaction_argmax, solve_follower

MAX_KKT_DIM = 12
MAX_BREAKPOINTS = 10 ** 5


def optimistic_oracle(inst: BlpInstance, force: bool = False) -> OptimisticResult:
    """Optimistic optimum via KKT complementarity-pattern enumeration."""
    n_l, n_f, m_f = inst.n_l, inst.n_f, inst.m_f
    if n_f + m_f > MAX_KKT_DIM:
        raise SizeGuard(f"{2 ** (n_f + m_f)} complementarity patterns exceed the oracle limit")
    require_a1(inst, force)
    G = inst.follower_G
    best = None
    count = 0
    for pattern in product((0, 1), repeat=m_f + n_f):
        lp = LinearModel()
        x = lp.add_variables(n_l)
        y = lp.add_variables(n_f)
        lam = lp.add_variables(m_f)
        for a, g, h in zip(inst.leader_A, inst.leader_G, inst.leader_h):
            lp.add_constraint(terms(x, a) + terms(y, g), LE, h)
        for i, (a, g, h) in enumerate(zip(inst.follower_A, G, inst.follower_h)):
            row = terms(x, a) + terms(y, g)
            if pattern[i]:
                lp.add_constraint(row, EQ, h)
            else:
                lp.add_constraint(row, LE, h)
                lp.add_constraint([(lam[i], 1)], EQ, 0)
        for j in range(n_f):
            # reduced cost d_j + sum_i G_ij lam_i >= 0
            col = [(lam[i], -G[i][j]) for i in range(m_f) if G[i][j]]
            if pattern[m_f + j]:
                lp.add_constraint(col, EQ, inst.follower_cost[j])
            else:
                lp.add_constraint(col, LE, inst.follower_cost[j])
                lp.add_constraint([(y[j], 1)], EQ, 0)
        out = lp.solve(terms(x, inst.leader_cost_x) + terms(y, inst.leader_cost_y))
        count += 1
        if out.status is not Status.OPTIMAL:
            continue
        xs, ys = out.primal[:n_l], out.primal[n_l:n_l + n_f]
        key = (out.value, xs)
        if best is None or key < best[0]:
            best = (key, xs, ys, pattern)
    if best is None:
        return OptimisticResult(INFEASIBLE, lp_count=count, method="oracle")
    (value, _), xs, ys, pattern = best
    note = "pattern " + "".join(map(str, pattern))
    return OptimisticResult(OPTIMAL, value, xs, ys, None, count, "oracle", (note,))


class Evaluation(NamedTuple):
    feasible: bool
    value: Fraction
    coupling_max: dict
    lp_solves: int


def pessimistic_evaluate(inst: BlpInstance, x: Sequence) -> Evaluation:
    """Pessimistic feasibility and objective of the leader decision ``x``.

    Every coupling row must hold for the worst optimal follower response,
    and the objective charges the worst ``d_l.y`` over the reaction set.
    """
    x = _check_leader_point(inst, x)
    view = coupling_view(inst)
    feasible = all(dot(inst.leader_A[r], x) <= inst.leader_h[r] for r in view.pure_rows)
    phi, _ = solve_follower(inst, x)
    solves = 1
    cmax = {}
    for j in view.coupling_rows:
        a, g, h = view.coupling(j)
        m = reaction_argmax(inst, x, g, phi).value
        solves += 1
        cmax[j] = m
        if dot(a, x) + m > h:
            feasible = False
    value = dot(inst.leader_cost_x, x)
    if any(inst.leader_cost_y):
        value += reaction_argmax(inst, x, inst.leader_cost_y, phi).value
        solves += 1
    return Evaluation(feasible, value, cmax, solves)


def pessimistic_candidates(inst: BlpInstance, extra_points: Sequence = (), samples: int = 16, seed: int = 0) -> list:
    """Leader vertices, caller-supplied points and seeded random points of
    the coupling-free leader set, deduplicated in first-seen order."""
    verts = enumerate_vertices(coupling_view(inst).leader_set())
    if not verts:
        return []
    rng = random.Random(seed)
    pts = list(verts) + [tuple(Fraction(v) for v in p) for p in extra_points]
    for _ in range(samples):
        w = [Fraction(rng.randint(0, 8)) for _ in verts]
        total = sum(w) or Fraction(1)
        pts.append(tuple(sum((wk * v[c] for wk, v in zip(w, verts)), ZERO) / total for c in range(inst.n_l)))
    out, seen = [], set()
    for p in pts:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


# -- exact one-dimensional sweep -------------------------------------------

def _kinks(support, lo, hi, limit):
    """Kinks of a concave piecewise-linear function on [lo, hi].

    ``support(x)`` returns ``(slope, intercept)`` of an affine majorant that
    is tight at ``x``. Recursively intersecting tight majorants locates
    every kink exactly.
    """
    out = []

    def refine(a, La, b, Lb):
        if La == Lb or len(out) > limit:
            return
        c = (Lb[1] - La[1]) / (La[0] - Lb[0])
        Lc = support(c)
        if Lc[0] * c + Lc[1] == La[0] * c + La[1]:
            out.append(c)
            return
        refine(a, La, c, Lc)
        out.append(c)
        refine(c, Lc, b, Lb)

    if lo < hi:
        refine(lo, support(lo), hi, support(hi))
    if len(out) > limit:
        raise SizeGuard(f"more than {limit} breakpoints")
    return out


def _phi_support(inst, x):
    # phi(x) >= u.(h - A x) for any dual-feasible u, tight at x.
    lp = LinearModel()
    y = lp.add_variables(inst.n_f)
    for a, g, h in zip(inst.follower_A, inst.follower_G, inst.follower_h):
        lp.add_constraint(terms(y, g), LE, h - a[0] * x)
    out = lp.solve(terms(y, inst.follower_cost))
    if out.status is Status.UNBOUNDED:
        raise UnboundedBelow(f"follower LP unbounded at x={x}")
    if out.status is not Status.OPTIMAL:
        raise InfeasibleAt(f"follower infeasible at x={x}")
    u = out.dual
    return (-sum((ui * a[0] for ui, a in zip(u, inst.follower_A)), ZERO), dot(u, inst.follower_h))


def _reaction_support(inst, g, alpha, beta, x):
    # max g.y over {G y <= h - A x, d.y <= alpha x + beta} <= u.rhs(x)
    lp = LinearModel()
    y = lp.add_variables(inst.n_f)
    for a, row, h in zip(inst.follower_A, inst.follower_G, inst.follower_h):
        lp.add_constraint(terms(y, row), LE, h - a[0] * x)
    lp.add_constraint(terms(y, inst.follower_cost), LE, alpha * x + beta)
    out = lp.solve(terms(y, g), "max")
    if out.status is Status.UNBOUNDED:
        raise UnboundedAbove(f"reaction-set maximum unbounded at x={x}")
    u = out.dual
    slope = -sum((ui * a[0] for ui, a in zip(u, inst.follower_A)), ZERO) + u[-1] * alpha
    intercept = dot(u[:-1], inst.follower_h) + u[-1] * beta
    return (slope, intercept)


def pessimistic_1d_sweep(inst: BlpInstance, force: bool = False) -> PessimisticResult:
    """Exact pessimistic optimum for a single leader variable.

    ``phi`` is convex piecewise linear in ``x``; on each of its linear
    pieces every reaction-set maximum is concave piecewise linear. Between
    consecutive kinks all of them are affine, so the feasible set is a union
    of intervals whose endpoints are kinks, ends of the leader interval, or
    zero crossings of a coupling slack; the optimum lies among those points.
    """
    if inst.n_l != 1:
        raise ValueError("the sweep oracle needs exactly one leader variable")
    require_a1(inst, force)
    view = coupling_view(inst)
    X = view.leader_set()
    lp = LinearModel()
    (xv,) = lp.add_variables(1)
    for a, beta in zip(X.A, X.b):
        lp.add_constraint(terms([xv], a), LE, beta)
    lo_out = lp.solve({xv: 1})
    if lo_out.status is Status.INFEASIBLE:
        return PessimisticResult(INFEASIBLE, method="sweep1d", lp_solves=1)
    lo, hi = lo_out.value, lp.solve({xv: 1}, "max").value
    solves = 2

    def neg_phi_support(x):
        s, c = _phi_support(inst, x)
        return (-s, -c)

    phi_kinks = _kinks(neg_phi_support, lo, hi, MAX_BREAKPOINTS)
    points = sorted({lo, hi, *phi_kinks})
    functions = [view.coupling(j)[1] for j in view.coupling_rows]
    if any(inst.leader_cost_y):
        functions.append(inst.leader_cost_y)

    kinks = set(points)
    for a, b in zip(points, points[1:]):
        sa, ca = _phi_support(inst, a)
        sb, cb = _phi_support(inst, b)
        fa, fb = sa * a + ca, sb * b + cb
        alpha = (fb - fa) / (b - a)
        beta = fa - alpha * a
        for g in functions:
            kinks.update(_kinks(lambda x, g=g: _reaction_support(inst, g, alpha, beta, x), a, b, MAX_BREAKPOINTS))
            if len(kinks) > MAX_BREAKPOINTS:
                raise SizeGuard(f"more than {MAX_BREAKPOINTS} breakpoints")
    points = sorted(kinks)

    evals = {}
    for p in points:
        evals[p] = pessimistic_evaluate(inst, (p,))
        solves += evals[p].lp_solves
    candidates = set(points)
    for a, b in zip(points, points[1:]):
        candidates.add((a + b) / 2)
        for j in view.coupling_rows:
            aj, _, hj = view.coupling(j)
            sa = evals[a].coupling_max[j] + aj[0] * a - hj
            sb = evals[b].coupling_max[j] + aj[0] * b - hj
            if (sa < 0 < sb) or (sb < 0 < sa):
                candidates.add(a + (b - a) * sa / (sa - sb))

    best = None
    for p in sorted(candidates):
        ev = evals.get(p)
        if ev is None:
            ev = pessimistic_evaluate(inst, (p,))
            solves += ev.lp_solves
        if ev.feasible and (best is None or ev.value < best[0]):
            best = (ev.value, p)
    if best is None:
        return PessimisticResult(INFEASIBLE, method="sweep1d", lp_solves=solves)
    return PessimisticResult(OPTIMAL, best[0], (best[1],), verified_pointwise=True, lp_solves=solves, method="sweep1d")
