"""Pessimistic bilevel LP with a fixed number of follower constraints.

The leader decision is lifted to ``z = (u, t)`` where ``u`` is either
``w = A_f x`` ("wt" space, dimension ``m_f + 1``) or the leader variables
that the follower actually sees ("xt" space), and ``t`` is the follower's
optimal value. Every vertex of the optimal-response set

    R(w, t) = {y >= 0 : G_f y <= h_f - w, d_f.y = t}

is ``v_B(z) = M_B^{-1} r_B(z)`` for some basis ``B`` of ``n_f`` rows that
includes the value row, and ``v_B`` is feasible exactly where ``m_f + 1``
affine inequalities in ``z`` hold. Those inequalities cut the lifted space
into cells on which the set of feasible bases is constant, so on each cell
the worst-case coupling constraints become ordinary linear rows. Fixing
which value-function piece is active makes ``t = phi(w)`` linear too, and
the problem splits into one LP per (cell, piece) pair.

When ``d_f = 0`` the value row is vacuous; ``t`` is then pinned to zero by
the single zero piece and bases are drawn from the inequality rows alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import (
    BlpError, NoVerifiedCandidate, PreconditionViolated, SizeGuard, UnboundedEpigraph,
)
from .geometry import (
    ArrangementCell, Basis, HPolyhedron, Hyperplane, dedupe_hyperplanes,
    enumerate_candidate_bases, enumerate_cells,
)
from .instance import PESSIMISTIC, BlpInstance, coupling_view
from .linprog import EQ, LE, LinearModel, Status, terms
from .numeric import ONE, ZERO, dot, is_zero, solve_square_system, transpose, unit
from .optimistic import high_point_model, require_a1
from .oracle import pessimistic_evaluate
from .results import INFEASIBLE, OPTIMAL, PessimisticResult
from .valuefn import DualPolytope

MAX_BASIS_SUBSETS = 2000
MAX_CELL_BOUND = 10 ** 5


def cell_bound(num_hyperplanes: int, dim: int, faces: bool = False) -> int:
    """Bound on the cells (or, with ``faces``, on the faces of every
    dimension) of an arrangement of ``num_hyperplanes`` hyperplanes."""
    return sum(comb(num_hyperplanes, i) * (2 ** i if faces else 1) for i in range(dim + 1))


@dataclass(frozen=True)
class EpigraphNormalization:
    """Instance with ``d_l = 0`` plus the bookkeeping to map results back.

    The epigraph variable is stored shifted by its lower bound so that it
    stays nonnegative; ``offset`` restores the original objective.
    """

    instance: BlpInstance
    offset: Fraction
    theta_index: int | None
    theta_bounds: tuple | None


def normalize_epigraph(inst: BlpInstance) -> EpigraphNormalization:
    if not any(inst.leader_cost_y):
        return EpigraphNormalization(inst, ZERO, None, None)
    lp, x, y = high_point_model(inst, coupling=False)
    bounds = []
    for sense in ("min", "max"):
        out = lp.solve(terms(y, inst.leader_cost_y), sense)
        if out.status is Status.UNBOUNDED:
            raise UnboundedEpigraph(f"d_l.y is unbounded ({sense}) over the high-point relaxation")
        bounds.append(out.value if out.optimal else ZERO)
    lo, hi = bounds
    n_l, n_f = inst.n_l, inst.n_f
    A_l = [row + (ZERO,) for row in inst.leader_A] + [unit(n_l + 1, n_l), (ZERO,) * n_l + (-ONE,)]
    G_l = list(inst.leader_G) + [(ZERO,) * n_f, inst.leader_cost_y]
    h_l = list(inst.leader_h) + [hi - lo, lo]
    extended = BlpInstance(
        n_l=n_l + 1, n_f=n_f,
        leader_A=A_l, leader_G=G_l, leader_h=h_l,
        leader_cost_x=inst.leader_cost_x + (ONE,), leader_cost_y=(ZERO,) * n_f,
        follower_A=[row + (ZERO,) for row in inst.follower_A],
        follower_G=inst.follower_G, follower_h=inst.follower_h, follower_cost=inst.follower_cost,
        sense=inst.sense, name=inst.name,
    )
    return EpigraphNormalization(extended, lo, n_l, (lo, hi))


@dataclass(frozen=True)
class LiftedSpace:
    """Coordinates ``z = (u, t)`` with ``w = W u`` and ``u = L x``."""

    mode: str
    dimension: int
    bounding_box: HPolyhedron
    W: tuple
    L: tuple
    columns: tuple = ()


@dataclass(frozen=True)
class VertexMap:
    """``v_B(z) = coeff_matrix . z + offset`` plus the feasibility rows
    ``alpha . z + beta <= 0`` for the non-basic constraints."""

    basis: Basis
    coeff_matrix: tuple
    offset: tuple
    conditions: tuple

    def at(self, z) -> tuple:
        return tuple(dot(row, z) + o for row, o in zip(self.coeff_matrix, self.offset))

    def feasible_at(self, z) -> bool:
        return all(dot(alpha, z) + beta <= 0 for alpha, beta in self.conditions)


def _reaction_rows(inst: BlpInstance, space: LiftedSpace):
    """Constraint rows of R(w, t) as ``(M row, r coefficients on z, r constant)``.

    Index 0 is the value row, then ``y_i >= 0`` rows, then follower rows.
    """
    D = space.dimension
    n_f = inst.n_f
    rows = [(inst.follower_cost, unit(D, D - 1), ZERO)]
    for i in range(n_f):
        rows.append((tuple(-v for v in unit(n_f, i)), (ZERO,) * D, ZERO))
    for k, (g, h) in enumerate(zip(inst.follower_G, inst.follower_h)):
        rows.append((g, tuple(-v for v in space.W[k]) + (ZERO,), h))
    return rows


def build_vertex_maps(inst: BlpInstance, space: LiftedSpace) -> list[VertexMap]:
    rows = _reaction_rows(inst, space)
    D = space.dimension
    value_row_used = not is_zero(inst.follower_cost)
    subsets = comb(len(rows) - 1, inst.n_f - 1) if value_row_used else comb(len(rows) - 1, inst.n_f)
    if subsets > MAX_BASIS_SUBSETS:
        raise SizeGuard(f"{subsets} candidate bases exceed the limit of {MAX_BASIS_SUBSETS}")
    if value_row_used:
        bases = enumerate_candidate_bases([r[0] for r in rows], inst.n_f, required_index=0)
    else:
        shifted = enumerate_candidate_bases([r[0] for r in rows[1:]], inst.n_f)
        bases = [Basis(tuple(i + 1 for i in b.indices)) for b in shifted]
    maps = []
    for B in bases:
        M = [rows[i][0] for i in B.indices]
        R = [rows[i][1] for i in B.indices]
        rho = [rows[i][2] for i in B.indices]
        cols = [solve_square_system(M, [r[c] for r in R]) for c in range(D)]
        coeff = transpose(cols, inst.n_f) if cols else tuple(() for _ in range(inst.n_f))
        off = solve_square_system(M, rho)
        conds = []
        for i, (m_row, r_coef, r_const) in enumerate(rows):
            if i in B.indices or (i == 0 and not value_row_used):
                continue
            # m_row . v(z) - r(z) <= 0
            alpha = tuple(sum((m * coeff[q][c] for q, m in enumerate(m_row)), ZERO) - r_coef[c] for c in range(D))
            beta = dot(m_row, off) - r_const
            conds.append((alpha, beta))
        if any(is_zero(a) and b > 0 for a, b in conds):
            continue
        maps.append(VertexMap(B, tuple(tuple(r) for r in coeff), off, tuple(conds)))
    return maps


def build_hyperplanes(inst: BlpInstance, space: LiftedSpace, maps: list[VertexMap]) -> list[Hyperplane]:
    hs = []
    for vm in maps:
        for alpha, beta in vm.conditions:
            if not is_zero(alpha):
                hs.append(Hyperplane.canonical(alpha, -beta)[0])
    return dedupe_hyperplanes(hs)


def _coordinate_bounds(lp, exprs):
    lows, highs = [], []
    for e in exprs:
        lo = lp.solve(e, "min")
        hi = lp.solve(e, "max")
        if lo.status is Status.INFEASIBLE:
            return None
        if not (lo.optimal and hi.optimal):
            raise BlpError("lifted coordinates are unbounded over the high-point relaxation; A1 fails")
        lows.append(lo.value - 1)
        highs.append(hi.value + 1)
    return lows, highs


def lifted_space(inst: BlpInstance, mode: str) -> LiftedSpace | None:
    """Lifted coordinates and their bounding box; None if the high-point
    relaxation is empty."""
    lp, x, y = high_point_model(inst, coupling=False)
    t_expr = terms(y, inst.follower_cost)
    if mode == "wt":
        u_exprs = [terms(x, a) for a in inst.follower_A]
        W = tuple(unit(inst.m_f, k) for k in range(inst.m_f))
        L = inst.follower_A
        cols = ()
    else:
        cols = tuple(j for j in range(inst.n_l) if any(a[j] for a in inst.follower_A))
        u_exprs = [[(x[j], 1)] for j in cols]
        W = tuple(tuple(a[j] for j in cols) for a in inst.follower_A)
        L = tuple(unit(inst.n_l, j) for j in cols)
    bounds = _coordinate_bounds(lp, u_exprs + [t_expr])
    if bounds is None:
        return None
    box = HPolyhedron.box(*bounds)
    return LiftedSpace(mode, len(u_exprs) + 1, box, W, L, cols)


def is_solid(inst: BlpInstance, space: LiftedSpace) -> bool:
    """Whether ``{z : R(z) nonempty}`` has interior in the lifted space.

    When it does, every point of it is a limit of open cells with a
    nonempty feasible-basis set, so full-dimensional cells suffice.
    """
    lp = LinearModel()
    u = lp.add_variables(space.dimension - 1, free=True)
    (eps,) = lp.add_variables(1)
    copies = 2 if not is_zero(inst.follower_cost) else 1
    ys = [lp.add_variables(inst.n_f) for _ in range(copies)]
    for y in ys:
        for k, (g, h) in enumerate(zip(inst.follower_G, inst.follower_h)):
            lp.add_constraint(terms(y, g) + terms(u, space.W[k]) + [(eps, 1)], LE, h)
    if copies == 2:
        d = inst.follower_cost
        lp.add_constraint(terms(ys[0], d) + terms(ys[1], (-v for v in d)) + [(eps, 1)], LE, 0)
    lp.add_constraint([(eps, 1)], LE, 1)
    out = lp.solve({eps: 1}, "max")
    return out.optimal and out.value > 0


def _choose_space(inst: BlpInstance, space: str):
    if space in ("wt", "xt"):
        return lifted_space(inst, space)
    wt = lifted_space(inst, "wt")
    if wt is None:
        return None
    xt = lifted_space(inst, "xt")
    if xt.dimension < wt.dimension and is_solid(inst, xt):
        return xt
    return wt


@dataclass(frozen=True)
class _Candidate:
    value: Fraction
    cell: int
    piece: int
    x: tuple


def _subproblem(inst, view, space, duals, maps, cell: ArrangementCell, piece: int | None):
    """LP over ``(x, z)`` for one cell; ``piece=None`` drops the upper
    value bound (used as a cheap feasibility screen)."""
    D = space.dimension
    lp = LinearModel()
    x = lp.add_variables(inst.n_l)
    z = lp.add_variables(D, free=True)
    u, t = z[:-1], z[-1]
    for r in view.pure_rows:
        lp.add_constraint(terms(x, inst.leader_A[r]), LE, inst.leader_h[r])
    for k in range(D - 1):
        lp.add_constraint([(u[k], 1)] + terms(x, (-v for v in space.L[k])), EQ, 0)
    for a, b in zip(cell.closure.A, cell.closure.b):
        lp.add_constraint(terms(z, a), LE, b)
    for i, lam in enumerate(duals):
        # (W u - h).lam <= t, and >= t for the selected piece
        coef = [sum((space.W[k][c] * lam[k] for k in range(inst.m_f)), ZERO) for c in range(D - 1)]
        const = dot(inst.follower_h, lam)
        lp.add_constraint(terms(u, coef) + [(t, -1)], LE, const)
        if i == piece:
            lp.add_constraint(terms(u, (-v for v in coef)) + [(t, 1)], LE, -const)
    for j in view.coupling_rows:
        a, g, h = view.coupling(j)
        for vm in maps:
            coef = [sum((g[q] * vm.coeff_matrix[q][c] for q in range(inst.n_f)), ZERO) for c in range(D)]
            lp.add_constraint(terms(z, coef) + terms(x, a), LE, h - dot(g, vm.offset))
    return lp.solve(terms(x, inst.leader_cost_x)), len(x)


def solve_pessimistic(inst: BlpInstance, space: str = "auto", strict_faces: bool = False, force: bool = False) -> PessimisticResult:
    if inst.sense != PESSIMISTIC:
        raise PreconditionViolated("solve_pessimistic needs a pessimistic instance")
    require_a1(inst, force)
    norm = normalize_epigraph(inst)
    work = norm.instance
    view = coupling_view(work)
    n_orig = inst.n_l
    lp_solves = 0
    notes = []

    def verify(cands, **meta):
        nonlocal lp_solves
        for c in sorted(cands, key=lambda c: (c.value, c.cell, c.piece, c.x)):
            ev = pessimistic_evaluate(inst, c.x[:n_orig])
            lp_solves += ev.lp_solves
            if ev.feasible and ev.value == c.value:
                return c
            notes.append(f"candidate from cell {c.cell}, piece {c.piece} failed pointwise verification")
        raise NoVerifiedCandidate("every subproblem optimum failed pointwise verification")

    if not view.coupling_rows:
        X = view.leader_set()
        lp = LinearModel()
        x = lp.add_variables(work.n_l)
        for a, b in zip(X.A, X.b):
            lp.add_constraint(terms(x, a), LE, b)
        out = lp.solve(terms(x, work.leader_cost_x))
        lp_solves += 1
        if not out.optimal:
            return PessimisticResult(INFEASIBLE, lp_solves=lp_solves, notes=("no coupling rows",))
        best = verify([_Candidate(out.value + norm.offset, 0, 0, out.primal)])
        return PessimisticResult(OPTIMAL, best.value, best.x[:n_orig], verified_pointwise=True,
                                 lp_solves=lp_solves, notes=("no coupling rows",) + tuple(notes))

    lifted = _choose_space(work, space)
    if lifted is None:
        return PessimisticResult(INFEASIBLE, notes=("high-point relaxation is empty",))
    solid = is_solid(work, lifted)
    faces = strict_faces or not solid
    if not solid and not strict_faces:
        notes.append(f"{lifted.mode} space is not solid; enumerating lower-dimensional faces")

    maps = build_vertex_maps(work, lifted)
    duals = DualPolytope.of(work).vertices()
    hs = build_hyperplanes(work, lifted, maps)
    bound = cell_bound(len(hs), lifted.dimension, faces)
    if bound > MAX_CELL_BOUND:
        raise SizeGuard(f"{len(hs)} hyperplanes in dimension {lifted.dimension} may give {bound} cells")
    cells = enumerate_cells(hs, lifted.dimension, lifted.bounding_box, include_faces=faces)

    cands = []
    active = {}
    for k, cell in enumerate(cells):
        feas = [vm for vm in maps if vm.feasible_at(cell.interior_point)]
        if not feas:
            continue
        active[k] = tuple(vm.basis.indices for vm in feas)
        out, _ = _subproblem(work, view, lifted, duals, feas, cell, None)
        lp_solves += 1
        if out.status is Status.INFEASIBLE:
            continue
        for i in range(len(duals)):
            out, _ = _subproblem(work, view, lifted, duals, feas, cell, i)
            lp_solves += 1
            if out.status is Status.UNBOUNDED:
                raise BlpError(f"subproblem for cell {k}, piece {i} is unbounded; A1 fails")
            if out.optimal:
                cands.append(_Candidate(out.value + norm.offset, k, i, out.primal[: work.n_l]))

    meta = dict(cells=len(cells), bases=len(maps), method=f"thm2-{lifted.mode}" + ("-faces" if faces else ""))
    if not cands:
        return PessimisticResult(INFEASIBLE, lp_solves=lp_solves, notes=tuple(notes), **meta)
    best = verify(cands)
    return PessimisticResult(
        OPTIMAL, best.value, best.x[:n_orig],
        cell_sign_vector=cells[best.cell].sign_vector, piece_index=best.piece,
        verified_pointwise=True, lp_solves=lp_solves, active_bases=active[best.cell],
        notes=tuple(notes), candidates=tuple(c.x[:n_orig] for c in cands), **meta,
    )
