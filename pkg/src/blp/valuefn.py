"""The follower's value function and reaction-set maxima.

``phi(x) = min {d_f.y : y in Y(x)}`` equals, by LP duality, the maximum of
``(A_f x - h_f).lam`` over the dual polyhedron
``Lambda = {lam >= 0 : -G_f^T lam <= d_f}``. Since ``Lambda`` lies in the
nonnegative orthant it is pointed, so whenever ``Y(x)`` is nonempty the
maximum is attained at an extreme point and ``phi`` is the upper envelope
of one affine piece per vertex.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import EmptyDual, InfeasibleAt, UnboundedAbove, UnboundedBelow
from .geometry import HPolyhedron, enumerate_vertices
from .instance import BlpInstance
from .linprog import LE, LinearModel, Status, terms
from .numeric import ZERO, dot, matvec, transpose


def _check_leader_point(inst: BlpInstance, x: Sequence) -> tuple:
    x = tuple(Fraction(v) for v in x)
    if len(x) != inst.n_l:
        raise ValueError(f"leader point has {len(x)} entries, expected {inst.n_l}")
    if any(v < 0 for v in x):
        raise ValueError("leader point must be nonnegative")
    return x


def follower_model(inst: BlpInstance, x: Sequence) -> tuple[LinearModel, list[int]]:
    """LP model of ``Y(x)`` with one nonnegative column per follower variable."""
    lp = LinearModel()
    y = lp.add_variables(inst.n_f)
    for a, g, h in zip(inst.follower_A, inst.follower_G, inst.follower_h):
        lp.add_constraint(terms(y, g), LE, h - dot(a, x))
    return lp, y


def eval_phi_direct(inst: BlpInstance, x: Sequence) -> Fraction:
    """Follower optimal value at ``x`` by a single LP."""
    return solve_follower(inst, x)[0]


def solve_follower(inst: BlpInstance, x: Sequence) -> tuple[Fraction, tuple]:
    """``(phi(x), y)`` with ``y`` a basic optimal follower response."""
    x = _check_leader_point(inst, x)
    lp, y = follower_model(inst, x)
    out = lp.solve(terms(y, inst.follower_cost))
    if out.status is Status.INFEASIBLE:
        raise InfeasibleAt(f"follower infeasible at x={x}")
    if out.status is Status.UNBOUNDED:
        raise UnboundedBelow(f"follower LP unbounded at x={x}")
    return out.value, out.primal


@dataclass(frozen=True)
class DualPolytope:
    polyhedron: HPolyhedron

    @classmethod
    def of(cls, inst: BlpInstance) -> "DualPolytope":
        Gt = transpose(inst.follower_G, inst.n_f)
        if inst.m_f == 0:
            A = [() for _ in range(inst.n_f)]
        else:
            A = [tuple(-v for v in row) for row in Gt]
        return cls(HPolyhedron(A, inst.follower_cost, (True,) * inst.m_f))

    def vertices(self) -> list:
        return enumerate_vertices(self.polyhedron)


@dataclass(frozen=True)
class PwlConvexFunction:
    """Upper envelope of affine pieces ``slope . x + offset``.

    ``duals[i]`` is the dual vertex that generated piece ``i``.
    """

    pieces: tuple
    duals: tuple = ()

    def piece_values(self, x: Sequence) -> list[Fraction]:
        return [dot(s, x) + o for s, o in self.pieces]

    def __call__(self, x: Sequence) -> Fraction:
        return max(self.piece_values(x))

    def active_piece(self, x: Sequence) -> int:
        vals = self.piece_values(x)
        return vals.index(max(vals))


def build_pwl(inst: BlpInstance) -> PwlConvexFunction:
    """One affine piece per extreme point of the dual polyhedron.

    Piece ``i`` is ``x -> (A_f x - h_f) . lam_i``; pieces with identical
    affine forms are merged, keeping the first generating vertex.
    """
    verts = DualPolytope.of(inst).vertices()
    if not verts:
        raise EmptyDual("dual feasible set has no vertex; the follower LP is unbounded")
    At = transpose(inst.follower_A, inst.n_l) if inst.m_f else tuple(() for _ in range(inst.n_l))
    pieces, duals, seen = [], [], set()
    for lam in verts:
        slope = matvec(At, lam) if inst.m_f else (ZERO,) * inst.n_l
        offset = -dot(inst.follower_h, lam)
        key = (slope, offset)
        if key not in seen:
            seen.add(key)
            pieces.append(key)
            duals.append(lam)
    return PwlConvexFunction(tuple(pieces), tuple(duals))


def reaction_model(inst: BlpInstance, x: Sequence, phi: Fraction | None = None, equality: bool = False):
    """LP model of the reaction set ``R(x)``.

    The value cut is ``d_f.y <= phi(x)`` by default; ``equality=True``
    uses ``d_f.y = phi(x)`` instead (both describe the same set).
    """
    x = _check_leader_point(inst, x)
    if phi is None:
        phi = eval_phi_direct(inst, x)
    lp, y = follower_model(inst, x)
    lp.add_constraint(terms(y, inst.follower_cost), "=" if equality else LE, phi)
    return lp, y


def reaction_max(inst: BlpInstance, x: Sequence, objective: Sequence, phi: Fraction | None = None, equality: bool = False) -> Fraction:
    """``max objective.y`` over the follower's optimal responses at ``x``."""
    return reaction_argmax(inst, x, objective, phi, equality).value


def reaction_argmax(inst, x, objective, phi=None, equality=False):
    """Like :func:`reaction_max` but returns the full LP outcome."""
    lp, y = reaction_model(inst, x, phi, equality)
    out = lp.solve(terms(y, objective), "max")
    if out.status is Status.INFEASIBLE:
        raise InfeasibleAt(f"follower infeasible at x={tuple(x)}")
    if out.status is Status.UNBOUNDED:
        raise UnboundedAbove(f"reaction-set maximum unbounded at x={tuple(x)}")
    return out
