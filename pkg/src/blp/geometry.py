"""Polyhedral combinatorics in fixed dimension.

Vertex enumeration and candidate-basis enumeration are brute force over
dimension-sized row subsets, which is polynomial once the dimension is
fixed. Arrangement cells are found by a depth-first search over sign
vectors, pruned by a strict-feasibility LP at each node.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import DimensionError, SingularError
from .linprog import EQ, LE, LinearModel, terms
from .numeric import (
    ZERO, Vector, determinant, dot, matrix, solve_square_system, unit, vector,
)


@dataclass(frozen=True)
class HPolyhedron:
    """``{x : A x <= b}`` intersected with ``x_j >= 0`` for flagged ``j``."""

    A: tuple
    b: tuple
    nonneg: tuple = ()

    def __post_init__(self):
        dim = self.dim if self.A else len(self.nonneg)
        object.__setattr__(self, "A", matrix(self.A, ncols=dim))
        object.__setattr__(self, "b", vector(self.b, len(self.A)))
        nonneg = tuple(bool(f) for f in self.nonneg) if self.nonneg else (False,) * dim
        if len(nonneg) != dim:
            raise DimensionError(f"{len(nonneg)} sign flags for dimension {dim}")
        object.__setattr__(self, "nonneg", nonneg)

    @property
    def dim(self) -> int:
        if self.A:
            return len(self.A[0])
        return len(self.nonneg)

    def rows(self) -> list[tuple[Vector, Fraction]]:
        """All inequalities as ``(a, beta)`` with ``a . x <= beta``, sign rows last."""
        out = list(zip(self.A, self.b))
        for j, flag in enumerate(self.nonneg):
            if flag:
                out.append((tuple(-v for v in unit(self.dim, j)), ZERO))
        return out

    def contains(self, x: Sequence) -> bool:
        return all(dot(a, x) <= beta for a, beta in self.rows())

    @classmethod
    def box(cls, lower: Sequence, upper: Sequence) -> "HPolyhedron":
        d = len(lower)
        A, b = [], []
        for j in range(d):
            e = unit(d, j)
            A.append(e)
            b.append(Fraction(upper[j]))
            A.append(tuple(-v for v in e))
            b.append(-Fraction(lower[j]))
        return cls(A, b, (False,) * d)


def enumerate_vertices(P: HPolyhedron) -> list[Vector]:
    """All extreme points of ``P``, lexicographically sorted, without rays."""
    rows = P.rows()
    d = P.dim
    if d == 0:
        return [()] if all(beta >= 0 for _, beta in rows) else []
    found = set()
    for subset in combinations(range(len(rows)), d):
        M = [rows[i][0] for i in subset]
        try:
            v = solve_square_system(M, [rows[i][1] for i in subset])
        except SingularError:
            continue
        if v not in found and all(dot(a, v) <= beta for a, beta in rows):
            found.add(v)
    return sorted(found)


@dataclass(frozen=True)
class Basis:
    indices: tuple
    required_index: int | None = None


def enumerate_candidate_bases(constraints: Sequence[Sequence], dim: int, required_index: int | None = None) -> list[Basis]:
    """Every ``dim``-subset of constraint rows (containing ``required_index``)
    whose stacked matrix is nonsingular, in lexicographic order."""
    idx = range(len(constraints))
    if required_index is not None and not 0 <= required_index < len(constraints):
        raise IndexError(f"required index {required_index} out of range")
    out = []
    if required_index is None:
        pool = combinations(idx, dim)
    else:
        others = [i for i in idx if i != required_index]
        pool = (tuple(sorted((required_index,) + rest)) for rest in combinations(others, dim - 1)) if dim >= 1 else iter(())
    for subset in pool:
        if determinant([constraints[i] for i in subset]) != 0:
            out.append(Basis(tuple(subset), required_index))
    out.sort(key=lambda b: b.indices)
    return out


@dataclass(frozen=True)
class Hyperplane:
    """``normal . z = offset`` with the first nonzero normal entry equal to 1."""

    normal: tuple
    offset: Fraction

    @classmethod
    def canonical(cls, normal: Sequence, offset) -> tuple["Hyperplane", int]:
        """Return the canonical hyperplane and the orientation factor (+1/-1)
        relating ``normal . z - offset`` to the canonical form's sign."""
        normal = vector(normal)
        lead = next((a for a in normal if a != 0), None)
        if lead is None:
            raise ValueError("hyperplane normal must be nonzero")
        h = cls(tuple(a / lead for a in normal), Fraction(offset) / lead)
        return h, (1 if lead > 0 else -1)

    def side(self, z: Sequence) -> int:
        s = dot(self.normal, z) - self.offset
        return (s > 0) - (s < 0)


@dataclass(frozen=True)
class ArrangementCell:
    """A relatively open cell; ``sign_vector`` entries are -1, +1 (or 0 for faces)."""

    sign_vector: tuple
    interior_point: tuple
    closure: HPolyhedron

    @property
    def is_full_dimensional(self) -> bool:
        return 0 not in self.sign_vector


def dedupe_hyperplanes(hs: Sequence[Hyperplane]) -> list[Hyperplane]:
    out = []
    seen = set()
    for h in hs:
        c, _ = Hyperplane.canonical(h.normal, h.offset)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def _closure(hs, signs, box: HPolyhedron) -> HPolyhedron:
    A, b = [], []
    for h, s in zip(hs, signs):
        if s <= 0:
            A.append(h.normal)
            b.append(h.offset)
        if s >= 0:
            A.append(tuple(-a for a in h.normal))
            b.append(-h.offset)
    A.extend(box.A)
    b.extend(box.b)
    return HPolyhedron(A, b, box.nonneg)


def _relative_interior_point(hs, signs, box: HPolyhedron, dim: int):
    """A point strictly on the signed side of every hyperplane (exactly on
    those with sign 0) and strictly inside the box, or None."""
    lp = LinearModel()
    z = lp.add_variables(dim, free=True)
    (eps,) = lp.add_variables(1, free=True)
    for h, s in zip(hs, signs):
        if s == 0:
            lp.add_constraint(terms(z, h.normal), EQ, h.offset)
        else:
            # s * (n.z - o) >= eps
            lp.add_constraint(terms(z, (-s * a for a in h.normal)) + [(eps, 1)], LE, -s * h.offset)
    for a, beta in box.rows():
        lp.add_constraint(terms(z, a) + [(eps, 1)], LE, beta)
    lp.add_constraint([(eps, 1)], LE, 1)
    out = lp.solve({eps: 1}, sense="max")
    if not out.optimal or out.value <= 0:
        return None
    return out.primal[:dim]


def enumerate_cells(hs: Sequence[Hyperplane], dim: int, bounding_box: HPolyhedron, include_faces: bool = False) -> list[ArrangementCell]:
    """Cells of the arrangement of ``hs`` inside the open bounding box.

    With ``include_faces`` the relatively open lower-dimensional faces are
    returned as well (sign 0 on the hyperplanes containing them).
    """
    if bounding_box.dim != dim:
        raise DimensionError(f"box has dimension {bounding_box.dim}, expected {dim}")
    hs = dedupe_hyperplanes(hs)
    root = _relative_interior_point([], [], bounding_box, dim)
    if root is None:
        return []
    found = []

    def explore(k, signs, point):
        if k == len(hs):
            found.append(ArrangementCell(tuple(signs), tuple(point), _closure(hs, signs, bounding_box)))
            return
        h = hs[k]
        here = h.side(point)
        options = (-1, 0, 1) if include_faces else (-1, 1)
        for s in options:
            if s == here and (s != 0 or include_faces):
                p = point
            else:
                p = _relative_interior_point(hs[: k + 1], signs + [s], bounding_box, dim)
            if p is not None:
                explore(k + 1, signs + [s], p)

    explore(0, [], root)
    found.sort(key=lambda c: c.sign_vector)
    return found


def cell_contains(cell: ArrangementCell, point: Sequence) -> bool:
    return cell.closure.contains(point)
