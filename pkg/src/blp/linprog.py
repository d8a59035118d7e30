"""Exact two-phase simplex over the rationals.

Bland's least-index rule is used in both phases, so the returned basic
solution is a deterministic function of the input. Every optimal outcome
carries a dual vector whose objective equals the primal objective exactly;
infeasible outcomes carry a Farkas vector and unbounded outcomes a ray.

Dual sign conventions (value == rhs . dual at optimality):

* ``min``: ``dual[i] <= 0`` on ``<=`` rows, ``>= 0`` on ``>=`` rows and
  ``c_j - dual . A_j >= 0`` for nonnegative variables (``== 0`` for free).
* ``max``: signs flip: ``dual[i] >= 0`` on ``<=`` rows and
  ``c_j - dual . A_j <= 0``.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import BlpError, DimensionError
from .numeric import ZERO, dot, matrix, vector

LE, EQ, GE = "<=", "=", ">="
_RELATIONS = (LE, EQ, GE)

# Running tally of optimal solves and strong-duality violations, read by the
# acceptance suite.
AUDIT: Counter = Counter()


class DualityViolation(BlpError, AssertionError):
    pass


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpProblem:
    objective: tuple
    matrix: tuple
    rhs: tuple
    relations: tuple
    sense: str = "min"
    free: tuple = ()

    def __post_init__(self):
        n = len(self.objective)
        object.__setattr__(self, "objective", vector(self.objective))
        object.__setattr__(self, "matrix", matrix(self.matrix, ncols=n))
        object.__setattr__(self, "rhs", vector(self.rhs, len(self.matrix)))
        rels = tuple(self.relations)
        if len(rels) != len(self.matrix):
            raise DimensionError(f"{len(rels)} relations for {len(self.matrix)} rows")
        for r in rels:
            if r not in _RELATIONS:
                raise ValueError(f"unknown row relation {r!r}")
        object.__setattr__(self, "relations", rels)
        free = tuple(bool(f) for f in self.free) if self.free else (False,) * n
        if len(free) != n:
            raise DimensionError(f"{len(free)} free flags for {n} variables")
        object.__setattr__(self, "free", free)
        if self.sense not in ("min", "max"):
            raise ValueError(f"unknown sense {self.sense!r}")

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def num_rows(self) -> int:
        return len(self.rhs)


@dataclass(frozen=True)
class LpOutcome:
    status: Status
    value: Fraction | None = None
    primal: tuple | None = None
    dual: tuple | None = None
    ray: tuple | None = None
    farkas: tuple | None = None

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _Tableau:
    def __init__(self, rows, basis, ncols):
        self.rows = rows
        self.basis = basis
        self.ncols = ncols
        self.obj = None

    def pivot(self, r, j):
        pr = self.rows[r]
        piv = pr[j]
        if piv != 1:
            inv = 1 / piv
            pr = [v * inv if v else v for v in pr]
            self.rows[r] = pr
        nz = [k for k, v in enumerate(pr) if v]
        for i, row in enumerate(self.rows):
            if i != r:
                f = row[j]
                if f:
                    for k in nz:
                        row[k] -= f * pr[k]
        f = self.obj[j]
        if f:
            obj = self.obj
            for k in nz:
                obj[k] -= f * pr[k]
        self.basis[r] = j

    def entering(self, limit):
        obj = self.obj
        for j in range(limit):
            if obj[j] < 0:
                return j
        return None

    def leaving(self, j):
        best = None
        best_ratio = None
        for i, row in enumerate(self.rows):
            a = row[j]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best_ratio or (ratio == best_ratio and self.basis[i] < self.basis[best]):
                    best, best_ratio = i, ratio
        return best

    def run(self, limit):
        """Bland iterations over columns < limit. Returns unbounded column or None."""
        while True:
            j = self.entering(limit)
            if j is None:
                return None
            r = self.leaving(j)
            if r is None:
                return j
            self.pivot(r, j)


def solve_lp(p: LpProblem) -> LpOutcome:
    """Solve ``p`` exactly; see the module docstring for certificate conventions."""
    n, m = p.num_vars, p.num_rows
    sgn = 1 if p.sense == "min" else -1

    cols = []  # structural and slack columns of the standard form: (var or None, coefficient sign / row)
    for j in range(n):
        cols.append((j, 1))
        if p.free[j]:
            cols.append((j, -1))
    n_struct = len(cols)
    slack_of_row = {}
    for i, rel in enumerate(p.relations):
        if rel != EQ:
            slack_of_row[i] = len(cols)
            cols.append((None, i))
    N = len(cols)
    width = N + m + 1

    flips = []
    rows = []
    for i in range(m):
        arow = p.matrix[i]
        row = [ZERO] * width
        for c in range(n_struct):
            j, s = cols[c]
            a = arow[j]
            if a:
                row[c] = a if s > 0 else -a
        if i in slack_of_row:
            row[slack_of_row[i]] = Fraction(1 if p.relations[i] == LE else -1)
        row[N + i] = Fraction(1)
        b = p.rhs[i]
        flip = 1
        if b < 0:
            flip = -1
            row = [-v for v in row]
            row[N + i] = Fraction(1)
        row[-1] = b * flip
        flips.append(flip)
        rows.append(row)

    tab = _Tableau(rows, [N + i for i in range(m)], width)

    # Phase 1: minimise the sum of artificials.
    obj = [ZERO] * width
    for row in rows:
        for k in range(N):
            if row[k]:
                obj[k] -= row[k]
        obj[-1] -= row[-1]
    tab.obj = obj
    tab.run(N)
    if tab.obj[-1] != 0:
        farkas = tuple(flips[i] * (1 - tab.obj[N + i]) for i in range(m))
        return LpOutcome(Status.INFEASIBLE, farkas=farkas)

    for r in range(m):
        if tab.basis[r] >= N:
            row = tab.rows[r]
            k = next((k for k in range(N) if row[k] != 0), None)
            if k is not None:
                tab.pivot(r, k)

    # Phase 2.
    cost = [ZERO] * width
    for c in range(n_struct):
        j, s = cols[c]
        cost[c] = sgn * s * p.objective[j]
    obj = list(cost)
    for r, row in enumerate(tab.rows):
        cb = cost[tab.basis[r]]
        if cb:
            for k in range(width):
                if row[k]:
                    obj[k] -= cb * row[k]
    tab.obj = obj
    unbounded_col = tab.run(N)

    xs = [ZERO] * N
    for r, b in enumerate(tab.basis):
        if b < N:
            xs[b] = tab.rows[r][-1]
    primal = _to_original(xs, cols, n_struct, n)

    if unbounded_col is not None:
        d = [ZERO] * N
        d[unbounded_col] = Fraction(1)
        for r, b in enumerate(tab.basis):
            if b < N:
                d[b] = -tab.rows[r][unbounded_col]
        ray = _to_original(d, cols, n_struct, n)
        return LpOutcome(Status.UNBOUNDED, primal=primal, ray=ray)

    dual = tuple(sgn * flips[i] * -tab.obj[N + i] for i in range(m))
    value = dot(p.objective, primal)
    AUDIT["optimal"] += 1
    if value != dot(p.rhs, dual):
        AUDIT["duality_violations"] += 1
        raise DualityViolation(f"primal {value} != dual {dot(p.rhs, dual)}")
    return LpOutcome(Status.OPTIMAL, value=value, primal=primal, dual=dual)


def _to_original(xs, cols, n_struct, n):
    x = [ZERO] * n
    for c in range(n_struct):
        j, s = cols[c]
        if xs[c]:
            x[j] += s * xs[c]
    return tuple(x)


@dataclass
class LinearModel:
    """Incremental builder for :class:`LpProblem`.

    Variables are referred to by integer column; rows are sparse maps.
    """

    free: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return len(self.free)

    def add_variables(self, count: int, free: bool = False) -> list[int]:
        start = len(self.free)
        self.free.extend([free] * count)
        return list(range(start, start + count))

    def add_constraint(self, terms, relation: str, rhs) -> int:
        coeffs: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for col, coef in items:
            if coef:
                coeffs[col] = coeffs.get(col, ZERO) + Fraction(coef)
        self.rows.append((coeffs, relation, Fraction(rhs)))
        return len(self.rows) - 1

    def problem(self, objective: Mapping | Iterable = (), sense: str = "min") -> LpProblem:
        n = self.num_vars
        c = [ZERO] * n
        items = objective.items() if isinstance(objective, Mapping) else objective
        for col, coef in items:
            c[col] += Fraction(coef)
        A = []
        for coeffs, _, _ in self.rows:
            row = [ZERO] * n
            for col, coef in coeffs.items():
                row[col] = coef
            A.append(row)
        return LpProblem(
            objective=c,
            matrix=A,
            rhs=[b for _, _, b in self.rows],
            relations=[rel for _, rel, _ in self.rows],
            sense=sense,
            free=self.free,
        )

    def solve(self, objective: Mapping | Iterable = (), sense: str = "min") -> LpOutcome:
        return solve_lp(self.problem(objective, sense))


def terms(cols: Iterable[int], coefs: Iterable) -> list:
    """Pair columns with coefficients, dropping zeros."""
    return [(c, a) for c, a in zip(cols, coefs) if a]
