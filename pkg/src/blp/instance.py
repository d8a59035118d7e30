"""Bilevel LP data model, JSON I/O and assumption checks.

The leader solves ``min c_l.x + d_l.y`` subject to ``A_l x + G_l y <= h_l``
with ``x >= 0``; the follower solves ``min d_f.y`` over
``Y(x) = {y >= 0 : A_f x + G_f y <= h_f}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DimensionError, ParseError
from .geometry import HPolyhedron, enumerate_vertices
from .linprog import LE, LinearModel, Status, terms
from .numeric import format_rational, is_zero, matrix, to_rational, vector

OPTIMISTIC, PESSIMISTIC = "optimistic", "pessimistic"


@dataclass(frozen=True)
class BlpInstance:
    n_l: int
    n_f: int
    leader_A: tuple
    leader_G: tuple
    leader_h: tuple
    leader_cost_x: tuple
    leader_cost_y: tuple
    follower_A: tuple
    follower_G: tuple
    follower_h: tuple
    follower_cost: tuple
    sense: str = OPTIMISTIC
    name: str = ""

    def __post_init__(self):
        n_l, n_f = self.n_l, self.n_f
        if n_l < 0 or n_f < 0:
            raise DimensionError("variable counts must be nonnegative")
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("leader_A", matrix(self.leader_A, ncols=n_l))
        m_l = len(self.leader_A)
        set_("leader_G", matrix(self.leader_G, ncols=n_f, nrows=m_l))
        set_("leader_h", vector(self.leader_h, m_l))
        set_("leader_cost_x", vector(self.leader_cost_x, n_l))
        set_("leader_cost_y", vector(self.leader_cost_y, n_f))
        set_("follower_A", matrix(self.follower_A, ncols=n_l))
        m_f = len(self.follower_A)
        set_("follower_G", matrix(self.follower_G, ncols=n_f, nrows=m_f))
        set_("follower_h", vector(self.follower_h, m_f))
        set_("follower_cost", vector(self.follower_cost, n_f))
        if self.sense not in (OPTIMISTIC, PESSIMISTIC):
            raise ValueError(f"unknown sense {self.sense!r}")

    @property
    def m_l(self) -> int:
        return len(self.leader_A)

    @property
    def m_f(self) -> int:
        return len(self.follower_A)

    def replace(self, **changes) -> "BlpInstance":
        from dataclasses import replace
        return replace(self, **changes)


@dataclass(frozen=True)
class CouplingView:
    pure_rows: tuple
    coupling_rows: tuple
    inst: BlpInstance = field(repr=False, compare=False)

    def coupling(self, j: int):
        """``(a_l, g_l, h_l)`` of leader row ``j``."""
        i = self.inst
        return i.leader_A[j], i.leader_G[j], i.leader_h[j]

    def leader_set(self) -> HPolyhedron:
        """The coupling-free leader polyhedron ``{x >= 0 : pure rows}``."""
        i = self.inst
        return HPolyhedron(
            [i.leader_A[r] for r in self.pure_rows],
            [i.leader_h[r] for r in self.pure_rows],
            (True,) * i.n_l,
        )


def coupling_view(inst: BlpInstance) -> CouplingView:
    pure, coupled = [], []
    for r, g in enumerate(inst.leader_G):
        (coupled if not is_zero(g) else pure).append(r)
    return CouplingView(tuple(pure), tuple(coupled), inst)


# -- JSON I/O ---------------------------------------------------------------

def _num(q: Fraction):
    return q.numerator if q.denominator == 1 else format_rational(q)


def _parse_vec(raw, where, length=None):
    if not isinstance(raw, list):
        raise ParseError(f"{where}: expected an array")
    out = []
    for k, v in enumerate(raw):
        try:
            out.append(to_rational(v))
        except ParseError as e:
            raise ParseError(f"{where}[{k}]: {e}") from None
    if length is not None and len(out) != length:
        raise ParseError(f"{where}: expected {length} entries, got {len(out)}")
    return tuple(out)


def _parse_mat(raw, where, ncols, nrows=None):
    if not isinstance(raw, list):
        raise ParseError(f"{where}: expected an array of rows")
    if nrows is not None and len(raw) != nrows:
        raise ParseError(f"{where}: expected {nrows} rows, got {len(raw)}")
    rows = []
    for r, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != ncols:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise ParseError(f"{where} row {r}: expected {ncols} entries, got {got}")
        rows.append(_parse_vec(row, f"{where}[{r}]"))
    return tuple(rows)


def instance_from_dict(data: dict) -> BlpInstance:
    try:
        n_l = data["num_leader_vars"]
        n_f = data["num_follower_vars"]
        leader, follower = data["leader"], data["follower"]
        sense = data.get("sense", OPTIMISTIC)
    except (KeyError, TypeError) as e:
        raise ParseError(f"missing field {e}") from None
    if not isinstance(n_l, int) or not isinstance(n_f, int) or isinstance(n_l, bool) or isinstance(n_f, bool):
        raise ParseError("num_leader_vars and num_follower_vars must be integers")
    if sense not in (OPTIMISTIC, PESSIMISTIC):
        raise ParseError(f"sense must be optimistic or pessimistic, got {sense!r}")
    try:
        A_l = _parse_mat(leader.get("A", []), "leader.A", n_l)
        m_l = len(A_l)
        G_l = _parse_mat(leader.get("G", [[0] * n_f for _ in range(m_l)]), "leader.G", n_f, m_l)
        h_l = _parse_vec(leader.get("h", []), "leader.h", m_l)
        c_l = _parse_vec(leader["cost_x"], "leader.cost_x", n_l)
        d_l = _parse_vec(leader.get("cost_y", [0] * n_f), "leader.cost_y", n_f)
        A_f = _parse_mat(follower.get("A", []), "follower.A", n_l)
        m_f = len(A_f)
        G_f = _parse_mat(follower["G"], "follower.G", n_f, m_f)
        h_f = _parse_vec(follower["h"], "follower.h", m_f)
        d_f = _parse_vec(follower["cost"], "follower.cost", n_f)
    except KeyError as e:
        raise ParseError(f"missing field {e}") from None
    return BlpInstance(n_l, n_f, A_l, G_l, h_l, c_l, d_l, A_f, G_f, h_f, d_f, sense, str(data.get("name", "")))


def instance_to_dict(inst: BlpInstance) -> dict:
    mat = lambda M: [[_num(v) for v in row] for row in M]  # noqa: E731
    vec = lambda v: [_num(a) for a in v]  # noqa: E731
    return {
        "name": inst.name,
        "sense": inst.sense,
        "num_leader_vars": inst.n_l,
        "num_follower_vars": inst.n_f,
        "leader": {
            "A": mat(inst.leader_A),
            "G": mat(inst.leader_G),
            "h": vec(inst.leader_h),
            "cost_x": vec(inst.leader_cost_x),
            "cost_y": vec(inst.leader_cost_y),
        },
        "follower": {
            "A": mat(inst.follower_A),
            "G": mat(inst.follower_G),
            "h": vec(inst.follower_h),
            "cost": vec(inst.follower_cost),
        },
    }


def parse_instance(raw: bytes | str) -> BlpInstance:
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ParseError(f"invalid JSON: {e}") from None
    if not isinstance(data, dict):
        raise ParseError("instance file must hold a JSON object")
    return instance_from_dict(data)


def serialize_instance(inst: BlpInstance) -> bytes:
    return (json.dumps(instance_to_dict(inst), indent=2) + "\n").encode("utf-8")


def load_instance(path) -> BlpInstance:
    with open(path, "rb") as fh:
        return parse_instance(fh.read())


# -- Assumption A1 ----------------------------------------------------------

SATISFIED, RELAXED, VIOLATED = "satisfied", "relaxed", "violated"


@dataclass(frozen=True)
class ValidationReport:
    leader_set_nonempty: bool
    leader_set_bounded: bool
    follower_recession_trivial: bool
    follower_nonempty_on_leader_vertices: bool
    a1_status: str
    notes: tuple = ()


def follower_feasible(inst: BlpInstance, x) -> bool:
    lp = LinearModel()
    y = lp.add_variables(inst.n_f)
    for a, g, h in zip(inst.follower_A, inst.follower_G, inst.follower_h):
        lp.add_constraint(terms(y, g), LE, h - sum(ai * xi for ai, xi in zip(a, x)))
    return lp.solve().status is not Status.INFEASIBLE


def validate_a1(inst: BlpInstance) -> ValidationReport:
    """Check nonemptiness and boundedness of both levels.

    Follower nonemptiness over the whole leader set reduces to its vertices
    because ``{x : Y(x) nonempty}`` is convex.
    """
    view = coupling_view(inst)
    X = view.leader_set()
    notes = []

    lp = LinearModel()
    x = lp.add_variables(inst.n_l)
    for a, beta in zip(X.A, X.b):
        lp.add_constraint(terms(x, a), LE, beta)
    nonempty = lp.solve().status is Status.OPTIMAL
    bounded = nonempty
    if nonempty:
        for j in range(inst.n_l):
            if lp.solve({x[j]: 1}, "max").status is not Status.OPTIMAL:
                bounded = False
                notes.append(f"leader variable {j} is unbounded above on the coupling-free leader set")
                break
    else:
        notes.append("coupling-free leader set is empty")

    rec = LinearModel()
    y = rec.add_variables(inst.n_f)
    for g in inst.follower_G:
        rec.add_constraint(terms(y, g), LE, 0)
    rec.add_constraint([(c, 1) for c in y], LE, 1)
    ray = rec.solve([(c, 1) for c in y], "max")
    recession_trivial = ray.value == 0
    if not recession_trivial:
        notes.append("follower feasible set has a recession direction (unbounded Y(x))")

    follower_ok = False
    if nonempty and bounded:
        verts = enumerate_vertices(X)
        bad = [v for v in verts if not follower_feasible(inst, v)]
        follower_ok = not bad
        if bad:
            notes.append(f"follower infeasible at leader vertex {[format_rational(q) for q in bad[0]]}")

    flags = (nonempty, bounded, recession_trivial, follower_ok)
    if all(flags):
        status = SATISFIED
    elif nonempty and bounded and follower_ok:
        status = RELAXED
    else:
        status = VIOLATED
    return ValidationReport(*flags, a1_status=status, notes=tuple(notes))


# -- Canonical fixtures -----------------------------------------------------

def fixture_t1() -> BlpInstance:
    """Optimistic toy: leader x in [0, 1], follower max y <= x."""
    return BlpInstance(
        n_l=1, n_f=1,
        leader_A=[[1]], leader_G=[[0]], leader_h=[1],
        leader_cost_x=[1], leader_cost_y=[1],
        follower_A=[[-1]], follower_G=[[1]], follower_h=[0], follower_cost=[-1],
        sense=OPTIMISTIC, name="T1",
    )


def fixture_t2() -> BlpInstance:
    """Pessimistic toy: zero follower objective, coupling row y <= 1/2."""
    return BlpInstance(
        n_l=1, n_f=1,
        leader_A=[[1], [0]], leader_G=[[0], [1]], leader_h=[1, Fraction(1, 2)],
        leader_cost_x=[-1], leader_cost_y=[0],
        follower_A=[[-1]], follower_G=[[1]], follower_h=[0], follower_cost=[0],
        sense=PESSIMISTIC, name="T2",
    )
