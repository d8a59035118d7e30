"""Maximum independent set as a pessimistic bilevel LP.

Integrality of ``x_k`` in [0, 1] is forced by a small LP whose only
feasible weight vector is the indicator of ``k``: three moment equations
``sum tau = 1, sum i tau = k, sum i^2 tau = k^2`` give
``sum (i - k)^2 tau_i = 0``. The LP ``min x.lam + (1 - x).lam_bar`` over
``lam + lam_bar = tau`` then equals ``min(x_k, 1 - x_k)``. Dualizing it
yields a follower with three free variables (split into six nonnegative
ones) whose feasible set does not depend on ``k``, and one coupling row
per vertex.

Vertex indices are 0-based in files and 1-based inside the moment rows.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from .errors import BlpError, ParseError, SizeGuard
from .instance import PESSIMISTIC, BlpInstance
from .linprog import EQ, LE, LinearModel, Status, terms
from .numeric import ONE, ZERO
from .oracle import pessimistic_evaluate
from .valuefn import reaction_argmax

MAX_BRUTE_FORCE = 20
MAX_VERIFY = 6
FRACTIONS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))


@dataclass(frozen=True)
class Graph:
    num_vertices: int
    edges: tuple

    def __post_init__(self):
        n = self.num_vertices
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        seen = set()
        for e in self.edges:
            i, j = sorted(e)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if i < 0 or j >= n:
                raise ValueError(f"edge {tuple(e)} out of range for {n} vertices")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge {(i, j)}")
            seen.add((i, j))
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    def is_independent(self, subset) -> bool:
        s = set(subset)
        return not any(i in s and j in s for i, j in self.edges)


def graph_from_dict(data: dict) -> Graph:
    try:
        n, edges = data["num_vertices"], data["edges"]
    except (KeyError, TypeError) as e:
        raise ParseError(f"missing field {e}") from None
    if not isinstance(n, int) or not isinstance(edges, list):
        raise ParseError("num_vertices must be an integer and edges an array")
    try:
        return Graph(n, tuple(tuple(e) for e in edges))
    except (ValueError, TypeError) as e:
        raise ParseError(f"invalid graph: {e}") from None


def graph_to_dict(g: Graph) -> dict:
    return {"num_vertices": g.num_vertices, "edges": [list(e) for e in g.edges]}


def load_graph(path) -> Graph:
    with open(path, "rb") as fh:
        try:
            return graph_from_dict(json.loads(fh.read()))
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e}") from None


# -- integrality gadget -----------------------------------------------------

@dataclass(frozen=True)
class GadgetSystem:
    """Moment rows ``sum_i i^p tau_i = k^p`` for ``p = 0, 1, 2``."""

    k: int
    lambda_dim: int
    equality_rows: tuple

    def rhs(self) -> tuple:
        return (ONE, Fraction(self.k), Fraction(self.k) ** 2)


def build_gadget(k: int, num_vertices: int) -> GadgetSystem:
    if not 1 <= k <= num_vertices:
        raise ValueError(f"k must lie in 1..{num_vertices}")
    rows = tuple(tuple(Fraction(i) ** p for i in range(1, num_vertices + 1)) for p in range(3))
    return GadgetSystem(k, num_vertices, rows)


def tau_range(gadget: GadgetSystem, i: int) -> tuple[Fraction, Fraction]:
    """Min and max of ``tau_i`` (1-based) over the nonnegative moment system."""
    lp = LinearModel()
    tau = lp.add_variables(gadget.lambda_dim)
    for row, r in zip(gadget.equality_rows, gadget.rhs()):
        lp.add_constraint(terms(tau, row), EQ, r)
    lo = lp.solve({tau[i - 1]: 1}, "min")
    hi = lp.solve({tau[i - 1]: 1}, "max")
    return lo.value, hi.value


def gadget_value(gadget: GadgetSystem, x) -> Fraction:
    """``min x.lam + (1 - x).lam_bar`` over the moment rows on ``lam + lam_bar``."""
    n = gadget.lambda_dim
    lp = LinearModel()
    lam = lp.add_variables(n)
    bar = lp.add_variables(n)
    for row, r in zip(gadget.equality_rows, gadget.rhs()):
        lp.add_constraint(terms(lam, row) + terms(bar, row), EQ, r)
    out = lp.solve(terms(lam, x) + terms(bar, [1 - Fraction(v) for v in x]))
    return out.value


# -- reduction ----------------------------------------------------------------

def _moment_row(k: int) -> tuple:
    # s(k) = y1 + k y2 + k^2 y3 on (y+, y-)
    k = Fraction(k)
    return (-ONE, -k, -k * k, ONE, k, k * k)


def reduce_mis(g: Graph, box: Fraction | None = None) -> BlpInstance:
    """Pessimistic instance whose optimum is ``-OPT(g)``.

    ``box`` adds the follower rows ``y+ <= M`` and ``y- <= M``.
    """
    n = g.num_vertices
    A_l, h_l = [], []
    for i, j in g.edges:
        A_l.append(tuple(ONE if c in (i, j) else ZERO for c in range(n)))
        h_l.append(ONE)
    for k in range(n):
        A_l.append(tuple(ONE if c == k else ZERO for c in range(n)))
        h_l.append(ONE)
    G_l = [(ZERO,) * 6] * len(A_l)
    for k in range(1, n + 1):
        A_l.append((ZERO,) * n)
        G_l.append(_moment_row(k))
        h_l.append(ZERO)
    A_f, G_f, h_f = [], [], []
    for k in range(1, n + 1):
        e = tuple(ONE if c == k - 1 else ZERO for c in range(n))
        A_f.append(tuple(-v for v in e))
        G_f.append(_moment_row(k))
        h_f.append(ZERO)
        A_f.append(e)
        G_f.append(_moment_row(k))
        h_f.append(ONE)
    if box is not None:
        for c in range(6):
            A_f.append((ZERO,) * n)
            G_f.append(tuple(ONE if q == c else ZERO for q in range(6)))
            h_f.append(Fraction(box))
    return BlpInstance(
        n_l=n, n_f=6,
        leader_A=A_l, leader_G=G_l, leader_h=h_l,
        leader_cost_x=[-ONE] * n, leader_cost_y=[ZERO] * 6,
        follower_A=A_f, follower_G=G_f, follower_h=h_f, follower_cost=[ZERO] * 6,
        sense=PESSIMISTIC, name=f"mis-{n}v-{len(g.edges)}e" + ("-box" if box is not None else ""),
    )


def box_bound(g: Graph) -> Fraction:
    """Box size that keeps every coupling maximum attained.

    Fractional probes matter here: at binary ``x`` every coupling maximum
    is zero and any box keeps it so, while a too-tight box could lower the
    positive maximum that rejects a fractional ``x_k``.
    """
    inst = reduce_mis(g)
    m = ZERO
    for k in range(g.num_vertices):
        for f in FRACTIONS:
            x = [ZERO] * g.num_vertices
            x[k] = f
            for j in range(g.num_vertices):
                out = reaction_argmax(inst, x, _moment_row(j + 1), ZERO)
                m = max([m] + [abs(v) for v in out.primal])
    return 1 + m


def reduce_mis_boxed(g: Graph) -> BlpInstance:
    """Boxed reduction, with the box doubled until verification passes."""
    M = box_bound(g)
    for _ in range(32):
        inst = reduce_mis(g, M)
        if verify_reduction(g, inst).passed:
            return inst
        M *= 2
    raise BlpError("no box size passed verification")


@dataclass(frozen=True)
class MisResult:
    size: int
    witness: tuple


def solve_mis_bruteforce(g: Graph) -> MisResult:
    n = g.num_vertices
    if n > MAX_BRUTE_FORCE:
        raise SizeGuard(f"brute-force MIS is limited to {MAX_BRUTE_FORCE} vertices")
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            if g.is_independent(subset):
                return MisResult(size, subset)
    return MisResult(0, ())


@dataclass
class ReductionReport:
    binary_checked: int = 0
    fractional_checked: int = 0
    best_value: Fraction | None = None
    best_x: tuple | None = None
    mis_size: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def verify_reduction(g: Graph, inst: BlpInstance | None = None) -> ReductionReport:
    """Pointwise check of the reduction on binary and fractional points."""
    n = g.num_vertices
    if n > MAX_VERIFY:
        raise SizeGuard(f"verification is limited to {MAX_VERIFY} vertices")
    if inst is None:
        inst = reduce_mis(g)
    rep = ReductionReport(mis_size=solve_mis_bruteforce(g).size)
    for bits in product((0, 1), repeat=n):
        x = tuple(Fraction(b) for b in bits)
        ev = pessimistic_evaluate(inst, x)
        rep.binary_checked += 1
        indep = g.is_independent(k for k in range(n) if bits[k])
        if ev.feasible != indep:
            rep.mismatches.append(f"binary x={bits}: feasible={ev.feasible}, independent={indep}")
        elif indep and ev.value != -sum(bits):
            rep.mismatches.append(f"binary x={bits}: value {ev.value} != {-sum(bits)}")
        if ev.feasible and (rep.best_value is None or (ev.value, x) < (rep.best_value, rep.best_x)):
            rep.best_value, rep.best_x = ev.value, x
    for k in range(n):
        for f in FRACTIONS:
            x = [ZERO] * n
            x[k] = f
            ev = pessimistic_evaluate(inst, x)
            rep.fractional_checked += 1
            if ev.feasible:
                rep.mismatches.append(f"fractional x_{k}={f} accepted")
    if rep.best_value is None or -rep.best_value != rep.mis_size:
        rep.mismatches.append(f"best binary value {rep.best_value} does not match MIS size {rep.mis_size}")
    return rep


# -- fixtures -----------------------------------------------------------------

def _canonical_form(n: int, edges) -> tuple:
    from itertools import permutations
    best = None
    for p in permutations(range(n)):
        form = tuple(sorted(tuple(sorted((p[i], p[j]))) for i, j in edges))
        if best is None or form < best:
            best = form
    return best


def graphs_up_to_isomorphism(n: int) -> list[Graph]:
    """One representative per isomorphism class on ``n`` vertices."""
    pairs = list(combinations(range(n), 2))
    seen, out = set(), []
    for mask in range(1 << len(pairs)):
        edges = [pairs[b] for b in range(len(pairs)) if mask >> b & 1]
        form = _canonical_form(n, edges)
        if form not in seen:
            seen.add(form)
            out.append(Graph(n, form))
    return out


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)) + ((0, n - 1),))


def fixture_graphs() -> list[Graph]:
    """Every graph on 1 to 4 vertices up to isomorphism, then path-5 and cycle-5."""
    out = []
    for n in range(1, 5):
        out.extend(graphs_up_to_isomorphism(n))
    return out + [path_graph(5), cycle_graph(5)]
