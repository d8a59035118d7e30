"""Seeded random instances that satisfy A1 by construction.

Both levels get box rows (``x_j <= B`` as pure leader rows, ``y_i <= B`` as
follower rows with a zero ``A_f`` part), which bounds the leader set and
the follower's feasible set. Draws that still fail validation (typically
an empty follower set at some leader vertex) are re-rolled from the same
random stream, so a seed always maps to the same instance.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .errors import BlpError
from .instance import OPTIMISTIC, PESSIMISTIC, SATISFIED, BlpInstance, validate_a1

FAMILIES = ("random-optimistic", "random-pessimistic")
BOX = Fraction(2)
MAX_TRIES = 1000


def _entry(rng: random.Random, lo: int = -5, hi: int = 5) -> Fraction:
    den = rng.choice((1, 1, 2))
    return Fraction(rng.randint(lo * den, hi * den), den)


def _small(rng: random.Random) -> Fraction:
    # sparse small integers create ties in the follower problem
    return Fraction(rng.choice((-2, -1, -1, 0, 0, 1, 1, 2)))


def _draw(rng, family, nl, nf, ml, mf, index):
    pessimistic = family == "random-pessimistic"
    A_l = [[_entry(rng) for _ in range(nl)] for _ in range(ml)]
    G_l = [[_entry(rng) for _ in range(nf)] for _ in range(ml)]
    h_l = [_entry(rng, 0, 8) for _ in range(ml)]
    if pessimistic:
        for row in G_l:
            if not any(row) and nf:
                row[rng.randrange(nf)] = Fraction(1)
    for j in range(nl):
        A_l.append([Fraction(int(c == j)) for c in range(nl)])
        G_l.append([Fraction(0)] * nf)
        h_l.append(BOX)
    A_f = [[_entry(rng) for _ in range(nl)] for _ in range(mf)]
    G_f = [[_entry(rng) for _ in range(nf)] for _ in range(mf)]
    h_f = [_entry(rng, 0, 8) for _ in range(mf)]
    for i in range(nf):
        A_f.append([Fraction(0)] * nl)
        G_f.append([Fraction(int(c == i)) for c in range(nf)])
        h_f.append(BOX)
    c_l = [_entry(rng) for _ in range(nl)]
    if pessimistic:
        d_l = [_small(rng) if rng.random() < 0.3 else Fraction(0) for _ in range(nf)]
    else:
        d_l = [_entry(rng) for _ in range(nf)]
    d_f = [_small(rng) for _ in range(nf)]
    return BlpInstance(
        nl, nf, A_l, G_l, h_l, c_l, d_l, A_f, G_f, h_f, d_f,
        sense=PESSIMISTIC if pessimistic else OPTIMISTIC,
        name=f"{family}-{nl}-{nf}-{ml}-{mf}-{index}",
    )


def generate(family: str, seed: int, nl: int, nf: int, ml: int, mf: int) -> BlpInstance:
    """One instance; ``ml`` and ``mf`` count the random rows, box rows are extra.

    In the pessimistic family every random leader row is a coupling row.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    rng = random.Random(f"{family}:{seed}:{nl}:{nf}:{ml}:{mf}")
    for _ in range(MAX_TRIES):
        inst = _draw(rng, family, nl, nf, ml, mf, seed)
        if validate_a1(inst).a1_status == SATISFIED:
            return inst
    raise BlpError(f"no A1-satisfying draw in {MAX_TRIES} tries")


def random_suite(family: str, count: int, seed: int = 0, max_dims=(3, 3, 3, 3)):
    """``count`` instances with dimensions drawn up to ``max_dims = (nl, nf, ml, mf)``.

    A ``max_dims`` entry given as a pair ``(lo, hi)`` fixes a range instead.
    """
    rng = random.Random(f"suite:{family}:{seed}")
    out = []
    for k in range(count):
        dims = []
        for d in max_dims:
            lo, hi = d if isinstance(d, tuple) else (1, d)
            dims.append(rng.randint(lo, hi))
        out.append(generate(family, rng.randrange(10 ** 9), *dims))
    return out


def generate_special(kind: str, seed: int, nl: int, nf: int, ml: int, mf: int) -> BlpInstance:
    """Coupling-free instance with ``d_l = d_f`` (``kind="minmin"``) or
    ``d_l = -d_f`` (``kind="minmax"``)."""
    if kind not in ("minmin", "minmax"):
        raise ValueError(f"unknown kind {kind!r}")
    sign = 1 if kind == "minmin" else -1
    rng = random.Random(f"{kind}:{seed}:{nl}:{nf}:{ml}:{mf}")
    for _ in range(MAX_TRIES):
        base = _draw(rng, "random-optimistic", nl, nf, ml, mf, seed)
        inst = base.replace(
            leader_G=[[0] * nf for _ in base.leader_G],
            leader_cost_y=[sign * v for v in base.follower_cost],
            name=f"{kind}-{nl}-{nf}-{ml}-{mf}-{seed}",
        )
        if validate_a1(inst).a1_status == SATISFIED:
            return inst
    raise BlpError(f"no A1-satisfying draw in {MAX_TRIES} tries")
