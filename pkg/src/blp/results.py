"""Result records returned by the bilevel solvers and oracles."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

OPTIMAL, INFEASIBLE = "optimal", "infeasible"


@dataclass(frozen=True)
class OptimisticResult:
    status: str
    value: Fraction | None = None
    x: tuple | None = None
    y: tuple | None = None
    winning_piece: int | None = None
    lp_count: int = 0
    method: str = "thm1"
    notes: tuple = field(default=())

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass(frozen=True)
class PessimisticResult:
    status: str
    value: Fraction | None = None
    x: tuple | None = None
    cell_sign_vector: tuple | None = None
    piece_index: int | None = None
    verified_pointwise: bool = False
    cells: int = 0
    bases: int = 0
    lp_solves: int = 0
    method: str = "thm2"
    active_bases: tuple = ()
    notes: tuple = field(default=())
    candidates: tuple = field(default=(), repr=False, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL
