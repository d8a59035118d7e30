"""Exact rational scalars, vectors and matrices.

Scalars are :class:`fractions.Fraction`, which is always kept in lowest
terms with a positive denominator. Vectors are tuples of fractions and
matrices are tuples of row tuples, so every value is immutable and hashable.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionError, ParseError, SingularError

Rational = Fraction
Vector = tuple  # tuple[Fraction, ...]
Matrix = tuple  # tuple[tuple[Fraction, ...], ...]

ZERO = Fraction(0)
ONE = Fraction(1)

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def to_rational(value) -> Fraction:
    """Coerce an int, Fraction or rational text token to a Fraction.

    Floats are rejected: they would smuggle binary rounding into exact data.
    """
    if isinstance(value, bool):
        raise ParseError(f"boolean is not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return Fraction(int(value.numerator), int(value.denominator))
    raise ParseError(f"not an exact rational: {value!r}")


def parse_rational(text: str) -> Fraction:
    token = text.strip()
    if not _RATIONAL_RE.match(token):
        raise ParseError(f"malformed rational {text!r}")
    if "/" in token:
        num, den = token.split("/")
        if int(den) == 0:
            raise ParseError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(token))


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def vector(values: Iterable, length: int | None = None) -> Vector:
    out = tuple(to_rational(v) for v in values)
    if length is not None and len(out) != length:
        raise DimensionError(f"expected vector of length {length}, got {len(out)}")
    return out


def matrix(rows: Iterable[Iterable], ncols: int | None = None, nrows: int | None = None) -> Matrix:
    """Build a matrix, checking that every row has the same arity."""
    out = tuple(vector(r) for r in rows)
    if nrows is not None and len(out) != nrows:
        raise DimensionError(f"expected {nrows} rows, got {len(out)}")
    if ncols is None and out:
        ncols = len(out[0])
    for i, row in enumerate(out):
        if len(row) != ncols:
            raise DimensionError(f"row {i} has {len(row)} entries, expected {ncols}")
    return out


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def unit(n: int, i: int) -> Vector:
    return tuple(ONE if k == i else ZERO for k in range(n))


def identity(n: int) -> Matrix:
    return tuple(unit(n, i) for i in range(n))


def dot(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise DimensionError(f"dot of lengths {len(u)} and {len(v)}")
    return sum((a * b for a, b in zip(u, v) if a and b), ZERO)


def matvec(M: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(dot(row, v) for row in M)


def transpose(M: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    if not M:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*M))


def add(u: Sequence, v: Sequence) -> Vector:
    if len(u) != len(v):
        raise DimensionError(f"add of lengths {len(u)} and {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> Vector:
    if len(u) != len(v):
        raise DimensionError(f"sub of lengths {len(u)} and {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v: Sequence) -> Vector:
    return tuple(c * a for a in v)


def is_zero(v: Sequence) -> bool:
    return all(a == 0 for a in v)


def _check_square(M: Sequence[Sequence]) -> int:
    n = len(M)
    for i, row in enumerate(M):
        if len(row) != n:
            raise DimensionError(f"matrix is not square: row {i} has {len(row)} entries, expected {n}")
    return n


def determinant(M: Sequence[Sequence]) -> Fraction:
    """Exact determinant by Bareiss fraction-free elimination."""
    n = _check_square(M)
    if n == 0:
        return ONE
    a = [list(map(to_rational, row)) for row in M]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return ZERO
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) / prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _eliminate(M: Sequence[Sequence], r: Sequence):
    """Gauss-Jordan on [M | r]; returns (reduced rows, pivot columns)."""
    ncols = len(M[0]) if M else 0
    rows = [list(map(to_rational, row)) + [to_rational(b)] for row, b in zip(M, r)]
    pivots = []
    top = 0
    for col in range(ncols):
        piv = next((i for i in range(top, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[top], rows[piv] = rows[piv], rows[top]
        pr = rows[top]
        inv = 1 / pr[col]
        for j in range(col, ncols + 1):
            pr[j] *= inv
        for i in range(len(rows)):
            if i != top and rows[i][col] != 0:
                f = rows[i][col]
                ri = rows[i]
                for j in range(col, ncols + 1):
                    if pr[j]:
                        ri[j] -= f * pr[j]
        pivots.append(col)
        top += 1
        if top == len(rows):
            break
    return rows, pivots


def solve_square_system(M: Sequence[Sequence], r: Sequence) -> Vector:
    """Return the unique v with M v = r; raise SingularError if det(M) = 0."""
    n = _check_square(M)
    if len(r) != n:
        raise DimensionError(f"rhs has length {len(r)}, expected {n}")
    if n == 0:
        return ()
    rows, pivots = _eliminate(M, r)
    if len(pivots) < n:
        raise SingularError("matrix is singular")
    return tuple(rows[i][n] for i in range(n))


def solve_consistent_system(M: Sequence[Sequence], r: Sequence) -> Vector:
    """Solve a possibly overdetermined system with a unique exact solution.

    Raises SingularError when the system is inconsistent or the solution
    is not unique.
    """
    if len(M) != len(r):
        raise DimensionError(f"{len(M)} rows but rhs of length {len(r)}")
    ncols = len(M[0]) if M else 0
    rows, pivots = _eliminate(M, r)
    for row in rows[len(pivots):]:
        if row[ncols] != 0:
            raise SingularError("system is inconsistent")
    if len(pivots) < ncols:
        raise SingularError("system has no unique solution")
    return tuple(rows[i][ncols] for i in range(ncols))


def rank(M: Sequence[Sequence]) -> int:
    if not M:
        return 0
    _, pivots = _eliminate(M, [ZERO] * len(M))
    return len(pivots)
