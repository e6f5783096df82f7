"""Exact rational scalars and dense linear algebra over ``Fraction``.

Vectors are tuples (or lists) of ``Fraction``; matrices are sequences of rows.
Nothing here ever touches a float.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

from .errors import DimensionMismatch, ParseError

Vector = tuple[Fraction, ...]
Matrix = Sequence[Sequence[Fraction]]


def to_rational(value) -> Fraction:
    """Parse ``"p/q"``, an integer, a decimal string or a ``Fraction``.

    Floats are rejected on purpose: ``0.1`` has no exact binary value and
    silently accepting it would make equality tests meaningless.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational: {value!r}") from exc
    raise ParseError(f"not a rational (floats are not accepted): {value!r}")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def vec(values) -> Vector:
    return tuple(to_rational(v) for v in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionMismatch(f"length {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def sub(u, v) -> Vector:
    if len(u) != len(v):
        raise DimensionMismatch(f"length {len(u)} vs {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def add(u, v) -> Vector:
    if len(u) != len(v):
        raise DimensionMismatch(f"length {len(u)} vs {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def scale(c, u) -> Vector:
    c = Fraction(c)
    return tuple(c * a for a in u)


def is_zero(u) -> bool:
    return all(a == 0 for a in u)


def _check_rectangular(rows: Matrix) -> int:
    if not rows:
        return 0
    width = len(rows[0])
    for r in rows:
        if len(r) != width:
            raise DimensionMismatch("rows have unequal lengths")
    return width


def _integer_rows(rows: Matrix) -> list[list[int]]:
    out = []
    for r in rows:
        m = lcm(*(Fraction(x).denominator for x in r)) if r else 1
        out.append([int(Fraction(x) * m) for x in r])
    return out


def rank(rows: Matrix) -> int:
    """Rank by fraction-free (Bareiss) elimination on integer-scaled rows."""
    width = _check_rectangular(rows)
    a = _integer_rows(rows)
    n = len(a)
    r = 0
    prev = 1
    for col in range(width):
        if r == n:
            break
        piv = max(range(r, n), key=lambda i: abs(a[i][col]))
        if a[piv][col] == 0:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][col]
        for i in range(r + 1, n):
            f = a[i][col]
            row_i = a[i]
            row_r = a[r]
            for j in range(col, width):
                # exact division is guaranteed by Sylvester's identity
                row_i[j] = (p * row_i[j] - f * row_r[j]) // prev
        prev = p
        r += 1
    return r


def row_reduce(rows: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and the pivot columns."""
    width = _check_rectangular(rows)
    a = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(width):
        piv = next((i for i in range(r, len(a)) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][col]
        a[r] = [x / p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def solve(matrix: Matrix, rhs: Sequence[Fraction]) -> Vector:
    """Solve a square nonsingular system exactly (partial pivoting on |a|)."""
    n = len(matrix)
    if _check_rectangular(matrix) != n or len(rhs) != n:
        raise DimensionMismatch("solve() needs a square system")
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = max(range(col, n), key=lambda i: abs(a[i][col]))
        if a[piv][col] == 0:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        for i in range(col + 1, n):
            f = a[i][col] / p
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = a[i][n] - sum((a[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        x[i] = s / a[i][i]
    return tuple(x)


def independent_subset(vectors: Sequence[Sequence[Fraction]]) -> list[int]:
    """Indices of a maximal linearly independent subset, greedy in order."""
    chosen: list[int] = []
    basis: list[list[Fraction]] = []  # kept in echelon form
    pivcols: list[int] = []
    for idx, v in enumerate(vectors):
        w = [Fraction(x) for x in v]
        for b, pc in zip(basis, pivcols):
            if w[pc]:
                f = w[pc] / b[pc]
                w = [x - f * y for x, y in zip(w, b)]
        pc = next((j for j, x in enumerate(w) if x != 0), None)
        if pc is not None:
            basis.append(w)
            pivcols.append(pc)
            chosen.append(idx)
    return chosen


def coordinates(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vector | None:
    """Coefficients c with sum(c[i] * basis[i]) == v, or None if v is outside the span.

    ``basis`` must be linearly independent.
    """
    k = len(basis)
    if k == 0:
        return () if is_zero(v) else None
    width = len(v)
    # columns are basis vectors; augmented with v
    aug = [[Fraction(basis[i][j]) for i in range(k)] + [Fraction(v[j])] for j in range(width)]
    red, piv = row_reduce(aug)
    if k in piv:
        return None
    return tuple(red[i][k] for i in range(k))


def in_span(generators: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> bool:
    if not generators:
        return is_zero(v)
    return rank(list(generators) + [list(v)]) == rank(generators)


def nullspace(rows: Matrix, width: int | None = None) -> list[Vector]:
    """A basis of {x : rows @ x == 0}."""
    if width is None:
        width = _check_rectangular(rows)
    if not rows:
        return [tuple(Fraction(int(i == j)) for i in range(width)) for j in range(width)]
    red, piv = row_reduce(rows)
    free = [j for j in range(width) if j not in piv]
    out = []
    for f in free:
        x = [Fraction(0)] * width
        x[f] = Fraction(1)
        for r, pc in enumerate(piv):
            x[pc] = -red[r][f]
        out.append(tuple(x))
    return out


def transpose(rows: Matrix) -> list[list[Fraction]]:
    return [list(col) for col in zip(*rows)]


def matvec(rows: Matrix, v: Sequence[Fraction]) -> Vector:
    return tuple(dot(r, v) for r in rows)
