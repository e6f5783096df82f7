"""Two-phase tableau simplex over ``Fraction`` with Bland's rule.

Solves::

    maximize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                x >= 0

exactly and returns primal and dual solutions. Every row receives an
artificial column, so the final tableau carries ``B^-1`` and the duals can be
read off directly. Redundant equality rows are detected after phase 1 and
dropped (their duals are zero).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import CapExceeded, DimensionMismatch

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

DEFAULT_MAX_ITER = 10_000


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    objective: Fraction | None = None
    # y_ub >= 0 for a maximization with <= rows; y_eq free
    y_ub: tuple[Fraction, ...] | None = None
    y_eq: tuple[Fraction, ...] | None = None
    iterations: int = 0


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows  # list[list[Fraction]]
        self.rhs = rhs
        self.basis = basis
        self.iterations = 0

    def pivot(self, r, col):
        row = self.rows[r]
        p = row[col]
        if p != 1:
            row[:] = [v / p for v in row]
            self.rhs[r] /= p
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[col]
            if f:
                other[:] = [a - f * b for a, b in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = col
        self.iterations += 1

    def reduced_costs(self, cost, allowed):
        # cost[j] - cost_B @ column_j, only for allowed columns
        cb = [cost[j] for j in self.basis]
        out = {}
        for j in allowed:
            z = sum((cb[i] * self.rows[i][j] for i in range(len(self.rows)) if cb[i]), Fraction(0))
            out[j] = cost[j] - z
        return out

    def run(self, cost, allowed, max_iter):
        """Maximize cost over the current basis. Returns OPTIMAL or UNBOUNDED."""
        allowed = sorted(allowed)
        while True:
            if self.iterations > max_iter:
                raise CapExceeded(f"simplex exceeded {max_iter} pivots")
            rc = self.reduced_costs(cost, allowed)
            # Bland: smallest-index improving column
            enter = next((j for j in allowed if rc[j] > 0), None)
            if enter is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], enter)


def linprog_exact(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    max_iter: int = DEFAULT_MAX_ITER,
) -> LPResult:
    n = len(c)
    A_ub = [[Fraction(v) for v in r] for r in A_ub]
    A_eq = [[Fraction(v) for v in r] for r in A_eq]
    if len(A_ub) != len(b_ub) or len(A_eq) != len(b_eq):
        raise DimensionMismatch("constraint rows and right-hand sides differ in length")
    for r in A_ub + A_eq:
        if len(r) != n:
            raise DimensionMismatch("constraint row width differs from len(c)")
    m_ub, m_eq = len(A_ub), len(A_eq)
    m = m_ub + m_eq
    # column layout: [x (n) | slacks (m_ub) | artificials (m)]
    n_slack = m_ub
    width = n + n_slack + m
    art0 = n + n_slack
    rows, rhs, signs = [], [], []
    for i in range(m):
        if i < m_ub:
            coeffs, b = A_ub[i], Fraction(b_ub[i])
        else:
            coeffs, b = A_eq[i - m_ub], Fraction(b_eq[i - m_ub])
        row = list(coeffs) + [Fraction(0)] * (n_slack + m)
        if i < m_ub:
            row[n + i] = Fraction(1)
        sign = 1
        if b < 0:
            sign = -1
            row = [-v for v in row]
            b = -b
        row[art0 + i] = Fraction(1)
        rows.append(row)
        rhs.append(b)
        signs.append(sign)

    tab = _Tableau(rows, rhs, [art0 + i for i in range(m)])
    real_cols = range(art0)

    # phase 1: minimize the sum of artificials
    if m:
        cost1 = [Fraction(0)] * art0 + [Fraction(-1)] * m
        tab.run(cost1, range(width), max_iter)
        infeas = sum((tab.rhs[i] for i in range(m) if tab.basis[i] >= art0), Fraction(0))
        if infeas > 0:
            return LPResult(INFEASIBLE, iterations=tab.iterations)
        # drive zero-level artificials out, or drop their (redundant) rows
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= art0:
                col = next((j for j in real_cols if tab.rows[r][j] != 0), None)
                if col is None:
                    del tab.rows[r], tab.rhs[r], tab.basis[r]
                    continue
                tab.pivot(r, col)
            r += 1

    cost2 = [Fraction(v) for v in c] + [Fraction(0)] * (n_slack + m)
    status = tab.run(cost2, real_cols, max_iter)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, iterations=tab.iterations)

    x = [Fraction(0)] * width
    for i, j in enumerate(tab.basis):
        x[j] = tab.rhs[i]
    cb = [cost2[j] for j in tab.basis]
    y = []
    for i in range(m):
        col = art0 + i
        yi = sum((cb[r] * tab.rows[r][col] for r in range(len(tab.rows)) if cb[r]), Fraction(0))
        y.append(signs[i] * yi)
    obj = sum((Fraction(ci) * xi for ci, xi in zip(c, x[:n])), Fraction(0))
    return LPResult(
        OPTIMAL,
        x=tuple(x[:n]),
        objective=obj,
        y_ub=tuple(y[:m_ub]),
        y_eq=tuple(y[m_ub:]),
        iterations=tab.iterations,
    )
