"""Exact two-phase simplex over Fractions.

Solves  max c.x  s.t.  A x = b, x >= 0  with Bland's rule, so it terminates
on degenerate problems. Meant for LPs with a handful of rows and possibly
many columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
OPTIMAL = "optimal"


@dataclass
class LPResult:
    status: str
    value: Fraction | None = None
    x: list[Fraction] | None = None


def _pivot(rows, rhs, obj, r, col):
    piv = rows[r][col]
    row = rows[r]
    for k in range(len(row)):
        if row[k]:
            row[k] /= piv
    rhs[r] /= piv
    for i in range(len(rows)):
        if i != r:
            f = rows[i][col]
            if f:
                other = rows[i]
                for k in range(len(row)):
                    if row[k]:
                        other[k] -= f * row[k]
                rhs[i] -= f * rhs[r]
    f = obj[col]
    if f:
        for k in range(len(row)):
            if row[k]:
                obj[k] -= f * row[k]
        obj[-1] -= f * rhs[r]


def _run(rows, rhs, obj, basis, allowed):
    # obj holds reduced costs (maximize: enter on positive), obj[-1] = -value
    while True:
        col = next((k for k in range(len(obj) - 1) if allowed[k] and obj[k] > 0), None)
        if col is None:
            return OPTIMAL
        best = None
        for i, row in enumerate(rows):
            if row[col] > 0:
                ratio = rhs[i] / row[col]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return UNBOUNDED
        r = best[1]
        _pivot(rows, rhs, obj, r, col)
        basis[r] = col


def solve(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    m, n = len(A), len(c)
    rows = []
    rhs = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        rows.append([Fraction(sign * a) for a in A[i]] + [Fraction(int(k == i)) for k in range(m)])
        rhs.append(Fraction(sign * b[i]))
    basis = [n + i for i in range(m)]
    width = n + m

    # phase 1: maximize minus the sum of artificials
    obj = [Fraction(0)] * (width + 1)
    for i in range(m):
        for k in range(n):
            obj[k] += rows[i][k]
        obj[-1] += rhs[i]
    _run(rows, rhs, obj, basis, [True] * n + [False] * m)
    if obj[-1] != 0:
        return LPResult(INFEASIBLE)

    # drive remaining artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            col = next((k for k in range(n) if rows[i][k] != 0), None)
            if col is not None:
                _pivot(rows, rhs, obj, i, col)
                basis[i] = col

    obj = [Fraction(-x) for x in c] + [Fraction(0)] * m + [Fraction(0)]
    obj = [-x for x in obj]
    for i, j in enumerate(basis):
        if j < n and obj[j]:
            f = obj[j]
            for k in range(width):
                obj[k] -= f * rows[i][k]
            obj[-1] -= f * rhs[i]
    status = _run(rows, rhs, obj, basis, [True] * n + [False] * m)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = rhs[i]
    return LPResult(OPTIMAL, sum((Fraction(ci) * xi for ci, xi in zip(c, x)), Fraction(0)), x)
