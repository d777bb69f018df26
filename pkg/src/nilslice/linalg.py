"""Exact elimination over Z, Q and Q(i): Bareiss rank, nullspaces, solves."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

from .kernel import GaussianRational, ZERO


def _integerize(rows: Sequence[Sequence]) -> list[list] | None:
    """Scale each row to integers when every entry is real; None otherwise."""
    out = []
    for row in rows:
        vals = []
        for x in row:
            if isinstance(x, GaussianRational):
                if x.im != 0:
                    return None
                x = x.re
            vals.append(Fraction(x))
        den = lcm(*(v.denominator for v in vals)) if vals else 1
        out.append([int(v * den) for v in vals])
    return out


def bareiss_rank(rows: Sequence[Sequence]) -> int:
    """Rank by fraction-free elimination.

    Real input is scaled to integers and eliminated with exact integer
    division; Gaussian input keeps the same recurrence with exact field
    division (the Bareiss quotients are always exact).
    """
    M = _integerize(rows)
    div = lambda a, b: a // b
    if M is None:
        M = [[GaussianRational.coerce(x) for x in row] for row in rows]
        div = lambda a, b: a / b
    if not M:
        return 0
    nr, nc = len(M), len(M[0])
    prev = 1
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][c]
        for i in range(r + 1, nr):
            f = M[i][c]
            row_i, row_r = M[i], M[r]
            for j in range(c + 1, nc):
                row_i[j] = div(p * row_i[j] - f * row_r[j], prev)
            row_i[c] = 0
        prev = p
        r += 1
        if r == nr:
            break
    return r


def transpose(rows: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*rows)] if rows else []


def rank_two_ways(rows: Sequence[Sequence]) -> tuple[int, int]:
    """Row rank and column rank, each by its own elimination."""
    return bareiss_rank(rows), bareiss_rank(transpose(rows))


def _field(x):
    if isinstance(x, GaussianRational):
        return x
    return GaussianRational.coerce(x)


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over Q(i) and the pivot columns."""
    M = [[_field(x) for x in row] for row in rows]
    if not M:
        return M, []
    nr, nc = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(nr):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return M, pivots


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    """Basis of {x : rows @ x = 0}."""
    if not rows:
        return [[ZERO if j != k else _field(1) for j in range(ncols or 0)] for k in range(ncols or 0)]
    R, pivots = rref(rows)
    nc = len(R[0])
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * nc
        v[f] = _field(1)
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


class Inconsistent(ValueError):
    pass


def solve(rows: Sequence[Sequence], rhs: Sequence) -> list:
    """One exact solution of rows @ x = rhs (free variables set to zero)."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    R, pivots = rref(aug)
    nc = len(aug[0]) - 1
    if nc in pivots:
        raise Inconsistent("linear system has no solution")
    x = [ZERO] * nc
    for i, p in enumerate(pivots):
        x[p] = R[i][nc]
    return x
