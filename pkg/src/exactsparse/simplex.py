"""Exact rational revised simplex method with Bland's anti-cycling rule.

Problems are in standard form::

    maximize  c @ x   subject to   A x = b,  x >= 0

with ``A`` given column-wise as sparse ``{row: coefficient}`` dictionaries.
Basis solves use FLINT's exact rational matrices (``flint.fmpq_mat``); every
pivot decision is an exact sign test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import flint

__all__ = ["LPResult", "SimplexError", "solve_lp"]

Column = Mapping[int, Fraction]


class SimplexError(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] | None = None
    objective: Fraction | None = None
    basis: list[int] | None = None
    duals: list[Fraction] | None = None
    iterations: int = 0


def _q(x) -> flint.fmpq:
    x = Fraction(x)
    return flint.fmpq(x.numerator, x.denominator)


def _f(x: flint.fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


class _Tableau:
    """Standard-form problem held in FLINT types for repeated basis solves."""

    def __init__(self, columns: Sequence[Column], b: Sequence, c: Sequence) -> None:
        self.m = len(b)
        self.n = len(columns)
        self.cols = [{i: _q(v) for i, v in col.items() if v} for col in columns]
        self.b = flint.fmpq_mat(self.m, 1, [_q(v) for v in b])
        self.c = [_q(v) for v in c]

    def basis_matrix(self, basis: Sequence[int]) -> flint.fmpq_mat:
        m = self.m
        entries = [flint.fmpq(0)] * (m * m)
        for j, col in enumerate(basis):
            for i, v in self.cols[col].items():
                entries[i * m + j] = v
        return flint.fmpq_mat(m, m, entries)

    def column(self, j: int) -> flint.fmpq_mat:
        vec = [flint.fmpq(0)] * self.m
        for i, v in self.cols[j].items():
            vec[i] = v
        return flint.fmpq_mat(self.m, 1, vec)


def _iterate(tab: _Tableau, basis: list[int], cost: list[flint.fmpq], allowed: int, max_iter: int) -> tuple[str, int]:
    """Run primal simplex from a feasible basis. Columns ``>= allowed`` never enter."""
    m = tab.m
    zero = flint.fmpq(0)
    B = tab.basis_matrix(basis)
    try:
        xb = [v for v in B.solve(tab.b).entries()]
    except ZeroDivisionError as exc:
        raise SimplexError("singular basis") from exc
    for it in range(max_iter):
        if it:
            B = tab.basis_matrix(basis)
        cb = flint.fmpq_mat(m, 1, [cost[j] for j in basis])
        yl = B.transpose().solve(cb).entries()
        in_basis = set(basis)
        entering = -1
        for j in range(allowed):
            if j in in_basis:
                continue
            r = cost[j] - sum((yl[i] * v for i, v in tab.cols[j].items()), zero)
            if r > 0:
                entering = j
                break
        if entering < 0:
            return "optimal", it
        d = B.solve(tab.column(entering)).entries()
        leave_row, best = -1, None
        for i in range(m):
            di = d[i]
            if di > 0:
                ratio = xb[i] / di
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave_row]):
                    best, leave_row = ratio, i
        if leave_row < 0:
            return "unbounded", it
        if best:
            xb = [x - best * di for x, di in zip(xb, d)]
        xb[leave_row] = best
        basis[leave_row] = entering
    raise SimplexError(f"no convergence after {max_iter} pivots")


# a 61-bit prime; rank over GF(p) never exceeds the rank over the rationals
_PRIME = (1 << 61) - 1


def _complete_basis(tab: _Tableau, partial: Sequence[int], candidates: Sequence[int]) -> list[int] | None:
    """Extend ``partial`` to ``m`` independent columns drawn from ``candidates``.

    Independence is decided modulo a large prime: columns independent mod p
    are independent over the rationals, so a full-rank selection is a true
    basis. Returns None when no full-rank selection is found.
    """
    order = list(dict.fromkeys(list(partial) + list(candidates)))
    m = tab.m
    entries = [0] * (m * len(order))
    try:
        for j, col in enumerate(order):
            for i, v in tab.cols[col].items():
                entries[i * len(order) + j] = int(v.p) * pow(int(v.q), -1, _PRIME) % _PRIME
    except ValueError:  # denominator divisible by the prime
        return None
    reduced, rank = flint.nmod_mat(m, len(order), entries, _PRIME).rref()
    if rank < m:
        return None
    pivots = []
    for i in range(rank):
        j = next(j for j in range(len(order)) if int(reduced[i, j]))
        pivots.append(order[j])
    return pivots


def _basic_solution(tab: _Tableau, basis: Sequence[int]) -> list[flint.fmpq] | None:
    """Basic solution for ``basis``, or None if the basis is singular or infeasible."""
    if len(basis) != tab.m or len(set(basis)) != tab.m:
        return None
    try:
        xb = tab.basis_matrix(basis).solve(tab.b)
    except ZeroDivisionError:
        return None
    vals = [xb[i, 0] for i in range(tab.m)]
    if any(v < 0 for v in vals):
        return None
    return vals


def solve_lp(
    columns: Sequence[Column],
    b: Sequence,
    c: Sequence,
    basis: Sequence[int] | None = None,
    *,
    fallback: Sequence[int] | None = None,
    max_iter: int = 100_000,
) -> LPResult:
    """Maximize ``c @ x`` subject to ``A x = b``, ``x >= 0`` exactly.

    Args:
        columns: the constraint matrix, one sparse column per variable.
        b: right-hand side, one entry per row.
        c: objective coefficients, one per variable.
        basis: optional starting basis (``len(b)`` column indices). It is used
            as a warm start when it is nonsingular and primal feasible;
            otherwise ``fallback`` is tried, and failing that a phase-one
            problem with artificial variables is solved. A basis with fewer
            than ``len(b)`` columns is first completed with independent
            columns of ``fallback``.

    Returns:
        :class:`LPResult`; on optimality ``x``, ``objective``, the final
        ``basis`` and the row ``duals`` are exact.
    """
    m, n = len(b), len(columns)
    if len(c) != n:
        raise ValueError("objective length does not match the number of columns")
    tab = _Tableau(columns, b, c)
    cost = list(tab.c)
    iters = 0
    start = None
    if basis is not None and len(basis) < m and fallback is not None:
        basis = _complete_basis(tab, basis, fallback)
    for candidate in (basis, fallback):
        if candidate is not None and _basic_solution(tab, candidate) is not None:
            start = list(candidate)
            break
    if start is None:
        start, iters, rows = _phase_one(tab, max_iter)
        if start is None:
            return LPResult("infeasible", iterations=iters)
        if rows is not None:
            # redundant rows were dropped; rebuild on the independent subset
            sub_cols = [{rows.index(i): v for i, v in col.items() if i in rows} for col in columns]
            sub_b = [b[i] for i in rows]
            res = solve_lp(sub_cols, sub_b, c, start, max_iter=max_iter)
            if res.duals is not None:
                full = [Fraction(0)] * m
                for pos, i in enumerate(rows):
                    full[i] = res.duals[pos]
                res.duals = full
            res.iterations += iters
            return res
    status, more = _iterate(tab, start, cost, n, max_iter)
    iters += more
    if status == "unbounded":
        return LPResult("unbounded", iterations=iters)
    B = tab.basis_matrix(start)
    xb = B.solve(tab.b)
    y = B.transpose().solve(flint.fmpq_mat(m, 1, [cost[j] for j in start]))
    x = [Fraction(0)] * n
    for i, j in enumerate(start):
        x[j] = _f(xb[i, 0])
    obj = sum((Fraction(c[j]) * x[j] for j in range(n)), Fraction(0))
    return LPResult("optimal", x, obj, list(start), [_f(y[i, 0]) for i in range(m)], iters)


def _phase_one(tab: _Tableau, max_iter: int) -> tuple[list[int] | None, int, list[int] | None]:
    """Find a feasible basis via artificial variables.

    Returns ``(basis, iterations, rows)``; ``rows`` lists the independent rows
    when some were redundant (the basis then refers to that row subset).
    """
    m, n = tab.m, tab.n
    sign = [flint.fmpq(-1) if tab.b[i, 0] < 0 else flint.fmpq(1) for i in range(m)]
    aux = _Tableau.__new__(_Tableau)
    aux.m, aux.n = m, n + m
    aux.cols = [{i: v * sign[i] for i, v in col.items()} for col in tab.cols]
    aux.cols += [{i: flint.fmpq(1)} for i in range(m)]
    aux.b = flint.fmpq_mat(m, 1, [tab.b[i, 0] * sign[i] for i in range(m)])
    aux.c = [flint.fmpq(0)] * n + [flint.fmpq(-1)] * m
    basis = list(range(n, n + m))
    _, iters = _iterate(aux, basis, aux.c, n + m, max_iter)
    xb = aux.basis_matrix(basis).solve(aux.b)
    if any(basis[i] >= n and xb[i, 0] != 0 for i in range(m)):
        return None, iters, None
    # drive artificial variables (all at zero) out of the basis
    redundant = []
    for r in range(m):
        if basis[r] < n:
            continue
        B = aux.basis_matrix(basis)
        row = B.transpose().solve(flint.fmpq_mat(m, 1, [flint.fmpq(1) if i == r else flint.fmpq(0) for i in range(m)]))
        rl = [row[i, 0] for i in range(m)]
        in_basis = set(basis)
        for j in range(n):
            if j in in_basis:
                continue
            if sum((rl[i] * v for i, v in aux.cols[j].items()), flint.fmpq(0)) != 0:
                basis[r] = j
                break
        else:
            redundant.append(r)
    if not redundant:
        return basis, iters, None
    rows = [i for i in range(m) if i not in redundant]
    return [basis[i] for i in rows], iters, rows
