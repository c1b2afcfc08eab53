"""Exact rational linear algebra: a sparse Gaussian solver and a dense
phase-one simplex with Bland's rule."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def solve_sparse(equations: Sequence[dict], rhs: Sequence, prefer: Sequence | None = None) -> dict | None:
    """One exact solution of ``sum(eq[v] * x[v]) = rhs`` for every equation.

    Variables left free after elimination are set to zero.  Returns ``None``
    when the system is inconsistent.  ``prefer`` orders pivot candidates.
    """
    rank_of = {v: i for i, v in enumerate(prefer)} if prefer is not None else None
    rows = []
    for eq, b in zip(equations, rhs):
        r = {v: Fraction(c) for v, c in eq.items() if c}
        rows.append([r, Fraction(b)])
    pivots: list[tuple[object, list]] = []  # (var, row) in elimination order
    col: dict = {}
    for idx, (r, _) in enumerate(rows):
        for v in r:
            col.setdefault(v, set()).add(idx)
    alive = set(range(len(rows)))
    while alive:
        # sparsest row first keeps fill-in low
        idx = min(alive, key=lambda i: (len(rows[i][0]), i))
        alive.discard(idx)
        r, b = rows[idx]
        if not r:
            if b != 0:
                return None
            continue
        if rank_of is None:
            pv = min(r, key=lambda v: (len(col.get(v, ())), str(v)))
        else:
            pv = min(r, key=lambda v: rank_of.get(v, len(rank_of)))
        pc = r[pv]
        for v in r:
            col[v].discard(idx)
        for j in list(col.get(pv, ())):
            if j not in alive:
                continue
            rj, bj = rows[j]
            factor = rj[pv] / pc
            for v, c in r.items():
                nv = rj.get(v, 0) - factor * c
                if nv:
                    if v not in rj:
                        col.setdefault(v, set()).add(j)
                    rj[v] = nv
                elif v in rj:
                    del rj[v]
                    col[v].discard(j)
            rows[j][1] = bj - factor * b
        pivots.append((pv, idx))
    x: dict = {}
    for pv, idx in reversed(pivots):
        r, b = rows[idx]
        s = b
        for v, c in r.items():
            if v != pv:
                s -= c * x.get(v, 0)
        x[pv] = s / r[pv]
    return x


def simplex_feasibility(ineq: Sequence[tuple[dict, object]], eq: Sequence[tuple[dict, object]],
                        nvars: int):
    """Exact feasibility of {a.x >= b} and {e.x = d} over free real x.

    Returns ``("feasible", x)`` or ``("infeasible", (w, y))`` with Farkas
    multipliers: w >= 0 on inequalities, y free on equalities, and
    w.A + y.E = 0, w.b + y.d > 0.  Dense tableau; for small systems only.
    """
    # columns: u (nvars), v (nvars), slacks (len(ineq)), artificials (all rows)
    m = len(ineq) + len(eq)
    ns = len(ineq)
    ncols = 2 * nvars + ns + m
    T = []
    sign = []
    for i, (a, b) in enumerate(list(ineq) + list(eq)):
        row = [Fraction(0)] * (ncols + 1)
        for j, c in a.items():
            row[j] = Fraction(c)
            row[nvars + j] = -Fraction(c)
        if i < ns:
            row[2 * nvars + i] = Fraction(-1)
        row[-1] = Fraction(b)
        s = 1
        if row[-1] < 0:
            row = [-c for c in row]
            s = -1
        row[2 * nvars + ns + i] = Fraction(1)
        T.append(row)
        sign.append(s)
    basis = [2 * nvars + ns + i for i in range(m)]
    art0 = 2 * nvars + ns
    # reduced costs for min sum(artificials): cost row = -sum(rows) on non-artificials
    obj = [Fraction(0)] * (ncols + 1)
    for row in T:
        for j in range(ncols + 1):
            if j < art0 or j == ncols:
                obj[j] -= row[j]
    while True:
        enter = next((j for j in range(ncols) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i, row in enumerate(T):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise ArithmeticError("phase one cannot be unbounded")
        _, r = best
        piv = T[r][enter]
        T[r] = [c / piv for c in T[r]]
        for i in range(m):
            if i != r and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [a - f * b for a, b in zip(T[i], T[r])]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [a - f * b for a, b in zip(obj, T[r])]
        basis[r] = enter
    value = -obj[-1]
    if value == 0:
        x = [Fraction(0)] * nvars
        for i, bv in enumerate(basis):
            if bv < nvars:
                x[bv] += T[i][-1]
            elif bv < 2 * nvars:
                x[bv - nvars] -= T[i][-1]
        return "feasible", x
    # dual of phase one: y_i = 1 - reduced cost of artificial i (cost 1)
    duals = [Fraction(1) - obj[art0 + i] for i in range(m)]
    duals = [d * s for d, s in zip(duals, sign)]
    return "infeasible", (duals[:ns], duals[ns:])
