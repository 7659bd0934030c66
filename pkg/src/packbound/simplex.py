"""Dense dual simplex over exact rationals.

Solves   min c.x  subject to  A x <= b,  x >= 0   with c >= 0.

The all-slack basis is dual feasible when c >= 0, so the dual simplex walks
straight to optimality without a phase-one.  Pivoting is exact (Fractions);
entering/leaving choices break ties by smallest index (Bland) after an
initial most-negative phase, which keeps the walk finite.
"""

from __future__ import annotations

from fractions import Fraction

from .exact import frac


class SimplexError(ValueError):
    pass


class Infeasible(SimplexError):
    pass


def solve_min(c, a_rows, b, max_iter=20000):
    """Exact optimum of min c.x s.t. a_rows x <= b, x >= 0.

    Returns dict with x (list of Fractions), objective, iterations, basis.
    """
    m = len(a_rows)
    n = len(c)
    c = [frac(v) for v in c]
    if any(v < 0 for v in c):
        raise SimplexError("dual simplex start requires c >= 0")
    # tableau rows over columns [structural 0..n-1 | slack n..n+m-1 | rhs]
    rows = []
    for i in range(m):
        row = [frac(v) for v in a_rows[i]]
        row += [Fraction(int(j == i)) for j in range(m)]
        row.append(frac(b[i]))
        rows.append(row)
    cost = c + [Fraction(0)] * m + [Fraction(0)]  # reduced costs, kept >= 0
    basis = list(range(n, n + m))
    ncols = n + m

    iterations = 0
    bland_after = max_iter // 2
    while True:
        # leaving row: most negative rhs (Bland: smallest index when cycling)
        leave = None
        if iterations < bland_after:
            worst = Fraction(0)
            for i in range(m):
                if rows[i][ncols] < worst:
                    worst = rows[i][ncols]
                    leave = i
        else:
            for i in range(m):
                if rows[i][ncols] < 0:
                    leave = i
                    break
        if leave is None:
            break
        if iterations >= max_iter:
            raise SimplexError("iteration limit exceeded")
        iterations += 1
        # entering column: dual ratio test over negative entries
        row = rows[leave]
        enter = None
        best = None
        for j in range(ncols):
            if row[j] < 0:
                ratio = cost[j] / (-row[j])
                if best is None or ratio < best or \
                        (ratio == best and j < enter):
                    best = ratio
                    enter = j
        if enter is None:
            raise Infeasible("primal infeasible (no entering column)")
        piv = row[enter]
        inv = 1 / piv
        rows[leave] = [v * inv for v in row]
        prow = rows[leave]
        for i in range(m):
            if i != leave and rows[i][enter] != 0:
                f = rows[i][enter]
                ri = rows[i]
                rows[i] = [ri[k] - f * prow[k] for k in range(ncols + 1)]
        if cost[enter] != 0:
            f = cost[enter]
            cost = [cost[k] - f * prow[k] for k in range(ncols + 1)]
        basis[leave] = enter

    x = [Fraction(0)] * n
    for i, bcol in enumerate(basis):
        if bcol < n:
            x[bcol] = rows[i][ncols]
    objective = sum(ci * xi for ci, xi in zip(c, x))
    return {"x": x, "objective": objective, "iterations": iterations,
            "basis": tuple(basis)}
