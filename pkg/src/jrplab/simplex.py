"""Dense-tableau primal simplex for ``max c.u  s.t.  A u <= b, u >= 0`` with ``b >= 0``.

The slack basis is feasible, so no phase one is needed. Arithmetic is whatever
the caller supplies: :class:`fractions.Fraction` gives exact pivoting (set
``tol=0``), floats need a small positive ``tol``. Rows are stored sparsely as
dicts since the JRP constraint matrices are mostly zeros.

Pivoting uses the largest reduced cost and switches to Bland's rule for good
after a run of degenerate pivots, which rules out cycling.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


class SimplexError(RuntimeError):
    pass


@dataclass
class SimplexResult:
    status: str  # "optimal" or "unbounded"
    objective: object
    primal: list  # u
    dual: list  # y >= 0 with A^T y >= c and b.y == objective
    pivots: int


def maximize(c: Sequence, rows: Sequence[dict], b: Sequence, tol=0, max_pivots: int = 100_000,
             degenerate_limit: int = 50) -> SimplexResult:
    """``rows[i]`` maps column index to coefficient of constraint ``i``."""
    m, n = len(rows), len(c)
    zero = b[0] * 0 if m else 0
    if any(v < 0 for v in b):
        raise SimplexError("right-hand side must be nonnegative")
    # tableau rows over structural columns 0..n-1 and slack columns n..n+m-1
    T = []
    for i, row in enumerate(rows):
        r = {j: v for j, v in row.items() if v != 0}
        r[n + i] = zero + 1
        T.append(r)
    rhs = list(b)
    basis = [n + i for i in range(m)]
    # reduced costs: obj row stores c_j - z_j, entering columns have positive values
    obj = {j: v for j, v in enumerate(c) if v != 0}
    value = zero

    bland = False
    degenerate_run = 0
    pivots = 0
    while True:
        if bland:
            cands = [j for j, v in obj.items() if v > tol]
            enter = min(cands) if cands else None
        else:
            enter, best = None, tol
            for j, v in obj.items():
                if v > best or (v == best and enter is not None and v > tol and j < enter):
                    enter, best = j, v
        if enter is None:
            break
        leave, ratio = None, None
        for i in range(m):
            a = T[i].get(enter)
            if a is not None and a > tol:
                q = rhs[i] / a
                if ratio is None or q < ratio or (q == ratio and basis[i] < basis[leave]):
                    leave, ratio = i, q
        if leave is None:
            return SimplexResult("unbounded", None, [], [], pivots)

        if ratio <= tol:
            degenerate_run += 1
            if degenerate_run >= degenerate_limit:
                bland = True
        else:
            degenerate_run = 0

        prow = T[leave]
        piv = prow[enter]
        prow = {j: v / piv for j, v in prow.items()}
        prow[enter] = zero + 1
        T[leave] = prow
        rhs[leave] = rhs[leave] / piv
        for i in range(m):
            if i == leave:
                continue
            row = T[i]
            f = row.get(enter)
            if f is None:
                continue
            for j, v in prow.items():
                nv = row.get(j, zero) - f * v
                if nv == 0 or (tol and abs(nv) <= tol * 1e-3):
                    row.pop(j, None)
                else:
                    row[j] = nv
            row.pop(enter, None)
            rhs[i] = rhs[i] - f * rhs[leave]
            if tol and rhs[i] < 0:
                rhs[i] = zero
        f = obj.get(enter)
        for j, v in prow.items():
            nv = obj.get(j, zero) - f * v
            if nv == 0:
                obj.pop(j, None)
            else:
                obj[j] = nv
        obj.pop(enter, None)
        value = value + f * rhs[leave]
        basis[leave] = enter
        pivots += 1
        if pivots > max_pivots:
            raise SimplexError("pivot limit exceeded")

    u = [zero] * n
    for i, j in enumerate(basis):
        if j < n:
            u[j] = rhs[i]
    # the multiplier of row i is minus the reduced cost of its slack
    y = [-obj.get(n + i, zero) for i in range(m)]
    if tol:
        y = [v if v > 0 else zero for v in y]
    return SimplexResult("optimal", value, u, y, pivots)
