"""Dense partial-pivot LU for the small systems met along a trajectory.

The mass matrices here are at most ~10x10 and are solved tens of
thousands of times per simulation, where numpy's per-call overhead
dominates the arithmetic. The factorization also yields a cheap
infinity-norm condition estimate from the explicit inverse columns.
"""

from __future__ import annotations


class SingularMassMatrixError(ArithmeticError):
    def __init__(self, condition: float, time: float | None = None):
        where = "" if time is None else f" at t={time!r}"
        super().__init__(f"mass matrix singular{where} (condition estimate {condition:.3e})")
        self.condition = condition
        self.time = time


COND_LIMIT = 1e12


def lu_factor(a):
    n = len(a)
    lu = [list(map(float, row)) for row in a]
    perm = list(range(n))
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(lu[i][k]))
        if lu[piv][k] == 0.0:
            return None
        if piv != k:
            lu[k], lu[piv] = lu[piv], lu[k]
            perm[k], perm[piv] = perm[piv], perm[k]
        pivot = lu[k][k]
        row_k = lu[k]
        for i in range(k + 1, n):
            row = lu[i]
            f = row[k] / pivot
            row[k] = f
            if f != 0.0:
                for j in range(k + 1, n):
                    row[j] -= f * row_k[j]
    return lu, perm


def lu_solve(fact, b):
    lu, perm = fact
    n = len(lu)
    y = [float(b[perm[i]]) for i in range(n)]
    for i in range(n):
        row = lu[i]
        s = y[i]
        for j in range(i):
            s -= row[j] * y[j]
        y[i] = s
    for i in range(n - 1, -1, -1):
        row = lu[i]
        s = y[i]
        for j in range(i + 1, n):
            s -= row[j] * y[j]
        y[i] = s / row[i]
    return y


def condition_inf(a, fact) -> float:
    n = len(a)
    norm_a = max(sum(abs(float(v)) for v in row) for row in a)
    inv_rows = [0.0] * n
    for j in range(n):
        e = [0.0] * n
        e[j] = 1.0
        col = lu_solve(fact, e)
        for i in range(n):
            inv_rows[i] += abs(col[i])
    return norm_a * max(inv_rows)


def solve_checked(a, b, limit: float = COND_LIMIT):
    """Solve ``a y = b``; raise :class:`SingularMassMatrixError` above ``limit``."""
    fact = lu_factor(a)
    if fact is None:
        raise SingularMassMatrixError(float("inf"))
    if len(a) == 1:
        cond = 1.0
    elif len(a) == 2:
        (p, q), (r, s) = a
        det = p * s - q * r
        if det == 0.0:
            raise SingularMassMatrixError(float("inf"))
        cond = max(abs(p) + abs(q), abs(r) + abs(s)) * max(abs(s) + abs(q), abs(r) + abs(p)) / abs(det)
    else:
        cond = condition_inf(a, fact)
    if not cond < limit:
        raise SingularMassMatrixError(cond)
    return lu_solve(fact, b)
