"""Two-phase revised simplex for dense standard-form LPs.

Solves min c'x subject to A x = b, x >= 0.  Pricing is Dantzig's rule with
an automatic, permanent switch to Bland's rule once degenerate pivots
stall, which guarantees termination without cycling.  The basis inverse is
kept dense and refactorized periodically to bound round-off drift; sizes
here are desk scale (a few thousand columns, ~100 rows).

Artificial variables that finish phase 1 basic at level zero are pivoted
out where a numerically sound pivot exists; otherwise they ride along in
phase 2 at level zero, barred from re-entering, which sidesteps rank
surgery on near-degenerate instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .solvers import SolverFailure

#: consecutive degenerate pivots before switching to Bland's rule
_STALL_LIMIT = 12
#: pivots between dense refactorizations of the basis inverse
_REFACTOR_EVERY = 64


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    objective: float
    iterations: int
    basis: np.ndarray


def _refactor(A, basis):
    try:
        return np.linalg.inv(A[:, basis])
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(f"singular basis during refactorization: {exc}") from exc


def _iterate(A, b, c, basis, B_inv, tol, max_iter, pricing, entering_limit=None):
    """Run simplex pivots until optimality; returns (B_inv, iterations).

    ``entering_limit`` restricts entering candidates to the first columns
    (used to keep artificial columns out of the basis).
    """
    k, n = A.shape
    limit = n if entering_limit is None else entering_limit
    bland = pricing == "bland"
    stall = 0
    for it in range(max_iter):
        if it > 0 and it % _REFACTOR_EVERY == 0:
            B_inv = _refactor(A, basis)
        y = c[basis] @ B_inv
        reduced = c[:limit] - y @ A[:, :limit]
        reduced[basis[basis < limit]] = 0.0

        candidates = np.flatnonzero(reduced < -tol)
        if candidates.size == 0:
            return B_inv, it
        enter = candidates[0] if bland else candidates[np.argmin(reduced[candidates])]

        d = B_inv @ A[:, enter]
        xB = B_inv @ b
        pos = d > tol
        if not np.any(pos):
            raise SolverFailure("LP is unbounded (cannot occur for transport polytopes)")
        ratios = np.full(k, np.inf)
        ratios[pos] = xB[pos] / d[pos]
        theta = ratios.min()
        ties = np.flatnonzero(ratios <= theta + tol * max(1.0, abs(theta)))
        # smallest basic variable index among ties: Bland's leaving rule
        leave = ties[np.argmin(basis[ties])]

        if theta <= tol:
            stall += 1
            if stall > _STALL_LIMIT:
                bland = True
        else:
            stall = 0

        pivot = d[leave]
        B_inv[leave] /= pivot
        others = np.arange(k) != leave
        B_inv[others] -= np.outer(d[others], B_inv[leave])
        basis[leave] = enter
    raise SolverFailure(f"simplex exceeded {max_iter} pivots")


def solve_lp(c, A, b, tol: float = 1e-10, max_iter: int | None = None) -> SimplexResult:
    """Solve min c'x s.t. A x = b, x >= 0 by two-phase revised simplex.

    Raises :class:`SolverFailure` on infeasible input, an unbounded
    objective, or pivot breakdown.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.array(c, dtype=float)
    if A.ndim != 2 or A.shape[0] != b.shape[0] or A.shape[1] != c.shape[0]:
        raise ValueError("inconsistent LP dimensions")
    k, n = A.shape
    if max_iter is None:
        max_iter = 200 * (k + n)

    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # phase 1: minimize the sum of artificials from the identity basis;
    # artificial columns never re-enter once they leave
    A1 = np.hstack([A, np.eye(k)])
    c1 = np.concatenate([np.zeros(n), np.ones(k)])
    basis = np.arange(n, n + k)
    B_inv = np.eye(k)
    B_inv, it1 = _iterate(A1, b, c1, basis, B_inv, tol, max_iter,
                          pricing="dantzig", entering_limit=n)
    phase1_obj = float(c1[basis] @ (B_inv @ b))
    if phase1_obj > 1e-8:
        raise SolverFailure(f"LP infeasible (phase-1 objective {phase1_obj:.3e})")

    # pivot zero-level artificials out of the basis where a sound pivot
    # exists; the rest stay basic at zero and are barred from entering
    for row in range(k):
        if basis[row] < n:
            continue
        tableau_row = B_inv[row] @ A
        tableau_row[basis[basis < n]] = 0.0
        enter = int(np.argmax(np.abs(tableau_row)))
        if abs(tableau_row[enter]) <= 1e-9:
            continue
        d = B_inv @ A[:, enter]
        B_inv[row] /= d[row]
        others = np.arange(k) != row
        B_inv[others] -= np.outer(d[others], B_inv[row])
        basis[row] = enter

    # phase 2 on the original costs (artificials cost nothing but cannot
    # re-enter, and any still basic are pinned at level ~0)
    c2 = np.concatenate([c, np.zeros(k)])
    B_inv = _refactor(A1, basis)
    B_inv, it2 = _iterate(A1, b, c2, basis, B_inv, tol, max_iter,
                          pricing="dantzig", entering_limit=n)

    # read the solution off a fresh factorization of the optimal basis so
    # incremental-update drift never reaches the reported vertex
    try:
        levels = np.linalg.solve(A1[:, basis], b)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(f"singular optimal basis: {exc}") from exc
    artificial = basis >= n
    if np.any(artificial) and np.abs(levels[artificial]).max() > 1e-8:
        raise SolverFailure("artificial variable stuck at a nonzero level")
    x = np.zeros(n)
    real = ~artificial
    x[basis[real]] = levels[real]
    np.clip(x, 0.0, None, out=x)
    return SimplexResult(
        x=x,
        objective=float(c @ x),
        iterations=it1 + it2,
        basis=basis.copy(),
    )
