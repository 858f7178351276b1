"""Shared factories and independent oracles used across the test suite."""

from itertools import permutations

import numpy as np

from frot import build_grouped_measure


def random_grouped_pair(rng, n, m, widths, scale=1.0, uniform_weights=True):
    """Random grouped measures with a shared group structure."""
    d = sum(widths)
    src_pts = scale * rng.normal(size=(n, d))
    dst_pts = scale * rng.normal(size=(m, d))
    if uniform_weights:
        wa = wb = None
    else:
        wa = rng.uniform(0.2, 1.0, size=n)
        wb = rng.uniform(0.2, 1.0, size=m)
    return (
        build_grouped_measure(src_pts, widths, wa),
        build_grouped_measure(dst_pts, widths, wb),
    )


def random_birkhoff_plan(rng, n, n_perms=4):
    """Random coupling of uniform marginals: a convex mix of permutations."""
    weights = rng.dirichlet(np.ones(n_perms))
    plan = np.zeros((n, n))
    for w in weights:
        perm = rng.permutation(n)
        plan[np.arange(n), perm] += w / n
    return plan


def brute_force_emd_uniform(C):
    """Exact EMD for uniform square instances by enumerating the Birkhoff
    vertices (permutation matrices); independent of any LP code."""
    n = C.shape[0]
    best = min(sum(C[i, p[i]] for i in range(n)) for p in permutations(range(n)))
    return best / n


def sinkhorn_fixed_point_oracle(a, b, C, eps, tol=1e-14, max_iter=500_000):
    """Log-domain fixed-point iteration for the entropic plan, written
    directly from the scaling equations; independent of the package path."""
    f = np.zeros(len(a))
    g = np.zeros(len(b))
    for _ in range(max_iter):
        f_new = np.array([
            eps * np.log(a[i]) - eps * _lse((g - C[i]) / eps) for i in range(len(a))
        ])
        g_new = np.array([
            eps * np.log(b[j]) - eps * _lse((f_new - C[:, j]) / eps) for j in range(len(b))
        ])
        delta = max(np.abs(f_new - f).max(), np.abs(g_new - g).max())
        f, g = f_new, g_new
        if delta < tol:
            break
    return np.exp((f[:, None] + g[None, :] - C) / eps)


def _lse(v):
    m = np.max(v)
    return m + np.log(np.sum(np.exp(v - m)))


def entropic_objective(P, C, eps):
    mask = P > 0
    ent = float(np.sum(P[mask] * (np.log(P[mask]) - 1.0)))
    return float(np.sum(P * C)) + eps * ent


def projected_gradient_entropic_oracle(a, b, C, eps, steps=4000, lr=None):
    """Projected-gradient descent for entropic OT on the transport polytope.

    Gradient steps on <P, C> + eps * sum p (log p - 1) are projected onto
    the affine marginal subspace in closed form; the entropy barrier keeps
    iterates positive, with a tiny floor as a safeguard.  A final
    Dykstra-style projection lands the iterate in the polytope before the
    objective is read off.
    """
    n, m = C.shape
    P = np.outer(a, b)
    if lr is None:
        lr = 0.25 * eps / max(1.0, np.abs(C).max())
    floor = 1e-12
    for _ in range(steps):
        grad = C + eps * np.log(np.maximum(P, floor))
        P = _project_affine_marginals(P - lr * grad, a, b)
        P = np.maximum(P, floor)
    P = _dykstra_polytope(P, a, b)
    return entropic_objective(P, C, eps)


def _project_affine_marginals(Z, a, b):
    """Euclidean projection onto {M : M 1 = a, M' 1 = b}."""
    n, m = Z.shape
    row_err = Z.sum(axis=1) - a
    col_err = Z.sum(axis=0) - b
    total = Z.sum() - 1.0
    Z = Z - row_err[:, None] / m - col_err[None, :] / n + total / (n * m)
    return Z


def _dykstra_polytope(Z, a, b, iters=400):
    """Dykstra alternating projections onto the marginal affine set and the
    nonnegative orthant (correction term only for the non-affine set)."""
    q = np.zeros_like(Z)
    X = Z
    for _ in range(iters):
        X = _project_affine_marginals(X, a, b)
        Y = np.clip(X + q, 0.0, None)
        q = X + q - Y
        X = Y
    return _project_affine_marginals(X, a, b)
