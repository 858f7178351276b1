"""Feature-robust optimal transport: min over plans of the max over
simplex-weighted group costs.

Two solution paths are provided.  The smoothed path replaces the inner max
by the soft maximum eta * log sum exp(<P, C_k> / eta), whose inner argmax
has the closed softmax form, and minimizes it with Frank-Wolfe steps whose
linear subproblems are OT problems (exact or entropic).  The exact path
rewrites min-max of linear functions as the epigraph LP min t subject to
<P, C_k> <= t and solves it with the revised simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp, softmax

from .measures import GroupedCost, GroupedMeasure, TransportPlan
from .simplex import solve_lp
from .solvers import SinkhornConfig, SolverFailure, emd_exact_solve, sinkhorn_solve

#: desk-scale guard for the dense epigraph LP
LP_MAX_VARIABLES = 10_000

SUBSOLVERS = ("exact_emd", "sinkhorn")
INIT_PLANS = ("product_ab", "uniform")


def _cost_stack(costs) -> np.ndarray:
    """Accept a GroupedCost or a raw (L, n, m) stack of matrices."""
    if isinstance(costs, GroupedCost):
        return costs.matrices
    stack = np.asarray(costs, dtype=float)
    if stack.ndim != 3:
        raise ValueError("costs must be a GroupedCost or an (L, n, m) array")
    return stack


def _plan_matrix(plan) -> np.ndarray:
    if isinstance(plan, TransportPlan):
        return plan.matrix
    return np.asarray(plan, dtype=float)


def group_costs(plan, costs) -> np.ndarray:
    """Per-group transport costs <P, C_k>, shape (L,)."""
    stack = _cost_stack(costs)
    P = _plan_matrix(plan)
    if P.shape != stack.shape[1:]:
        raise ValueError(f"plan shape {P.shape} does not match costs {stack.shape[1:]}")
    return np.tensordot(stack, P, axes=([1, 2], [0, 1]))


def smoothed_max_objective(plan, costs, eta: float) -> float:
    """Soft maximum of the per-group costs: eta * log sum exp(<P, C_k>/eta).

    Computed with a max-shifted log-sum-exp; exact for a single group and
    bounded between max_k <P, C_k> and max_k <P, C_k> + eta * log L.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    phi = group_costs(plan, costs)
    return float(eta * logsumexp(phi / eta))


def alpha_weights(plan, costs, eta: float) -> np.ndarray:
    """Maximizing simplex weights for the entropy-regularized inner problem.

    alpha_k = exp(<P, C_k>/eta) / sum_k' exp(<P, C_k'>/eta), evaluated with
    a max shift so large cost ratios cannot overflow.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    phi = group_costs(plan, costs)
    return softmax(phi / eta)


def frot_gradient(plan, costs, eta: float) -> np.ndarray:
    """Gradient of the smoothed objective in the plan: sum_k alpha_k C_k."""
    alpha = alpha_weights(plan, costs, eta)
    return np.tensordot(alpha, _cost_stack(costs), axes=1)


@dataclass(frozen=True)
class FrotConfig:
    """Settings for the Frank-Wolfe solver.

    ``subsolver`` picks the linear-subproblem solver: ``"exact_emd"``
    solves it exactly, ``"sinkhorn"`` adds epsilon-entropy and solves the
    regularized problem (faster, inexact; the inexactness is surfaced in
    the solution metadata).  ``init_plan="uniform"`` (the all-equal matrix)
    is feasible only for uniform weights; the default product coupling
    a b' is always feasible.
    """

    eta: float
    fw_iters: int = 10
    subsolver: str = "exact_emd"
    epsilon: float = 0.02
    init_plan: str = "product_ab"
    gap_tol: float | None = None
    sinkhorn_tol: float = 1e-9
    # warm-started subproblems refine across iterations, so each one gets a
    # modest sweep budget by default; raise it when plan accuracy matters
    sinkhorn_t_max: int = 300
    warm_start: bool = True
    record_plans: bool = False

    def __post_init__(self):
        if self.eta == 0:
            raise ValueError(
                "eta = 0 removes the smoothing; solve the epigraph LP "
                "(frot_lp_solve) instead"
            )
        if self.eta < 0:
            raise ValueError("eta must be positive")
        if self.fw_iters < 1:
            raise ValueError("fw_iters must be at least 1")
        if self.subsolver not in SUBSOLVERS:
            raise ValueError(f"subsolver must be one of {SUBSOLVERS}")
        if self.subsolver == "sinkhorn" and self.epsilon <= 0:
            raise ValueError("sinkhorn subsolver requires epsilon > 0")
        if self.init_plan not in INIT_PLANS:
            raise ValueError(f"init_plan must be one of {INIT_PLANS}")


@dataclass(frozen=True)
class FrotSolution:
    """Output of the Frank-Wolfe solver.

    ``alpha`` is the closed-form softmax weight vector evaluated at the
    returned plan.  ``objective_trace`` holds the smoothed objective at
    every iterate (length iterations + 1), ``alpha_trace`` the weights at
    every iterate, and ``fw_gap_trace`` the linearization gaps
    <P_t - P_hat, M_t> (length iterations).
    """

    plan: TransportPlan
    alpha: np.ndarray
    objective_trace: np.ndarray
    alpha_trace: np.ndarray
    fw_gap_trace: np.ndarray
    subsolver_used: str
    metadata: dict = field(default_factory=dict)
    plan_trace: list = field(default_factory=list)

    @property
    def max_group_cost(self) -> float:
        """The unsmoothed objective max_k <P, C_k> of the returned plan."""
        return self.metadata["max_group_cost"]


def _round_to_polytope(P: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Project a near-feasible nonnegative plan onto exact marginals.

    Rows and columns overshooting their targets are scaled down, then the
    leftover row/column deficits are filled with their outer product.  The
    L1 perturbation is proportional to the input's marginal violation, so
    an accurate plan is barely moved.
    """
    P = np.asarray(P, dtype=float)
    rows = P.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(rows > 0, np.minimum(a / rows, 1.0), 1.0)
    P = P * scale[:, None]
    cols = P.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(cols > 0, np.minimum(b / cols, 1.0), 1.0)
    P = P * scale[None, :]
    u = np.clip(a - P.sum(axis=1), 0.0, None)
    v = np.clip(b - P.sum(axis=0), 0.0, None)
    total = u.sum()
    if total > 0:
        P = P + np.outer(u, v) / total
    return P


def _initial_plan(a, b, kind, init_matrix):
    if init_matrix is not None:
        P0 = np.array(init_matrix, dtype=float)
        if P0.shape != (a.size, b.size):
            raise ValueError("init_matrix shape does not match the weights")
        return P0
    if kind == "product_ab":
        return np.outer(a, b)
    # all-equal matrix; feasible only when both weight vectors are uniform
    n, m = a.size, b.size
    if not (np.allclose(a, 1.0 / n, atol=1e-12) and np.allclose(b, 1.0 / m, atol=1e-12)):
        raise ValueError("init_plan='uniform' requires uniform weights")
    return np.full((n, m), 1.0 / (n * m))


def frot_fw_solve(
    src: GroupedMeasure,
    dst: GroupedMeasure,
    costs,
    cfg: FrotConfig,
    init_matrix=None,
) -> FrotSolution:
    """Minimize the smoothed max of group costs with Frank-Wolfe.

    Each iteration linearizes the objective at the current plan (gradient
    sum_k alpha_k C_k), solves the resulting OT subproblem, and moves with
    step 2/(2 + t).  All iterates are convex combinations of feasible
    plans and hence marginal-feasible.

    Parameters
    ----------
    src, dst : GroupedMeasure
    costs : GroupedCost or (L, n, m) array
        Per-group cost matrices for the pair.
    cfg : FrotConfig
    init_matrix : ndarray, optional
        Explicit feasible starting plan, overriding ``cfg.init_plan``
        (used e.g. to refine an LP solution).
    """
    stack = _cost_stack(costs)
    a, b = src.weights, dst.weights
    if stack.shape[1:] != (a.size, b.size):
        raise ValueError(
            f"cost stack shape {stack.shape} does not match measure sizes "
            f"({a.size}, {b.size})"
        )
    eta = cfg.eta

    P = _initial_plan(a, b, cfg.init_plan, init_matrix)
    objective_trace = []
    alpha_trace = []
    gap_trace = []
    plan_trace = []
    sub_converged = []
    sub_residuals = []
    potentials = None
    early_stopped = False

    iterations = 0
    for t in range(cfg.fw_iters):
        phi = np.tensordot(stack, P, axes=([1, 2], [0, 1]))
        alpha = softmax(phi / eta)
        objective_trace.append(float(eta * logsumexp(phi / eta)))
        alpha_trace.append(alpha)
        if cfg.record_plans:
            plan_trace.append(P.copy())

        M = np.tensordot(alpha, stack, axes=1)
        if cfg.subsolver == "exact_emd":
            try:
                P_hat = emd_exact_solve(a, b, M).plan.matrix
            except SolverFailure as exc:
                raise SolverFailure(f"EMD subproblem failed at iteration {t}: {exc}") from exc
            sub_converged.append(True)
            sub_residuals.append(0.0)
        else:
            sub_cfg = SinkhornConfig(
                epsilon=cfg.epsilon, t_max=cfg.sinkhorn_t_max, tol=cfg.sinkhorn_tol
            )
            result = sinkhorn_solve(
                a, b, M, sub_cfg,
                init_potentials=potentials if cfg.warm_start else None,
            )
            # keep every iterate exactly marginal-feasible; the entropic
            # solver's own violation is recorded below
            P_hat = _round_to_polytope(result.plan.matrix, a, b)
            if cfg.warm_start:
                potentials = result.potentials
            sub_converged.append(result.converged)
            sub_residuals.append(float(result.plan.marginal_residual))

        gap = float(np.sum((P - P_hat) * M))
        gap_trace.append(gap)
        iterations = t + 1
        if cfg.gap_tol is not None and gap <= cfg.gap_tol:
            early_stopped = True
            break

        gamma = 2.0 / (2.0 + t)
        P = (1.0 - gamma) * P + gamma * P_hat

    phi = np.tensordot(stack, P, axes=([1, 2], [0, 1]))
    objective_trace.append(float(eta * logsumexp(phi / eta)))
    final_alpha = softmax(phi / eta)
    alpha_trace.append(final_alpha)
    if cfg.record_plans:
        plan_trace.append(P.copy())

    return FrotSolution(
        plan=TransportPlan.from_matrix(P, a, b),
        alpha=final_alpha,
        objective_trace=np.asarray(objective_trace),
        alpha_trace=np.asarray(alpha_trace),
        fw_gap_trace=np.asarray(gap_trace),
        subsolver_used=cfg.subsolver,
        metadata={
            "eta": eta,
            "iterations": iterations,
            "early_stopped": early_stopped,
            "subsolver_converged_all": bool(all(sub_converged)),
            "max_subsolver_residual": float(max(sub_residuals, default=0.0)),
            "max_group_cost": float(phi.max()),
        },
        plan_trace=plan_trace,
    )


@dataclass(frozen=True)
class FrotLpResult:
    plan: TransportPlan
    objective: float
    iterations: int


def frot_lp_solve(costs, a, b) -> FrotLpResult:
    """Exact min-max of the group costs via the epigraph LP.

    Variables are u = (vec(P), t) plus one slack per group; constraints
    are vec(C_k) . vec(P) - t + s_k = 0, the n row-marginal equalities and
    the m column-marginal equalities.  Solved with the revised simplex, so
    the result is an exact vertex optimizer of min_P max_k <P, C_k>.
    """
    stack = _cost_stack(costs)
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    L, n, m = stack.shape
    if (n, m) != (a.size, b.size):
        raise ValueError(f"cost stack shape {stack.shape} does not match weights")
    if abs(a.sum() - 1.0) > 1e-9 or abs(b.sum() - 1.0) > 1e-9:
        raise ValueError("weights must each sum to 1")
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("weights must be nonnegative")
    nm = n * m
    if nm > LP_MAX_VARIABLES:
        raise ValueError(
            f"epigraph LP limited to {LP_MAX_VARIABLES} plan variables, got {nm}"
        )

    nvar = nm + 1 + L
    rows = L + n + m
    A = np.zeros((rows, nvar))
    rhs = np.zeros(rows)
    # epigraph rows: <C_k, P> - t + s_k = 0
    for k in range(L):
        A[k, :nm] = stack[k].ravel()
        A[k, nm] = -1.0
        A[k, nm + 1 + k] = 1.0
    # row marginals: row i of P occupies columns i*m .. (i+1)*m
    for i in range(n):
        A[L + i, i * m:(i + 1) * m] = 1.0
        rhs[L + i] = a[i]
    # column marginals
    for j in range(m):
        A[L + n + j, j:nm:m] = 1.0
        rhs[L + n + j] = b[j]

    c = np.zeros(nvar)
    c[nm] = 1.0
    res = solve_lp(c, A, rhs)
    plan = TransportPlan.from_matrix(res.x[:nm].reshape(n, m), a, b)
    objective = float(res.x[nm])
    # nonnegative costs force t* >= 0; snap sub-tolerance pivot crud to the
    # exact zero so p-th roots downstream stay exact
    if objective <= 1e-12 * max(1.0, float(stack.max())):
        objective = 0.0
    return FrotLpResult(plan=plan, objective=objective, iterations=res.iterations)


@dataclass(frozen=True)
class MaxminResult:
    group_index: int
    alpha: np.ndarray
    distances: np.ndarray
    tie: bool


def maxmin_frot(
    src: GroupedMeasure,
    dst: GroupedMeasure,
    costs,
    per_group_solver="exact_emd",
    epsilon: float = 0.02,
) -> MaxminResult:
    """Max-min variant: pick the single group with the largest OT cost.

    Solves the per-group OT problem for every group and returns the argmax
    group, the corresponding one-hot weight vector, and all per-group
    distances.  Ties go to the lowest group index and are flagged.

    ``per_group_solver`` is ``"exact_emd"``, ``"sinkhorn"`` (with
    ``epsilon``), or a callable ``(a, b, C) -> float``.
    """
    stack = _cost_stack(costs)
    a, b = src.weights, dst.weights
    distances = np.empty(stack.shape[0])
    for k in range(stack.shape[0]):
        if callable(per_group_solver):
            distances[k] = float(per_group_solver(a, b, stack[k]))
        elif per_group_solver == "exact_emd":
            distances[k] = emd_exact_solve(a, b, stack[k]).objective
        elif per_group_solver == "sinkhorn":
            distances[k] = sinkhorn_solve(
                a, b, stack[k], SinkhornConfig(epsilon=epsilon)
            ).transport_cost
        else:
            raise ValueError(f"unknown per_group_solver {per_group_solver!r}")
    best = int(np.argmax(distances))
    alpha = np.zeros(stack.shape[0])
    alpha[best] = 1.0
    scale = max(abs(distances[best]), 1.0)
    tie = int(np.sum(distances >= distances[best] - 1e-12 * scale)) > 1
    return MaxminResult(group_index=best, alpha=alpha, distances=distances, tie=tie)


def fw_convergence_bound(costs, eta: float, t: int, rel_tol: float = 1e-8) -> float:
    """Optimality-gap bound for the Frank-Wolfe iterate at step t.

    Returns 4 sigma_max / (eta (t + 2)) where sigma_max is the largest
    eigenvalue of the Gram matrix of the vectorized cost matrices,
    computed by power iteration to relative tolerance ``rel_tol``.  Exact
    subproblem solutions are assumed (inexactness would scale the bound).
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    if t < 1:
        raise ValueError("t must be at least 1")
    stack = _cost_stack(costs)
    L = stack.shape[0]
    flat = stack.reshape(L, -1)
    gram = flat @ flat.T
    if not np.any(gram):
        return 0.0

    # Gram of nonnegative matrices is PSD with nonnegative entries, so the
    # all-ones start vector cannot be orthogonal to the dominant eigenspace
    v = np.full(L, 1.0 / np.sqrt(L))
    lam_prev = 0.0
    for _ in range(100_000):
        w = gram @ v
        norm = np.linalg.norm(w)
        v = w / norm
        lam = float(v @ (gram @ v))
        if abs(lam - lam_prev) <= rel_tol * max(abs(lam), 1e-300):
            return 4.0 * lam / (eta * (t + 2))
        lam_prev = lam
    raise SolverFailure("power iteration for the Gram spectral norm did not converge")
