import numpy as np
import pytest
from scipy.optimize import linprog

from frot.simplex import solve_lp
from frot.solvers import SolverFailure


def _random_feasible_lp(rng, rows, cols):
    """Standard-form LP with a known feasible point (so never infeasible)."""
    A = rng.normal(size=(rows, cols))
    x_feas = rng.uniform(0.5, 1.5, size=cols)
    b = A @ x_feas
    c = rng.normal(size=cols)
    # bound the polytope so the objective cannot be unbounded
    A = np.vstack([A, np.ones(cols)])
    b = np.append(b, x_feas.sum() * 2)
    A = np.hstack([A, np.zeros((rows + 1, 1))])
    A[-1, -1] = 1.0
    c = np.append(c, 0.0)
    return c, A, b


@pytest.mark.parametrize("seed", range(8))
def test_matches_scipy_on_random_instances(seed):
    rng = np.random.default_rng(seed)
    c, A, b = _random_feasible_lp(rng, rows=4, cols=7)
    mine = solve_lp(c, A, b)
    ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    assert ref.status == 0
    assert mine.objective == pytest.approx(ref.fun, abs=1e-8)
    np.testing.assert_allclose(A @ mine.x, b, atol=1e-9)
    assert mine.x.min() >= 0.0


def test_redundant_rows_handled():
    # second row duplicates the first
    A = np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 1.0, 1.0]])
    b = np.array([1.0, 2.0, 1.5])
    c = np.array([1.0, 2.0, 0.5])
    res = solve_lp(c, A, b)
    np.testing.assert_allclose(A @ res.x, b, atol=1e-10)
    ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    assert res.objective == pytest.approx(ref.fun, abs=1e-10)


def test_infeasible_detected():
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    b = np.array([1.0, 2.0])
    with pytest.raises(SolverFailure, match="infeasible"):
        solve_lp(np.ones(2), A, b)


def test_negative_rhs_rows_handled():
    A = np.array([[-1.0, -1.0]])
    b = np.array([-1.0])
    res = solve_lp(np.array([2.0, 1.0]), A, b)
    assert res.objective == pytest.approx(1.0)
    np.testing.assert_allclose(res.x, [0.0, 1.0], atol=1e-12)


def test_degenerate_instance_terminates():
    # many ties in the ratio test: all-equal costs on a transport polytope
    n = 4
    A = np.zeros((2 * n, n * n))
    for i in range(n):
        A[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        A[n + j, j::n] = 1.0
    b = np.full(2 * n, 1.0 / n)
    c = np.ones(n * n)
    res = solve_lp(c, A, b)
    assert res.objective == pytest.approx(1.0)


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError, match="dimensions"):
        solve_lp(np.ones(3), np.ones((2, 2)), np.ones(2))
