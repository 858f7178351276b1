"""Seeded experiment runners and their on-disk result formats.

Every runner writes plot-ready artifacts (plans as dense CSV, traces and
weights as JSON) plus a manifest recording the full configuration, seed,
library versions, and wall time.  Result files are deterministic given the
spec, and grid points are written atomically.
"""

from __future__ import annotations

import csv
import json
import os
import platform
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .feature_selection import baseline_rank, frot_feature_importance, select_top_k
from .measures import build_grouped_cost, load_measure_csv, save_measure_csv
from .minmax import FrotConfig, _round_to_polytope, frot_fw_solve, frot_lp_solve
from .solvers import SinkhornConfig, sinkhorn_solve
from .synthetic import EFFECTIVE_COV, comparison_instance, labeled_synthetic, synth_generate

SCHEMA_VERSION = "1"

SCENARIOS = ("noise_robustness", "solver_comparison", "feature_selection")

DEFAULT_ETA_GRID = (0.05, 0.1, 0.2, 0.5, 1.0, 2.0)
DEFAULT_EPSILON_GRID = (0.01, 0.02, 0.05, 0.1, 0.2)


@dataclass(frozen=True)
class ExperimentSpec:
    """Fully seeded description of one experiment run."""

    scenario: str
    seed: int = 0
    out_dir: str = "results"
    n: int | None = None
    m: int | None = None
    eta: float = 1.0
    epsilon: float = 0.02
    fw_iters: int = 10
    eta_grid: tuple = DEFAULT_ETA_GRID
    epsilon_grid: tuple = DEFAULT_EPSILON_GRID
    compare_epsilon: float = 0.1
    # the comparison sweeps let Frank-Wolfe converge rather than using the
    # small fixed budget that suffices for the robustness runs
    compare_fw_iters: int = 50
    sinkhorn_t_max: int = 5000
    # feature-selection knobs
    data_path: str | None = None
    label_col: str | None = None
    trials: int = 1
    top_k: int = 2
    n_per_class: int = 60
    n_features: int = 20
    informative: tuple = (0, 1)
    shift: float = 5.0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}")
        if len(self.eta_grid) == 0 or len(self.epsilon_grid) == 0:
            raise ValueError("parameter grids must be non-empty")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown experiment spec keys: {sorted(unknown)}")
        doc = dict(doc)
        for key in ("eta_grid", "epsilon_grid", "informative"):
            if key in doc and doc[key] is not None:
                doc[key] = tuple(doc[key])
        return cls(**doc)


# ---------------------------------------------------------------------------
# Atomic, deterministic emission helpers
# ---------------------------------------------------------------------------


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_json(path, doc: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    _atomic_write(Path(path), json.dumps(doc, sort_keys=True, indent=1) + "\n")


def write_plan_csv(path, matrix) -> None:
    rows = "\n".join(",".join(repr(float(v)) for v in row) for row in np.asarray(matrix))
    _atomic_write(Path(path), rows + "\n")


def read_plan_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def _write_manifest(out_dir: Path, spec: ExperimentSpec, wall_time: float,
                    outputs, notes=None) -> None:
    write_json(out_dir / "manifest.json", {
        "scenario": spec.scenario,
        "seed": spec.seed,
        "spec": asdict(spec),
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "frot": __version__,
        },
        "wall_time_s": wall_time,
        "outputs": sorted(outputs),
        "notes": notes or {},
    })


def run_experiment(spec: ExperimentSpec) -> dict:
    """Dispatch a spec to its scenario runner."""
    runner = {
        "noise_robustness": run_noise_robustness,
        "solver_comparison": run_solver_comparison,
        "feature_selection": run_feature_selection,
    }[spec.scenario]
    return runner(spec)


# ---------------------------------------------------------------------------
# Noise robustness: plain OT on clean and noisy data vs robust transport
# ---------------------------------------------------------------------------


def run_noise_robustness(spec: ExperimentSpec) -> dict:
    """Compare entropic OT plans on clean/noisy data with the robust plan.

    Generates the two-cluster pair (informative 2-D signal plus an 8-D
    noise block), solves entropic OT on the clean signal, entropic OT on
    the full noisy points, and the group-robust problem on the noisy
    points, and emits all three plans plus the group weights.
    """
    start = time.perf_counter()
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = spec.n if spec.n is not None else 50
    m = spec.m if spec.m is not None else 50

    src_clean, dst_clean = synth_generate(n, m, spec.seed, include_noise=False)
    src, dst = synth_generate(n, m, spec.seed)

    sink_cfg = SinkhornConfig(epsilon=spec.epsilon, t_max=spec.sinkhorn_t_max)
    clean_cost = build_grouped_cost(src_clean, dst_clean, "squared_euclidean").total()
    noisy_costs = build_grouped_cost(src, dst, "squared_euclidean")

    ot_clean = sinkhorn_solve(src_clean.weights, dst_clean.weights, clean_cost, sink_cfg)
    ot_noisy = sinkhorn_solve(src.weights, dst.weights, noisy_costs.total(), sink_cfg)
    robust = frot_fw_solve(
        src, dst, noisy_costs,
        FrotConfig(eta=spec.eta, fw_iters=spec.fw_iters, subsolver="sinkhorn",
                   epsilon=spec.epsilon, sinkhorn_t_max=spec.sinkhorn_t_max),
    )

    outputs = ["ot_clean_plan.csv", "ot_noisy_plan.csv", "robust_plan.csv",
               "summary.json"]
    # emitted plans are rounded onto the polytope so downstream consumers get
    # exact couplings; each solver's own residual is recorded in the summary
    write_plan_csv(out_dir / "ot_clean_plan.csv",
                   _round_to_polytope(ot_clean.plan.matrix, src_clean.weights,
                                      dst_clean.weights))
    write_plan_csv(out_dir / "ot_noisy_plan.csv",
                   _round_to_polytope(ot_noisy.plan.matrix, src.weights,
                                      dst.weights))
    write_plan_csv(out_dir / "robust_plan.csv", robust.plan.matrix)
    summary = {
        "alpha": robust.alpha.tolist(),
        "informative_group_weight": float(robust.alpha[0]),
        "objective_trace": robust.objective_trace.tolist(),
        "fw_gap_trace": robust.fw_gap_trace.tolist(),
        "marginal_residuals": {
            "ot_clean": ot_clean.plan.marginal_residual,
            "ot_noisy": ot_noisy.plan.marginal_residual,
            "robust": robust.plan.marginal_residual,
        },
        "converged": {"ot_clean": ot_clean.converged, "ot_noisy": ot_noisy.converged},
    }
    write_json(out_dir / "summary.json", summary)
    _write_manifest(out_dir, spec, time.perf_counter() - start, outputs + ["manifest.json"],
                    notes={"signal_covariance_psd_projection": EFFECTIVE_COV.tolist()})
    return summary


# ---------------------------------------------------------------------------
# Solver comparison: exact LP vs Frank-Wolfe paths over eta and epsilon grids
# ---------------------------------------------------------------------------


def _plan_mse(p1: np.ndarray, p2: np.ndarray) -> float:
    return float(np.mean((p1 - p2) ** 2))


def run_solver_comparison(spec: ExperimentSpec) -> dict:
    """Sweep the smoothing strength and the subsolver regularization.

    On a fixed two-group instance, solves the exact epigraph LP once, then
    for every eta in the grid runs Frank-Wolfe with the exact and the
    entropic subsolver, recording max-cost objectives and the mean squared
    error between each plan and the LP plan.  A second sweep varies the
    entropic epsilon at fixed eta = 1.
    """
    start = time.perf_counter()
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = spec.n if spec.n is not None else 20
    m = spec.m if spec.m is not None else 20

    src, dst = comparison_instance(n, m, spec.seed)
    costs = build_grouped_cost(src, dst, "squared_euclidean")
    lp = frot_lp_solve(costs, src.weights, dst.weights)

    eta_rows = []
    for eta in spec.eta_grid:
        fw_emd = frot_fw_solve(src, dst, costs,
                               FrotConfig(eta=eta, fw_iters=spec.compare_fw_iters))
        fw_sink = frot_fw_solve(
            src, dst, costs,
            FrotConfig(eta=eta, fw_iters=spec.compare_fw_iters, subsolver="sinkhorn",
                       epsilon=spec.compare_epsilon,
                       sinkhorn_t_max=spec.sinkhorn_t_max),
        )
        eta_rows.append({
            "eta": eta,
            "lp_objective": lp.objective,
            "fw_emd_objective": fw_emd.max_group_cost,
            "fw_emd_smoothed": float(fw_emd.objective_trace[-1]),
            "fw_emd_plan_mse": _plan_mse(lp.plan.matrix, fw_emd.plan.matrix),
            "fw_sinkhorn_objective": fw_sink.max_group_cost,
            "fw_sinkhorn_smoothed": float(fw_sink.objective_trace[-1]),
            "fw_sinkhorn_plan_mse": _plan_mse(lp.plan.matrix, fw_sink.plan.matrix),
        })

    eps_rows = []
    for eps in spec.epsilon_grid:
        fw_sink = frot_fw_solve(
            src, dst, costs,
            FrotConfig(eta=spec.eta, fw_iters=spec.compare_fw_iters,
                       subsolver="sinkhorn", epsilon=eps,
                       sinkhorn_t_max=spec.sinkhorn_t_max),
        )
        eps_rows.append({
            "epsilon": eps,
            "lp_objective": lp.objective,
            "fw_sinkhorn_objective": fw_sink.max_group_cost,
            "fw_sinkhorn_plan_mse": _plan_mse(lp.plan.matrix, fw_sink.plan.matrix),
        })

    outputs = ["eta_sweep.csv", "epsilon_sweep.csv", "lp_plan.csv", "summary.json"]
    _write_rows_csv(out_dir / "eta_sweep.csv", eta_rows)
    _write_rows_csv(out_dir / "epsilon_sweep.csv", eps_rows)
    write_plan_csv(out_dir / "lp_plan.csv", lp.plan.matrix)
    summary = {
        "lp_objective": lp.objective,
        "eta_sweep": eta_rows,
        "epsilon_sweep": eps_rows,
    }
    write_json(out_dir / "summary.json", summary)
    _write_manifest(out_dir, spec, time.perf_counter() - start,
                    outputs + ["manifest.json"])
    return summary


def _write_rows_csv(path, rows) -> None:
    header = list(rows[0].keys())
    lines = [",".join(header)]
    lines += [",".join(repr(float(row[key])) for key in header) for row in rows]
    _atomic_write(Path(path), "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Feature selection pipeline
# ---------------------------------------------------------------------------


def _load_labeled_csv(path, label_col=None):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    if label_col is None:
        label_idx = len(header) - 1
    else:
        if label_col not in header:
            raise ValueError(f"{path}: label column {label_col!r} not in header")
        label_idx = header.index(label_col)
    data = np.array([[float(v) for v in row] for row in rows])
    labels = data[:, label_idx]
    X = np.delete(data, label_idx, axis=1)
    names = [h for i, h in enumerate(header) if i != label_idx]
    classes = np.unique(labels)
    if classes.shape[0] != 2:
        raise ValueError(f"{path}: expected a binary label column, got {classes}")
    return X, labels, names, classes


def _train_test_split(n_rows: int, rng: np.random.Generator, train_fraction=0.75):
    order = rng.permutation(n_rows)
    n_train = int(round(train_fraction * n_rows))
    return order[:n_train], order[n_train:]


def _standardize(train: np.ndarray, test: np.ndarray):
    mean = train.mean(axis=0)
    std = train.std(axis=0)
    std = np.where(std == 0, 1.0, std)
    return (train - mean) / std, (test - mean) / std


def run_feature_selection(spec: ExperimentSpec) -> dict:
    """Rank features on train splits and emit rankings plus reduced data.

    Each trial splits the labeled data 75/25, standardizes features on the
    training split, and ranks with the robust-transport weights and both
    per-dimension baselines.  Multi-trial mode repeats with derived seeds
    and aggregates how often each feature lands in the top K.  The first
    trial's rankings and top-K-reduced train/test CSVs are emitted.
    """
    start = time.perf_counter()
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if spec.data_path is not None:
        X_all, labels_all, names, classes = _load_labeled_csv(spec.data_path, spec.label_col)
    else:
        X_all, labels_all = labeled_synthetic(
            spec.n_per_class, spec.n_features, spec.informative, spec.shift, spec.seed)
        names = [f"f{i}" for i in range(X_all.shape[1])]
        classes = np.array([0.0, 1.0])

    d = X_all.shape[1]
    methods = ("frot", "wasserstein_sort", "linear_correlation")
    top_counts = {method: np.zeros(d, dtype=int) for method in methods}
    trials_out = []
    first_artifacts = {}

    for trial in range(spec.trials):
        trial_seed = spec.seed + trial
        rng = np.random.default_rng(np.random.SeedSequence((trial_seed, 925)))
        train_idx, test_idx = _train_test_split(X_all.shape[0], rng)
        X_train, X_test = _standardize(X_all[train_idx], X_all[test_idx])
        y_train, y_test = labels_all[train_idx], labels_all[test_idx]
        class1 = X_train[y_train == classes[0]]
        class2 = X_train[y_train == classes[1]]

        rankings = {
            "frot": frot_feature_importance(
                class1, class2,
                fw_cfg=FrotConfig(eta=spec.eta, fw_iters=spec.fw_iters,
                                  subsolver="sinkhorn", epsilon=spec.epsilon)),
            "wasserstein_sort": baseline_rank(class1, class2, "wasserstein_sort"),
            "linear_correlation": baseline_rank(class1, class2, "linear_correlation"),
        }
        entry = {"trial_seed": trial_seed,
                 "n_train": int(train_idx.size), "n_test": int(test_idx.size)}
        for method, ranking in rankings.items():
            selected = select_top_k(ranking, spec.top_k)
            top_counts[method][selected] += 1
            entry[method] = {
                "order": ranking.order.tolist(),
                "importances": ranking.importances.tolist(),
                "top_k": selected.tolist(),
            }
        trials_out.append(entry)

        if trial == 0:
            selected = select_top_k(rankings["frot"], spec.top_k)
            first_artifacts = {
                "rankings": rankings,
                "selected": selected,
                "train": (X_train, y_train),
                "test": (X_test, y_test),
            }

    outputs = ["rankings.json"]
    for method, ranking in first_artifacts["rankings"].items():
        name = f"ranking_{method}.json"
        write_json(out_dir / name, {
            "method": method,
            "importances": ranking.importances.tolist(),
            "order": ranking.order.tolist(),
            "config": {"eta": spec.eta, "fw_iters": spec.fw_iters,
                       "epsilon": spec.epsilon, "top_k": spec.top_k,
                       "standardized": True},
        })
        outputs.append(name)
    for split in ("train", "test"):
        X_split, y_split = first_artifacts[split]
        name = f"selected_{split}.csv"
        _write_reduced_csv(out_dir / name, X_split, y_split,
                           first_artifacts["selected"], names)
        outputs.append(name)

    summary = {
        "top_k": spec.top_k,
        "trials": trials_out,
        "top_k_counts": {m: top_counts[m].tolist() for m in methods},
        "feature_names": names,
    }
    write_json(out_dir / "rankings.json", summary)
    _write_manifest(out_dir, spec, time.perf_counter() - start,
                    outputs + ["manifest.json"])
    return summary


def _write_reduced_csv(path, X, labels, selected, names) -> None:
    header = [names[i] for i in selected] + ["label"]
    lines = [",".join(header)]
    for row, label in zip(X[:, selected], labels):
        lines.append(",".join(repr(float(v)) for v in row) + "," + repr(float(label)))
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def emit_synthetic_pair(spec: ExperimentSpec) -> dict:
    """Generate the synthetic pair and write both measures as CSV."""
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = spec.n if spec.n is not None else 20
    m = spec.m if spec.m is not None else 20
    src, dst = synth_generate(n, m, spec.seed)
    save_measure_csv(src, out_dir / "source.csv")
    save_measure_csv(dst, out_dir / "target.csv")
    # round-trip guard: the emitted files must reload to the same measures
    reloaded = load_measure_csv(out_dir / "source.csv")
    if not np.array_equal(reloaded.points, src.points):
        raise AssertionError("synthetic measure did not round-trip losslessly")
    return {"source": str(out_dir / "source.csv"), "target": str(out_dir / "target.csv"),
            "n": n, "m": m}
