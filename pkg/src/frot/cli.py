"""Command-line front end.

Subcommands cover the solver primitives (sinkhorn, emd, frot, frwd), the
feature-selection pipeline, synthetic data generation, and the seeded
experiment runners.  A JSON config file passed with --config overrides any
flag it names.  Exit codes: 0 success, 2 validation error, 1 solver
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .distances import frwd_distance
from .experiments import (
    ExperimentSpec,
    emit_synthetic_pair,
    run_experiment,
    write_json,
    write_plan_csv,
)
from .measures import build_grouped_cost, load_measure_csv, load_measure_json
from .minmax import FrotConfig, frot_fw_solve, frot_lp_solve
from .solvers import SinkhornConfig, SolverFailure, emd_exact_solve, sinkhorn_solve

EXIT_OK = 0
EXIT_SOLVER_FAILURE = 1
EXIT_VALIDATION = 2


def _load_measure(path: str):
    path = Path(path)
    if not path.exists():
        raise ValueError(f"measure file not found: {path}")
    if path.suffix == ".json":
        return load_measure_json(path)
    return load_measure_csv(path)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_pair(args):
    src = _load_measure(args.source)
    dst = _load_measure(args.target)
    costs = build_grouped_cost(src, dst, args.cost)
    return src, dst, costs


def cmd_sinkhorn(args) -> int:
    src, dst, costs = _load_pair(args)
    cfg = SinkhornConfig(epsilon=args.epsilon, t_max=args.iters,
                         log_domain=args.log_domain)
    result = sinkhorn_solve(src.weights, dst.weights, costs.total(), cfg)
    out = _out_dir(args)
    write_plan_csv(out / "plan.csv", result.plan.matrix)
    write_json(out / "result.json", {
        "objective": result.objective,
        "transport_cost": result.transport_cost,
        "converged": result.converged,
        "iterations": result.iterations,
        "marginal_residual": result.plan.marginal_residual,
    })
    print(f"sinkhorn: objective {result.objective:.6g}, "
          f"residual {result.plan.marginal_residual:.3e}, "
          f"converged {result.converged}")
    return EXIT_OK


def cmd_emd(args) -> int:
    src, dst, costs = _load_pair(args)
    result = emd_exact_solve(src.weights, dst.weights, costs.total())
    out = _out_dir(args)
    write_plan_csv(out / "plan.csv", result.plan.matrix)
    write_json(out / "result.json", {
        "objective": result.objective,
        "marginal_residual": result.plan.marginal_residual,
    })
    print(f"emd: objective {result.objective:.6g}")
    return EXIT_OK


def cmd_frot(args) -> int:
    src, dst, costs = _load_pair(args)
    out = _out_dir(args)
    if args.solver == "lp":
        lp = frot_lp_solve(costs, src.weights, dst.weights)
        write_plan_csv(out / "plan.csv", lp.plan.matrix)
        write_json(out / "result.json", {
            "objective": lp.objective,
            "solver": "lp",
        })
        print(f"frot lp: max group cost {lp.objective:.6g}")
        return EXIT_OK
    cfg = FrotConfig(eta=args.eta, fw_iters=args.iters, subsolver=args.solver,
                     epsilon=args.epsilon)
    sol = frot_fw_solve(src, dst, costs, cfg)
    write_plan_csv(out / "plan.csv", sol.plan.matrix)
    write_json(out / "result.json", {
        "alpha": sol.alpha.tolist(),
        "objective_trace": sol.objective_trace.tolist(),
        "fw_gap_trace": sol.fw_gap_trace.tolist(),
        "max_group_cost": sol.max_group_cost,
        "solver": f"fw-{cfg.subsolver}",
        "metadata": sol.metadata,
    })
    print(f"frot fw-{cfg.subsolver}: max group cost {sol.max_group_cost:.6g}, "
          f"alpha {np.array2string(sol.alpha, precision=4)}")
    return EXIT_OK


def cmd_frwd(args) -> int:
    src = _load_measure(args.source)
    dst = _load_measure(args.target)
    result = frwd_distance(src, dst, distance_kind=args.distance, p=args.p,
                           method=args.method)
    out = _out_dir(args)
    write_plan_csv(out / "plan.csv", result.plan.matrix)
    write_json(out / "result.json", {
        "value": result.value,
        "order": result.order,
        "alpha": result.alpha.tolist(),
        "method": args.method,
    })
    print(f"frwd (p={args.p}, {args.method}): {result.value:.6g}")
    return EXIT_OK


def cmd_select_features(args) -> int:
    spec = _spec_from_args(args, scenario="feature_selection")
    summary = run_experiment(spec)
    counts = summary["top_k_counts"]["frot"]
    ranked = np.argsort(counts)[::-1][: spec.top_k]
    print(f"select-features: top-{spec.top_k} by robust weights across "
          f"{spec.trials} trial(s): {sorted(ranked.tolist())}")
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = _spec_from_args(args, scenario="noise_robustness")
    info = emit_synthetic_pair(spec)
    print(f"synth: wrote {info['source']} and {info['target']} "
          f"({info['n']} x {info['m']} points)")
    return EXIT_OK


def cmd_experiment(args) -> int:
    spec = _spec_from_args(args, scenario=args.scenario)
    run_experiment(spec)
    print(f"experiment {spec.scenario}: results in {spec.out_dir}")
    return EXIT_OK


_SPEC_FLAGS = ("seed", "out", "eta", "epsilon", "iters", "n", "m", "trials",
               "top_k", "data", "label_col")


def _spec_from_args(args, scenario: str) -> ExperimentSpec:
    doc = {
        "scenario": scenario,
        "seed": args.seed,
        "out_dir": args.out,
        "eta": args.eta,
        "epsilon": args.epsilon,
        "fw_iters": args.iters,
    }
    for attr, key in (("n", "n"), ("m", "m"), ("trials", "trials"),
                      ("top_k", "top_k"), ("data", "data_path"),
                      ("label_col", "label_col")):
        if getattr(args, attr, None) is not None:
            doc[key] = getattr(args, attr)
    if args.config:
        with open(args.config) as fh:
            overrides = json.load(fh)
        doc.update(overrides)
    return ExperimentSpec.from_dict(doc)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eta", type=float, default=1.0,
                        help="group-weight smoothing strength")
    parser.add_argument("--epsilon", type=float, default=0.02,
                        help="entropic regularization")
    parser.add_argument("--iters", type=int, default=10,
                        help="iteration budget (Frank-Wolfe or Sinkhorn sweeps)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--config", default=None,
                        help="JSON config; values named there override flags")


def _add_pair_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--source", required=True, help="source measure (CSV or JSON)")
    parser.add_argument("--target", required=True, help="target measure (CSV or JSON)")
    parser.add_argument("--cost", default="squared_euclidean",
                        help="cost kind for the group matrices")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frot",
        description="Feature-robust optimal transport toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sinkhorn", help="entropic OT between two measures")
    _add_pair_inputs(p)
    _add_common(p)
    p.set_defaults(func=cmd_sinkhorn, iters=1000)
    p.add_argument("--log-domain", action="store_true", default=None,
                   dest="log_domain", help="force log-domain updates")

    p = sub.add_parser("emd", help="exact OT between two measures")
    _add_pair_inputs(p)
    _add_common(p)
    p.set_defaults(func=cmd_emd)

    p = sub.add_parser("frot", help="group-robust min-max transport")
    _add_pair_inputs(p)
    _add_common(p)
    p.add_argument("--solver", choices=("exact_emd", "sinkhorn", "lp"),
                   default="sinkhorn", help="subproblem solver, or exact LP")
    p.set_defaults(func=cmd_frot)

    p = sub.add_parser("frwd", help="feature-robust Wasserstein distance")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--p", type=float, default=2.0, help="distance order")
    p.add_argument("--distance", choices=("euclidean", "l1"), default="euclidean")
    p.add_argument("--method", choices=("lp", "fw"), default="lp")
    _add_common(p)
    p.set_defaults(func=cmd_frwd)

    p = sub.add_parser("select-features", help="rank and select features")
    p.add_argument("--data", default=None,
                   help="labeled CSV (default: built-in synthetic data)")
    p.add_argument("--label-col", dest="label_col", default=None,
                   help="label column name (default: last column)")
    p.add_argument("--top-k", dest="top_k", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_select_features)

    p = sub.add_parser("synth", help="generate the synthetic measure pair")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("experiment", help="run a seeded experiment scenario")
    p.add_argument("--scenario", required=True,
                   choices=("noise_robustness", "solver_comparison",
                            "feature_selection"))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--top-k", dest="top_k", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE


if __name__ == "__main__":
    sys.exit(main())
