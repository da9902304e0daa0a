"""Command-line interface: run, synth, eval, bench."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import io as masa_io
from .core import Hyperparameters, TimeSeries
from .driver import run_iteration, run_masa
from .state_model import initialize
from .synth import (
    GroundTruth,
    SynthConfig,
    full_accuracy,
    gen_synthetic,
    match_labels,
    motif_accuracy,
    weighted_f1,
)


def _add_hyper_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--states", type=int, default=10, help="number of states K")
    p.add_argument("--beta", type=float, default=25.0, help="switching penalty")
    p.add_argument("--gamma", type=float, default=0.8, help="non-motif aggressiveness")
    p.add_argument("--min-instances", type=int, default=10,
                   help="minimum instances L per motif")
    p.add_argument("--alpha", type=float, default=0.001,
                   help="significance threshold (Bonferroni-corrected)")
    p.add_argument("--max-iters", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reg-lambda", type=float, default=0.1,
                   help="covariance ridge regularization")
    p.add_argument("--candidate-cap", type=int, default=25,
                   help="max candidate motifs kept per iteration")
    p.add_argument("--length-sort", choices=["increasing", "decreasing"],
                   default="increasing",
                   help="order in which candidates are tested")


def _hp_from_args(args) -> Hyperparameters:
    return Hyperparameters(
        k_states=args.states,
        beta=args.beta,
        gamma=args.gamma,
        min_instances=args.min_instances,
        alpha=args.alpha,
        max_iters=args.max_iters,
        seed=args.seed,
        reg_lambda=args.reg_lambda,
    )


def cmd_run(args) -> int:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    try:
        ts = masa_io.ingest_csv(args.input, standardize=args.standardize)
    except (masa_io.IngestError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    hp = _hp_from_args(args)
    start = time.perf_counter()
    try:
        result = run_masa(ts, hp, args.candidate_cap, args.length_sort)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    wall = time.perf_counter() - start
    masa_io.write_assignment_csv(out / "assignment.csv", result)
    masa_io.write_motifs_json(out / "motifs.json", result)
    masa_io.write_model_json(out / "model.json", result.model, hp.gamma)
    masa_io.write_diagnostics_json(out / "diagnostics.json", result, wall)
    print(
        f"run: {result.iterations} iterations, converged={result.converged}, "
        f"{result.motifs.n_motifs} motifs, {result.motifs.n_instances} instances"
    )
    return 0


def cmd_synth(args) -> int:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    try:
        cfg = SynthConfig(
            n_macro=args.macro_segments,
            k_states=args.states,
            epsilon=args.epsilon,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    ts, truth = gen_synthetic(cfg)
    masa_io.write_data_csv(out / "data.csv", ts)
    masa_io.write_truth_csv(out / "truth.csv", truth)
    print(f"synth: wrote {ts.t_len} measurements to {out}")
    return 0


def cmd_eval(args) -> int:
    try:
        pred = masa_io.read_assignment_csv(args.pred)
        truth = masa_io.read_truth_csv(args.truth)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if pred.t_len != len(truth.labels):
        print(
            f"error: length mismatch: {pred.t_len} predictions vs "
            f"{len(truth.labels)} truth rows",
            file=sys.stderr,
        )
        return 1
    perm = match_labels(pred, truth)
    metrics = {
        "accuracy_motif": motif_accuracy(pred, truth, perm),
        "weighted_f1": weighted_f1(pred, truth, perm=perm),
        "accuracy_full": full_accuracy(pred, truth, perm),
        "permutation": [int(p) for p in perm],
    }
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    masa_io.write_metrics_json(out / "metrics.json", metrics)
    print(
        f"accuracy_motif={metrics['accuracy_motif']:.4f} "
        f"weighted_f1={metrics['weighted_f1']:.4f} "
        f"accuracy_full={metrics['accuracy_full']:.4f}"
    )
    return 0


def cmd_bench(args) -> int:
    sizes = sorted(args.sizes)
    hp = _hp_from_args(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    seg_block = SynthConfig().seg_len * SynthConfig().segs_per_macro
    for t_len in sizes:
        cfg = SynthConfig(
            n_macro=max(1, t_len // seg_block),
            k_states=args.states,
            epsilon=args.epsilon,
            seed=args.seed,
        )
        ts, _ = gen_synthetic(cfg)
        model, _ = initialize(ts, hp)
        start = time.perf_counter()
        run_iteration(model, ts, hp, args.candidate_cap, args.length_sort)
        seconds = time.perf_counter() - start
        rows.append((ts.t_len, seconds))
        print(f"bench: T={ts.t_len} iteration={seconds:.3f}s")
    masa_io.write_bench_csv(out / "bench.csv", rows)
    if len(rows) >= 2:
        r2 = linear_fit_r2(rows)
        print(f"linear fit R^2 = {r2:.4f}")
    else:
        print("linear fit R^2 = undefined (single size)")
    return 0


def linear_fit_r2(rows: list[tuple[int, float]]) -> float:
    x = np.array([r[0] for r in rows], dtype=float)
    y = np.array([r[1] for r in rows], dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="masa",
        description="Motif-aware state assignment for multivariate time series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run MASA on a CSV dataset")
    p_run.add_argument("--input", required=True, help="input CSV path")
    p_run.add_argument("--output", required=True, help="output directory")
    p_run.add_argument("--standardize", action="store_true",
                       help="z-score each column before fitting")
    _add_hyper_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_synth = sub.add_parser("synth", help="generate the synthetic benchmark")
    p_synth.add_argument("--output", required=True, help="output directory")
    p_synth.add_argument("--epsilon", type=float, default=0.0,
                         help="per-segment perturbation probability")
    p_synth.add_argument("--macro-segments", type=int, default=1000)
    p_synth.add_argument("--states", type=int, default=10)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.set_defaults(func=cmd_synth)

    p_eval = sub.add_parser("eval", help="score a prediction against truth")
    p_eval.add_argument("pred", help="assignment.csv (or truth-format) path")
    p_eval.add_argument("truth", help="truth.csv path")
    p_eval.add_argument("--output", default=".", help="directory for metrics.json")
    p_eval.set_defaults(func=cmd_eval)

    p_bench = sub.add_parser("bench", help="per-iteration runtime scaling")
    p_bench.add_argument("--sizes", type=int, nargs="+", required=True,
                         help="dataset lengths T (ascending)")
    p_bench.add_argument("--output", default=".", help="directory for bench.csv")
    p_bench.add_argument("--epsilon", type=float, default=0.2)
    _add_hyper_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
