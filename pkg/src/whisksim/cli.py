"""Command line harness: sweep, synth, train-eval, speed-sweep, grad-check.

Exit codes: 0 success, 2 configuration errors (argparse uses 2 as well),
3 physics/signal errors, 4 training divergence.
"""

from __future__ import annotations

import argparse
import sys

from . import experiment
from .config import ExperimentConfig, load_config
from .errors import ConfigError, PhysicsError, TrainingDivergedError, WhisksimError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_DIVERGED = 4


def _resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.out is not None:
        overrides["out_dir"] = args.out
    if overrides:
        from dataclasses import replace
        cfg = replace(cfg, **overrides)
    return cfg


def _print_accuracy_table(report: dict) -> None:
    print(f"mean overall accuracy: {report['mean_overall_accuracy']:.4f} "
          f"(std {report['std_overall_accuracy']:.4f}, "
          f"{len(report['repetitions'])} repetitions)")
    print("mean per-class accuracy:")
    from .terrain import TerrainClass
    for tc, acc in zip(TerrainClass, report["mean_per_class_accuracy"]):
        print(f"  {tc.label:<11s} {acc:.4f}")
    print("mean confusion matrix (rows true, cols predicted):")
    for row in report["mean_confusion"]:
        print("  " + " ".join(f"{v:7.2f}" for v in row))


def _print_speed_table(report: dict) -> None:
    from .terrain import TerrainClass
    header = "speed   overall " + " ".join(f"{tc.label:>10s}" for tc in TerrainClass)
    print(header)
    for entry in report["per_speed"]:
        cells = " ".join(f"{a:10.4f}" for a in entry["per_class_accuracy"])
        print(f"{entry['speed_m_s']:<7.3g} {entry['overall_accuracy']:7.4f} {cells}")


def _cmd_sweep(cfg: ExperimentConfig) -> int:
    report = experiment.run_sweep(cfg, cfg.out_dir)
    print(f"sweep: {report['cells_total']} cells, "
          f"{report['cells_f_dom_within_one_bin']} with dominant frequency "
          f"within one bin of the drive")
    print(f"wrote {cfg.out_dir}/sweep.csv and {cfg.out_dir}/sweep_summary.json")
    return EXIT_OK


def _cmd_synth(cfg: ExperimentConfig) -> int:
    report = experiment.run_synth(cfg, cfg.out_dir)
    for entry in report["terrains"]:
        print(f"{entry['terrain']:<11s} {entry['windows']:5d} windows "
              f"({entry['dropped']} dropped) -> {entry['file']}")
    print(f"wrote manifest {cfg.out_dir}/synth_manifest.json")
    total = report["total_windows"] + report["total_dropped"]
    if total and report["total_dropped"] / total > 0.01:
        print(f"error: {report['total_dropped']} of {total} windows degenerate",
              file=sys.stderr)
        return EXIT_PHYSICS
    return EXIT_OK


def _cmd_train_eval(cfg: ExperimentConfig) -> int:
    report = experiment.run_train_eval(cfg, cfg.out_dir)
    _print_accuracy_table(report)
    print(f"wrote {cfg.out_dir}/train_eval_report.json")
    return EXIT_OK


def _cmd_speed_sweep(cfg: ExperimentConfig) -> int:
    report = experiment.run_speed_sweep(cfg, cfg.out_dir)
    _print_speed_table(report)
    print(f"wrote {cfg.out_dir}/speed_sweep_report.json")
    return EXIT_OK


def _cmd_grad_check(cfg: ExperimentConfig) -> int:
    report = experiment.run_grad_check(cfg)
    print(f"max relative gradient error: {report['max_relative_error']:.3e}")
    if not report["passed"]:
        print("error: gradient check failed (threshold 1e-5)", file=sys.stderr)
        return EXIT_PHYSICS
    return EXIT_OK


_COMMANDS = {
    "sweep": _cmd_sweep,
    "synth": _cmd_synth,
    "train-eval": _cmd_train_eval,
    "speed-sweep": _cmd_speed_sweep,
    "grad-check": _cmd_grad_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="whisksim",
        description="Spring-whisker vibration simulation and terrain classification")
    parser.add_argument("--config", help="experiment config JSON path")
    parser.add_argument("--seed", type=int, help="override the master seed")
    parser.add_argument("--out", help="override the output directory")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", help="drive-grid response sweep (CSV + summary)")
    sub.add_parser("synth", help="synthesize per-terrain feature datasets")
    sub.add_parser("train-eval", help="repeated split/train/evaluate report")
    sub.add_parser("speed-sweep", help="train-eval at each configured speed")
    sub.add_parser("grad-check", help="finite-difference gradient verification")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TrainingDivergedError as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (PhysicsError, WhisksimError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    raise SystemExit(main())
