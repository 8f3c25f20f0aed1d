"""Command-line harness: static, sweep, dynamic and planning experiments.

Exit codes: 0 success, 2 config error, 3 assert-threshold failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from ..model import FastronModel
from .config import ConfigError, load_config
from .report import emit_report
from .runners import run_dynamic_eval, run_planning_eval, run_static_eval, run_sweep

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fastron-bench",
        description="Proxy-collision-detection benchmarks with seeded scenarios and CSV output.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("static", "accuracy and query timing in a static scenario"),
        ("sweep", "static evaluation across a parameter sweep"),
        ("dynamic", "update cycles against moving obstacles"),
        ("plan", "motion planning with proxy+verify+repair vs oracle"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON scenario config")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--seeds", type=int, default=None,
                       help="number of seeds (default: config seeds or 20)")
        p.add_argument("--seed-offset", type=int, default=0,
                       help="first seed index, for CI sharding")
        p.add_argument("--assert", dest="check_asserts", action="store_true",
                       help="exit 3 if config asserts fail on aggregated metrics")
        p.add_argument("--save-model", default=None,
                       help="write the first seed's trained model (fastron v1 text)")
        p.add_argument("--load-model", default=None,
                       help="evaluate a saved model instead of training (static only)")
        if name == "sweep":
            p.add_argument("--parameter", required=True,
                           choices=("beta", "gamma", "obstacle_count"))
            p.add_argument("--values", required=True,
                           help="comma-separated sweep values")
    return parser


def _seed_list(cfg, args) -> list[int]:
    if args.seeds is not None:
        return list(range(args.seed_offset, args.seed_offset + args.seeds))
    if cfg.seeds is not None:
        return [s + args.seed_offset for s in cfg.seeds]
    return list(range(args.seed_offset, args.seed_offset + 20))


def _check_asserts(records, asserts) -> list[str]:
    failures = []
    for metric, bounds in asserts.items():
        vals = [getattr(r, metric, None) for r in records]
        vals = [v for v in vals if v is not None]
        if not vals:
            failures.append(f"{metric}: no values recorded")
            continue
        mean = float(np.mean(vals))
        if "min" in bounds and mean < bounds["min"]:
            failures.append(f"{metric}: mean {mean:.6g} < min {bounds['min']}")
        if "max" in bounds and mean > bounds["max"]:
            failures.append(f"{metric}: mean {mean:.6g} > max {bounds['max']}")
    return failures


def _run_static_with_model_io(cfg, seeds, args):
    from ..geometry import make_label_fn
    from .report import MetricsRecord
    from .runners import _S_HOLDOUT, _S_SCENARIO, _evaluate, _rng
    from .scenarios import build_chain, build_workspace

    if args.load_model is None:
        records = run_static_eval(cfg, seeds)
        if args.save_model is not None:
            from .runners import _train_static_model

            chain = build_chain(cfg)
            workspace = build_workspace(cfg, _rng(seeds[0], _S_SCENARIO), chain)
            model, _, _ = _train_static_model(
                cfg, seeds[0], chain, make_label_fn(chain, workspace)
            )
            model.save(args.save_model)
        return records
    # evaluate a pre-trained model against each seed's scenario
    model = FastronModel.load(args.load_model)
    records = []
    for seed in seeds:
        chain = build_chain(cfg)
        workspace = build_workspace(cfg, _rng(seed, _S_SCENARIO), chain)
        label_fn = make_label_fn(chain, workspace)
        holdout = _rng(seed, _S_HOLDOUT).uniform(-1.0, 1.0, (cfg.eval.holdout, chain.dof))
        acc, tpr, tnr = _evaluate(model, label_fn, holdout)
        records.append(MetricsRecord(run="static", seed=seed, accuracy=acc, tpr=tpr,
                                     tnr=tnr, support_count=model.n))
    return records


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        seeds = _seed_list(cfg, args)
        summary = None
        if args.command == "static":
            records = _run_static_with_model_io(cfg, seeds, args)
        elif args.command == "sweep":
            values = [float(v) for v in args.values.split(",") if v.strip()]
            if not values:
                raise ConfigError("--values must contain at least one number")
            records, summary = run_sweep(cfg, args.parameter, values, seeds)
        elif args.command == "dynamic":
            records = run_dynamic_eval(cfg, seeds)
        else:
            records = run_planning_eval(cfg, seeds)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    emit_report(records, args.out, summary_rows=summary)
    if args.check_asserts and cfg.asserts:
        failures = _check_asserts(records, cfg.asserts)
        if failures:
            for f in failures:
                print(f"assert failed: {f}", file=sys.stderr)
            return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
