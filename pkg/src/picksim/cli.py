"""Command-line entry point: train, eval, baseline, sweep, trace."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .agent import TrainConfig, train
from .baselines import TABLE3
from .env import PickingEnv
from .harness import (ExperimentConfig, PolicyRef, evaluate, load_config,
                      parse_schedule, run_trace_shift, sweep,
                      write_metrics_csv, write_reward_curve_csv,
                      write_sweep_csv)
from .orders import ArrivalProcess


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="picksim",
        description="Dynamic order-picking simulator: DQN training and benchmarks",
    )
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--config", type=Path, help="experiment config file (INI)")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a DQN policy")
    p_train.add_argument("--lambda", dest="rate", type=float, required=True)
    p_train.add_argument("--alpha", type=float, default=1.0)
    p_train.add_argument("--episodes", type=int, default=4500)
    p_train.add_argument("--steps", type=int, default=1000)
    p_train.add_argument("--checkpoint", type=Path, help="output checkpoint path")

    p_eval = sub.add_parser("eval", help="evaluate a policy over seeded shifts")
    group = p_eval.add_mutually_exclusive_group(required=True)
    group.add_argument("--checkpoint", type=Path)
    group.add_argument("--baseline", choices=sorted(TABLE3))
    group.add_argument("--policy", choices=["random", "idle"])
    p_eval.add_argument("--lambda", dest="rate", type=float)
    p_eval.add_argument("--schedule", type=str,
                        help="rate:duration[,rate:duration...] blocks")
    p_eval.add_argument("--runs", type=int, default=10)
    p_eval.add_argument("--workers", type=int, default=1)
    p_eval.add_argument("--csv", type=Path, help="metrics CSV path")

    p_base = sub.add_parser("baseline", help="run one Table-3 baseline")
    p_base.add_argument("name", choices=sorted(TABLE3))
    p_base.add_argument("--lambda", dest="rate", type=float, required=True)
    p_base.add_argument("--runs", type=int, default=10)
    p_base.add_argument("--workers", type=int, default=1)
    p_base.add_argument("--csv", type=Path)

    p_sweep = sub.add_parser("sweep", help="policy x lambda grid evaluation")
    p_sweep.add_argument("--grid", type=Path, required=True,
                         help="INI file with [sweep] policies/lambdas")
    p_sweep.add_argument("--csv", type=Path)

    p_trace = sub.add_parser("trace", help="single shift with a per-step trace")
    p_trace.add_argument("--checkpoint", type=Path)
    p_trace.add_argument("--policy", choices=["random", "idle"])
    p_trace.add_argument("--lambda", dest="rate", type=float, required=True)
    p_trace.add_argument("--csv", type=Path, required=True)
    return parser


def _experiment(args, policy: PolicyRef) -> ExperimentConfig:
    base = ExperimentConfig(master_seed=args.seed, policy=policy)
    if args.config:
        base = load_config(args.config, base)
    rate = getattr(args, "rate", None)
    schedule = getattr(args, "schedule", None)
    if schedule:
        base = replace(base, schedule=parse_schedule(schedule), rate=None)
    elif rate is not None:
        base = replace(base, rate=rate, schedule=None)
    if getattr(args, "runs", None):
        base = replace(base, n_runs=args.runs)
    if getattr(args, "workers", None):
        base = replace(base, workers=args.workers)
    return replace(base, policy=policy, master_seed=args.seed)


def _cmd_train(args) -> int:
    import configparser

    episodes, steps = args.episodes, args.steps
    train_cfg = TrainConfig(episodes=episodes, steps_per_episode=steps, seed=args.seed)
    exp = ExperimentConfig(master_seed=args.seed, rate=args.rate, alpha=args.alpha)
    if args.config:
        exp = load_config(args.config, exp)
        exp = replace(exp, rate=args.rate, schedule=None, alpha=args.alpha)
    env = PickingEnv(exp.warehouse, exp.reward_params(),
                     ArrivalProcess(rate=args.rate, rng_seed=args.seed))
    result = train(env, train_cfg)
    args.out.mkdir(parents=True, exist_ok=True)
    ckpt = args.checkpoint or args.out / f"model_lambda{args.rate:g}_alpha{args.alpha:g}.ckpt"
    result.network.save(ckpt)
    curve = args.out / f"reward_curve_lambda{args.rate:g}_alpha{args.alpha:g}.csv"
    write_reward_curve_csv(curve, result.curve_rows())
    print(f"checkpoint written to {ckpt}")
    print(f"reward curve written to {curve}")
    return 0


def _cmd_eval(args) -> int:
    if args.checkpoint:
        policy = PolicyRef("checkpoint", path=str(args.checkpoint))
    elif getattr(args, "baseline", None):
        policy = PolicyRef("baseline", name=args.baseline)
    else:
        policy = PolicyRef(args.policy)
    if not getattr(args, "schedule", None) and args.rate is None and not args.config:
        print("error: provide --lambda or --schedule", file=sys.stderr)
        return 2
    config = _experiment(args, policy)
    result = evaluate(config)
    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = args.csv or args.out / f"metrics_{policy.label().replace('/', '_')}.csv"
    write_metrics_csv(csv_path, policy.label(), result)
    print(f"metrics written to {csv_path}")
    for name in ("atdo", "aoct", "puo"):
        value = result.mean(name)
        print(f"mean {name}: {'n/a' if value is None else f'{value:.3f}'}")
    return 0


def _cmd_baseline(args) -> int:
    args.baseline = args.name
    args.checkpoint = None
    args.policy = None
    args.schedule = None
    return _cmd_eval(args)


def _cmd_sweep(args) -> int:
    import configparser

    grid = configparser.ConfigParser()
    with open(args.grid) as fh:
        grid.read_file(fh)
    if not grid.has_section("sweep"):
        print("error: grid file needs a [sweep] section", file=sys.stderr)
        return 2
    policies = grid["sweep"]["policies"].split()
    rates = [float(x) for x in grid["sweep"]["lambdas"].split()]
    base = ExperimentConfig(master_seed=args.seed)
    if args.config:
        base = load_config(args.config, base)
    if grid.has_option("sweep", "runs"):
        base = replace(base, n_runs=grid["sweep"].getint("runs"))
    if grid.has_option("sweep", "shift_seconds"):
        base = replace(base, shift_seconds=grid["sweep"].getfloat("shift_seconds"))
    if grid.has_option("sweep", "workers"):
        base = replace(base, workers=grid["sweep"].getint("workers"))
    base = replace(base, master_seed=args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = args.csv or args.out / "sweep.csv"
    rows = sweep(policies, rates, base, csv_path)
    bad = [r for r in rows if r["error"]]
    print(f"{len(rows)} cells written to {csv_path}" +
          (f" ({len(bad)} failed)" if bad else ""))
    return 0


def _cmd_trace(args) -> int:
    if args.checkpoint:
        policy = PolicyRef("checkpoint", path=str(args.checkpoint))
    elif args.policy:
        policy = PolicyRef(args.policy)
    else:
        print("error: provide --checkpoint or --policy", file=sys.stderr)
        return 2
    args.runs = 1
    args.workers = 1
    args.schedule = None
    config = _experiment(args, policy)
    metrics = run_trace_shift(config, config.master_seed, args.csv)
    print(f"trace written to {args.csv}")
    print(f"completed {metrics.completed} of {metrics.arrived} orders")
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "eval": _cmd_eval,
    "baseline": _cmd_baseline,
    "sweep": _cmd_sweep,
    "trace": _cmd_trace,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
