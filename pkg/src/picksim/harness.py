"""Experiment orchestration: seeded runs, metrics, sweeps, and CSV output.

A policy is either a named baseline, a trained checkpoint, or one of the
built-in reference policies (``random``, ``idle``).  Every run derives its
own seed from the master seed and run index, so results are reproducible
and independent of worker scheduling.
"""
from __future__ import annotations

import configparser
import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .agent import greedy_policy
from .baselines import TABLE3, BaselineSpec, run_baseline
from .env import EnvRules, PickingEnv, RewardParams
from .nn import QNetwork
from .orders import ArrivalProcess, OrderLedger, derive_seed
from .warehouse import WarehouseConfig

DEFAULT_SHIFT_SECONDS = 28_800.0


@dataclass(frozen=True)
class ShiftMetrics:
    atdo: float | None  # meters per completed order
    aoct: float | None  # seconds, completed orders only
    puo: float  # percent of arrived orders left unfulfilled
    total_distance: float
    completed: int
    arrived: int
    run_seed: int


def compute_metrics(ledger: OrderLedger, total_distance: float,
                    shift_seconds: float, run_seed: int) -> ShiftMetrics:
    arrivals = ledger.arrivals()
    arrived = int(np.sum(arrivals < shift_seconds))
    deliveries = ledger.deliveries()
    done = ~np.isnan(deliveries) & (deliveries <= shift_seconds)
    completed = int(np.sum(done))
    if completed:
        aoct = float(np.mean(deliveries[done] - arrivals[done]))
        atdo = total_distance / completed
    else:
        aoct = None
        atdo = None
    puo = 100.0 * (arrived - completed) / arrived if arrived else 0.0
    return ShiftMetrics(atdo, aoct, puo, total_distance, completed, arrived, run_seed)


@dataclass(frozen=True)
class PolicyRef:
    kind: str  # "baseline" | "checkpoint" | "random" | "idle"
    name: str = ""
    path: str = ""

    @classmethod
    def parse(cls, text: str) -> "PolicyRef":
        if text in TABLE3:
            return cls("baseline", name=text)
        if text in ("random", "idle"):
            return cls(text)
        return cls("checkpoint", path=text)

    def label(self) -> str:
        return self.name or self.path or self.kind


@dataclass(frozen=True)
class ExperimentConfig:
    warehouse: WarehouseConfig = field(default_factory=WarehouseConfig)
    alpha: float = 1.0
    policy: PolicyRef = PolicyRef("baseline", name="baseline1")
    rate: float | None = 0.05
    schedule: tuple[tuple[float, float], ...] | None = None
    shift_seconds: float = DEFAULT_SHIFT_SECONDS
    n_runs: int = 10
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        if (self.rate is None) == (self.schedule is None):
            raise ValueError("specify exactly one of rate or schedule")

    def reward_params(self) -> RewardParams:
        return RewardParams.for_warehouse(self.warehouse, alpha=self.alpha)

    def arrival_process(self, run_seed: int) -> ArrivalProcess:
        return ArrivalProcess(rate=self.rate, schedule=self.schedule, rng_seed=run_seed)


def run_policy_shift(config: ExperimentConfig, run_seed: int) -> ShiftMetrics:
    """One seeded shift under the configured policy."""
    cfg = config.warehouse
    arrivals = config.arrival_process(run_seed)
    policy = config.policy
    if policy.kind == "baseline":
        result = run_baseline(TABLE3[policy.name], cfg, arrivals, config.shift_seconds)
        return compute_metrics(result.ledger, result.total_distance,
                               config.shift_seconds, run_seed)

    env = PickingEnv(cfg, config.reward_params(), arrivals)
    if policy.kind == "checkpoint":
        net = QNetwork.load(policy.path)
        act = greedy_policy(net)

        def choose(state, mask, rng):
            return act(state, mask)
    elif policy.kind == "random":
        def choose(state, mask, rng):
            feasible = np.flatnonzero(mask)
            return int(feasible[rng.integers(len(feasible))])
    elif policy.kind == "idle":
        def choose(state, mask, rng):
            return 0
    else:
        raise ValueError(f"unknown policy kind {policy.kind!r}")

    rng = np.random.default_rng(derive_seed(run_seed, 0xA5))
    state = env.state()
    while env.time < config.shift_seconds:
        action = choose(state, env.feasible_mask(state), rng)
        state = env.step(action).next_state
    return compute_metrics(env.ledger, env.total_distance,
                           config.shift_seconds, run_seed)


def _worker(args) -> ShiftMetrics:
    config, run_seed = args
    return run_policy_shift(config, run_seed)


@dataclass
class EvalResult:
    runs: list[ShiftMetrics]

    def mean(self, attr: str) -> float | None:
        values = [getattr(r, attr) for r in self.runs]
        values = [v for v in values if v is not None]
        return float(np.mean(values)) if values else None


def evaluate(config: ExperimentConfig) -> EvalResult:
    seeds = [derive_seed(config.master_seed, i) for i in range(config.n_runs)]
    if config.workers > 1:
        # pool.map preserves submission order, so aggregation is stable
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            runs = list(pool.map(_worker, [(config, s) for s in seeds]))
    else:
        runs = [run_policy_shift(config, s) for s in seeds]
    return EvalResult(runs=runs)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


METRIC_FIELDS = ["atdo", "aoct", "puo", "total_distance", "completed", "arrived", "run_seed"]


def write_metrics_csv(path, label: str, result: EvalResult) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["policy", "run"] + METRIC_FIELDS)
        for i, run in enumerate(result.runs):
            writer.writerow([label, i] + [_fmt(getattr(run, f)) for f in METRIC_FIELDS])
        writer.writerow([label, "mean"]
                        + [_fmt(result.mean(f)) for f in METRIC_FIELDS[:4]]
                        + [_fmt(result.mean("completed")), _fmt(result.mean("arrived")), ""])


def sweep(policies: list[str], rates: list[float], base: ExperimentConfig,
          out_path=None) -> list[dict]:
    """Cartesian policy x rate evaluation; one aggregated row per cell."""
    rows = []
    for name in policies:
        for rate in rates:
            config = replace(base, policy=PolicyRef.parse(name), rate=rate, schedule=None)
            try:
                result = evaluate(config)
                row = {
                    "policy": name,
                    "lambda": rate,
                    "atdo": result.mean("atdo"),
                    "aoct": result.mean("aoct"),
                    "puo": result.mean("puo"),
                    "error": "",
                }
            except Exception as exc:  # keep sweeping, flag the cell
                row = {"policy": name, "lambda": rate, "atdo": None,
                       "aoct": None, "puo": None, "error": str(exc)}
            rows.append(row)
    if out_path is not None:
        write_sweep_csv(out_path, rows)
    return rows


def write_sweep_csv(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["policy", "lambda", "atdo", "aoct", "puo", "error"])
        for row in rows:
            writer.writerow([
                row["policy"], _fmt(float(row["lambda"])), _fmt(row["atdo"]),
                _fmt(row["aoct"]), _fmt(row["puo"]), row["error"],
            ])


def write_reward_curve_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["episode", "mean_reward", "moving_average"])
        for episode, mean_reward, moving in rows:
            writer.writerow([episode, _fmt(mean_reward), _fmt(moving)])


def run_trace_shift(config: ExperimentConfig, run_seed: int, trace_path) -> ShiftMetrics:
    """Single shift with a per-step CSV trace (DRL-style policies only)."""
    cfg = config.warehouse
    env = PickingEnv(cfg, config.reward_params(), config.arrival_process(run_seed))
    rows = []
    env.trace_hook = rows.append
    policy = config.policy
    if policy.kind == "checkpoint":
        act = greedy_policy(QNetwork.load(policy.path))
    elif policy.kind == "idle":
        act = lambda state, mask: 0
    elif policy.kind == "random":
        rng = np.random.default_rng(derive_seed(run_seed, 0xA5))
        act = lambda state, mask: int(np.flatnonzero(mask)[rng.integers(mask.sum())])
    else:
        raise ValueError("trace supports checkpoint, random, or idle policies")
    state = env.state()
    while env.time < config.shift_seconds:
        state = env.step(act(state, env.feasible_mask(state))).next_state
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["time", "aisle", "depth", "action", "reward", "picked", "delivered"])
        for row in rows:
            writer.writerow([_fmt(row["time"]), row["aisle"], row["depth"],
                             row["action"], _fmt(row["reward"]), row["picked"],
                             row["delivered"]])
    return compute_metrics(env.ledger, env.total_distance, config.shift_seconds, run_seed)


# ------------------------------------------------------------- config file

def parse_schedule(text: str) -> tuple[tuple[float, float], ...]:
    """Parse ``rate:duration[,rate:duration...]`` into schedule blocks."""
    blocks = []
    for part in text.split(","):
        rate_s, _, dur_s = part.strip().partition(":")
        if not dur_s:
            raise ValueError(f"bad schedule block {part!r}, want rate:duration")
        blocks.append((float(dur_s), float(rate_s)))
    return tuple(blocks)


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Read an INI-style experiment config; see README for the grammar."""
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    base = base or ExperimentConfig()
    wh_kwargs = {}
    if parser.has_section("warehouse"):
        section = parser["warehouse"]
        for key in ("n_aisles", "slots_per_aisle", "depot_aisle", "capacity"):
            if key in section:
                wh_kwargs[key] = section.getint(key)
        for key in ("slot_pitch", "inter_aisle_gap", "picker_speed",
                    "pick_time_per_item", "dropoff_time_per_item"):
            if key in section:
                wh_kwargs[key] = section.getfloat(key)
    warehouse = replace(base.warehouse, **wh_kwargs) if wh_kwargs else base.warehouse
    kwargs = {"warehouse": warehouse}
    if parser.has_section("reward") and "alpha" in parser["reward"]:
        kwargs["alpha"] = parser["reward"].getfloat("alpha")
    if parser.has_section("experiment"):
        section = parser["experiment"]
        if "lambda" in section:
            kwargs["rate"] = section.getfloat("lambda")
            kwargs["schedule"] = None
        if "schedule" in section:
            kwargs["schedule"] = parse_schedule(section["schedule"])
            kwargs["rate"] = None
        if "shift_seconds" in section:
            kwargs["shift_seconds"] = section.getfloat("shift_seconds")
        if "runs" in section:
            kwargs["n_runs"] = section.getint("runs")
        if "seed" in section:
            kwargs["master_seed"] = section.getint("seed")
        if "workers" in section:
            kwargs["workers"] = section.getint("workers")
        if "policy" in section:
            kwargs["policy"] = PolicyRef.parse(section["policy"])
    return replace(base, **kwargs)
