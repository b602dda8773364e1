"""Dynamic order picking in a single-block warehouse: simulator, DQN agent,
exact and heuristic routing baselines, and a benchmark harness."""

from .warehouse import (Direction, Position, SlotLocation, WarehouseConfig,
                        directional_distance, walk_distance)
from .orders import ArrivalProcess, ArrivalStream, Order, OrderLedger
from .env import (EnvRules, MdpState, PickingEnv, PickerState, RewardParams,
                  StepOutcome)
from .routing import (PickList, Route, largest_gap_route, optimal_route,
                      route_remaining, s_shape_route, validate_route)
from .baselines import TABLE3, BaselineSpec, run_baseline
from .nn import QNetwork, QNetworkSpec, huber_loss
from .agent import ReplayMemory, TrainConfig, greedy_policy, select_action, select_model, train
from .harness import ExperimentConfig, PolicyRef, ShiftMetrics, evaluate, sweep

__all__ = [
    "ArrivalProcess", "ArrivalStream", "BaselineSpec", "Direction", "EnvRules",
    "ExperimentConfig", "MdpState", "Order", "OrderLedger", "PickList",
    "PickerState", "PickingEnv", "PolicyRef", "Position", "QNetwork",
    "QNetworkSpec", "ReplayMemory", "RewardParams", "Route", "ShiftMetrics",
    "SlotLocation", "StepOutcome", "TABLE3", "TrainConfig", "WarehouseConfig",
    "directional_distance", "evaluate", "greedy_policy", "huber_loss",
    "largest_gap_route", "optimal_route", "route_remaining", "run_baseline",
    "s_shape_route", "select_action", "select_model", "sweep", "train",
    "validate_route", "walk_distance",
]
