"""The order-picking MDP: featurization, action masking, transitions, reward.

Actions: 0 = wait / unload at depot, 1 = one aisle right, 2 = one aisle
left, 3 = move upward (toward back cross-aisle), 4 = move downward.
Vertical moves advance slot by slot, collect everything at each reached
slot while capacity allows, and terminate at the first of: cross-aisle
boundary, any new arrival, or at least one item collected.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .orders import ArrivalProcess, ArrivalStream, OrderLedger
from .warehouse import Position, WarehouseConfig, directional_distances

N_ACTIONS = 5
WAIT_OR_UNLOAD, RIGHT, LEFT, UP, DOWN = range(N_ACTIONS)


class InfeasibleActionError(ValueError):
    pass


@dataclass(frozen=True)
class RewardParams:
    pickup_reward: float  # R: reward per item picked
    alpha: float  # weight of unloading relative to picking

    def __post_init__(self) -> None:
        if self.pickup_reward <= 0:
            raise ValueError("pickup_reward must be > 0")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")

    @classmethod
    def for_warehouse(cls, cfg: WarehouseConfig, alpha: float = 1.0) -> "RewardParams":
        # slots per aisle plus number of aisles: a pickup anywhere nets a
        # positive total reward from any starting position
        return cls(pickup_reward=float(cfg.slots_per_aisle + cfg.n_aisles), alpha=alpha)


def idle_reward() -> float:
    return -1.0


def unload_reward(params: RewardParams, items: int) -> float:
    return params.pickup_reward * items * params.alpha


def movement_reward(params: RewardParams, moved_units: float, picked: int) -> float:
    return -moved_units + params.pickup_reward * picked


@dataclass(frozen=True)
class PickerState:
    s_h: int  # -1 back cross-aisle, 0 in-aisle, 1 front cross-aisle
    s_v1: int  # 2n - 1 for aisle n
    s_v2: int  # 2n
    s_c: int  # remaining capacity


@dataclass(frozen=True)
class EnvRules:
    """Behavioral switches for the agent variants.

    ``departure_threshold``: pending orders required before an empty picker
    may leave the depot.  ``forbid_cross_reversal``: while in a cross-aisle
    the picker may not reverse its horizontal direction without first
    entering an aisle.
    """

    departure_threshold: int = 1
    forbid_cross_reversal: bool = False


@dataclass
class MdpState:
    picker: PickerState
    orders: np.ndarray  # 2N reward potentials, aisle-major (up, down) pairs
    # simulator ground truth, hidden from the agent
    position: Position
    time: float
    pending_count: int
    cross_dir: int  # -1 / +1 horizontal direction held in a cross-aisle, else 0

    @property
    def features(self) -> np.ndarray:
        p = self.picker
        return np.concatenate(
            ([float(p.s_h), float(p.s_v1), float(p.s_v2), float(p.s_c)], self.orders)
        )


@dataclass
class StepOutcome:
    next_state: MdpState
    reward: float
    elapsed: float
    picked: int
    moved: float  # slot units
    delivered_ids: list[int]


def picker_state(position: Position, remaining_capacity: int, cfg: WarehouseConfig) -> PickerState:
    if position.is_front:
        s_h = 1
    elif position.is_back(cfg):
        s_h = -1
    else:
        s_h = 0
    return PickerState(s_h, 2 * position.aisle - 1, 2 * position.aisle, remaining_capacity)


def featurize_orders(position: Position, ledger: OrderLedger, cfg: WarehouseConfig) -> np.ndarray:
    """Per-aisle reward potentials: component 2n-1 sums 1/rho over pending
    orders of aisle n at their upward distances, component 2n likewise
    downward.  Unreachable directions contribute zero."""
    features = np.zeros(2 * cfg.n_aisles)
    aisles, depths = ledger.pending_coords()
    if len(aisles) == 0:
        return features
    rho_up, rho_down = directional_distances(position, aisles, depths, cfg)
    up_idx = 2 * (aisles - 1)
    finite = np.isfinite(rho_up)
    np.add.at(features, up_idx[finite], 1.0 / rho_up[finite])
    finite = np.isfinite(rho_down)
    np.add.at(features, up_idx[finite] + 1, 1.0 / rho_down[finite])
    return features


def feasible_actions(state: MdpState, cfg: WarehouseConfig,
                     rules: EnvRules = EnvRules()) -> list[int]:
    return [a for a in range(N_ACTIONS) if feasible_mask(state, cfg, rules)[a]]


def feasible_mask(state: MdpState, cfg: WarehouseConfig,
                  rules: EnvRules = EnvRules()) -> np.ndarray:
    mask = np.zeros(N_ACTIONS, dtype=bool)
    mask[WAIT_OR_UNLOAD] = True
    pos = state.position
    at_depot = pos == cfg.depot
    if (at_depot and state.picker.s_c == cfg.capacity
            and state.pending_count < rules.departure_threshold):
        return mask  # empty picker holds at the depot until enough demand
    in_cross = not pos.in_aisle(cfg)
    if in_cross:
        mask[RIGHT] = pos.aisle < cfg.n_aisles
        mask[LEFT] = pos.aisle > 1
        if rules.forbid_cross_reversal and state.cross_dir != 0:
            if state.cross_dir > 0:
                mask[LEFT] = False
            else:
                mask[RIGHT] = False
    mask[UP] = not pos.is_back(cfg)
    mask[DOWN] = not pos.is_front
    return mask


class PickingEnv:
    """One picker, one shift; deterministic given the arrival seed."""

    def __init__(self, cfg: WarehouseConfig, reward: RewardParams,
                 arrivals: ArrivalProcess, rules: EnvRules = EnvRules()):
        self.cfg = cfg
        self.reward_params = reward
        self.arrivals = arrivals
        self.rules = rules
        self.trace_hook = None  # optional callable(dict) per step
        self.reset()

    def reset(self, seed: int | None = None) -> MdpState:
        if seed is not None:
            self.arrivals = replace(self.arrivals, rng_seed=seed)
        self._stream = ArrivalStream(self.arrivals, self.cfg)
        self.ledger = OrderLedger()
        self._pos = self.cfg.depot
        self._capacity_left = self.cfg.capacity
        self._t = 0.0
        self._cross_dir = 0
        self.onboard: list[int] = []
        self.total_move_units = 0.0
        return self.state()

    @property
    def time(self) -> float:
        return self._t

    @property
    def position(self) -> Position:
        return self._pos

    @property
    def total_distance(self) -> float:
        return self.total_move_units * self.cfg.slot_pitch

    def state(self) -> MdpState:
        return MdpState(
            picker=picker_state(self._pos, self._capacity_left, self.cfg),
            orders=featurize_orders(self._pos, self.ledger, self.cfg),
            position=self._pos,
            time=self._t,
            pending_count=self.ledger.n_pending,
            cross_dir=self._cross_dir,
        )

    def feasible_mask(self, state: MdpState | None = None) -> np.ndarray:
        return feasible_mask(state or self.state(), self.cfg, self.rules)

    def feasible_actions(self, state: MdpState | None = None) -> list[int]:
        return [int(a) for a in np.flatnonzero(self.feasible_mask(state))]

    def _advance_time(self, dt: float) -> bool:
        """Move the clock forward, folding arrivals into the ledger."""
        self._t += dt
        new = self._stream.advance(self._t)
        if new:
            self.ledger.ingest(new)
        return bool(new)

    def step(self, action: int) -> StepOutcome:
        state = self.state()
        if not self.feasible_mask(state)[action]:
            raise InfeasibleActionError(
                f"action {action} infeasible at aisle {self._pos.aisle} depth {self._pos.depth}"
            )
        t_start = self._t
        cfg = self.cfg
        picked = 0
        moved = 0.0
        delivered: list[int] = []

        if action == WAIT_OR_UNLOAD:
            if self._pos == cfg.depot and self._capacity_left < cfg.capacity:
                items = cfg.capacity - self._capacity_left
                self._advance_time(items * cfg.dropoff_time_per_item)
                self.ledger.mark_delivered(self.onboard, self._t)
                delivered = self.onboard
                self.onboard = []
                self._capacity_left = cfg.capacity
                reward = unload_reward(self.reward_params, items)
            elif self._pos == cfg.depot:
                self._advance_time(cfg.tau)
                reward = unload_reward(self.reward_params, 0)
            else:
                self._advance_time(cfg.tau)
                reward = idle_reward()
        elif action in (RIGHT, LEFT):
            step = 1 if action == RIGHT else -1
            self._pos = Position(self._pos.aisle + step, self._pos.depth)
            self._advance_time(cfg.inter_aisle_gap / cfg.picker_speed)
            moved = cfg.gap_units
            self._cross_dir = step
            reward = movement_reward(self.reward_params, moved, 0)
        else:
            delta = 1 if action == UP else -1
            arrived = False
            while True:
                self._pos = Position(self._pos.aisle, self._pos.depth + delta)
                moved += 1.0
                arrived |= self._advance_time(cfg.tau)
                if self._pos.depth in (0, cfg.back_depth):
                    break
                while self._capacity_left > 0:
                    pending_here = self.ledger.pending_at(self._pos.aisle, self._pos.depth)
                    if not pending_here:
                        break
                    oid = pending_here[0]
                    arrived |= self._advance_time(cfg.pick_time_per_item)
                    self.ledger.mark_picked(oid, self._t)
                    self.onboard.append(oid)
                    self._capacity_left -= 1
                    picked += 1
                if picked or arrived:
                    break
            self._cross_dir = 0
            reward = movement_reward(self.reward_params, moved, picked)

        self.total_move_units += moved
        next_state = self.state()
        elapsed = self._t - t_start
        if self.trace_hook is not None:
            self.trace_hook({
                "time": self._t,
                "aisle": self._pos.aisle,
                "depth": self._pos.depth,
                "action": action,
                "reward": reward,
                "picked": picked,
                "delivered": len(delivered),
            })
        return StepOutcome(next_state, reward, elapsed, picked, moved, delivered)
