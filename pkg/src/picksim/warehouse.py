"""Warehouse geometry: discrete positions, slots, and travel distances.

The warehouse is a single block of parallel pick aisles bounded by two
cross-aisles.  Vertical motion happens inside aisles one storage slot at a
time; aisle changes are only possible along the front (depth 0) or back
(depth L+1) cross-aisle.  Both rack sides of a slot collapse into a single
location because lateral in-aisle distance is negligible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

UNREACHABLE = math.inf


class Zone(Enum):
    FRONT_CROSS = "front_cross"
    BACK_CROSS = "back_cross"
    IN_AISLE = "in_aisle"


class Direction(Enum):
    """Vertical travel direction: UP moves toward the back cross-aisle."""

    UP = "upward"
    DOWN = "downward"


@dataclass(frozen=True)
class WarehouseConfig:
    n_aisles: int = 10
    slots_per_aisle: int = 15
    slot_pitch: float = 1.0
    inter_aisle_gap: float = 3.0
    depot_aisle: int = 6
    picker_speed: float = 1.0
    pick_time_per_item: float = 5.0
    dropoff_time_per_item: float = 1.0
    capacity: int = 20

    def __post_init__(self) -> None:
        if self.n_aisles < 1 or self.slots_per_aisle < 1 or self.capacity < 1:
            raise ValueError("counts must be >= 1")
        if not 1 <= self.depot_aisle <= self.n_aisles:
            raise ValueError("depot_aisle must lie in 1..n_aisles")
        for name in ("slot_pitch", "inter_aisle_gap", "picker_speed",
                     "pick_time_per_item", "dropoff_time_per_item"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")

    @property
    def tau(self) -> float:
        """Time to move one slot: the smallest movement quantum."""
        return self.slot_pitch / self.picker_speed

    @property
    def back_depth(self) -> int:
        """Depth index of the back cross-aisle row (L + 1)."""
        return self.slots_per_aisle + 1

    @property
    def gap_units(self) -> float:
        """One aisle change expressed in slot units."""
        return self.inter_aisle_gap / self.slot_pitch

    @property
    def depot(self) -> "Position":
        return Position(self.depot_aisle, 0)


@dataclass(frozen=True)
class SlotLocation:
    aisle: int
    depth: int

    def validate(self, cfg: WarehouseConfig) -> None:
        if not 1 <= self.aisle <= cfg.n_aisles:
            raise ValueError(f"aisle {self.aisle} outside 1..{cfg.n_aisles}")
        if not 1 <= self.depth <= cfg.slots_per_aisle:
            raise ValueError(f"depth {self.depth} outside 1..{cfg.slots_per_aisle}")


@dataclass(frozen=True)
class Position:
    """A cell of the movement grid: depth 0 = front row, L+1 = back row."""

    aisle: int
    depth: int

    def validate(self, cfg: WarehouseConfig) -> None:
        if not 1 <= self.aisle <= cfg.n_aisles:
            raise ValueError(f"aisle {self.aisle} outside 1..{cfg.n_aisles}")
        if not 0 <= self.depth <= cfg.back_depth:
            raise ValueError(f"depth {self.depth} outside 0..{cfg.back_depth}")

    def zone(self, cfg: WarehouseConfig) -> Zone:
        if self.depth == 0:
            return Zone.FRONT_CROSS
        if self.depth == cfg.back_depth:
            return Zone.BACK_CROSS
        return Zone.IN_AISLE

    @property
    def is_front(self) -> bool:
        return self.depth == 0

    def is_back(self, cfg: WarehouseConfig) -> bool:
        return self.depth == cfg.back_depth

    def in_aisle(self, cfg: WarehouseConfig) -> bool:
        return 0 < self.depth < cfg.back_depth

    @classmethod
    def of_slot(cls, slot: SlotLocation) -> "Position":
        return cls(slot.aisle, slot.depth)


def walk_distance(a: Position, b: Position, cfg: WarehouseConfig) -> float:
    """Shortest legal travel distance between two grid cells, in meters."""
    a.validate(cfg)
    b.validate(cfg)
    if a.aisle == b.aisle:
        return abs(a.depth - b.depth) * cfg.slot_pitch
    back = cfg.back_depth
    via_front = a.depth + b.depth
    via_back = (back - a.depth) + (back - b.depth)
    vertical = min(via_front, via_back) * cfg.slot_pitch
    return vertical + abs(a.aisle - b.aisle) * cfg.inter_aisle_gap


def directional_distance(p: Position, s: SlotLocation, direction: Direction,
                         cfg: WarehouseConfig) -> float:
    """Distance from picker to slot in slot units when departing in `direction`.

    The count mirrors how the picker actually reaches an order: it may not
    reverse inside its current aisle, and from a cross-aisle it enters the
    target aisle consistently with its feasible vertical motion.  One aisle
    change costs ``inter_aisle_gap / slot_pitch`` units.  Returns
    ``UNREACHABLE`` when no such path exists (e.g. moving upward from the
    back cross-aisle, or toward an order in the opposite direction within
    the picker's own aisle).
    """
    p.validate(cfg)
    s.validate(cfg)
    back = cfg.back_depth
    g = cfg.gap_units
    horiz = abs(p.aisle - s.aisle) * g
    if p.depth == 0:  # front cross-aisle: only upward entries are feasible
        if direction is Direction.DOWN:
            return UNREACHABLE
        return horiz + s.depth
    if p.depth == back:  # back cross-aisle: only downward entries
        if direction is Direction.UP:
            return UNREACHABLE
        return horiz + (back - s.depth)
    # picker inside an aisle
    if s.aisle == p.aisle:
        if direction is Direction.UP:
            return float(s.depth - p.depth) if s.depth > p.depth else UNREACHABLE
        return float(p.depth - s.depth) if s.depth < p.depth else UNREACHABLE
    if direction is Direction.UP:
        return (back - p.depth) + horiz + (back - s.depth)
    return p.depth + horiz + s.depth


def directional_distances(p: Position, aisles, depths, cfg: WarehouseConfig):
    """Vectorized ``directional_distance`` for both directions at once.

    ``aisles``/``depths`` are integer arrays of slot coordinates; returns
    ``(rho_up, rho_down)`` float arrays with ``UNREACHABLE`` sentinels.
    """
    import numpy as np

    aisles = np.asarray(aisles)
    depths = np.asarray(depths)
    back = cfg.back_depth
    g = cfg.gap_units
    horiz = np.abs(aisles - p.aisle) * g
    if p.depth == 0:
        up = horiz + depths
        down = np.full(len(depths), UNREACHABLE)
    elif p.depth == back:
        up = np.full(len(depths), UNREACHABLE)
        down = horiz + (back - depths)
    else:
        same = aisles == p.aisle
        up = np.where(
            same,
            np.where(depths > p.depth, depths - p.depth, UNREACHABLE),
            (back - p.depth) + horiz + (back - depths),
        )
        down = np.where(
            same,
            np.where(depths < p.depth, p.depth - depths, UNREACHABLE),
            p.depth + horiz + depths,
        )
    return up.astype(float), down.astype(float)
