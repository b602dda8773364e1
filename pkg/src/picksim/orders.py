"""Order arrivals and lifecycle bookkeeping.

Arrivals follow a (possibly piecewise-constant) Poisson process with
locations uniform over the collapsed slot grid.  Generation is lazy and
cursor-based: the stream emits arrivals in time order one at a time, so the
realized process is identical no matter how the simulation chops the
timeline into queries.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .warehouse import SlotLocation, WarehouseConfig

PENDING = "pending"
ONBOARD = "onboard"
DELIVERED = "delivered"

_STATUS_CODE = {PENDING: 0, ONBOARD: 1, DELIVERED: 2}
_STATUS_NAME = {v: k for k, v in _STATUS_CODE.items()}


def derive_seed(master: int, index: int) -> int:
    """Mix a master seed with an index into an independent 64-bit seed.

    splitmix64 finalizer; stable across platforms and library versions.
    """
    z = (master * 0x9E3779B97F4A7C15 + index + 1) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


@dataclass
class Order:
    id: int
    location: SlotLocation
    arrival_time: float
    pickup_time: float | None = None
    delivery_time: float | None = None
    status: str = PENDING


@dataclass(frozen=True)
class ArrivalProcess:
    """Arrival configuration: constant rate or a schedule of (duration, rate)."""

    rate: float | None = None
    schedule: tuple[tuple[float, float], ...] | None = None
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if (self.rate is None) == (self.schedule is None):
            raise ValueError("specify exactly one of rate or schedule")
        if self.rate is not None and self.rate <= 0:
            raise ValueError("rate must be > 0")
        if self.schedule is not None:
            if not self.schedule:
                raise ValueError("schedule must be non-empty")
            for dur, lam in self.schedule:
                if dur <= 0 or lam <= 0:
                    raise ValueError("schedule durations and rates must be > 0")

    def blocks(self) -> list[tuple[float, float, float]]:
        """(start, end, rate) blocks; the last block extends indefinitely."""
        if self.rate is not None:
            return [(0.0, np.inf, self.rate)]
        out = []
        t = 0.0
        for dur, lam in self.schedule:
            out.append((t, t + dur, lam))
            t += dur
        start, _, lam = out[-1]
        out[-1] = (start, np.inf, lam)
        return out


class ArrivalStream:
    """Lazy, seeded realization of an ArrivalProcess over one simulation run.

    A unit-rate Poisson stream is warped through the cumulative intensity,
    so the arrival sequence does not depend on query boundaries.
    """

    def __init__(self, proc: ArrivalProcess, cfg: WarehouseConfig, id_start: int = 0):
        self.proc = proc
        self.cfg = cfg
        self._rng = np.random.default_rng(proc.rng_seed)
        self._blocks = proc.blocks()
        self._unit_total = 0.0
        self._cursor = 0.0
        self._next_id = id_start
        self._next: Order | None = None

    def _invert(self, s: float) -> float:
        acc = 0.0
        for start, end, lam in self._blocks:
            width = (end - start) * lam
            if s <= acc + width or end == np.inf:
                return start + (s - acc) / lam
            acc += width
        raise AssertionError("unreachable: last block is unbounded")

    def _draw(self) -> Order:
        self._unit_total += self._rng.exponential(1.0)
        t = self._invert(self._unit_total)
        aisle = int(self._rng.integers(1, self.cfg.n_aisles + 1))
        depth = int(self._rng.integers(1, self.cfg.slots_per_aisle + 1))
        order = Order(self._next_id, SlotLocation(aisle, depth), t)
        self._next_id += 1
        return order

    def peek_time(self) -> float:
        if self._next is None:
            self._next = self._draw()
        return self._next.arrival_time

    def take_next(self) -> Order:
        """Consume the next arrival, advancing the cursor to its time."""
        self.peek_time()
        order, self._next = self._next, None
        self._cursor = max(self._cursor, order.arrival_time)
        return order

    def advance(self, to_t: float) -> list[Order]:
        """Emit all arrivals with time < ``to_t``; cursor moves to ``to_t``."""
        if to_t < self._cursor:
            raise ValueError("stream cannot rewind")
        out: list[Order] = []
        while self.peek_time() < to_t:
            out.append(self.take_next())
        self._cursor = to_t
        return out


def sample_arrivals(stream: ArrivalStream, from_t: float, to_t: float) -> list[Order]:
    """Arrivals in [from_t, to_t); queries must be contiguous and forward."""
    if from_t > to_t:
        raise ValueError("from_t must be <= to_t")
    if abs(from_t - stream._cursor) > 1e-9:
        raise ValueError(
            f"non-contiguous query: stream cursor at {stream._cursor}, got {from_t}"
        )
    return stream.advance(to_t)


class OrderLedger:
    """Column store of every order seen in a run, with lifecycle stamps."""

    def __init__(self) -> None:
        self._cap = 256
        self._n = 0
        self._aisle = np.empty(self._cap, dtype=np.int32)
        self._depth = np.empty(self._cap, dtype=np.int32)
        self._arrival = np.empty(self._cap, dtype=np.float64)
        self._pickup = np.empty(self._cap, dtype=np.float64)
        self._delivery = np.empty(self._cap, dtype=np.float64)
        self._status = np.empty(self._cap, dtype=np.int8)
        self._by_slot: dict[tuple[int, int], list[int]] = {}
        self.n_pending = 0
        self.n_onboard = 0
        self.n_delivered = 0

    def __len__(self) -> int:
        return self._n

    @property
    def n_arrived(self) -> int:
        return self._n

    def _grow(self) -> None:
        self._cap *= 2
        for name in ("_aisle", "_depth", "_arrival", "_pickup", "_delivery", "_status"):
            old = getattr(self, name)
            new = np.empty(self._cap, dtype=old.dtype)
            new[: self._n] = old[: self._n]
            setattr(self, name, new)

    def ingest(self, orders: list[Order]) -> None:
        for o in orders:
            if o.id != self._n:
                raise ValueError(f"order ids must be sequential, got {o.id} at {self._n}")
            if self._n == self._cap:
                self._grow()
            i = self._n
            self._aisle[i] = o.location.aisle
            self._depth[i] = o.location.depth
            self._arrival[i] = o.arrival_time
            self._pickup[i] = np.nan
            self._delivery[i] = np.nan
            self._status[i] = 0
            self._by_slot.setdefault((o.location.aisle, o.location.depth), []).append(i)
            self._n += 1
            self.n_pending += 1

    def order(self, order_id: int) -> Order:
        self._check_id(order_id)
        i = order_id
        pickup = self._pickup[i]
        delivery = self._delivery[i]
        return Order(
            id=i,
            location=SlotLocation(int(self._aisle[i]), int(self._depth[i])),
            arrival_time=float(self._arrival[i]),
            pickup_time=None if np.isnan(pickup) else float(pickup),
            delivery_time=None if np.isnan(delivery) else float(delivery),
            status=_STATUS_NAME[int(self._status[i])],
        )

    def _check_id(self, order_id: int) -> None:
        if not 0 <= order_id < self._n:
            raise ValueError(f"unknown order id {order_id}")

    def pending_ids(self) -> np.ndarray:
        """Ids of pending orders in arrival (FCFS) order."""
        return np.flatnonzero(self._status[: self._n] == 0)

    def pending_orders(self) -> list[Order]:
        return [self.order(int(i)) for i in self.pending_ids()]

    def pending_coords(self) -> tuple[np.ndarray, np.ndarray]:
        idx = self.pending_ids()
        return self._aisle[idx], self._depth[idx]

    def pending_at(self, aisle: int, depth: int) -> list[int]:
        return self._by_slot.get((aisle, depth), [])

    def location_of(self, order_id: int) -> SlotLocation:
        self._check_id(order_id)
        return SlotLocation(int(self._aisle[order_id]), int(self._depth[order_id]))

    def arrival_of(self, order_id: int) -> float:
        self._check_id(order_id)
        return float(self._arrival[order_id])

    def mark_picked(self, order_id: int, t: float) -> None:
        self._check_id(order_id)
        if self._status[order_id] != 0:
            raise ValueError(
                f"order {order_id} is {_STATUS_NAME[int(self._status[order_id])]}, cannot pick"
            )
        if t < self._arrival[order_id]:
            raise ValueError("pickup before arrival")
        self._status[order_id] = 1
        self._pickup[order_id] = t
        slot = (int(self._aisle[order_id]), int(self._depth[order_id]))
        self._by_slot[slot].remove(order_id)
        if not self._by_slot[slot]:
            del self._by_slot[slot]
        self.n_pending -= 1
        self.n_onboard += 1

    def mark_delivered(self, order_ids, t: float) -> None:
        for oid in order_ids:
            self._check_id(oid)
            if self._status[oid] != 1:
                raise ValueError(
                    f"order {oid} is {_STATUS_NAME[int(self._status[oid])]}, cannot deliver"
                )
            if t < self._pickup[oid]:
                raise ValueError("delivery before pickup")
        for oid in order_ids:
            self._status[oid] = 2
            self._delivery[oid] = t
            self.n_onboard -= 1
            self.n_delivered += 1

    def completion_time(self, order_id: int) -> float:
        """Arrival-to-deposit time of a delivered order."""
        self._check_id(order_id)
        if self._status[order_id] != 2:
            raise ValueError(f"order {order_id} not delivered")
        return float(self._delivery[order_id] - self._arrival[order_id])

    def delivered_mask(self) -> np.ndarray:
        return self._status[: self._n] == 2

    def arrivals(self) -> np.ndarray:
        return self._arrival[: self._n]

    def deliveries(self) -> np.ndarray:
        return self._delivery[: self._n]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["id", "aisle", "depth", "arrival", "pickup", "delivery"])
            for i in range(self._n):
                pickup = "" if np.isnan(self._pickup[i]) else f"{self._pickup[i]:.6f}"
                delivery = "" if np.isnan(self._delivery[i]) else f"{self._delivery[i]:.6f}"
                writer.writerow([
                    i,
                    int(self._aisle[i]),
                    int(self._depth[i]),
                    f"{self._arrival[i]:.6f}",
                    pickup,
                    delivery,
                ])
