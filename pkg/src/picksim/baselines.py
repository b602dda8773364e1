"""Benchmark picking policies: threshold batching plus static routing.

A baseline idles at the depot until enough orders are pending, admits
orders first-come-first-served up to the device capacity, routes over them,
and executes the route cell by cell.  Arrivals during a tour trigger a
re-plan from the current position when capacity allows, except that
re-planning inside a cross-aisle is deferred until the picker next enters a
pick aisle when cross-aisle re-routing is disabled.  Solver time costs zero
simulated seconds.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .orders import ArrivalProcess, ArrivalStream, Order, OrderLedger
from .routing import (PickList, Route, largest_gap_route, optimal_route,
                      route_remaining, s_shape_route)
from .warehouse import Position, WarehouseConfig

_ROUTERS = {
    "optimal": optimal_route,
    "s_shape": s_shape_route,
    "largest_gap": largest_gap_route,
}


@dataclass(frozen=True)
class BaselineSpec:
    name: str
    initial_pick_size: int
    reroute_cross_aisle: bool
    router: str = "optimal"

    def __post_init__(self) -> None:
        if self.router not in _ROUTERS:
            raise ValueError(f"unknown router {self.router!r}")
        if self.initial_pick_size < 1:
            raise ValueError("initial_pick_size must be >= 1")


TABLE3 = {
    "baseline1": BaselineSpec("baseline1", 20, False),
    "baseline2": BaselineSpec("baseline2", 5, False),
    "baseline3": BaselineSpec("baseline3", 5, True),
    "baseline4": BaselineSpec("baseline4", 1, False),
    "baseline5": BaselineSpec("baseline5", 1, True),
    "s_shape": BaselineSpec("s_shape", 1, True, router="s_shape"),
    "largest_gap": BaselineSpec("largest_gap", 1, True, router="largest_gap"),
}


def plan_route(router: str, origin: Position, order_ids, ledger: OrderLedger,
               cfg: WarehouseConfig) -> Route:
    picks = tuple(ledger.location_of(i) for i in order_ids)
    return _ROUTERS[router](PickList(origin, picks, tuple(order_ids)), cfg)


def mid_route_replan(current: Position, onboard_count: int, remaining_ids,
                     new_ids, spec: BaselineSpec, ledger: OrderLedger,
                     cfg: WarehouseConfig, current_route: Route) -> tuple[Route, list[int]]:
    """Re-plan from the current position, or keep the current suffix.

    Returns the route to follow and the ids newly admitted onto the tour.
    The suffix is returned unchanged when nothing is admissible or when the
    picker sits in a cross-aisle with cross-aisle re-routing disabled.
    """
    remaining_ids = list(remaining_ids)
    room = cfg.capacity - onboard_count - len(remaining_ids)
    admitted = list(new_ids)[:max(room, 0)]
    blocked = not (spec.reroute_cross_aisle or current.in_aisle(cfg))
    if not admitted or blocked:
        return route_remaining(current_route, current, cfg), []
    return plan_route(spec.router, current, remaining_ids + admitted, ledger, cfg), admitted


class _RouteCursor:
    """Steps one grid cell at a time along a route's waypoints."""

    def __init__(self, route: Route):
        self.waypoints = route.waypoints
        self.idx = 0
        self.pos = route.waypoints[0]

    @property
    def done(self) -> bool:
        return self.idx >= len(self.waypoints) - 1

    def step(self) -> tuple[Position, bool]:
        """Advance one cell; returns (new position, moved horizontally)."""
        while True:
            target = self.waypoints[self.idx + 1]
            if self.pos == target:
                self.idx += 1
                if self.done:
                    raise RuntimeError("stepping past route end")
                continue
            break
        if target.aisle != self.pos.aisle:
            delta = 1 if target.aisle > self.pos.aisle else -1
            self.pos = Position(self.pos.aisle + delta, self.pos.depth)
            horizontal = True
        else:
            delta = 1 if target.depth > self.pos.depth else -1
            self.pos = Position(self.pos.aisle, self.pos.depth + delta)
            horizontal = False
        if self.pos == target:
            self.idx += 1
        return self.pos, horizontal


@dataclass
class BaselineRun:
    ledger: OrderLedger
    total_distance: float
    n_tours: int = 0
    n_replans: int = 0
    max_onboard: int = 0
    events: list = field(default_factory=list)


def run_baseline(spec: BaselineSpec, cfg: WarehouseConfig, arrivals: ArrivalProcess,
                 shift_seconds: float, seed_orders: list[Order] | None = None,
                 collect_events: bool = False) -> BaselineRun:
    """Simulate one shift under a baseline policy.

    ``seed_orders`` are injected into the ledger at their stated arrival
    times before the stream starts; stream ids continue after them.
    """
    if spec.initial_pick_size > cfg.capacity:
        raise ValueError("initial pick size exceeds capacity")
    ledger = OrderLedger()
    id_start = 0
    if seed_orders:
        ledger.ingest(seed_orders)
        id_start = len(seed_orders)
    stream = ArrivalStream(arrivals, cfg, id_start=id_start)
    run = BaselineRun(ledger=ledger, total_distance=0.0)

    t = 0.0
    pos = cfg.depot
    onboard: list[int] = []
    assigned: list[int] = []
    assigned_set: set[int] = set()
    by_slot: dict[tuple[int, int], list[int]] = {}
    cursor: _RouteCursor | None = None

    def log(kind: str) -> None:
        if collect_events:
            run.events.append((t, kind, pos))

    def index_assigned() -> None:
        by_slot.clear()
        for oid in assigned:
            loc = ledger.location_of(oid)
            by_slot.setdefault((loc.aisle, loc.depth), []).append(oid)

    def pick_here() -> None:
        nonlocal t
        here = by_slot.get((pos.aisle, pos.depth))
        while here:
            oid = here.pop(0)
            t += cfg.pick_time_per_item
            ledger.ingest(stream.advance(t))
            ledger.mark_picked(oid, t)
            onboard.append(oid)
            assigned.remove(oid)
            assigned_set.discard(oid)
        by_slot.pop((pos.aisle, pos.depth), None)
        run.max_onboard = max(run.max_onboard, len(onboard))

    def admissible() -> list[int]:
        room = cfg.capacity - len(onboard) - len(assigned)
        if room <= 0:
            return []
        return [int(i) for i in ledger.pending_ids() if int(i) not in assigned_set][:room]

    def replan() -> None:
        nonlocal cursor, assigned, assigned_set
        new_ids = admissible()
        if not new_ids:
            return
        assigned = assigned + new_ids
        assigned_set = set(assigned)
        route = plan_route(spec.router, pos, assigned, ledger, cfg)
        cursor = _RouteCursor(route)
        index_assigned()
        run.n_replans += 1
        log("replan")
        pick_here()

    while t < shift_seconds:
        if cursor is None:
            if ledger.n_pending >= spec.initial_pick_size:
                assigned = [int(i) for i in ledger.pending_ids()[:cfg.capacity]]
                assigned_set = set(assigned)
                route = plan_route(spec.router, pos, assigned, ledger, cfg)
                cursor = _RouteCursor(route)
                index_assigned()
                run.n_tours += 1
                log("depart")
                pick_here()
                continue
            if stream.peek_time() >= shift_seconds:
                break
            order = stream.take_next()
            ledger.ingest([order])
            t = order.arrival_time
            continue

        if cursor.done:
            if onboard:
                t += len(onboard) * cfg.dropoff_time_per_item
                ledger.ingest(stream.advance(t))
                ledger.mark_delivered(onboard, t)
                onboard = []
                log("unload")
            assigned = []
            assigned_set = set()
            by_slot.clear()
            cursor = None
            continue

        new_pos, horizontal = cursor.step()
        t += (cfg.inter_aisle_gap if horizontal else cfg.slot_pitch) / cfg.picker_speed
        run.total_distance += cfg.inter_aisle_gap if horizontal else cfg.slot_pitch
        pos = new_pos
        ledger.ingest(stream.advance(t))
        pick_here()

        # unadmitted demand re-triggers planning whenever capacity allows;
        # with cross-aisle re-routing disabled it waits for the next in-aisle cell
        room = cfg.capacity - len(onboard) - len(assigned)
        if room > 0 and ledger.n_pending > len(assigned):
            if spec.reroute_cross_aisle or pos.in_aisle(cfg):
                replan()

    return run
