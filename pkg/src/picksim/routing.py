"""Static route construction over a pick list.

``optimal_route`` is exact: a left-to-right dynamic program over aisle
columns whose state is the multiset of partial-route edges crossing the
current column boundary along the two cross-aisles (at most two per
corridor, with their connectivity).  Each column chooses a vertical
service pattern (full traversals, in-out stubs, a largest-gap split, and
the origin's exit segment) subject to pick coverage, degree parity, and
connectivity; the cheapest feasible closed structure is then unrolled into
an actual walk via an Eulerian path.  ``s_shape_route`` and
``largest_gap_route`` are the classic routing heuristics.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .warehouse import Position, SlotLocation, WarehouseConfig


@dataclass(frozen=True)
class PickList:
    origin: Position
    picks: tuple[SlotLocation, ...]
    order_ids: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.order_ids and len(self.order_ids) != len(self.picks):
            raise ValueError("order_ids must parallel picks")


@dataclass
class Route:
    waypoints: list[Position]
    total_length: float

    @property
    def end(self) -> Position:
        return self.waypoints[-1]


def route_length(waypoints: list[Position], cfg: WarehouseConfig) -> float:
    total = 0.0
    for u, v in zip(waypoints, waypoints[1:]):
        if u.aisle == v.aisle:
            total += abs(u.depth - v.depth) * cfg.slot_pitch
        else:
            if u.depth != v.depth or u.depth not in (0, cfg.back_depth):
                raise ValueError(f"illegal segment {u} -> {v}")
            total += abs(u.aisle - v.aisle) * cfg.inter_aisle_gap
    return total


def validate_route(route: Route, pick_list: PickList, cfg: WarehouseConfig) -> None:
    """Independent validity check: legal motion, coverage, end at depot,
    and a consistent total length.  Raises ValueError on any violation."""
    wps = route.waypoints
    if not wps:
        raise ValueError("empty route")
    if wps[0] != pick_list.origin:
        raise ValueError("route does not start at the origin")
    if wps[-1] != cfg.depot:
        raise ValueError("route does not end at the depot")
    for w in wps:
        w.validate(cfg)
    length = route_length(wps, cfg)  # raises on illegal segments
    if abs(length - route.total_length) > 1e-9:
        raise ValueError(f"stated length {route.total_length} != {length}")
    for slot in pick_list.picks:
        if not _covered(slot, wps):
            raise ValueError(f"pick {slot} not covered by route")


def _covered(slot: SlotLocation, wps: list[Position]) -> bool:
    for u, v in zip(wps, wps[1:]):
        if u.aisle == v.aisle == slot.aisle:
            lo, hi = min(u.depth, v.depth), max(u.depth, v.depth)
            if lo <= slot.depth <= hi:
                return True
    return wps[0].aisle == slot.aisle and wps[0].depth == slot.depth


def _dedupe(wps: list[Position]) -> list[Position]:
    out = [wps[0]]
    for w in wps[1:]:
        if w != out[-1]:
            out.append(w)
    return out


def _walk_waypoints(a: Position, b: Position, cfg: WarehouseConfig) -> list[Position]:
    """Turning points (excluding ``a``) of a shortest legal walk a -> b.

    Ties between the two cross-aisles resolve toward the front.
    """
    if a == b:
        return []
    if a.aisle == b.aisle:
        return [b]
    back = cfg.back_depth
    row = 0 if a.depth + b.depth <= (back - a.depth) + (back - b.depth) else back
    wp = []
    if a.depth != row:
        wp.append(Position(a.aisle, row))
    wp.append(Position(b.aisle, row))
    if b.depth != row:
        wp.append(b)
    return wp


# --------------------------------------------------------------------------
# exact routing
# --------------------------------------------------------------------------

class _Config(NamedTuple):
    cost: float
    vdeg_f: int
    vdeg_b: int
    connects: bool
    pieces: tuple


def _column_configs(depths: list[int], o_depth: int | None,
                    cfg: WarehouseConfig) -> list[_Config]:
    """Candidate vertical service patterns for one aisle column.

    ``depths`` are the sorted unique pick depths; ``o_depth`` is set when the
    route origin sits inside this aisle, in which case every pattern includes
    exactly one exit segment from the origin to one cross-aisle.
    """
    back = cfg.back_depth
    pitch = cfg.slot_pitch
    configs: list[_Config] = []
    if o_depth is None:
        o_options: list[tuple] = [(0.0, 0, 0, (), depths)]
    else:
        # the origin's exit walk may first dip past picks on the far side
        # before doubling back through the origin to a cross-aisle
        o_options = [
            (o_depth * pitch, 1, 0, (("oseg", "F"),),
             [d for d in depths if d > o_depth]),
            ((back - o_depth) * pitch, 0, 1, (("oseg", "B"),),
             [d for d in depths if d < o_depth]),
        ]
        for d in depths:
            if d > o_depth:
                o_options.append((
                    (o_depth + 2 * (d - o_depth)) * pitch, 1, 0,
                    (("oseg_dip", "F", d),), [x for x in depths if x > d]))
            elif d < o_depth:
                o_options.append((
                    ((back - o_depth) + 2 * (o_depth - d)) * pitch, 0, 1,
                    (("oseg_dip", "B", d),), [x for x in depths if x < d]))
    for o_cost, o_vf, o_vb, o_pieces, residual in o_options:
        # split family: a front stub and/or a back stub around one gap
        for i in range(len(residual) + 1):
            cost, vf, vb = o_cost, o_vf, o_vb
            pieces = list(o_pieces)
            if i > 0:
                d = residual[i - 1]
                pieces.append(("fio", d))
                cost += 2 * d * pitch
                vf += 2
            if i < len(residual):
                d = residual[i]
                pieces.append(("bio", d))
                cost += 2 * (back - d) * pitch
                vb += 2
            configs.append(_Config(cost, vf, vb, False, tuple(pieces)))
        # full-traversal family
        for n_full in (1, 2):
            pieces = o_pieces + (("full",),) * n_full
            configs.append(_Config(o_cost + n_full * back * pitch,
                                   o_vf + n_full, o_vb + n_full, True, pieces))
    best: dict[tuple, _Config] = {}
    for c in configs:
        key = (c.vdeg_f % 2, c.vdeg_b % 2, c.vdeg_f > 0, c.vdeg_b > 0, c.connects)
        if key not in best or c.cost < best[key].cost:
            best[key] = c
    return list(best.values())


def _merge(f: int, b: int, joined: bool, c: _Config, f2: int, b2: int,
           is_last: bool) -> tuple[bool, bool]:
    """Union the strand/piece components at one column.

    Returns (feasible, joined_after).  Infeasible when a component loses all
    rightward continuations before the final column, or the final column
    leaves more than one component.
    """
    LF, LB, RF, RB, PF, PB = range(6)
    present = [f > 0, b > 0, f2 > 0, b2 > 0, c.vdeg_f > 0, c.vdeg_b > 0]
    parent = list(range(6))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        parent[find(x)] = find(y)

    for group in ((LF, RF, PF), (LB, RB, PB)):
        anchor = None
        for e in group:
            if present[e]:
                if anchor is None:
                    anchor = e
                else:
                    union(e, anchor)
    if c.connects:
        union(PF, PB)
    if joined and f > 0 and b > 0:
        union(LF, LB)

    groups: dict[int, bool] = {}
    for e in range(6):
        if present[e]:
            root = find(e)
            groups[root] = groups.get(root, False) or e in (RF, RB)
    if is_last:
        if len(groups) != 1:
            return False, True
    else:
        for has_right in groups.values():
            if not has_right:
                return False, True
    if f2 > 0 and b2 > 0:
        return True, find(RF) == find(RB)
    return True, True


def optimal_route(pick_list: PickList, cfg: WarehouseConfig) -> Route:
    """Globally shortest route from the origin over all picks to the depot."""
    if not pick_list.picks:
        raise ValueError("empty pick list")
    origin = pick_list.origin
    origin.validate(cfg)
    for slot in pick_list.picks:
        slot.validate(cfg)
    back = cfg.back_depth
    depot_aisle = cfg.depot_aisle

    by_aisle: dict[int, list[int]] = {}
    for slot in pick_list.picks:
        by_aisle.setdefault(slot.aisle, [])
        if slot.depth not in by_aisle[slot.aisle]:
            by_aisle[slot.aisle].append(slot.depth)
    for depths in by_aisle.values():
        depths.sort()

    a_lo = min(list(by_aisle) + [origin.aisle, depot_aisle])
    a_hi = max(list(by_aisle) + [origin.aisle, depot_aisle])

    o_in_aisle = origin.in_aisle(cfg)
    odd_front: dict[int, int] = {depot_aisle: 1}
    odd_back: dict[int, int] = {}
    if not o_in_aisle:
        if origin.is_front:
            odd_front[origin.aisle] = odd_front.get(origin.aisle, 0) ^ 1
        else:
            odd_back[origin.aisle] = odd_back.get(origin.aisle, 0) ^ 1
    deg_floor_front = {depot_aisle}
    if not o_in_aisle and origin.is_front:
        deg_floor_front.add(origin.aisle)
    deg_floor_back = {origin.aisle} if (not o_in_aisle and not origin.is_front) else set()

    column_configs: dict[int, list[_Config]] = {}
    for a in range(a_lo, a_hi + 1):
        o_depth = origin.depth if (o_in_aisle and a == origin.aisle) else None
        column_configs[a] = _column_configs(by_aisle.get(a, []), o_depth, cfg)

    gap = cfg.inter_aisle_gap
    layer: dict[tuple[int, int, bool], float] = {(0, 0, True): 0.0}
    parents: dict[tuple[int, tuple], tuple] = {}
    for a in range(a_lo, a_hi + 1):
        is_last = a == a_hi
        new_layer: dict[tuple[int, int, bool], float] = {}
        want_f = odd_front.get(a, 0)
        want_b = odd_back.get(a, 0)
        floor_f = a in deg_floor_front
        floor_b = a in deg_floor_back
        out_options = [(0, 0)] if is_last else [
            (f2, b2) for f2 in range(3) for b2 in range(3) if f2 or b2
        ]
        for state, cost0 in layer.items():
            f, b, joined = state
            for c in column_configs[a]:
                df = f + c.vdeg_f
                db = b + c.vdeg_b
                for f2, b2 in out_options:
                    if (df + f2) % 2 != want_f or (db + b2) % 2 != want_b:
                        continue
                    if floor_f and df + f2 == 0:
                        continue
                    if floor_b and db + b2 == 0:
                        continue
                    ok, joined2 = _merge(f, b, joined, c, f2, b2, is_last)
                    if not ok:
                        continue
                    new_state = (f2, b2, joined2)
                    new_cost = cost0 + c.cost + (f2 + b2) * gap
                    if new_state not in new_layer or new_cost < new_layer[new_state]:
                        new_layer[new_state] = new_cost
                        parents[(a, new_state)] = (state, c)
        layer = new_layer
        if not layer:
            raise AssertionError("routing DP dead-ended; no feasible structure")

    final = (0, 0, True)
    if final not in layer:
        raise AssertionError("routing DP found no closed structure")

    chosen: dict[int, _Config] = {}
    crossings: dict[int, tuple[int, int]] = {}
    state = final
    for a in range(a_hi, a_lo - 1, -1):
        prev, c = parents[(a, state)]
        chosen[a] = c
        if a > a_lo:
            crossings[a - 1] = (prev[0], prev[1])  # boundary between a-1 and a
        state = prev

    waypoints = _eulerize(chosen, crossings, origin, o_in_aisle, cfg)
    return Route(waypoints, route_length(waypoints, cfg))


def _eulerize(chosen: dict[int, _Config], crossings: dict[int, tuple[int, int]],
              origin: Position, o_in_aisle: bool, cfg: WarehouseConfig) -> list[Position]:
    """Unroll the selected edge multiset into a walk from origin to depot."""
    back = cfg.back_depth
    edges: list[tuple] = []  # (u, v, kind, depth)
    adj: dict[tuple, list[int]] = {}

    def add_edge(u, v, kind, depth=None):
        eid = len(edges)
        edges.append((u, v, kind, depth))
        adj.setdefault(u, []).append(eid)
        if v != u:
            adj.setdefault(v, []).append(eid)

    for a, c in chosen.items():
        for piece in c.pieces:
            if piece[0] == "full":
                add_edge(("F", a), ("B", a), "full")
            elif piece[0] == "fio":
                add_edge(("F", a), ("F", a), "fio", piece[1])
            elif piece[0] == "bio":
                add_edge(("B", a), ("B", a), "bio", piece[1])
            elif piece[0] == "oseg":
                add_edge("O", ("F" if piece[1] == "F" else "B", a), "oseg")
            else:  # oseg_dip: reach the far pick depth, then exit past the origin
                add_edge("O", ("F" if piece[1] == "F" else "B", a), "oseg_dip", piece[2])
    for a, (f, b) in crossings.items():
        for _ in range(f):
            add_edge(("F", a), ("F", a + 1), "corridor")
        for _ in range(b):
            add_edge(("B", a), ("B", a + 1), "corridor")

    if o_in_aisle:
        start = "O"
    elif origin.is_front:
        start = ("F", origin.aisle)
    else:
        start = ("B", origin.aisle)

    used = [False] * len(edges)
    ptr = {node: 0 for node in adj}
    ptr.setdefault(start, 0)
    adj.setdefault(start, [])
    stack: list[tuple] = [(start, None)]
    seq: list[tuple] = []
    while stack:
        node, via = stack[-1]
        nxt = None
        while ptr[node] < len(adj[node]):
            eid = adj[node][ptr[node]]
            if used[eid]:
                ptr[node] += 1
                continue
            nxt = eid
            break
        if nxt is None:
            seq.append((node, via))
            stack.pop()
        else:
            used[nxt] = True
            u, v, _, _ = edges[nxt]
            other = v if u == node else u
            stack.append((other, nxt))
    seq.reverse()
    if not all(used):
        raise AssertionError("route structure is not connected")

    def pos_of(node) -> Position:
        if node == "O":
            return origin
        side, a = node
        return Position(a, 0 if side == "F" else back)

    waypoints = [pos_of(seq[0][0])]
    for node, via in seq[1:]:
        u, v, kind, depth = edges[via]
        if kind in ("fio", "bio"):
            waypoints.append(Position(node[1], depth))
        elif kind == "oseg_dip":
            aisle = origin.aisle
            waypoints.append(Position(aisle, depth))
        waypoints.append(pos_of(node))
    depot = cfg.depot
    if waypoints[-1] != depot:
        raise AssertionError("route does not terminate at the depot")
    return _dedupe(waypoints)


# --------------------------------------------------------------------------
# heuristics
# --------------------------------------------------------------------------

def s_shape_route(pick_list: PickList, cfg: WarehouseConfig) -> Route:
    """Traverse pick aisles in ascending order, snaking between cross-aisles.

    The last aisle is served out-and-back when the snake would otherwise
    strand the picker at the back; the route then returns to the depot
    along the front cross-aisle.
    """
    if not pick_list.picks:
        raise ValueError("empty pick list")
    back = cfg.back_depth
    deepest: dict[int, int] = {}
    for slot in pick_list.picks:
        slot.validate(cfg)
        deepest[slot.aisle] = max(deepest.get(slot.aisle, 0), slot.depth)
    aisles = sorted(deepest)

    wps = [pick_list.origin] + _walk_waypoints(
        pick_list.origin, Position(aisles[0], 0), cfg)
    row = 0
    for idx, a in enumerate(aisles):
        if idx < len(aisles) - 1:
            row = back - row
            wps.append(Position(a, row))
            wps.append(Position(aisles[idx + 1], row))
        elif row == back:
            wps.append(Position(a, 0))
        else:
            wps.append(Position(a, deepest[a]))
            wps.append(Position(a, 0))
    wps.append(cfg.depot)
    wps = _dedupe(wps)
    return Route(wps, route_length(wps, cfg))


def _gap_split(depths: list[int], back: int) -> tuple[int | None, int | None]:
    """Split an aisle's picks around its largest gap.

    Returns (front_stub_depth, back_stub_depth); either may be None when all
    picks fall on one side.  Gap ties resolve toward the back, so service
    leans toward the front cross-aisle.
    """
    bounds = [0] + depths + [back]
    best_i, best_gap = 0, -1
    for i in range(len(bounds) - 1):
        gap = bounds[i + 1] - bounds[i]
        if gap >= best_gap:
            best_gap = gap
            best_i = i
    front = depths[best_i - 1] if best_i >= 1 else None
    back_stub = depths[best_i] if best_i < len(depths) else None
    return front, back_stub


def largest_gap_route(pick_list: PickList, cfg: WarehouseConfig) -> Route:
    """First and last pick aisles traversed fully; intermediate aisles served
    from the front and/or back up to their largest gap, which is never
    crossed.  Degenerates to front out-and-backs when every aisle's largest
    gap touches the back cross-aisle."""
    if not pick_list.picks:
        raise ValueError("empty pick list")
    back = cfg.back_depth
    by_aisle: dict[int, list[int]] = {}
    for slot in pick_list.picks:
        slot.validate(cfg)
        depths = by_aisle.setdefault(slot.aisle, [])
        if slot.depth not in depths:
            depths.append(slot.depth)
    for depths in by_aisle.values():
        depths.sort()
    aisles = sorted(by_aisle)
    splits = {a: _gap_split(by_aisle[a], back) for a in aisles}

    origin = pick_list.origin
    all_front = all(split[1] is None for split in splits.values())
    if all_front or cfg.n_aisles == 1:
        wps = [origin] + _walk_waypoints(origin, Position(aisles[0], 0), cfg)
        for a in aisles:
            wps.append(Position(a, 0))
            wps.append(Position(a, by_aisle[a][-1]))
            wps.append(Position(a, 0))
        wps.append(cfg.depot)
        return Route(_dedupe(wps), route_length(_dedupe(wps), cfg))

    if len(aisles) == 1:
        a = aisles[0]
        front_stub, back_stub = splits[a]
        if a == cfg.n_aisles:
            transit = a - 1
        elif a == 1 or cfg.depot_aisle > a:
            transit = a + 1
        else:
            transit = a - 1
        wps = [origin]
        if front_stub is not None:
            wps += _walk_waypoints(origin, Position(a, 0), cfg)
            wps += [Position(a, front_stub), Position(a, 0), Position(transit, 0)]
        else:
            wps += _walk_waypoints(origin, Position(transit, 0), cfg)
        wps += [Position(transit, back), Position(a, back),
                Position(a, back_stub), Position(a, back),
                Position(transit, back), Position(transit, 0), cfg.depot]
        wps = _dedupe(wps)
        return Route(wps, route_length(wps, cfg))

    first, last = aisles[0], aisles[-1]
    wps = [origin] + _walk_waypoints(origin, Position(first, 0), cfg)
    wps.append(Position(first, back))
    for a in aisles[1:-1]:
        _, back_stub = splits[a]
        if back_stub is not None:
            wps += [Position(a, back), Position(a, back_stub), Position(a, back)]
    wps += [Position(last, back), Position(last, 0)]
    for a in reversed(aisles[1:-1]):
        front_stub, _ = splits[a]
        if front_stub is not None:
            wps += [Position(a, 0), Position(a, front_stub), Position(a, 0)]
    wps.append(cfg.depot)
    wps = _dedupe(wps)
    return Route(wps, route_length(wps, cfg))


def route_remaining(route: Route, current: Position, cfg: WarehouseConfig) -> Route:
    """The suffix of ``route`` from ``current`` (which must lie on it) onward."""
    wps = route.waypoints
    if len(wps) == 1:
        if current == wps[0]:
            return Route([current], 0.0)
        raise ValueError("position not on route")
    for i in range(len(wps) - 1):
        if _on_segment(current, wps[i], wps[i + 1], cfg):
            suffix = _dedupe([current] + wps[i + 1:])
            return Route(suffix, route_length(suffix, cfg))
    raise ValueError("position not on route")


def _on_segment(p: Position, u: Position, v: Position, cfg: WarehouseConfig) -> bool:
    if u.aisle == v.aisle:
        return p.aisle == u.aisle and (
            min(u.depth, v.depth) <= p.depth <= max(u.depth, v.depth))
    return (p.depth == u.depth == v.depth
            and min(u.aisle, v.aisle) <= p.aisle <= max(u.aisle, v.aisle))
