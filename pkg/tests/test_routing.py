import numpy as np
import pytest

from picksim.routing import (PickList, Route, largest_gap_route, optimal_route,
                             route_length, route_remaining, s_shape_route,
                             validate_route)
from picksim.warehouse import Position, SlotLocation, WarehouseConfig

from oracles import permutation_tour_length

CFG = WarehouseConfig()


def random_origin(rng, cfg):
    kind = rng.integers(3)
    aisle = int(rng.integers(1, cfg.n_aisles + 1))
    if kind == 0:
        return cfg.depot
    if kind == 1:
        return Position(aisle, int(rng.choice([0, cfg.back_depth])))
    return Position(aisle, int(rng.integers(1, cfg.slots_per_aisle + 1)))


def random_pick_list(rng, cfg, max_picks, origin=None):
    n = int(rng.integers(1, max_picks + 1))
    slots = tuple(SlotLocation(int(rng.integers(1, cfg.n_aisles + 1)),
                               int(rng.integers(1, cfg.slots_per_aisle + 1)))
                  for _ in range(n))
    return PickList(origin or random_origin(rng, cfg), slots)


def test_empty_pick_list_rejected():
    for router in (optimal_route, s_shape_route, largest_gap_route):
        with pytest.raises(ValueError):
            router(PickList(CFG.depot, ()), CFG)


def test_single_pick_out_and_back():
    pick = PickList(CFG.depot, (SlotLocation(6, 5),))
    route = optimal_route(pick, CFG)
    validate_route(route, pick, CFG)
    assert route.total_length == 10.0


def test_optimal_matches_permutation_oracle():
    rng = np.random.default_rng(2)
    for cfg in (CFG, WarehouseConfig(n_aisles=5, slots_per_aisle=8, depot_aisle=2)):
        for _ in range(60):
            pick = random_pick_list(rng, cfg, 7)
            route = optimal_route(pick, cfg)
            validate_route(route, pick, cfg)
            want = permutation_tour_length(pick.origin, pick.picks, cfg)
            assert route.total_length == pytest.approx(want, abs=1e-9)


def test_optimal_single_aisle_closed_forms():
    # all picks in one aisle from the depot: optimal equals the cheaper of
    # the front out-and-back and the traverse-through-return closed forms
    rng = np.random.default_rng(9)
    for _ in range(40):
        aisle = int(rng.integers(1, CFG.n_aisles + 1))
        depths = sorted({int(d) for d in rng.integers(1, 16, size=rng.integers(1, 6))})
        pick = PickList(CFG.depot, tuple(SlotLocation(aisle, d) for d in depths))
        route = optimal_route(pick, CFG)
        validate_route(route, pick, CFG)
        horiz = 2 * abs(aisle - CFG.depot_aisle) * CFG.inter_aisle_gap
        out_and_back = horiz + 2 * max(depths) * CFG.slot_pitch
        neighbor_gap = 2 * CFG.inter_aisle_gap  # cheapest adjacent-aisle loop
        through = horiz + 2 * CFG.back_depth * CFG.slot_pitch + neighbor_gap
        assert route.total_length <= min(out_and_back, through) + 1e-9
        assert route.total_length == pytest.approx(
            permutation_tour_length(pick.origin, pick.picks, CFG), abs=1e-9)


def test_optimal_permutation_invariance():
    rng = np.random.default_rng(17)
    pick = random_pick_list(rng, CFG, 12, origin=CFG.depot)
    base = optimal_route(pick, CFG).total_length
    for _ in range(5):
        perm = tuple(pick.picks[i] for i in rng.permutation(len(pick.picks)))
        assert optimal_route(PickList(CFG.depot, perm), CFG).total_length == base


def test_s_shape_single_aisle_in_out():
    pick = PickList(CFG.depot, (SlotLocation(3, 7), SlotLocation(3, 2)))
    route = s_shape_route(pick, CFG)
    validate_route(route, pick, CFG)
    # enter aisle 3 from the front, reach the deepest pick, return, walk home
    assert Position(3, 7) in route.waypoints
    assert Position(3, CFG.back_depth) not in route.waypoints
    assert route.total_length == 2 * 3 * 3.0 + 2 * 7.0


def test_s_shape_two_aisles_full_traversals():
    pick = PickList(CFG.depot, (SlotLocation(2, 4), SlotLocation(5, 9)))
    route = s_shape_route(pick, CFG)
    validate_route(route, pick, CFG)
    wps = route.waypoints
    # both aisles traversed fully, connected along the back cross-aisle
    assert wps.index(Position(2, CFG.back_depth)) < wps.index(Position(5, CFG.back_depth))
    assert Position(5, 0) in wps
    expected = (4 * 3.0  # depot to aisle 2 along the front
                + CFG.back_depth  # up aisle 2
                + 3 * 3.0  # back cross-aisle to aisle 5
                + CFG.back_depth  # down aisle 5
                + 1 * 3.0)  # front cross-aisle to depot
    assert route.total_length == expected


def test_largest_gap_single_aisle_never_crosses_gap():
    pick = PickList(CFG.depot, (SlotLocation(3, 2), SlotLocation(3, 13)))
    route = largest_gap_route(pick, CFG)
    validate_route(route, pick, CFG)
    # the interior gap (depths 3..12 of aisle 3) is never traversed
    for u, v in zip(route.waypoints, route.waypoints[1:]):
        if u.aisle == v.aisle == 3:
            lo, hi = min(u.depth, v.depth), max(u.depth, v.depth)
            assert not (lo <= 7 <= hi), "route crossed the largest gap"
    covered_back = any(u.aisle == 3 and max(u.depth, v.depth) >= 13
                       for u, v in zip(route.waypoints, route.waypoints[1:])
                       if u.aisle == v.aisle)
    assert covered_back


def test_largest_gap_front_hugging_degenerates_to_out_and_backs():
    picks = tuple(SlotLocation(a, d) for a in (2, 4, 7) for d in (1, 2))
    pick = PickList(CFG.depot, picks)
    route = largest_gap_route(pick, CFG)
    validate_route(route, pick, CFG)
    assert all(w.depth < CFG.back_depth for w in route.waypoints)
    # depot->2 (12m), serve (4m), ->4 (6m), serve (4m), ->7 (9m), serve (4m), ->depot (3m)
    assert route.total_length == 42.0


def test_heuristics_dominate_optimal():
    rng = np.random.default_rng(100)
    for _ in range(250):
        pick = random_pick_list(rng, CFG, CFG.capacity)
        opt = optimal_route(pick, CFG)
        ss = s_shape_route(pick, CFG)
        lg = largest_gap_route(pick, CFG)
        for route in (opt, ss, lg):
            validate_route(route, pick, CFG)
        assert ss.total_length >= opt.total_length - 1e-9
        assert lg.total_length >= opt.total_length - 1e-9


def test_route_remaining_identity_and_additivity():
    rng = np.random.default_rng(55)
    for _ in range(50):
        pick = random_pick_list(rng, CFG, 10)
        route = optimal_route(pick, CFG)
        assert route_remaining(route, route.waypoints[0], CFG).total_length == \
            pytest.approx(route.total_length)
        # split at a random cell along the route
        cells = []
        for u, v in zip(route.waypoints, route.waypoints[1:]):
            if u.aisle == v.aisle:
                step = 1 if v.depth > u.depth else -1
                cells += [Position(u.aisle, d) for d in
                          range(u.depth, v.depth, step)]
            else:
                step = 1 if v.aisle > u.aisle else -1
                cells += [Position(a, u.depth) for a in
                          range(u.aisle, v.aisle, step)]
        cells.append(route.waypoints[-1])
        prefix_len = 0.0
        # suffix extraction uses the first visit of a cell, so split there
        idx = cells.index(cells[int(rng.integers(len(cells)))])
        for u, v in zip(cells[:idx + 1], cells[1:idx + 1]):
            if u.aisle == v.aisle:
                prefix_len += abs(u.depth - v.depth) * CFG.slot_pitch
            else:
                prefix_len += abs(u.aisle - v.aisle) * CFG.inter_aisle_gap
        suffix = route_remaining(route, cells[idx], CFG)
        assert prefix_len + suffix.total_length == pytest.approx(route.total_length)


def test_route_remaining_off_route_rejected():
    pick = PickList(CFG.depot, (SlotLocation(6, 4),))
    route = optimal_route(pick, CFG)
    with pytest.raises(ValueError):
        route_remaining(route, Position(1, CFG.back_depth), CFG)


def test_route_remaining_empty_tail_is_depot_leg():
    pick = PickList(CFG.depot, (SlotLocation(8, 3),))
    route = optimal_route(pick, CFG)
    # after the final pick the remaining route is the straight depot leg
    suffix = route_remaining(route, Position(8, 3), CFG)
    assert suffix.waypoints[-1] == CFG.depot
    assert suffix.total_length == 3.0 + 2 * 3.0
