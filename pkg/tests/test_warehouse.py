import math

import numpy as np
import pytest

from picksim.warehouse import (Direction, Position, SlotLocation, UNREACHABLE,
                               WarehouseConfig, directional_distance,
                               directional_distances, walk_distance)

from oracles import dijkstra_directional, dijkstra_walk_distance

CFGS = [
    WarehouseConfig(),
    WarehouseConfig(n_aisles=4, slots_per_aisle=7, depot_aisle=1),
    WarehouseConfig(n_aisles=6, slots_per_aisle=20, depot_aisle=6, inter_aisle_gap=2.0),
]


def random_position(rng, cfg):
    kind = rng.integers(3)
    aisle = int(rng.integers(1, cfg.n_aisles + 1))
    if kind == 0:
        return Position(aisle, 0)
    if kind == 1:
        return Position(aisle, cfg.back_depth)
    return Position(aisle, int(rng.integers(1, cfg.slots_per_aisle + 1)))


def random_slot(rng, cfg):
    return SlotLocation(int(rng.integers(1, cfg.n_aisles + 1)),
                        int(rng.integers(1, cfg.slots_per_aisle + 1)))


def test_config_defaults_and_tau():
    cfg = WarehouseConfig()
    assert cfg.n_aisles == 10 and cfg.slots_per_aisle == 15
    assert cfg.depot_aisle == 6 and cfg.capacity == 20
    assert cfg.tau == 1.0
    assert cfg.gap_units == 3.0
    assert cfg.depot == Position(6, 0)


@pytest.mark.parametrize("kwargs", [
    {"n_aisles": 0},
    {"depot_aisle": 11},
    {"depot_aisle": 0},
    {"slot_pitch": 0.0},
    {"picker_speed": -1.0},
    {"capacity": 0},
])
def test_config_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        WarehouseConfig(**kwargs)


def test_position_validation():
    cfg = WarehouseConfig()
    with pytest.raises(ValueError):
        Position(0, 3).validate(cfg)
    with pytest.raises(ValueError):
        Position(2, cfg.back_depth + 1).validate(cfg)
    with pytest.raises(ValueError):
        walk_distance(Position(11, 0), Position(1, 0), cfg)
    with pytest.raises(ValueError):
        SlotLocation(1, 0).validate(cfg)


def test_walk_distance_identity_and_straight_line():
    cfg = WarehouseConfig()
    p = Position(4, 9)
    assert walk_distance(p, p, cfg) == 0.0
    assert walk_distance(Position(6, 0), Position(6, 3), cfg) == 3.0


def test_walk_distance_symmetry_and_oracle():
    for cfg in CFGS:
        rng = np.random.default_rng(11)
        for _ in range(170):
            a = random_position(rng, cfg)
            b = random_position(rng, cfg)
            d = walk_distance(a, b, cfg)
            assert d == walk_distance(b, a, cfg)
            assert d == pytest.approx(dijkstra_walk_distance(a, b, cfg), abs=1e-9)


def test_walk_distance_triangle_inequality():
    for cfg in CFGS:
        rng = np.random.default_rng(5)
        for _ in range(120):
            a, b, c = (random_position(rng, cfg) for _ in range(3))
            assert walk_distance(a, c, cfg) <= (
                walk_distance(a, b, cfg) + walk_distance(b, c, cfg) + 1e-9)


def test_directional_worked_example_distances():
    # picker inside aisle 1 at depth 8 of a 5x10 layout: one order below it,
    # two orders in the next aisle at up distances {9, 15}, down {13, 19}
    cfg = WarehouseConfig(n_aisles=5, slots_per_aisle=10, depot_aisle=3)
    picker = Position(1, 8)
    same_aisle = SlotLocation(1, 5)
    assert directional_distance(picker, same_aisle, Direction.DOWN, cfg) == 3.0
    assert directional_distance(picker, same_aisle, Direction.UP, cfg) == UNREACHABLE
    ups = sorted(directional_distance(picker, s, Direction.UP, cfg)
                 for s in (SlotLocation(2, 8), SlotLocation(2, 2)))
    downs = sorted(directional_distance(picker, s, Direction.DOWN, cfg)
                   for s in (SlotLocation(2, 8), SlotLocation(2, 2)))
    assert ups == [9.0, 15.0]
    assert downs == [13.0, 19.0]


def test_directional_boundary_sentinels():
    cfg = WarehouseConfig()
    back = Position(4, cfg.back_depth)
    front = Position(4, 0)
    slot = SlotLocation(7, 3)
    assert directional_distance(back, slot, Direction.UP, cfg) == UNREACHABLE
    assert directional_distance(front, slot, Direction.DOWN, cfg) == UNREACHABLE
    assert math.isfinite(directional_distance(back, slot, Direction.DOWN, cfg))


def test_directional_matches_constrained_dijkstra():
    for cfg in CFGS:
        rng = np.random.default_rng(23)
        for _ in range(170):
            p = random_position(rng, cfg)
            s = random_slot(rng, cfg)
            direction = Direction.UP if rng.integers(2) else Direction.DOWN
            got = directional_distance(p, s, direction, cfg)
            want = dijkstra_directional(p, s, direction, cfg)
            assert got == pytest.approx(want, abs=1e-9), (p, s, direction)


def test_directional_dominates_walk_distance():
    for cfg in CFGS:
        rng = np.random.default_rng(31)
        for _ in range(150):
            p = random_position(rng, cfg)
            s = random_slot(rng, cfg)
            walk_units = walk_distance(p, Position.of_slot(s), cfg) / cfg.slot_pitch
            for direction in Direction:
                rho = directional_distance(p, s, direction, cfg)
                assert rho >= walk_units - 1e-9


def test_directional_vectorized_agrees_with_scalar():
    cfg = WarehouseConfig()
    rng = np.random.default_rng(41)
    for _ in range(40):
        p = random_position(rng, cfg)
        slots = [random_slot(rng, cfg) for _ in range(30)]
        aisles = np.array([s.aisle for s in slots])
        depths = np.array([s.depth for s in slots])
        up, down = directional_distances(p, aisles, depths, cfg)
        for i, s in enumerate(slots):
            assert up[i] == directional_distance(p, s, Direction.UP, cfg)
            assert down[i] == directional_distance(p, s, Direction.DOWN, cfg)
