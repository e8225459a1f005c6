import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import tick_settle
from tiltassembly.engine import ConstructionSequence, ConstructionStep, NoOpStep, decide_simple, verify
from tiltassembly.grid import Direction, canonical_key, parse_polyomino
from tiltassembly.world import (
    CYCLE,
    Depot,
    TiltWorld,
    WorldError,
    cycle_of,
    direction_at,
    format_maze,
    format_sidecar,
    format_world,
    generate_maze,
    normalize_sequence,
    parse_maze,
    run_pipeline,
    settle,
)

N, E, S, W = Direction.N, Direction.E, Direction.S, Direction.W


def box(w, h):
    return {(x, y) for x in range(-1, w + 1) for y in range(-1, h + 1) if x in (-1, w) or y in (-1, h)}


def test_single_tile_slides_to_wall():
    w = TiltWorld(box(5, 5), [{(2, 2)}])
    assert settle(w, S).assemblies == [frozenset({(2, 0)})]
    assert settle(w, E).assemblies == [frozenset({(4, 2)})]
    # settle does not touch the input
    assert w.assemblies == [frozenset({(2, 2)})]


def test_tiles_in_one_lane_stack_and_bond():
    w = TiltWorld(box(3, 6), [{(1, 1)}, {(1, 4)}])
    out = settle(w, S)
    assert out.assemblies == [frozenset({(1, 0), (1, 1)})]


def test_side_contact_stops_and_bonds():
    # held tile in column 0; a tile falling in column 1 sticks beside it
    obstacles = box(2, 6) | {(0, 2)}
    w = TiltWorld(obstacles, [{(0, 3)}, {(1, 5)}])
    out = settle(w, S)
    assert out.assemblies == [frozenset({(0, 3), (1, 3)})]


def test_settle_is_idempotent_and_order_free():
    rng = random.Random(3)
    obstacles = box(8, 8) | {(3, 3), (5, 6)}
    tiles = rng.sample(sorted(set((x, y) for x in range(8) for y in range(8)) - obstacles), 9)
    a = TiltWorld(obstacles, [{t} for t in tiles])
    b = TiltWorld(obstacles, [{t} for t in reversed(tiles)])
    for d in (S, E, N, W):
        a, b = settle(a, d), settle(b, d)
        assert a.configuration() == b.configuration()
        assert settle(a, d).configuration() == a.configuration()


def test_open_world_raises():
    w = TiltWorld({(0, 0)}, [{(5, 5)}])
    with pytest.raises(WorldError):
        settle(w, N)


def test_world_validation():
    with pytest.raises(WorldError):
        TiltWorld({(0, 0)}, [{(0, 0)}])
    with pytest.raises(WorldError):
        TiltWorld(set(), [{(0, 0)}, {(0, 0), (1, 0)}])
    with pytest.raises(WorldError):
        TiltWorld(set(), [{(0, 0), (2, 0)}])


@given(st.integers(0, 10_000), st.integers(1, 10), st.integers(0, 8))
def test_event_driven_matches_tick_oracle(seed, ntiles, nobs):
    rng = random.Random(seed)
    free = [(x, y) for x in range(9) for y in range(9)]
    rng.shuffle(free)
    obstacles = box(9, 9) | set(free[:nobs])
    tiles = free[nobs : nobs + ntiles]
    w = TiltWorld(obstacles, [{t} for t in tiles])
    for _ in range(6):
        d = rng.choice((N, E, S, W))
        expect = tick_settle(obstacles, w.assemblies, d.vector)
        w = settle(w, d)
        assert w.configuration() == expect


def test_depot_schedule():
    dep = Depot((0, 0), S, offset=2, period=4, capacity=2)
    assert [g for g in range(20) if dep.fires(g)] == [2, 6, 10, 14, 18]
    w = TiltWorld(box(3, 3), depots=[dep])
    assert w.emit(2) == 1
    with pytest.raises(WorldError):
        w.emit(6)  # tile still sitting on the depot
    w.step(E)
    assert w.emit(6) == 1 and w.emit(10) == 0
    assert w.tiles == 2


def test_schedule_helpers():
    assert [direction_at(g).value for g in range(6)] == ["s", "w", "n", "e", "s", "w"]
    assert [cycle_of(g) for g in range(6)] == [0, 1, 1, 1, 1, 2]
    assert CYCLE == (W, N, E, S)


def test_normalize_sequence_keeps_shape():
    P = parse_polyomino("###\n#..\n#..\n")
    seq = decide_simple(P).sequence
    norm = normalize_sequence(seq)
    assert verify(P, norm)


def _pipeline(text, D):
    P = parse_polyomino(text)
    layout = generate_maze(decide_simple(P).sequence, D)
    rep = run_pipeline(layout, D)
    return P, layout, rep


@pytest.mark.parametrize("text,D", [("##\n", 3), (".#.\n###\n.#.\n", 2), ("##\n.#\n", 3)])
def test_pipeline_produces_copies(text, D):
    P, layout, rep = _pipeline(text, D)
    n = len(P)
    assert rep.ok, rep.message
    assert rep.produced == D and all(rep.congruent)
    assert rep.first_complete_step <= 4 * n
    assert rep.exited_by_cycle(n + D) >= D
    assert canonical_key(layout.product.cells) == canonical_key(P.cells)


def test_pipeline_budget_failure():
    P = parse_polyomino("###\n")
    layout = generate_maze(decide_simple(P).sequence, 2)
    rep = run_pipeline(layout, 2, budget=3)
    assert not rep.ok and "budget" in rep.message
    with pytest.raises(ValueError):
        run_pipeline(layout, 5)


def test_pipeline_frames_and_trace():
    P = parse_polyomino("##\n")
    layout = generate_maze(decide_simple(P).sequence, 1)
    frames = []
    rep = run_pipeline(layout, 1, frames=frames)
    assert len(frames) == rep.unit_steps == len(rep.trace)
    assert rep.trace[0].startswith("0 s moved=")
    assert "o" in format_world(frames[0], layout.bounds) or rep.unit_steps == 1


def test_maze_file_round_trip():
    P = parse_polyomino("##\n#.\n")
    layout = generate_maze(decide_simple(P).sequence, 2)
    grid, side = format_maze(layout), format_sidecar(layout)
    back = parse_maze(grid, side)
    assert back.obstacles == layout.obstacles
    assert [(d.cell, d.direction, d.offset, d.period, d.capacity) for d in back.depots] == [
        (d.cell, d.direction, d.offset, d.period, d.capacity) for d in layout.depots
    ]
    assert back.sinks == layout.sinks and back.copies == 2
    assert back.product.cells == layout.product.cells
    assert run_pipeline(back, 2).ok
    with pytest.raises(ValueError):
        parse_maze(grid.replace("D", ".", 1), side)


def test_maze_rejects_noop_sequence():
    seq = ConstructionSequence((0, 0), (ConstructionStep(N, 3),))
    with pytest.raises(NoOpStep):
        generate_maze(seq, 1)
