import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tiltassembly.cube3d import (
    ALL6,
    LATERAL,
    NO_BELOW,
    CubeSequence,
    CubeStep,
    Direction3,
    as_polycube,
    blocked_3d,
    constructible_path_3d,
    decide_polycube,
    direction_set,
    flat_embedding,
    is_cube_path,
    landing_3d,
    path_insertable_3d,
    replay_3d,
    slide_landing_3d,
    verify_3d,
)
from tiltassembly.engine import Status, decide_exact
from tiltassembly.grid import ResourceLimitError, enumerate_polyominoes, neighbors3

UP, DOWN = Direction3.UP, Direction3.DOWN


def random_polycube(rng, n):
    cells = {(0, 0, 0)}
    while len(cells) < n:
        c = rng.choice(sorted(cells))
        cells.add(rng.choice(list(neighbors3(c))))
    return cells


def test_direction_parsing_and_sets():
    assert Direction3.parse("U") is UP and Direction3.parse("north") is Direction3.N
    assert UP.opposite is DOWN and UP.axis == 2
    assert direction_set("lateral") == LATERAL
    assert direction_set("up,n") == {UP, Direction3.N}
    assert len(ALL6) == 6 and DOWN not in NO_BELOW
    with pytest.raises(ValueError):
        Direction3.parse("x")
    with pytest.raises(ValueError):
        direction_set([])


def test_blocking_uses_cross_of_columns():
    cells = {(0, 0, 0), (1, 0, 3)}
    assert blocked_3d(cells, (0, 0, 0), UP)
    assert not blocked_3d({(0, 0, 0), (1, 1, 3)}, (0, 0, 0), UP)  # diagonal column
    assert not blocked_3d(cells, (0, 0, 0), DOWN)


@given(st.integers(0, 10_000), st.integers(1, 12), st.sampled_from(sorted(ALL6, key=lambda d: d.value)),
       st.integers(-2, 3), st.integers(-2, 3))
def test_landing_matches_slide(seed, n, d, u, v):
    cells = random_polycube(random.Random(seed), n)
    assert landing_3d(cells, d, (u, v)) == slide_landing_3d(cells, d, (u, v))


def test_sequence_round_trip_and_replay():
    seq = CubeSequence((0, 0, 0), (CubeStep(UP, (0, 0)), CubeStep(Direction3.E, (0, 1))))
    assert CubeSequence.from_text(seq.to_text()) == seq
    assert replay_3d(seq) == {(0, 0, 0), (0, 0, 1), (1, 0, 1)}
    with pytest.raises(ValueError):
        CubeSequence.from_text("step up 0 0\n")


def test_as_polycube_checks():
    with pytest.raises(ValueError):
        as_polycube([])
    with pytest.raises(ValueError):
        as_polycube([(0, 0, 0), (0, 0, 2)])


@pytest.mark.parametrize("n", range(1, 8))
def test_lateral_flat_matches_2d(n):
    for P in enumerate_polyominoes(n):
        res = decide_polycube(flat_embedding(P), LATERAL)
        assert res.constructible == decide_exact(P).constructible


def test_decided_sequences_verify():
    rng = random.Random(1)
    for n in range(2, 11):
        cells = random_polycube(rng, n)
        for dirs in (ALL6, NO_BELOW):
            res = decide_polycube(cells, dirs)
            if res:
                assert verify_3d(cells, res.sequence)
                assert all(s.direction in dirs for s in res.sequence.steps)


def test_solid_block_constructible():
    solid = {(x, y, z) for x in range(2) for y in range(2) for z in range(2)}
    assert decide_polycube(solid, ALL6).constructible


def test_limits():
    big = {(x, 0, 0) for x in range(20)}
    assert decide_polycube(big).status is Status.RESOURCE_LIMIT
    blob = {(x, y, z) for x in range(3) for y in range(3) for z in range(2)}
    assert decide_polycube(blob, LATERAL, budget=1).status is Status.RESOURCE_LIMIT


def test_paths():
    cells = {(x, 0, 0) for x in range(4)} | {(3, 1, 0), (3, 1, 1)}
    p = constructible_path_3d(cells, (0, 0, 0), (3, 1, 1))
    assert p is not None and is_cube_path(p)
    assert p[0] == (0, 0, 0) and p[-1] == (3, 1, 1)
    assert path_insertable_3d(p)
    assert constructible_path_3d(cells, (1, 0, 0), (1, 0, 0)) == ((1, 0, 0),)
    with pytest.raises(ValueError):
        constructible_path_3d(cells, (9, 9, 9), (0, 0, 0))
    assert not is_cube_path([(0, 0, 0), (1, 1, 0)])


def test_path_search_limit():
    cube = {(x, y, z) for x in range(3) for y in range(3) for z in range(3)}
    with pytest.raises(ResourceLimitError):
        constructible_path_3d(cube, (0, 0, 0), (2, 2, 2), limit=1)


def test_flat_witness_lifts_to_3d(witness):
    flat = flat_embedding(witness)
    assert not decide_polycube(flat, LATERAL, limit=19).constructible
    res = decide_polycube(flat, ALL6, limit=19)
    assert res.constructible and verify_3d(flat, res.sequence)
