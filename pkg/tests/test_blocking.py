import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import random_polyomino
from tiltassembly.blocking import BlockingIndex
from tiltassembly.engine import blocking_set_empty
from tiltassembly.grid import DIRECTIONS, Direction


def test_insert_remove_and_nearest():
    idx = BlockingIndex([(0, 0), (0, 3), (1, 5)])
    assert len(idx) == 3 and (0, 3) in idx
    assert idx.nearest((0, 0), Direction.N) == (0, 3)
    assert idx.nearest((0, 0), Direction.N, offset=1) == (1, 5)
    assert idx.nearest((0, 3), Direction.S) == (0, 0)
    assert idx.nearest((0, 3), Direction.E) is None
    idx.remove((0, 3))
    assert idx.nearest((0, 0), Direction.N) is None
    assert (0, 3) not in idx
    with pytest.raises(KeyError):
        idx.remove((0, 3))
    with pytest.raises(KeyError):
        idx.insert((0, 0))
    assert idx.cells() == {(0, 0), (1, 5)}


def test_diagonal_tile_blocks():
    idx = BlockingIndex([(0, 0), (1, 1)])
    assert idx.is_blocked((0, 0), Direction.N)
    assert idx.is_blocked((0, 0), Direction.E)
    assert not idx.is_blocked((0, 0), Direction.S)
    assert not idx.is_blocked((0, 0), Direction.W)
    # two lanes away does not count
    idx = BlockingIndex([(0, 0), (2, 5)])
    assert idx.free_directions((0, 0)) == list(DIRECTIONS)


@given(st.integers(1, 50), st.integers(0, 10_000))
def test_is_blocked_matches_scan(n, seed):
    P = random_polyomino(random.Random(seed), n)
    idx = BlockingIndex.build(P)
    for t in P.cells:
        rest = P.cells - {t}
        for d in DIRECTIONS:
            assert idx.is_blocked(t, d) == (not blocking_set_empty(rest, t, d))


@given(st.integers(2, 40), st.integers(0, 10_000))
def test_frontier_contains_every_status_change(n, seed):
    P = random_polyomino(random.Random(seed), n)
    idx = BlockingIndex.build(P)
    t = sorted(P.cells)[seed % n]
    before = {c: tuple(idx.free_directions(c)) for c in P.cells if c != t}
    idx.remove(t)
    front = idx.frontier_after_removal(t)
    for c, dirs in before.items():
        if tuple(idx.free_directions(c)) != dirs:
            assert c in front
    assert len(front) <= 12
