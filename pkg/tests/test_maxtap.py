import pytest

from oracles import brute_maxtap, buildable_in_order, longest_buildable_path, shortest_paths
from tiltassembly.engine import replay, verify
from tiltassembly.grid import Polyomino, ResourceLimitError, enumerate_polyominoes, is_tree_shaped, parse_polyomino
from tiltassembly.maxtap import (
    check_path,
    exact_maxtap,
    is_path_sequentially_constructible,
    longest_constructible_shortest_path,
    longest_sequential_path_tree,
    maxtap_sqrt_bound,
    path_sequence,
)


def test_exact_maxtap_constructible_shape_is_itself():
    P = parse_polyomino("###\n#..\n")
    res = exact_maxtap(P)
    assert res.size == len(P) and res.kind == "exact"
    assert verify(res.subshape, res.sequence)


def test_exact_maxtap_on_witness(witness):
    res = exact_maxtap(witness, limit=19)
    assert res.size == 18
    assert verify(res.subshape, res.sequence)
    assert res.subshape.cells <= witness.cells


def test_exact_maxtap_cap(witness):
    with pytest.raises(ResourceLimitError):
        exact_maxtap(witness)


@pytest.mark.parametrize("n", range(2, 7))
def test_exact_maxtap_matches_brute_force(n):
    for P in enumerate_polyominoes(n):
        assert exact_maxtap(P).size == brute_maxtap(P.cells)


def test_path_helpers():
    path = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert check_path(path) == tuple(path)
    assert is_path_sequentially_constructible(path)
    seq = path_sequence(path)
    assert replay(seq) == frozenset(path)
    for bad in ([], [(0, 0), (2, 0)], [(0, 0), (1, 0), (0, 0)]):
        with pytest.raises(ValueError):
            check_path(bad)


def test_boxed_in_path_end():
    # last tile sits in a pocket closed on all four sides by earlier tiles
    path = [(0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3), (3, 3),
            (2, 3), (1, 3), (1, 4)]
    check_path(path)
    assert is_path_sequentially_constructible(path) == buildable_in_order(path)


@pytest.mark.parametrize("n", range(2, 9))
def test_tree_path_matches_brute_force(n):
    for P in enumerate_polyominoes(n):
        if not is_tree_shaped(P):
            continue
        path = longest_sequential_path_tree(P)
        assert buildable_in_order(path)
        assert len(path) == longest_buildable_path(P.cells)


def test_tree_path_rejects_cycles():
    with pytest.raises(ValueError):
        longest_sequential_path_tree(parse_polyomino("##\n##\n"))


@pytest.mark.parametrize("n", range(2, 8))
def test_shortest_path_search_matches_brute_force(n):
    for P in enumerate_polyominoes(n):
        if not P.is_simple:
            continue
        best = 1
        for s in P.cells:
            for t in P.cells:
                if s != t:
                    for p in shortest_paths(P.cells, s, t):
                        if len(p) > best and buildable_in_order(p):
                            best = len(p)
        got = longest_constructible_shortest_path(P)
        assert buildable_in_order(got)
        assert len(got) == best


def test_sqrt_bound_certificate():
    P = Polyomino([(x, 0) for x in range(6)] + [(2, 1), (2, 2), (4, -1)])
    b = maxtap_sqrt_bound(P)
    assert b.optimum == len(P)
    assert b.holds and b.ratio == 4 * b.length**2 / b.optimum
