import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import random_polyomino, rect
from oracles import decomposable, removable_sides, slide_landing
from tiltassembly.engine import (
    ConstructionSequence,
    ConstructionStep,
    NoOpStep,
    SequenceFormatError,
    Status,
    apply_step,
    canonical_sequence,
    decide,
    decide_exact,
    decide_simple,
    landing_cell,
    removal_directions,
    replay,
    valid_removals,
    verify,
)
from tiltassembly.grid import DIRECTIONS, Direction, Polyomino, canonicalize, enumerate_polyominoes, parse_polyomino

N, E, S, W = Direction.N, Direction.E, Direction.S, Direction.W


def test_landing_examples():
    P = Polyomino([(0, 0), (1, 0), (1, 1)])
    assert landing_cell(P, ConstructionStep(N, 0)) == (0, 1)
    assert landing_cell(P, ConstructionStep(N, 1)) == (1, 2)
    assert landing_cell(P, ConstructionStep(S, 2)) == (2, 0)
    assert landing_cell(P, ConstructionStep(W, 1)) == (0, 1)
    assert landing_cell(P, ConstructionStep(E, 5)) is None
    with pytest.raises(NoOpStep):
        apply_step(P, ConstructionStep(N, 7))


@given(st.integers(1, 30), st.integers(0, 10_000), st.sampled_from(list(DIRECTIONS)), st.integers(-3, 12))
def test_landing_matches_slide_oracle(n, seed, d, lane):
    P = random_polyomino(random.Random(seed), n)
    assert landing_cell(P, ConstructionStep(d, lane)) == slide_landing(P.cells, d.value, lane)


def test_sequence_text_round_trip():
    seq = ConstructionSequence((0, 0), (ConstructionStep(N, 0), ConstructionStep(E, -1)))
    text = seq.to_text()
    assert text == "seed 0 0\nstep n 0\nstep e -1\n"
    assert ConstructionSequence.from_text(text) == seq
    assert ConstructionSequence.from_text("# c\nseed 1 2  # x\n\nstep W 3\n").steps == (ConstructionStep(W, 3),)


@pytest.mark.parametrize(
    "bad",
    ["", "step n 0\n", "seed 0 0\nseed 1 1\n", "seed 0\n", "seed 0 0\nstep up 1\n", "seed a b\n", "seed 0 0\njump n 1\n"],
)
def test_sequence_text_errors(bad):
    with pytest.raises(SequenceFormatError):
        ConstructionSequence.from_text(bad)


def test_verify_reports():
    P = parse_polyomino("##\n#.\n")
    good = ConstructionSequence((0, 0), (ConstructionStep(N, 0), ConstructionStep(E, 1)))
    rep = verify(P, good)
    assert rep.ok and rep
    noop = ConstructionSequence((0, 0), (ConstructionStep(N, 5),))
    rep = verify(P, noop)
    assert not rep and rep.step_index == 0 and "no-op" in rep.message
    short = ConstructionSequence((0, 0), (ConstructionStep(N, 0),))
    assert "size mismatch" in verify(P, short).message
    wrong = ConstructionSequence((0, 0), (ConstructionStep(N, 0), ConstructionStep(W, 0)))
    rep = verify(P, wrong)
    assert not rep and "shape mismatch" in rep.message and rep.step_index == 1
    with pytest.raises(NoOpStep):
        replay(noop)


def test_verify_is_translation_invariant():
    P = parse_polyomino("###\n")
    seq = ConstructionSequence((10, 10), (ConstructionStep(E, 10), ConstructionStep(W, 10)))
    assert verify(P, seq)


def test_decide_simple_small():
    P = parse_polyomino("###\n#.#\n")
    res = decide_simple(P)
    assert res.status is Status.CONSTRUCTIBLE and res
    assert verify(P, res.sequence)
    assert len(res.sequence) == len(P) - 1


def test_forced_seed():
    P = parse_polyomino("####\n#...\n####\n")
    for t in sorted(P.cells):
        res = decide_simple(P, forced_seed=t)
        assert res.constructible
        assert res.sequence.seed == t
        assert replay(res.sequence) == P.cells
    with pytest.raises(ValueError):
        decide_simple(P, forced_seed=(9, 9))


def test_witness_not_constructible(witness):
    assert len(witness) == 19 and witness.is_simple
    res = decide_simple(witness)
    assert res.status is Status.NOT_CONSTRUCTIBLE and not res
    assert res.sequence is None


def test_holes_need_exact():
    ring = parse_polyomino("###\n#.#\n###\n")
    assert decide_simple(ring).status is Status.NOT_SUPPORTED
    assert decide(ring).status is Status.NOT_SUPPORTED
    res = decide(ring, exact=True)
    assert res.constructible and verify(ring, res.sequence)
    assert decide_exact(rect(3, 4)).constructible
    assert decide_exact(rect(4, 4)).status is Status.RESOURCE_LIMIT


def test_decide_exact_rejects_disconnected():
    with pytest.raises(ValueError):
        decide_exact({(0, 0), (2, 2)})


@given(st.integers(1, 200), st.integers(0, 10_000), st.integers(0, 1000))
def test_random_order_gives_same_answer(n, seed, order):
    P = random_polyomino(random.Random(seed), n)
    if not P.is_simple:
        return
    a = decide_simple(P)
    b = decide_simple(P, order_seed=order)
    assert a.status == b.status
    for r in (a, b):
        if r:
            assert verify(P, r.sequence)


@given(st.integers(2, 300), st.integers(0, 10_000))
def test_frontier_reexamination_bounded(n, seed):
    P = random_polyomino(random.Random(seed), n)
    if P.is_simple:
        assert decide_simple(P).stats["max_reexamined"] <= 12


def test_decider_is_deterministic():
    P = random_polyomino(random.Random(5), 120)
    assert decide_simple(P).sequence == decide_simple(P).sequence


@pytest.mark.parametrize("n", range(2, 8))
def test_removal_directions_match_pull_out_oracle(n):
    for P in enumerate_polyominoes(n):
        for t in P.cells:
            ours = {d.value for d in removal_directions(P, t)}
            assert ours == set(removable_sides(P.cells, t))


def test_valid_removals_keep_connectivity():
    P = parse_polyomino("###\n")
    assert valid_removals(P, (1, 0)) == set()
    assert valid_removals(P, (0, 0)) == {N, S, W}


@pytest.mark.parametrize("n", range(2, 7))
def test_exact_matches_independent_search(n):
    for P in enumerate_polyominoes(n):
        assert decide_exact(P).constructible == decomposable(P.cells)


@pytest.mark.parametrize("n", range(2, 9))
def test_convex_free_noncut_tile_exists_when_constructible(n):
    # any constructible simple shape has a removable tile that is convex,
    # unblocked and not a cut tile, and removing it stays constructible
    from tiltassembly.grid import convex_tiles

    for P in enumerate_polyominoes(n):
        if not P.is_simple:
            continue
        good = [t for t in convex_tiles(P) if valid_removals(P, t)]
        assert good
        for t in good:
            assert decide_exact(Polyomino(P.cells - {t})).constructible


def test_canonical_sequence():
    P = parse_polyomino("##\n.#\n")
    res = decide_simple(P.translate(5, -3))
    seq = canonical_sequence(res.sequence, P)
    assert replay(seq) == canonicalize(P).cells
