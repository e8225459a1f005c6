"""Construction sequences and the constructibility deciders."""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .grid import (
    DIRECTIONS,
    Cell2,
    Direction,
    Polyomino,
    as_polyomino,
    canonical_key,
    canonicalize,
    is_connected,
    neighbors,
)

EXACT_LIMIT = 12
MEMO_CAP = int(os.environ.get("TILT_MEMO_CAP", "4000000"))


class SequenceFormatError(ValueError):
    pass


class NoOpStep(Exception):
    """A construction step whose tile never touches the shape."""

    def __init__(self, step, index=None):
        self.step = step
        self.index = index
        super().__init__(f"step {step} does not touch the polyomino")


class ConstructionStep(NamedTuple):
    direction: Direction
    lane: int

    def __str__(self):
        return f"{self.direction.value} {self.lane}"


@dataclass(frozen=True)
class ConstructionSequence:
    seed: Cell2
    steps: tuple[ConstructionStep, ...] = ()

    def __len__(self):
        return len(self.steps)

    def to_text(self) -> str:
        lines = [f"seed {self.seed[0]} {self.seed[1]}"]
        lines.extend(f"step {s.direction.value} {s.lane}" for s in self.steps)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> ConstructionSequence:
        seed = None
        steps = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "seed" and len(parts) == 3:
                    if seed is not None:
                        raise SequenceFormatError(f"line {lineno}: second seed")
                    seed = (int(parts[1]), int(parts[2]))
                elif parts[0] == "step" and len(parts) == 3:
                    if seed is None:
                        raise SequenceFormatError(f"line {lineno}: step before seed")
                    steps.append(ConstructionStep(Direction.parse(parts[1]), int(parts[2])))
                else:
                    raise SequenceFormatError(f"line {lineno}: cannot parse {raw!r}")
            except ValueError as exc:
                if isinstance(exc, SequenceFormatError):
                    raise
                raise SequenceFormatError(f"line {lineno}: {exc}") from None
        if seed is None:
            raise SequenceFormatError("missing seed line")
        return cls(seed, tuple(steps))


class Status(enum.Enum):
    CONSTRUCTIBLE = "constructible"
    NOT_CONSTRUCTIBLE = "not_constructible"
    NOT_SUPPORTED = "not_supported"
    RESOURCE_LIMIT = "resource_limit"


@dataclass(frozen=True)
class DecisionResult:
    status: Status
    sequence: ConstructionSequence | None = None
    reason: str = ""
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def constructible(self) -> bool:
        return self.status is Status.CONSTRUCTIBLE

    def __bool__(self):
        return self.constructible


def step_lane(t: Cell2, d: Direction) -> int:
    return t[0] if d.vertical else t[1]


# ------------------------------------------------------------------ replay


class Replayer:
    """Incremental construction: per-lane extremes of an insert-only shape."""

    def __init__(self, seed: Cell2):
        self.cells: set[Cell2] = set()
        self._colmax: dict[int, int] = {}
        self._colmin: dict[int, int] = {}
        self._rowmax: dict[int, int] = {}
        self._rowmin: dict[int, int] = {}
        self.add(tuple(seed))

    def add(self, c: Cell2):
        x, y = c
        self.cells.add(c)
        if y > self._colmax.get(x, y - 1):
            self._colmax[x] = y
        if y < self._colmin.get(x, y + 1):
            self._colmin[x] = y
        if x > self._rowmax.get(y, x - 1):
            self._rowmax[y] = x
        if x < self._rowmin.get(y, x + 1):
            self._rowmin[y] = x

    def landing(self, step: ConstructionStep) -> Cell2 | None:
        """First position adjacent to the shape met by a tile arriving along
        the step's lane, or None when the tile misses the shape."""
        d, l = step
        if d is Direction.N:
            best = _best(max, self._colmax.get(l - 1), self._colmax.get(l + 1), _inc(self._colmax.get(l), 1))
            return None if best is None else (l, best)
        if d is Direction.S:
            best = _best(min, self._colmin.get(l - 1), self._colmin.get(l + 1), _inc(self._colmin.get(l), -1))
            return None if best is None else (l, best)
        if d is Direction.E:
            best = _best(max, self._rowmax.get(l - 1), self._rowmax.get(l + 1), _inc(self._rowmax.get(l), 1))
            return None if best is None else (best, l)
        best = _best(min, self._rowmin.get(l - 1), self._rowmin.get(l + 1), _inc(self._rowmin.get(l), -1))
        return None if best is None else (best, l)

    def apply(self, step: ConstructionStep) -> Cell2:
        p = self.landing(step)
        if p is None:
            raise NoOpStep(step)
        self.add(p)
        return p


def _inc(v, k):
    return None if v is None else v + k


def _best(fn, *vals):
    vals = [v for v in vals if v is not None]
    return fn(vals) if vals else None


def landing_cell(P, step: ConstructionStep) -> Cell2 | None:
    P = as_polyomino(P)
    r = Replayer(next(iter(P.cells)))
    for c in P.cells:
        r.add(c)
    return r.landing(ConstructionStep(*step))


def apply_step(P, step: ConstructionStep) -> Polyomino:
    """Add one tile arriving from infinity along the step's lane.

    Raises :class:`NoOpStep` when the lane never comes adjacent to ``P``.
    """
    P = as_polyomino(P)
    p = landing_cell(P, step)
    if p is None:
        raise NoOpStep(step)
    return Polyomino(P.cells | {p}, check=False)


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    message: str = ""
    step_index: int | None = None
    built: frozenset = frozenset()

    def __bool__(self):
        return self.ok


def replay(seq: ConstructionSequence) -> frozenset[Cell2]:
    r = Replayer(seq.seed)
    for i, s in enumerate(seq.steps):
        if r.landing(s) is None:
            raise NoOpStep(s, i)
        r.apply(s)
    return frozenset(r.cells)


def verify(P, seq: ConstructionSequence) -> VerifyReport:
    """Replay ``seq`` and compare the result with ``P`` up to translation."""
    P = as_polyomino(P)
    r = Replayer(seq.seed)
    placed = [tuple(seq.seed)]
    for i, s in enumerate(seq.steps):
        p = r.landing(s)
        if p is None:
            return VerifyReport(False, f"step {i} ({s}) is a no-op", i, frozenset(r.cells))
        r.add(p)
        placed.append(p)
    built = frozenset(r.cells)
    if len(built) != len(P):
        return VerifyReport(False, f"size mismatch: built {len(built)} tiles, expected {len(P)}", len(seq.steps), built)
    if canonical_key(built) != canonical_key(P.cells):
        idx = None
        if tuple(seq.seed) in P.cells:
            for i, p in enumerate(placed[1:]):
                if p not in P.cells:
                    idx = i
                    break
        where = f" (first stray tile at step {idx})" if idx is not None else ""
        return VerifyReport(False, f"shape mismatch{where}", idx, built)
    return VerifyReport(True, "ok", None, built)


# ---------------------------------------------------------------- removal


def blocking_set_empty(cells, p: Cell2, d: Direction) -> bool:
    x, y = p
    if d is Direction.N:
        return not any(qy > y and abs(qx - x) <= 1 for qx, qy in cells)
    if d is Direction.S:
        return not any(qy < y and abs(qx - x) <= 1 for qx, qy in cells)
    if d is Direction.E:
        return not any(qx > x and abs(qy - y) <= 1 for qx, qy in cells)
    return not any(qx < x and abs(qy - y) <= 1 for qx, qy in cells)


def removal_directions(P, t: Cell2) -> set[Direction]:
    """Directions in which ``t`` can leave ``P`` unobstructed (connectivity
    of the remainder is not considered)."""
    P = as_polyomino(P)
    t = tuple(t)
    if t not in P.cells:
        raise ValueError(f"{t} is not a tile of the polyomino")
    rest = P.cells - {t}
    return {d for d in DIRECTIONS if blocking_set_empty(rest, t, d)}


def valid_removals(P, t: Cell2) -> set[Direction]:
    """Removal directions of ``t`` that also leave a connected remainder."""
    P = as_polyomino(P)
    dirs = removal_directions(P, t)
    if dirs and len(P) > 1 and not is_connected(P.cells - {tuple(t)}):
        return set()
    return dirs


def _sequence_from_removals(seed: Cell2, removals) -> ConstructionSequence:
    steps = tuple(ConstructionStep(d, step_lane(t, d)) for t, d in reversed(removals))
    return ConstructionSequence(seed, steps)


# ------------------------------------------------------------- greedy


def decide_simple(P, forced_seed: Cell2 | None = None, *, order_seed: int | None = None) -> DecisionResult:
    """Decide constructibility of a hole-free polyomino in O(N log N).

    Repeatedly removes a convex, unblocked, non-cut tile (first-in first-out,
    or in random order when ``order_seed`` is given).  ``forced_seed`` is
    never removed, so it ends up as the seed of the emitted sequence.
    """
    P = as_polyomino(P)
    if not P.is_simple:
        return DecisionResult(Status.NOT_SUPPORTED, reason="polyomino has holes; use decide_exact")
    xy = P.xy
    n = len(xy)
    forced = -1
    if forced_seed is not None:
        forced_seed = (int(forced_seed[0]), int(forced_seed[1]))
        if forced_seed not in P:
            raise ValueError(f"forced seed {forced_seed} is not a tile")
        forced = int(np.flatnonzero((xy[:, 0] == forced_seed[0]) & (xy[:, 1] == forced_seed[1]))[0])
    if n == 1:
        return DecisionResult(Status.CONSTRUCTIBLE, ConstructionSequence(tuple(map(int, xy[0]))))

    seed_arg = -1 if order_seed is None else int(order_seed) & 0x7FFFFFFF
    order, dirs, removed, max_reexam = kernels.greedy_decompose(xy, forced, seed_arg)
    stats = {"removed": removed, "max_reexamined": max_reexam}
    if removed < n - 1:
        return DecisionResult(Status.NOT_CONSTRUCTIBLE, stats=stats)

    left = np.ones(n, dtype=bool)
    left[order] = False
    seed = tuple(int(v) for v in xy[np.flatnonzero(left)[0]])
    # lanes: x for vertical arrivals, y for horizontal ones
    vertical = (dirs == 0) | (dirs == 2)
    lanes = np.where(vertical, xy[order, 0], xy[order, 1])[::-1].tolist()
    dir_objs = [DIRECTIONS[d] for d in dirs[::-1].tolist()]
    steps = tuple(map(ConstructionStep, dir_objs, lanes))
    return DecisionResult(Status.CONSTRUCTIBLE, ConstructionSequence(seed, steps), stats=stats)


# -------------------------------------------------------------- exact


_MISSING = object()
_EXACT_MEMO: dict = {}


def clear_memo():
    _EXACT_MEMO.clear()


def _free_direction(cells, t: Cell2) -> Direction | None:
    x, y = t
    n = e = s = w = True
    for qx, qy in cells:
        if qx == x and qy == y:
            continue
        if abs(qx - x) <= 1:
            if qy > y:
                n = False
            elif qy < y:
                s = False
        if abs(qy - y) <= 1:
            if qx > x:
                e = False
            elif qx < x:
                w = False
    if n:
        return Direction.N
    if e:
        return Direction.E
    if s:
        return Direction.S
    if w:
        return Direction.W
    return None


def _connected_without(cells, t) -> bool:
    start = None
    for c in neighbors(t):
        if c in cells:
            start = c
            break
    if start is None:
        return len(cells) == 1
    seen = {start, t}
    todo = [start]
    while todo:
        c = todo.pop()
        for m in neighbors(c):
            if m in cells and m not in seen:
                seen.add(m)
                todo.append(m)
    return len(seen) == len(cells)


def _decomposable(key: tuple, counter: list) -> tuple | None:
    """Memoised search over decomposition states (canonical cell tuples).

    Returns ``()`` for a single tile, ``(tile, direction)`` for a first
    removal that leads to a full decomposition, or None.
    """
    hit = _EXACT_MEMO.get(key, _MISSING)
    if hit is not _MISSING:
        return hit
    counter[0] += 1
    if len(key) == 1:
        res = ()
    else:
        res = None
        cells = set(key)
        for t in key:
            d = _free_direction(cells, t)
            if d is None or not _connected_without(cells, t):
                continue
            cells.discard(t)
            sub = _decomposable(canonical_key(cells), counter)
            cells.add(t)
            if sub is not None:
                res = (t, d)
                break
    if len(_EXACT_MEMO) < MEMO_CAP:
        _EXACT_MEMO[key] = res
    return res


def is_decomposable(cells) -> bool:
    """Exact test on a small connected cell set (memoised across calls)."""
    return _decomposable(canonical_key(cells), [0]) is not None


def decide_exact(P, limit: int = EXACT_LIMIT) -> DecisionResult:
    """Exhaustive decider for small shapes, with or without holes."""
    cells = P.cells if isinstance(P, Polyomino) else frozenset(map(tuple, P))
    if len(cells) > limit:
        return DecisionResult(Status.RESOURCE_LIMIT, reason=f"{len(cells)} tiles exceed the exact-search cap {limit}")
    if not cells or not is_connected(cells):
        raise ValueError("decide_exact needs a nonempty connected shape")
    counter = [0]
    if _decomposable(canonical_key(cells), counter) is None:
        return DecisionResult(Status.NOT_CONSTRUCTIBLE, stats={"explored": counter[0]})
    cur = set(cells)
    removals = []
    while len(cur) > 1:
        key = canonical_key(cur)
        hit = _EXACT_MEMO.get(key, _MISSING)
        if hit is _MISSING:
            hit = _decomposable(key, counter)
        (tx, ty), d = hit
        ox = min(c[0] for c in cur)
        oy = min(c[1] for c in cur)
        t = (tx + ox, ty + oy)
        removals.append((t, d))
        cur.remove(t)
    seq = _sequence_from_removals(next(iter(cur)), removals)
    return DecisionResult(Status.CONSTRUCTIBLE, seq, stats={"explored": counter[0]})


def decide(P, forced_seed: Cell2 | None = None, *, exact: bool = False, limit: int = EXACT_LIMIT) -> DecisionResult:
    """Greedy decider for simple shapes, exact search otherwise (or on request)."""
    P = as_polyomino(P)
    if exact or not P.is_simple:
        if forced_seed is not None:
            return DecisionResult(Status.NOT_SUPPORTED, reason="forced seed needs the greedy decider")
        if not exact:
            return DecisionResult(Status.NOT_SUPPORTED, reason="polyomino has holes; rerun with exact search")
        return decide_exact(P, limit)
    return decide_simple(P, forced_seed)


def canonical_sequence(seq: ConstructionSequence, P) -> ConstructionSequence:
    """Shift a sequence so it builds the canonical form of ``P``."""
    built = replay(seq)
    ox = min(c[0] for c in built)
    oy = min(c[1] for c in built)
    cx, cy = canonicalize(as_polyomino(P)).bbox[0]
    dx, dy = cx - ox, cy - oy
    steps = tuple(ConstructionStep(s.direction, s.lane + (dx if s.direction.vertical else dy)) for s in seq.steps)
    return ConstructionSequence((seq.seed[0] + dx, seq.seed[1] + dy), steps)
