"""Polycubes: blocking in 3D plus exhaustive shape and path searches."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .engine import MEMO_CAP, DecisionResult, Status
from .grid import Cell3, ResourceLimitError, is_connected3, neighbors3

CUBE_LIMIT = 18


class Direction3(enum.Enum):
    """Side a cube arrives from; ``UP`` means it falls from above."""

    UP = "up"
    DOWN = "down"
    N = "n"
    E = "e"
    S = "s"
    W = "w"

    @property
    def vector(self) -> Cell3:
        return _VEC3[self]

    @property
    def opposite(self) -> Direction3:
        return _OPP3[self]

    @property
    def axis(self) -> int:
        return _AXIS[self]

    @classmethod
    def parse(cls, text: str) -> Direction3:
        t = text.strip().lower()
        alias = {"u": "up", "d": "down", "north": "n", "east": "e", "south": "s", "west": "w"}
        try:
            return cls(alias.get(t, t))
        except ValueError:
            raise ValueError(f"unknown 3D direction {text!r}") from None


_VEC3 = {
    Direction3.UP: (0, 0, 1),
    Direction3.DOWN: (0, 0, -1),
    Direction3.N: (0, 1, 0),
    Direction3.S: (0, -1, 0),
    Direction3.E: (1, 0, 0),
    Direction3.W: (-1, 0, 0),
}
_OPP3 = {
    Direction3.UP: Direction3.DOWN,
    Direction3.DOWN: Direction3.UP,
    Direction3.N: Direction3.S,
    Direction3.S: Direction3.N,
    Direction3.E: Direction3.W,
    Direction3.W: Direction3.E,
}
_AXIS = {Direction3.E: 0, Direction3.W: 0, Direction3.N: 1, Direction3.S: 1, Direction3.UP: 2, Direction3.DOWN: 2}

ALL6 = frozenset(Direction3)
NO_BELOW = frozenset({Direction3.UP, Direction3.N, Direction3.E, Direction3.S, Direction3.W})
LATERAL = frozenset({Direction3.N, Direction3.E, Direction3.S, Direction3.W})
PRESETS = {"all": ALL6, "no-below": NO_BELOW, "lateral": LATERAL}
_ORDER = (Direction3.UP, Direction3.N, Direction3.E, Direction3.S, Direction3.W, Direction3.DOWN)


def direction_set(value) -> frozenset:
    if isinstance(value, str):
        if value in PRESETS:
            return PRESETS[value]
        value = [Direction3.parse(t) for t in value.split(",")]
    out = frozenset(value)
    if not out:
        raise ValueError("direction set must not be empty")
    return out


def as_polycube(cells) -> frozenset[Cell3]:
    out = frozenset(tuple(int(v) for v in c) for c in cells)
    if not out:
        raise ValueError("empty polycube")
    if any(len(c) != 3 for c in out):
        raise ValueError("polycube cells need three coordinates")
    if not is_connected3(out):
        raise ValueError("polycube is not connected")
    return out


def canonical_key3(cells) -> tuple[Cell3, ...]:
    ox = min(c[0] for c in cells)
    oy = min(c[1] for c in cells)
    oz = min(c[2] for c in cells)
    return tuple(sorted((x - ox, y - oy, z - oz) for x, y, z in cells))


def flat_embedding(P) -> frozenset[Cell3]:
    """(x, y) -> (x, y, 0)."""
    cells = P.cells if hasattr(P, "cells") else P
    return frozenset((x, y, 0) for x, y in cells)


def lane3(p: Cell3, d: Direction3) -> tuple[int, int]:
    a = d.axis
    return tuple(p[i] for i in range(3) if i != a)


def _split(c: Cell3, a: int):
    """(coordinate along axis a, the two other coordinates)."""
    return c[a], tuple(c[i] for i in range(3) if i != a)


def blocked_3d(cells, p: Cell3, d: Direction3) -> bool:
    """True iff a cube beyond ``p`` on the ``d`` side lies in p's column or one
    of the four face-adjacent columns (the 3D blocking set is nonempty)."""
    a = d.axis
    sign = d.vector[a]
    pa, (pu, pv) = _split(p, a)
    for q in cells:
        if q == p:
            continue
        qa, (qu, qv) = _split(q, a)
        if (qa - pa) * sign > 0 and abs(qu - pu) + abs(qv - pv) <= 1:
            return True
    return False


def landing_3d(cells, d: Direction3, lane) -> Cell3 | None:
    """Where a cube sent along ``lane`` from the ``d`` side sticks, if anywhere."""
    a = d.axis
    sign = d.vector[a]
    u, v = lane
    best = None
    for q in cells:
        qa, (qu, qv) = _split(q, a)
        off = abs(qu - u) + abs(qv - v)
        if off > 1:
            continue
        pos = qa + sign if off == 0 else qa
        if best is None or pos * sign > best * sign:
            best = pos
    if best is None:
        return None
    out = [0, 0, 0]
    out[a] = best
    others = [i for i in range(3) if i != a]
    out[others[0]], out[others[1]] = u, v
    return tuple(out)


def slide_landing_3d(cells, d: Direction3, lane, start: int = 64) -> Cell3 | None:
    """Literal simulation: step the cube in from far away until it touches
    a face; reference for :func:`landing_3d`."""
    cells = set(cells)
    a = d.axis
    sign = d.vector[a]
    others = [i for i in range(3) if i != a]
    hi = max(abs(c[i]) for c in cells for i in range(3)) + start
    pos = [0, 0, 0]
    pos[others[0]], pos[others[1]] = lane
    for k in range(hi, -hi - 1, -1):
        pos[a] = k * sign
        p = tuple(pos)
        if p in cells:
            return None
        if any(m in cells for m in neighbors3(p)):
            return p
    return None


@dataclass(frozen=True)
class CubeStep:
    direction: Direction3
    lane: tuple[int, int]


@dataclass(frozen=True)
class CubeSequence:
    seed: Cell3
    steps: tuple[CubeStep, ...] = ()

    def to_text(self) -> str:
        lines = ["seed %d %d %d" % self.seed]
        lines += [f"step {s.direction.value} {s.lane[0]} {s.lane[1]}" for s in self.steps]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> CubeSequence:
        seed, steps = None, []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "seed" and len(parts) == 4 and seed is None:
                seed = tuple(int(v) for v in parts[1:])
            elif parts[0] == "step" and len(parts) == 4 and seed is not None:
                steps.append(CubeStep(Direction3.parse(parts[1]), (int(parts[2]), int(parts[3]))))
            else:
                raise ValueError(f"cannot parse {raw!r}")
        if seed is None:
            raise ValueError("missing seed line")
        return cls(seed, tuple(steps))


def apply_step_3d(cells, step: CubeStep) -> frozenset[Cell3]:
    p = landing_3d(cells, step.direction, step.lane)
    if p is None:
        raise ValueError(f"step {step} never touches the polycube")
    return frozenset(cells) | {p}


def replay_3d(seq: CubeSequence) -> frozenset[Cell3]:
    cells = frozenset([tuple(seq.seed)])
    for s in seq.steps:
        cells = apply_step_3d(cells, s)
    return cells


def verify_3d(P, seq: CubeSequence) -> bool:
    try:
        built = replay_3d(seq)
    except ValueError:
        return False
    return canonical_key3(built) == canonical_key3(as_polycube(P))


# ------------------------------------------------------------ exact search

_MEMO3: dict = {}
_MISSING = object()


def clear_memo_3d():
    _MEMO3.clear()


def _free_dir(cells, t, dirs):
    for d in _ORDER:
        if d in dirs and not blocked_3d(cells, t, d):
            return d
    return None


def _connected_without(cells, t) -> bool:
    rest = cells - {t}
    return bool(rest) and is_connected3(rest)


def _search(key, dirs, counter, budget):
    k = (dirs, key)
    hit = _MEMO3.get(k, _MISSING)
    if hit is not _MISSING:
        return hit
    counter[0] += 1
    if counter[0] > budget:
        raise ResourceLimitError(f"explored {counter[0]} states")
    if len(key) == 1:
        res = ()
    else:
        res = None
        cells = frozenset(key)
        for t in key:
            d = _free_dir(cells, t, dirs)
            if d is None or not _connected_without(cells, t):
                continue
            if _search(canonical_key3(cells - {t}), dirs, counter, budget) is not None:
                res = (t, d)
                break
    if len(_MEMO3) < MEMO_CAP:
        _MEMO3[k] = res
    return res


def decide_polycube(P, dirs=ALL6, limit: int = CUBE_LIMIT, budget: int = 2_000_000) -> DecisionResult:
    """Exact decomposition search for a polycube under a direction set.

    A cube may leave in direction d iff d is allowed, its 3D blocking set is
    empty and the rest stays connected.  States are memoised per direction
    set on their translation-canonical form.
    """
    cells = as_polycube(P)
    dirs = direction_set(dirs)
    if len(cells) > limit:
        return DecisionResult(Status.RESOURCE_LIMIT, reason=f"{len(cells)} cubes exceed the cap {limit}")
    counter = [0]
    try:
        root = _search(canonical_key3(cells), dirs, counter, budget)
    except ResourceLimitError as exc:
        return DecisionResult(Status.RESOURCE_LIMIT, reason=str(exc), stats={"explored": counter[0]})
    if root is None:
        return DecisionResult(Status.NOT_CONSTRUCTIBLE, stats={"explored": counter[0]})
    cur = set(cells)
    removals = []
    while len(cur) > 1:
        key = canonical_key3(cur)
        (tx, ty, tz), d = _search(key, dirs, counter, budget + counter[0])
        o = (min(c[0] for c in cur), min(c[1] for c in cur), min(c[2] for c in cur))
        t = (tx + o[0], ty + o[1], tz + o[2])
        removals.append((t, d))
        cur.remove(t)
    seed = next(iter(cur))
    steps = tuple(CubeStep(d, lane3(t, d)) for t, d in reversed(removals))
    return DecisionResult(Status.CONSTRUCTIBLE, CubeSequence(seed, steps), stats={"explored": counter[0]})


# ------------------------------------------------------------------ paths


def is_cube_path(path) -> bool:
    if not path or len(set(path)) != len(path):
        return False
    return all(sum(abs(a[i] - b[i]) for i in range(3)) == 1 for a, b in zip(path, path[1:]))


def path_insertable_3d(path, dirs=ALL6) -> bool:
    """True iff every cube of ``path`` can be added in order, with only the
    already placed prefix able to block it."""
    dirs = direction_set(dirs)
    placed = {tuple(path[0])}
    for c in path[1:]:
        if _free_dir(placed, tuple(c), dirs) is None:
            return False
        placed.add(tuple(c))
    return True


def constructible_path_3d(P, s: Cell3, t: Cell3, dirs=ALL6, limit: int = 200_000) -> tuple | None:
    """A path s..t inside ``P`` that can be built cube by cube from ``s``.

    Depth-first over simple paths with neighbours in sorted order; a
    neighbour that is already blocked by the prefix is skipped together
    with every extension through it.  Returns None when no path exists.
    """
    cells = as_polycube(P)
    dirs = direction_set(dirs)
    s, t = tuple(s), tuple(t)
    if s not in cells or t not in cells:
        raise ValueError("endpoints must be cubes of the polycube")
    if s == t:
        return (s,)
    path = [s]
    on = {s}
    its = [iter(sorted(m for m in neighbors3(s) if m in cells))]
    steps = 0
    while its:
        nxt = next(its[-1], None)
        if nxt is None:
            its.pop()
            on.discard(path.pop())
            continue
        steps += 1
        if steps > limit:
            raise ResourceLimitError(f"path search exceeded {limit} extensions")
        if nxt in on or _free_dir(on, nxt, dirs) is None:
            continue
        path.append(nxt)
        on.add(nxt)
        if nxt == t:
            return tuple(path)
        its.append(iter(sorted(m for m in neighbors3(nxt) if m in cells)))
    return None
