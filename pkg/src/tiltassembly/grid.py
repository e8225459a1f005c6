"""Lattice geometry for polyominoes and polycubes.

Coordinates are integer tuples, x east-positive, y north-positive (z up for
polycubes).  A :class:`Polyomino` is an immutable, connected, nonempty set of
cells.  Congruence is translation only.
"""

from __future__ import annotations

import enum
import os
from typing import Iterable, Iterator

import numpy as np

from . import kernels

Cell2 = tuple[int, int]
Cell3 = tuple[int, int, int]

ENUMERATION_LIMIT = int(os.environ.get("TILT_ENUM_LIMIT", "11"))

# Above this many cells the array kernels beat set-based BFS.
_ARRAY_THRESHOLD = 2048

_COORD_MIN = -(2**31)
_COORD_MAX = 2**31 - 1


class ShapeError(ValueError):
    """Input is not a valid polyomino/polycube."""


class ShapeFormatError(ShapeError):
    """Malformed ASCII shape text."""


class ResourceLimitError(RuntimeError):
    """A configured size cap was exceeded."""


class Direction(enum.Enum):
    """Axis direction a tile arrives from (or leaves towards)."""

    N = "n"
    E = "e"
    S = "s"
    W = "w"

    @property
    def vector(self) -> Cell2:
        return _VEC2[self]

    @property
    def opposite(self) -> Direction:
        return _OPP2[self]

    @property
    def vertical(self) -> bool:
        return self in (Direction.N, Direction.S)

    @classmethod
    def parse(cls, text: str) -> Direction:
        try:
            return cls(text.strip().lower()[:1])
        except ValueError:
            raise ValueError(f"unknown direction {text!r}") from None

    def __repr__(self):
        return f"Direction.{self.name}"


DIRECTIONS = (Direction.N, Direction.E, Direction.S, Direction.W)
_VEC2 = {Direction.N: (0, 1), Direction.E: (1, 0), Direction.S: (0, -1), Direction.W: (-1, 0)}
_OPP2 = {Direction.N: Direction.S, Direction.S: Direction.N, Direction.E: Direction.W, Direction.W: Direction.E}

ORTHO = ((1, 0), (0, 1), (-1, 0), (0, -1))
ORTHO3 = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))


def neighbors(c: Cell2) -> Iterator[Cell2]:
    x, y = c
    for dx, dy in ORTHO:
        yield (x + dx, y + dy)


def _bfs_count(cells, start, nbrs) -> int:
    seen = {start}
    todo = [start]
    while todo:
        c = todo.pop()
        for n in nbrs(c):
            if n in cells and n not in seen:
                seen.add(n)
                todo.append(n)
    return len(seen)


def neighbors3(c: Cell3) -> Iterator[Cell3]:
    x, y, z = c
    for dx, dy, dz in ORTHO3:
        yield (x + dx, y + dy, z + dz)


def is_connected(cells) -> bool:
    """True iff the unit-distance adjacency graph on ``cells`` is connected.

    The empty set is not connected; a singleton is.
    """
    if not cells:
        return False
    if not isinstance(cells, (set, frozenset)):
        cells = set(cells)
    if len(cells) >= _ARRAY_THRESHOLD:
        xy = np.array(sorted(cells), dtype=np.int64)
        return kernels.is_connected_xy(xy)
    return _bfs_count(cells, next(iter(cells)), neighbors) == len(cells)


def is_connected3(cells) -> bool:
    if not cells:
        return False
    cells = cells if isinstance(cells, (set, frozenset)) else set(cells)
    return _bfs_count(cells, next(iter(cells)), neighbors3) == len(cells)


class Polyomino:
    """Immutable connected set of lattice cells.

    Build from any iterable of ``(x, y)`` pairs, or from an ``(N, 2)`` integer
    array with :meth:`from_array` (which defers creating the Python set).
    """

    __slots__ = ("_cells", "_xy", "_simple", "_hash")

    def __init__(self, cells: Iterable[Cell2] = (), *, check: bool = True):
        self._cells = frozenset((int(x), int(y)) for x, y in cells)
        self._xy = None
        self._simple = None
        self._hash = None
        if check:
            self._validate()

    @classmethod
    def from_array(cls, xy, *, check: bool = True) -> Polyomino:
        xy = np.asarray(xy, dtype=np.int64).reshape(-1, 2)
        self = cls.__new__(cls)
        order = np.lexsort((xy[:, 1], xy[:, 0]))
        self._xy = np.ascontiguousarray(xy[order])
        self._cells = None
        self._simple = None
        self._hash = None
        if check:
            if len(self._xy) and np.any(np.all(self._xy[1:] == self._xy[:-1], axis=1)):
                raise ShapeError("duplicate cells")
            self._validate()
        return self

    def _validate(self):
        if len(self) == 0:
            raise ShapeError("polyomino must be nonempty")
        lo, hi = self.bbox
        if min(lo) < _COORD_MIN or max(hi) > _COORD_MAX:
            raise ShapeError("coordinates exceed the 32-bit range")
        if len(self) >= _ARRAY_THRESHOLD:
            ok = kernels.is_connected_xy(self.xy)
        else:
            ok = is_connected(self.cells)
        if not ok:
            raise ShapeError("cells are not connected")

    @property
    def cells(self) -> frozenset[Cell2]:
        if self._cells is None:
            self._cells = frozenset(map(tuple, self._xy.tolist()))
        return self._cells

    @property
    def xy(self) -> np.ndarray:
        """Cells as an ``(N, 2)`` int64 array sorted by (x, y)."""
        if self._xy is None:
            self._xy = np.array(sorted(self._cells), dtype=np.int64).reshape(-1, 2)
        return self._xy

    def __len__(self):
        return len(self._cells) if self._cells is not None else len(self._xy)

    @property
    def size(self) -> int:
        return len(self)

    def __iter__(self) -> Iterator[Cell2]:
        return iter(sorted(self.cells))

    def __contains__(self, c) -> bool:
        return tuple(c) in self.cells

    def __eq__(self, other):
        if not isinstance(other, Polyomino):
            return NotImplemented
        return self.cells == other.cells

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.cells)
        return self._hash

    def __repr__(self):
        if len(self) > 12:
            return f"Polyomino(<{len(self)} cells, bbox={self.bbox}>)"
        return f"Polyomino({sorted(self.cells)})"

    @property
    def bbox(self) -> tuple[Cell2, Cell2]:
        """``((min_x, min_y), (max_x, max_y))``."""
        if self._cells is not None and len(self._cells) < _ARRAY_THRESHOLD:
            xs = [c[0] for c in self._cells]
            ys = [c[1] for c in self._cells]
            return (min(xs), min(ys)), (max(xs), max(ys))
        xy = self.xy
        lo = xy.min(axis=0)
        hi = xy.max(axis=0)
        return (int(lo[0]), int(lo[1])), (int(hi[0]), int(hi[1]))

    @property
    def width(self) -> int:
        (x0, _), (x1, _) = self.bbox
        return x1 - x0 + 1

    @property
    def height(self) -> int:
        (_, y0), (_, y1) = self.bbox
        return y1 - y0 + 1

    def translate(self, dx: int, dy: int) -> Polyomino:
        if self._cells is None:
            return Polyomino.from_array(self._xy + np.array([dx, dy]), check=False)
        return Polyomino(((x + dx, y + dy) for x, y in self._cells), check=False)

    def without(self, t: Cell2) -> frozenset[Cell2]:
        """Cell set minus ``t`` (not necessarily a polyomino)."""
        return self.cells - {tuple(t)}

    @property
    def is_simple(self) -> bool:
        if self._simple is None:
            self._simple = is_simple(self)
        return self._simple


def as_polyomino(shape) -> Polyomino:
    return shape if isinstance(shape, Polyomino) else Polyomino(shape)


def canonicalize(P) -> Polyomino:
    """Translate so the bounding-box minimum sits at the origin."""
    P = as_polyomino(P)
    (x0, y0), _ = P.bbox
    if x0 == 0 and y0 == 0:
        return P
    return P.translate(-x0, -y0)


def canonical_key(cells) -> tuple[Cell2, ...]:
    """Sorted tuple of translated cells; equal keys mean congruent shapes."""
    x0 = min(c[0] for c in cells)
    y0 = min(c[1] for c in cells)
    return tuple(sorted((x - x0, y - y0) for x, y in cells))


def is_simple(P) -> bool:
    """True iff the complement of ``P`` is 4-connected (no holes).

    Counted through the Euler characteristic of the closed union of unit
    squares: holes = 1 - (V - E + F).  Runs in O(N log N) regardless of the
    bounding-box area.  :func:`is_simple_floodfill` is the direct check.
    """
    P = as_polyomino(P)
    return kernels.hole_count(P.xy) == 0


def is_simple_floodfill(P) -> bool:
    """Flood fill of the complement within the bounding box inflated by one."""
    P = as_polyomino(P)
    cells = P.cells
    (x0, y0), (x1, y1) = P.bbox
    x0, y0, x1, y1 = x0 - 1, y0 - 1, x1 + 1, y1 + 1
    empty = {
        (x, y)
        for x in range(x0, x1 + 1)
        for y in range(y0, y1 + 1)
        if (x, y) not in cells
    }
    start = (x0, y0)
    reached = _bfs_count(empty, start, neighbors)
    return reached == len(empty)


def convex_tiles(P) -> set[Cell2]:
    """Tiles that are alone in some 2x2 window of the lattice."""
    cells = as_polyomino(P).cells
    return {t for t in cells if is_convex(cells, t)}


def is_convex(cells, t: Cell2) -> bool:
    x, y = t
    for dx in (-1, 1):
        for dy in (-1, 1):
            if (x + dx, y) not in cells and (x, y + dy) not in cells and (x + dx, y + dy) not in cells:
                return True
    return False


def local_cut_rule(cells, t: Cell2) -> bool:
    """Cut test from the 3x3 neighbourhood; valid for convex tiles of simple shapes."""
    x, y = t
    nbrs = [(dx, dy) for dx, dy in ORTHO if (x + dx, y + dy) in cells]
    if len(nbrs) <= 1:
        return False
    if len(nbrs) == 2:
        (ax, ay), (bx, by) = nbrs
        if ax + bx == 0 and ay + by == 0:
            return True  # opposite neighbours
        return (x + ax + bx, y + ay + by) not in cells
    # three or more neighbours: not convex, so the local rule does not apply
    raise ValueError("local cut rule needs a convex tile")


def is_cut_tile(P, t: Cell2, *, validate: bool = False) -> bool:
    """True iff removing ``t`` disconnects ``P``.

    Convex tiles of simple polyominoes use the local 3x3 rule; everything else
    (and every call with ``validate=True``) falls back to a full connectivity
    check.  In validation mode a disagreement raises ``AssertionError``.
    """
    P = as_polyomino(P)
    t = tuple(t)
    cells = P.cells
    if t not in cells:
        raise ValueError(f"{t} is not a tile of the polyomino")
    if len(cells) == 1:
        return False
    exact = None
    if validate or not (P.is_simple and is_convex(cells, t)):
        exact = not is_connected(cells - {t})
        if not validate:
            return exact
    if P.is_simple and is_convex(cells, t):
        local = local_cut_rule(cells, t)
        if exact is not None and local != exact:
            raise AssertionError(f"local cut rule disagrees at {t}")
        return local
    return exact


def is_tree_shaped(P) -> bool:
    """True iff the dual grid graph is a tree (|E| = N - 1)."""
    cells = as_polyomino(P).cells
    edges = sum(1 for x, y in cells for n in ((x + 1, y), (x, y + 1)) if n in cells)
    return edges == len(cells) - 1


def enumerate_polyominoes(n: int, limit: int | None = None) -> Iterator[Polyomino]:
    """Yield every fixed polyomino with ``n`` cells once, in canonical form.

    Redelmeier's method: grow from the origin cell, only ever adding cells
    from an untried set restricted to ``y > 0 or (y == 0 and x >= 0)``.
    """
    limit = ENUMERATION_LIMIT if limit is None else limit
    if n < 1:
        raise ValueError("n must be positive")
    if n > limit:
        raise ResourceLimitError(f"enumeration of size {n} exceeds the cap {limit}")

    poly: list[Cell2] = []
    seen = {(0, 0)}

    def allowed(c):
        return c[1] > 0 or (c[1] == 0 and c[0] >= 0)

    def grow(untried: list[Cell2]):
        untried = list(untried)
        while untried:
            c = untried.pop()
            poly.append(c)
            if len(poly) == n:
                yield canonicalize(Polyomino(poly, check=False))
            else:
                fresh = [m for m in neighbors(c) if allowed(m) and m not in seen]
                seen.update(fresh)
                yield from grow(untried + fresh)
                seen.difference_update(fresh)
            poly.pop()

    yield from grow([(0, 0)])


def polyomino_census(n: int) -> int:
    return sum(1 for _ in enumerate_polyominoes(n))


# ---------------------------------------------------------------- ASCII I/O


def parse_grid(text: str) -> set[Cell2]:
    """Parse one ASCII layer: northmost row first, ``#`` tile, ``.`` empty."""
    lines = [ln.rstrip("\r") for ln in text.split("\n")]
    while lines and not lines[0].strip():
        lines.pop(0)
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ShapeFormatError("empty shape")
    cells = set()
    height = len(lines)
    for r, line in enumerate(lines):
        line = line.rstrip()
        if not line:
            raise ShapeFormatError(f"blank line inside shape (row {r + 1})")
        for x, ch in enumerate(line):
            if ch == "#":
                cells.add((x, height - 1 - r))
            elif ch != ".":
                raise ShapeFormatError(f"unexpected character {ch!r} in row {r + 1}")
    if not cells:
        raise ShapeFormatError("shape has no tiles")
    return cells


def parse_polyomino(text: str) -> Polyomino:
    cells = parse_grid(text)
    try:
        return Polyomino(cells)
    except ShapeError as exc:
        raise ShapeFormatError(str(exc)) from None


def format_grid(cells, fill: str = "#", empty: str = ".") -> str:
    cells = set(cells)
    x0 = min(c[0] for c in cells)
    y0 = min(c[1] for c in cells)
    x1 = max(c[0] for c in cells)
    y1 = max(c[1] for c in cells)
    rows = []
    for y in range(y1, y0 - 1, -1):
        rows.append("".join(fill if (x, y) in cells else empty for x in range(x0, x1 + 1)))
    return "\n".join(rows) + "\n"


def format_polyomino(P) -> str:
    return format_grid(as_polyomino(P).cells)


LAYER_SEPARATOR = "---"


def is_layered_text(text: str) -> bool:
    return any(ln.strip() == LAYER_SEPARATOR for ln in text.splitlines())


def parse_layers(text: str) -> set[Cell3]:
    """Parse z-layers (top first) separated by ``---`` lines."""
    chunks: list[list[str]] = [[]]
    for ln in text.splitlines():
        if ln.strip() == LAYER_SEPARATOR:
            chunks.append([])
        else:
            chunks[-1].append(ln)
    layers = []
    for chunk in chunks:
        body = "\n".join(chunk)
        if not body.strip():
            raise ShapeFormatError("empty layer")
        layers.append(body)
    # rows are counted from the tallest layer so all layers share one frame
    heights = []
    for body in layers:
        rows = [ln for ln in body.split("\n")]
        while rows and not rows[0].strip():
            rows.pop(0)
        while rows and not rows[-1].strip():
            rows.pop()
        heights.append(len(rows))
    top = max(heights)
    cells = set()
    nz = len(layers)
    for k, body in enumerate(layers):
        z = nz - 1 - k
        lines = body.split("\n")
        while lines and not lines[0].strip():
            lines.pop(0)
        while lines and not lines[-1].strip():
            lines.pop()
        for r, line in enumerate(lines):
            line = line.rstrip()
            if not line:
                raise ShapeFormatError("blank line inside layer")
            for x, ch in enumerate(line):
                if ch == "#":
                    cells.add((x, top - 1 - r, z))
                elif ch != ".":
                    raise ShapeFormatError(f"unexpected character {ch!r}")
    if not cells:
        raise ShapeFormatError("polycube has no cubes")
    return cells


def format_layers(cells) -> str:
    cells = set(cells)
    x0 = min(c[0] for c in cells)
    y0 = min(c[1] for c in cells)
    z0 = min(c[2] for c in cells)
    x1 = max(c[0] for c in cells)
    y1 = max(c[1] for c in cells)
    z1 = max(c[2] for c in cells)
    out = []
    for z in range(z1, z0 - 1, -1):
        rows = []
        for y in range(y1, y0 - 1, -1):
            rows.append("".join("#" if (x, y, z) in cells else "." for x in range(x0, x1 + 1)))
        out.append("\n".join(rows))
    return ("\n" + LAYER_SEPARATOR + "\n").join(out) + "\n"
