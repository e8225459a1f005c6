"""Shared fixtures data and small generators for the test-suite."""

from tiltassembly.grid import Polyomino, parse_polyomino

# A 19-tile hole-free path whose two end tiles are boxed in from all four
# sides by the path itself.  Found by a walk search.  Exhaustive enumeration
# finds no non-constructible simple polyomino with at most 14 tiles.
WITNESS_TEXT = """\
####
#..#
#.##
#...
#.##
#..#
####
"""


def witness_shape() -> Polyomino:
    return parse_polyomino(WITNESS_TEXT)


def random_polyomino(rng, n: int) -> Polyomino:
    cells = {(0, 0)}
    while len(cells) < n:
        x, y = rng.choice(sorted(cells))
        dx, dy = rng.choice(((1, 0), (-1, 0), (0, 1), (0, -1)))
        cells.add((x + dx, y + dy))
    return Polyomino(cells)


def rect(w: int, h: int) -> Polyomino:
    return Polyomino({(x, y) for x in range(w) for y in range(h)})
