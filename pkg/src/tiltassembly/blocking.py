"""Per-lane ordered sets answering blocked-from-direction queries."""

from __future__ import annotations

from sortedcontainers import SortedList

from .grid import DIRECTIONS, Cell2, Direction


class BlockingIndex:
    """Column and row indexes over a mutable tile set.

    ``columns[x]`` holds the y-coordinates of tiles in column x and
    ``rows[y]`` the x-coordinates in row y.  Empty lanes are dropped, so every
    tile lives in exactly two ordered sets.
    """

    __slots__ = ("columns", "rows", "size")

    def __init__(self, cells=()):
        self.columns: dict[int, SortedList] = {}
        self.rows: dict[int, SortedList] = {}
        self.size = 0
        for c in cells:
            self.insert(c)

    @classmethod
    def build(cls, P) -> BlockingIndex:
        return cls(P.cells if hasattr(P, "cells") else P)

    def __len__(self):
        return self.size

    def __contains__(self, c) -> bool:
        x, y = c
        col = self.columns.get(x)
        return col is not None and y in col

    def cells(self) -> set[Cell2]:
        return {(x, y) for x, col in self.columns.items() for y in col}

    def insert(self, t: Cell2) -> None:
        x, y = t
        if t in self:
            raise KeyError(f"{t} already indexed")
        self.columns.setdefault(x, SortedList()).add(y)
        self.rows.setdefault(y, SortedList()).add(x)
        self.size += 1

    def remove(self, t: Cell2) -> None:
        x, y = t
        if t not in self:
            raise KeyError(f"{t} not indexed")
        col = self.columns[x]
        col.remove(y)
        if not col:
            del self.columns[x]
        row = self.rows[y]
        row.remove(x)
        if not row:
            del self.rows[y]
        self.size -= 1

    def nearest(self, p: Cell2, d: Direction, offset: int = 0) -> Cell2 | None:
        """Closest tile strictly beyond ``p`` in direction ``d``, searched in
        the lane shifted by ``offset`` (-1, 0 or +1)."""
        x, y = p
        if d is Direction.N or d is Direction.S:
            lane = x + offset
            col = self.columns.get(lane)
            if col is None:
                return None
            if d is Direction.N:
                i = col.bisect_right(y)
                return (lane, col[i]) if i < len(col) else None
            i = col.bisect_left(y)
            return (lane, col[i - 1]) if i > 0 else None
        lane = y + offset
        row = self.rows.get(lane)
        if row is None:
            return None
        if d is Direction.E:
            i = row.bisect_right(x)
            return (row[i], lane) if i < len(row) else None
        i = row.bisect_left(x)
        return (row[i - 1], lane) if i > 0 else None

    def is_blocked(self, p: Cell2, d: Direction) -> bool:
        """True iff some tile lies beyond ``p`` in direction ``d`` within the
        three lanes around it (the blocking set is nonempty)."""
        x, y = p
        if d is Direction.N:
            for lane in (x - 1, x, x + 1):
                col = self.columns.get(lane)
                if col and col[-1] > y:
                    return True
            return False
        if d is Direction.S:
            for lane in (x - 1, x, x + 1):
                col = self.columns.get(lane)
                if col and col[0] < y:
                    return True
            return False
        if d is Direction.E:
            for lane in (y - 1, y, y + 1):
                row = self.rows.get(lane)
                if row and row[-1] > x:
                    return True
            return False
        for lane in (y - 1, y, y + 1):
            row = self.rows.get(lane)
            if row and row[0] < x:
                return True
        return False

    def free_directions(self, p: Cell2) -> list[Direction]:
        return [d for d in DIRECTIONS if not self.is_blocked(p, d)]

    def first_free_direction(self, p: Cell2) -> Direction | None:
        for d in DIRECTIONS:
            if not self.is_blocked(p, d):
                return d
        return None

    def frontier_after_removal(self, t: Cell2) -> set[Cell2]:
        """Tiles whose blocked/convex/candidate status can change after ``t``
        was removed: the nearest tile in each direction along each of the
        three lanes around ``t``."""
        out = set()
        for d in DIRECTIONS:
            for off in (-1, 0, 1):
                q = self.nearest(t, d, off)
                if q is not None:
                    out.add(q)
        return out
