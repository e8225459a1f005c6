"""Largest constructible subshapes and constructible paths."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .blocking import BlockingIndex
from .engine import (
    EXACT_LIMIT,
    ConstructionSequence,
    ConstructionStep,
    decide_exact,
    is_decomposable,
    step_lane,
)
from .grid import Cell2, Polyomino, ResourceLimitError, as_polyomino, is_connected, is_tree_shaped, neighbors

TilePath = tuple[Cell2, ...]


@dataclass(frozen=True)
class MaxTapResult:
    subshape: Polyomino
    sequence: ConstructionSequence
    kind: str  # "exact", "tree_path_approx" or "shortest_path_approx"

    @property
    def size(self) -> int:
        return len(self.subshape)


def exact_maxtap(P, limit: int = EXACT_LIMIT) -> MaxTapResult:
    """Largest connected constructible subset of ``P`` (exponential search).

    Only tiles that are actually placed can block, so a subset qualifies iff
    it is constructible on its own.  Subsets are visited level by level from
    ``P`` downwards; every connected subset is reachable by peeling non-cut
    tiles, so the first level holding a constructible subset is optimal.
    """
    P = as_polyomino(P)
    if len(P) > limit:
        raise ResourceLimitError(f"exact MaxTAP capped at {limit} tiles, got {len(P)}")
    level = {P.cells}
    while level:
        hits = [S for S in level if is_decomposable(S)]
        if hits:
            best = min(hits, key=lambda S: sorted(S))
            sub = Polyomino(best, check=False)
            return MaxTapResult(sub, decide_exact(sub, limit).sequence, "exact")
        nxt = set()
        for S in level:
            for t in S:
                rest = S - {t}
                if rest not in nxt and is_connected(rest):
                    nxt.add(rest)
        level = nxt
    raise AssertionError("a single tile is always constructible")


# ------------------------------------------------------------- paths


def check_path(path) -> TilePath:
    path = tuple(tuple(c) for c in path)
    if not path:
        raise ValueError("empty path")
    if len(set(path)) != len(path):
        raise ValueError("path revisits a cell")
    for a, b in zip(path, path[1:]):
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            raise ValueError(f"{a} and {b} are not adjacent")
    return path


def is_path_sequentially_constructible(path) -> bool:
    """True iff the path can be built tile by tile in its own order."""
    path = check_path(path)
    idx = BlockingIndex([path[0]])
    for c in path[1:]:
        if idx.first_free_direction(c) is None:
            return False
        idx.insert(c)
    return True


def path_sequence(path) -> ConstructionSequence:
    """Construction sequence building ``path`` in order from its first cell."""
    path = check_path(path)
    idx = BlockingIndex([path[0]])
    steps = []
    for c in path[1:]:
        d = idx.first_free_direction(c)
        if d is None:
            raise ValueError(f"path is blocked at {c}")
        steps.append(ConstructionStep(d, step_lane(c, d)))
        idx.insert(c)
    return ConstructionSequence(path[0], tuple(steps))


def _better(path, best) -> bool:
    return len(path) > len(best) or (len(path) == len(best) and tuple(path) < tuple(best))


def _longest_from(root, children) -> list:
    """DFS from ``root`` along ``children``; a child whose insertion is
    blocked is skipped together with everything below it."""
    idx = BlockingIndex([root])
    path = [root]
    best = [root]
    its = [iter(children(root, None))]
    while its:
        nxt = next(its[-1], None)
        if nxt is None:
            its.pop()
            idx.remove(path.pop())
            continue
        if idx.first_free_direction(nxt) is None:
            continue
        idx.insert(nxt)
        path.append(nxt)
        if _better(path, best):
            best = list(path)
        its.append(iter(children(nxt, path[-2])))
    return best


def longest_sequential_path_tree(P) -> TilePath:
    """Longest sequentially constructible path of a tree-shaped polyomino.

    One DFS per start tile, O(N^2 log N) overall.  Ties go to the
    lexicographically smallest cell sequence.
    """
    P = as_polyomino(P)
    if not is_tree_shaped(P):
        raise ValueError("polyomino is not tree-shaped")
    cells = P.cells

    def children(c, parent):
        return sorted(m for m in neighbors(c) if m in cells and m != parent)

    best: list = []
    for s in sorted(cells):
        cand = _longest_from(s, children)
        if not best or _better(cand, best):
            best = cand
    return tuple(best)


def bfs_children(cells, root) -> dict:
    """Children lists of a breadth-first tree (neighbours in sorted order)."""
    kids = {root: []}
    todo = deque([root])
    while todo:
        c = todo.popleft()
        for m in sorted(neighbors(c)):
            if m in cells and m not in kids:
                kids[m] = []
                kids[c].append(m)
                todo.append(m)
    return kids


def longest_constructible_shortest_path(P) -> TilePath:
    """Longest sequentially constructible shortest path in a simple polyomino.

    Every root-to-node path of a BFS tree is a shortest path, and for simple
    shapes one shortest path per pair decides for all of them, so a DFS over
    each BFS tree suffices.
    """
    P = as_polyomino(P)
    if not P.is_simple:
        raise ValueError("polyomino has holes")
    cells = P.cells
    best: list = []
    for s in sorted(cells):
        kids = bfs_children(cells, s)
        cand = _longest_from(s, lambda c, parent: kids[c])
        if not best or _better(cand, best):
            best = cand
    return tuple(best)


def path_result(P, path, kind: str) -> MaxTapResult:
    sub = Polyomino(path, check=False)
    return MaxTapResult(sub, path_sequence(path), kind)


@dataclass(frozen=True)
class SqrtBound:
    path: TilePath
    optimum: int | None
    ratio: float | None

    @property
    def length(self) -> int:
        return len(self.path)

    @property
    def holds(self) -> bool | None:
        """(2 * length)^2 >= optimum, when the optimum is known."""
        if self.optimum is None:
            return None
        return (2 * self.length) ** 2 >= self.optimum


def maxtap_sqrt_bound(P, limit: int = EXACT_LIMIT) -> SqrtBound:
    """Best sequential path of a tree-shaped polyomino with its certificate.

    ``ratio`` is ``4 * length**2 / OPT`` where the exact optimum is affordable.
    """
    P = as_polyomino(P)
    path = longest_sequential_path_tree(P)
    if len(P) > limit:
        return SqrtBound(path, None, None)
    opt = exact_maxtap(P, limit).size
    return SqrtBound(path, opt, 4 * len(path) ** 2 / opt)
