"""Array kernels behind the O(N log N) decider.

Tiles are numbered in (x, y) order, so a tile id is also its position in the
column-major sorted key array.  Per-lane ordered sets are the static sorted
key arrays plus skip pointers over removed entries (union-find with path
compression): a lane query is one binary search and a near-constant skip.

Everything here is plain numpy at the boundary; the loops run under numba
unless ``TILT_DISABLE_NUMBA`` is set.
"""

import numpy as np

from ._accel import njit

# neighbour slots: E, NE, N, NW, W, SW, S, SE
OFF8 = np.array([[1, 0], [1, 1], [0, 1], [-1, 1], [-1, 0], [-1, -1], [0, -1], [1, -1]], dtype=np.int64)

# direction codes shared with grid.DIRECTIONS
DIR_N, DIR_E, DIR_S, DIR_W = 0, 1, 2, 3


class Lattice:
    """Sorted-lane tables for a cell array (sorted by x, then y)."""

    __slots__ = ("x", "y", "ckey", "cstride", "rkey", "rstride", "rorder", "rpos", "nb", "origin")

    def __init__(self, xy):
        xy = np.asarray(xy, dtype=np.int64)
        lo = xy.min(axis=0)
        # shift so every coordinate (and its -1 neighbour) is nonnegative
        self.origin = lo - 1
        x = np.ascontiguousarray(xy[:, 0] - self.origin[0])
        y = np.ascontiguousarray(xy[:, 1] - self.origin[1])
        self.x, self.y = x, y
        self.cstride = int(y.max()) + 2
        self.rstride = int(x.max()) + 2
        ckey = x * self.cstride + y
        if len(ckey) > 1 and np.any(ckey[1:] <= ckey[:-1]):
            raise ValueError("cells must be sorted by (x, y) without duplicates")
        self.ckey = ckey
        rk = y * self.rstride + x
        self.rorder = np.argsort(rk, kind="stable").astype(np.int64)
        self.rkey = np.ascontiguousarray(rk[self.rorder])
        self.rpos = np.empty(len(x), dtype=np.int64)
        self.rpos[self.rorder] = np.arange(len(x), dtype=np.int64)
        self.nb = neighbor_table(x, y, ckey, self.cstride)

    def __len__(self):
        return len(self.x)


def neighbor_table(x, y, ckey, cstride):
    """``(N, 8)`` tile ids of the eight neighbours, -1 where empty."""
    n = len(x)
    nb = np.full((n, 8), -1, dtype=np.int64)
    for k in range(8):
        q = (x + OFF8[k, 0]) * cstride + (y + OFF8[k, 1])
        pos = np.searchsorted(ckey, q)
        pos_c = np.minimum(pos, n - 1)
        hit = ckey[pos_c] == q
        nb[:, k] = np.where(hit, pos_c, -1)
    return nb


@njit
def _connected_nb(nb):
    n = nb.shape[0]
    seen = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    seen[0] = True
    stack[0] = 0
    top = 1
    count = 1
    while top > 0:
        top -= 1
        u = stack[top]
        for k in range(0, 8, 2):
            v = nb[u, k]
            if v >= 0 and not seen[v]:
                seen[v] = True
                stack[top] = v
                top += 1
                count += 1
    return count == n


def is_connected_xy(xy) -> bool:
    if len(xy) == 0:
        return False
    lat = Lattice(xy)
    return bool(_connected_nb(lat.nb))


def hole_count(xy) -> int:
    """Holes of a connected cell set via the Euler characteristic."""
    xy = np.asarray(xy, dtype=np.int64)
    x = xy[:, 0] - xy[:, 0].min()
    y = xy[:, 1] - xy[:, 1].min()
    s = int(y.max()) + 3
    verts = np.concatenate([x * s + y, (x + 1) * s + y, x * s + y + 1, (x + 1) * s + y + 1])
    hedges = np.concatenate([x * s + y, x * s + y + 1])
    vedges = np.concatenate([x * s + y, (x + 1) * s + y])
    chi = len(np.unique(verts)) - len(np.unique(hedges)) - len(np.unique(vedges)) + len(xy)
    return 1 - chi


# ------------------------------------------------------------ lane queries


@njit
def _bisect_right(a, v):
    lo = 0
    hi = a.shape[0]
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] <= v:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit
def _bisect_left(a, v):
    lo = 0
    hi = a.shape[0]
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit
def _find(par, i):
    root = i
    while par[root] != root:
        root = par[root]
    while par[i] != root:
        nxt = par[i]
        par[i] = root
        i = nxt
    return root


@njit
def _lane_start(d, lane, u, x, y, ckey, cs, rkey, rs, rpos, nb):
    """Insertion point of tile u's position in the sorted key array of the
    lane at offset ``lane`` (right side for d = N/E, left side for S/W).
    Uses tile ids directly when the lane cell next to u exists."""
    if d == 0 or d == 2:
        if lane == 0:
            v = u
        else:
            v = nb[u, 0] if lane > 0 else nb[u, 4]
        if v >= 0:
            return v + 1 if d == 0 else v
        key = (x[u] + lane) * cs + y[u]
        return _bisect_right(ckey, key) if d == 0 else _bisect_left(ckey, key)
    if lane == 0:
        v = u
    else:
        v = nb[u, 2] if lane > 0 else nb[u, 6]
    if v >= 0:
        return rpos[v] + 1 if d == 1 else rpos[v]
    key = (y[u] + lane) * rs + x[u]
    return _bisect_right(rkey, key) if d == 1 else _bisect_left(rkey, key)


@njit
def _nearest(d, lane, u, x, y, ckey, cs, rkey, rs, rorder, rpos, nb, fcol, bcol, frow, brow):
    """Alive tile nearest to tile u strictly beyond it in direction ``d``
    within the lane at offset ``lane``; -1 if there is none."""
    n = x.shape[0]
    i = _lane_start(d, lane, u, x, y, ckey, cs, rkey, rs, rpos, nb)
    if d == 0:
        p = _find(fcol, i)
        if p < n and x[p] == x[u] + lane:
            return p
    elif d == 2:
        p = _find(bcol, i) - 1
        if p >= 0 and x[p] == x[u] + lane:
            return p
    elif d == 1:
        p = _find(frow, i)
        if p < n:
            t = rorder[p]
            if y[t] == y[u] + lane:
                return t
    else:
        p = _find(brow, i) - 1
        if p >= 0:
            t = rorder[p]
            if y[t] == y[u] + lane:
                return t
    return -1


# neighbour slots on each side (N, E, S, W): an alive one blocks that side
SIDE_SLOTS = np.array([[1, 2, 3], [7, 0, 1], [5, 6, 7], [3, 4, 5]], dtype=np.int64)


@njit
def _free_direction(u, x, y, ckey, cs, rkey, rs, rorder, rpos, fcol, bcol, frow, brow, nb, alive):
    """First direction (N, E, S, W) whose blocking set at tile u is empty."""
    for d in range(4):
        if _occ(nb, alive, u, SIDE_SLOTS[d, 0]) or _occ(nb, alive, u, SIDE_SLOTS[d, 1]) or _occ(nb, alive, u, SIDE_SLOTS[d, 2]):
            continue
        clear = True
        for lane in range(-1, 2):
            if _nearest(d, lane, u, x, y, ckey, cs, rkey, rs, rorder, rpos, nb, fcol, bcol, frow, brow) >= 0:
                clear = False
                break
        if clear:
            return d
    return -1


@njit
def _occ(nb, alive, u, k):
    v = nb[u, k]
    return v >= 0 and alive[v]


@njit
def _is_convex(nb, alive, u):
    for q in range(4):
        a = 2 * q
        if not _occ(nb, alive, u, a) and not _occ(nb, alive, u, a + 1) and not _occ(nb, alive, u, (a + 2) % 8):
            return True
    return False


@njit
def _local_cut(nb, alive, u):
    first = -1
    second = -1
    count = 0
    for k in range(0, 8, 2):
        if _occ(nb, alive, u, k):
            if first < 0:
                first = k
            else:
                second = k
            count += 1
    if count <= 1:
        return False
    if count > 2 or (second - first) == 4:
        return True
    # perpendicular pair: the diagonal between them must be present
    if second - first == 2:
        diag = first + 1
    else:
        diag = 7
    return not _occ(nb, alive, u, diag)


@njit
def _candidate_dir(u, forced, nb, alive, x, y, ckey, cs, rkey, rs, rorder, rpos, fcol, bcol, frow, brow):
    if u == forced or not alive[u]:
        return -1
    if not _is_convex(nb, alive, u):
        return -1
    if _local_cut(nb, alive, u):
        return -1
    return _free_direction(u, x, y, ckey, cs, rkey, rs, rorder, rpos, fcol, bcol, frow, brow, nb, alive)


@njit
def _greedy(x, y, ckey, cs, rkey, rs, rorder, rpos, nb, forced, seed):
    n = x.shape[0]
    alive = np.ones(n, dtype=np.bool_)
    fcol = np.arange(n + 1)
    bcol = np.arange(n + 1)
    frow = np.arange(n + 1)
    brow = np.arange(n + 1)
    inq = np.zeros(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    head = 0
    size = 0
    order = np.full(max(n - 1, 0), -1, dtype=np.int64)
    dirs = np.full(max(n - 1, 0), -1, dtype=np.int64)
    if seed >= 0:
        np.random.seed(seed)

    for u in range(n):
        if _candidate_dir(u, forced, nb, alive, x, y, ckey, cs, rkey, rs, rorder, rpos, fcol, bcol, frow, brow) >= 0:
            queue[(head + size) % n] = u
            size += 1
            inq[u] = True

    removed = 0
    max_reexam = 0
    while removed < n - 1 and size > 0:
        if seed >= 0 and size > 1:
            k = np.random.randint(0, size)
            a = (head + k) % n
            tmp = queue[a]
            queue[a] = queue[head]
            queue[head] = tmp
        u = queue[head]
        head = (head + 1) % n
        size -= 1
        inq[u] = False
        d = _candidate_dir(u, forced, nb, alive, x, y, ckey, cs, rkey, rs, rorder, rpos, fcol, bcol, frow, brow)
        if d < 0:
            continue
        alive[u] = False
        fcol[u] = u + 1
        bcol[u + 1] = u
        rp = rpos[u]
        frow[rp] = rp + 1
        brow[rp + 1] = rp
        order[removed] = u
        dirs[removed] = d
        removed += 1

        reexam = 0
        for dd in range(4):
            for lane in range(-1, 2):
                v = _nearest(dd, lane, u, x, y, ckey, cs, rkey, rs, rorder, rpos, nb, fcol, bcol, frow, brow)
                if v < 0 or inq[v]:
                    continue
                reexam += 1
                if _candidate_dir(v, forced, nb, alive, x, y, ckey, cs, rkey, rs, rorder, rpos, fcol, bcol, frow, brow) >= 0:
                    queue[(head + size) % n] = v
                    size += 1
                    inq[v] = True
        if reexam > max_reexam:
            max_reexam = reexam
    return order, dirs, removed, max_reexam


def greedy_decompose(xy, forced: int = -1, seed: int = -1):
    """Greedy convex-tile decomposition of a simple shape.

    ``xy`` must be sorted by (x, y); tile ids index into it.  Returns
    ``(order, dirs, removed, max_reexam)``: removal order of tile ids, the
    direction code each left by, how many were removed, and the largest
    number of frontier tiles re-examined after a single removal.  The shape
    decomposes iff ``removed == len(xy) - 1``.
    """
    lat = Lattice(xy)
    order, dirs, removed, max_reexam = _greedy(
        lat.x, lat.y, lat.ckey, lat.cstride, lat.rkey, lat.rstride,
        lat.rorder, lat.rpos, lat.nb, int(forced), int(seed),
    )
    return order[:removed], dirs[:removed], int(removed), int(max_reexam)
