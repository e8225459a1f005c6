"""Global-control tilt simulation and spiral maze factories.

Motion directions use :class:`Direction` literally: a unit step ``s`` moves
every free assembly towards decreasing y.  A construction step that arrives
from ``n`` therefore corresponds to a unit step ``s``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from .engine import ConstructionSequence, ConstructionStep, Replayer, replay, verify
from .grid import Cell2, Direction, Polyomino, canonical_key, neighbors

W_, N_, E_, S_ = Direction.W, Direction.N, Direction.E, Direction.S
CYCLE = (W_, N_, E_, S_)
_INF = 1 << 40


class WorldError(ValueError):
    pass


@dataclass
class Depot:
    """Behavioural tile source: emits one tile at ``cell`` on every unit step
    ``g`` with ``g >= offset`` and ``(g - offset) % period == 0``, until
    ``capacity`` tiles have left."""

    cell: Cell2
    direction: Direction
    offset: int = 0
    period: int = 4
    capacity: int = 1
    emitted: int = 0

    def fires(self, g: int) -> bool:
        return self.emitted < self.capacity and g >= self.offset and (g - self.offset) % self.period == 0


@dataclass(frozen=True)
class SettleStats:
    direction: Direction
    moved: int
    merges: int
    iterations: int


class _DistanceField:
    """Free run length from every cell to the next obstacle, per direction."""

    def __init__(self, obstacles, extra=()):
        pts = list(obstacles) + list(extra)
        if not pts:
            pts = [(0, 0)]
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        self.x0, self.y0 = min(xs) - 1, min(ys) - 1
        w = max(xs) - self.x0 + 2
        h = max(ys) - self.y0 + 2
        occ = np.zeros((w, h), dtype=bool)
        for x, y in obstacles:
            occ[x - self.x0, y - self.y0] = True
        self.shape = (w, h)
        self.runs = {d: self._runs(occ, d) for d in CYCLE}

    @staticmethod
    def _runs(occ, d):
        w, h = occ.shape
        run = np.zeros((w, h), dtype=np.int64)
        if d.vertical:
            idx = range(h - 1, -1, -1) if d is N_ else range(h)
            prev = np.full(w, _INF, dtype=np.int64)
            nxt_occ = np.zeros(w, dtype=bool)
            for j in idx:
                prev = np.where(nxt_occ, 0, prev + 1)
                prev = np.minimum(prev, _INF)
                run[:, j] = prev
                nxt_occ = occ[:, j]
        else:
            idx = range(w - 1, -1, -1) if d is E_ else range(w)
            prev = np.full(h, _INF, dtype=np.int64)
            nxt_occ = np.zeros(h, dtype=bool)
            for i in idx:
                prev = np.where(nxt_occ, 0, prev + 1)
                prev = np.minimum(prev, _INF)
                run[i, :] = prev
                nxt_occ = occ[i, :]
        return run

    def free(self, c, d) -> int:
        i, j = c[0] - self.x0, c[1] - self.y0
        if 0 <= i < self.shape[0] and 0 <= j < self.shape[1]:
            return int(self.runs[d][i, j])
        return _INF


def _merge_adjacent(asms):
    """Union assemblies touching along an edge; returns (list, merge count)."""
    owner = {}
    for i, a in enumerate(asms):
        for c in a:
            owner[c] = i
    parent = list(range(len(asms)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    merges = 0
    for i, a in enumerate(asms):
        for x, y in a:
            for m in ((x + 1, y), (x, y + 1)):
                j = owner.get(m)
                if j is not None and j != i:
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[max(ri, rj)] = min(ri, rj)
                        merges += 1
    if not merges:
        return asms, 0
    groups: dict[int, set] = {}
    for i, a in enumerate(asms):
        groups.setdefault(find(i), set()).update(a)
    return [groups[k] for k in sorted(groups)], merges


class TiltWorld:
    """Fixed obstacles plus rigid sticky assemblies moved by global tilts."""

    def __init__(self, obstacles, assemblies=(), depots=(), sinks=()):
        self.obstacles = frozenset(map(tuple, obstacles))
        self.assemblies = [frozenset(map(tuple, a)) for a in assemblies]
        self.depots = [Depot(**vars(d)) for d in depots]
        self.sinks = frozenset(map(tuple, sinks))
        self._field = None
        self.validate()

    def validate(self):
        seen = set()
        for a in self.assemblies:
            if not a:
                raise WorldError("empty assembly")
            if a & self.obstacles:
                raise WorldError("assembly overlaps an obstacle")
            if a & seen:
                raise WorldError("assemblies overlap")
            seen |= a
            from .grid import is_connected

            if not is_connected(a):
                raise WorldError("assembly is not connected")

    def copy(self) -> TiltWorld:
        w = TiltWorld.__new__(TiltWorld)
        w.obstacles = self.obstacles
        w.assemblies = list(self.assemblies)
        w.depots = [Depot(**vars(d)) for d in self.depots]
        w.sinks = self.sinks
        w._field = self._field
        return w

    @property
    def tiles(self) -> int:
        return sum(len(a) for a in self.assemblies)

    def occupied(self) -> set[Cell2]:
        return set().union(*self.assemblies) if self.assemblies else set()

    def field(self) -> _DistanceField:
        if self._field is None:
            extra = [d.cell for d in self.depots] + list(self.sinks)
            for a in self.assemblies:
                extra.extend(a)
            self._field = _DistanceField(self.obstacles, extra)
        return self._field

    def emit(self, g: int, d: Direction | None = None) -> int:
        """Let every depot scheduled at unit step ``g`` release a tile."""
        occ = self.occupied()
        n = 0
        for dep in self.depots:
            if (d is None or dep.direction is d) and dep.fires(g):
                if dep.cell in occ:
                    raise WorldError(f"depot at {dep.cell} is still occupied")
                self.assemblies.append(frozenset([dep.cell]))
                dep.emitted += 1
                n += 1
        return n

    def step(self, d: Direction) -> SettleStats:
        """One unit step in place (see :func:`settle`)."""
        d = Direction.parse(d) if isinstance(d, str) else d
        vx, vy = d.vector
        fld = self.field()
        asms = [set(a) for a in self.assemblies]
        # track which original assemblies ever moved, through merges
        tags = [{i} for i in range(len(asms))]
        moved_tags: set[int] = set()
        merges = 0
        iters = 0
        while True:
            iters += 1
            asms, tags, m = _merge_tagged(asms, tags)
            merges += m
            free = [min(fld.free(c, d) for c in a) for a in asms]
            movers = [i for i, f in enumerate(free) if f > 0]
            if not movers:
                break
            k = min(free[i] for i in movers)
            stopped = [i for i, f in enumerate(free) if f == 0]
            if stopped:
                k = min(k, _contact_gap([asms[i] for i in movers], [asms[i] for i in stopped], d))
            if k >= _INF:
                raise WorldError(f"an assembly slides to infinity towards {d.value}; the world is not closed")
            for i in movers:
                asms[i] = {(x + k * vx, y + k * vy) for x, y in asms[i]}
                moved_tags |= tags[i]
        self.assemblies = [frozenset(a) for a in asms]
        return SettleStats(d, len(moved_tags), merges, iters)

    def collect(self) -> list[frozenset]:
        """Remove and return assemblies touching a sink cell."""
        if not self.sinks:
            return []
        out = [a for a in self.assemblies if a & self.sinks]
        if out:
            self.assemblies = [a for a in self.assemblies if not (a & self.sinks)]
        return out

    def configuration(self) -> frozenset:
        return frozenset(self.assemblies)


def _merge_tagged(asms, tags):
    merged, m = _merge_adjacent(asms)
    if not m:
        return asms, tags, 0
    idx = {}
    for k, a in enumerate(merged):
        for c in a:
            idx[c] = k
    new_tags = [set() for _ in merged]
    for a, t in zip(asms, tags):
        new_tags[idx[next(iter(a))]] |= t
    return merged, new_tags, m


def _contact_gap(movers, stopped, d) -> int:
    """Fewest ticks until some moving cell becomes edge-adjacent to a
    stopped assembly (all movers share one velocity)."""
    vx, vy = d.vector
    halo: dict[int, list[int]] = {}
    for a in stopped:
        for c in a:
            for m in neighbors(c):
                if m not in a:
                    lane, pos = (m[1], m[0] * vx) if vx else (m[0], m[1] * vy)
                    halo.setdefault(lane, []).append(pos)
    for v in halo.values():
        v.sort()
    best = _INF
    for a in movers:
        for x, y in a:
            lane, pos = (y, x * vx) if vx else (x, y * vy)
            row = halo.get(lane)
            if row:
                i = bisect.bisect_right(row, pos)
                if i < len(row):
                    best = min(best, row[i] - pos)
    return best


def settle(world: TiltWorld, d) -> TiltWorld:
    """Apply one unit step and return the settled world.

    Every assembly that is not held by an obstacle (directly, or through
    assemblies resting against it) advances one cell per tick; assemblies
    touching along an edge fuse before each tick, so a tile stops at the
    first position adjacent to a resting assembly.  Ticks repeat until
    nothing moves.  Long free runs are skipped in one jump.
    """
    w = world.copy()
    w.step(d)
    return w


# ------------------------------------------------------------------ mazes


def direction_at(g: int) -> Direction:
    """Unit step ``g`` of the factory schedule: ``s`` first, then w, n, e, s."""
    return S_ if g == 0 else CYCLE[(g - 1) % 4]


def cycle_of(g: int) -> int:
    return (g + 3) // 4


def normalize_sequence(seq: ConstructionSequence) -> ConstructionSequence:
    """Rewrite steps whose lane misses the current bounding box.

    Such a tile lands beside the box; it is then equally reachable from the
    side it sticks out of, and that lane crosses the box.
    """
    r = Replayer(seq.seed)
    x0 = x1 = seq.seed[0]
    y0 = y1 = seq.seed[1]
    out = []
    for i, s in enumerate(seq.steps):
        p = r.landing(s)
        if p is None:
            from .engine import NoOpStep

            raise NoOpStep(s, i)
        lo, hi = (x0, x1) if s.direction.vertical else (y0, y1)
        if not lo <= s.lane <= hi:
            if p[0] > x1:
                s = ConstructionStep(E_, p[1])
            elif p[0] < x0:
                s = ConstructionStep(W_, p[1])
            elif p[1] > y1:
                s = ConstructionStep(N_, p[0])
            else:
                s = ConstructionStep(S_, p[0])
            assert r.landing(s) == p
        r.add(p)
        out.append(s)
        x0, x1 = min(x0, p[0]), max(x1, p[0])
        y0, y1 = min(y0, p[1]), max(y1, p[1])
    return ConstructionSequence(tuple(seq.seed), tuple(out))


def _segment_dir(j: int) -> Direction:
    return S_ if j == 0 else CYCLE[(j - 1) % 4]


def _spiral(J: int):
    """Lattice points c_0..c_J; segment j has length ceil(j/2)."""
    pts = [(0, 0)]
    for j in range(1, J + 1):
        dx, dy = _segment_dir(j).vector
        x, y = pts[-1]
        pts.append((x + dx * ((j + 1) // 2), y + dy * ((j + 1) // 2)))
    return pts


@dataclass
class MazeLayout:
    obstacles: frozenset
    depots: list
    product: Polyomino
    copies: int
    sinks: frozenset
    corridor: int
    segments: int
    schedule: tuple = CYCLE
    tile_steps: tuple = ()  # unit step at which tile i of copy 0 attaches
    free: frozenset = field(default=frozenset(), repr=False)

    def world(self) -> TiltWorld:
        return TiltWorld(self.obstacles, (), self.depots, self.sinks)

    @property
    def bounds(self):
        xs = [c[0] for c in self.obstacles]
        ys = [c[1] for c in self.obstacles]
        return (min(xs), min(ys)), (max(xs), max(ys))


def generate_maze(seq: ConstructionSequence, copies: int) -> MazeLayout:
    """Spiral factory releasing ``copies`` translated copies of ``seq``'s shape.

    The spiral lives on a lattice of square blocks of side ``W`` (bounding
    box width + height + 2) at pitch ``W + 1``.  Segment j runs in direction
    w, n, e, s (repeating) over ceil(j/2) lattice steps; gaps between
    consecutive lattice points are open, all others are walls.  Tile i is
    attached during the first segment after tile i-1 whose direction matches
    its arrival; a straight one-cell lane leads from a depot outside the
    spiral to the attachment cell.  A straight exit after the last used
    segment ends in a sink block.
    """
    if copies < 1:
        raise ValueError("need at least one copy")
    built = replay(seq)
    rep = verify(Polyomino(built), seq)
    if not rep.ok:
        raise ValueError(f"sequence does not verify: {rep.message}")
    seq = normalize_sequence(seq)
    product = Polyomino(built)
    (bx0, by0), (bx1, by1) = product.bbox
    W = (bx1 - bx0 + 1) + (by1 - by0 + 1) + 2
    pitch = W + 1

    # map tiles to segments
    js = [0]
    for s in seq.steps:
        motion = s.direction.opposite
        j = js[-1] + 1
        while _segment_dir(j) is not motion:
            j += 1
        js.append(j)
    J = js[-1]
    pts = _spiral(J)
    exit_dir = _segment_dir(J + 1)
    ex, ey = exit_dir.vector
    exit_pts = [(pts[-1][0] + ex * k, pts[-1][1] + ey * k) for k in range(1, (J + 2) // 2 + 2)]
    path = [pts[0]]
    for b in pts[1:] + exit_pts:
        a = path[-1]
        while a != b:
            a = (a[0] + (b[0] > a[0]) - (b[0] < a[0]), a[1] + (b[1] > a[1]) - (b[1] < a[1]))
            path.append(a)

    def block(pt):
        return pt[0] * pitch, pt[1] * pitch  # lower-left cell

    free: set[Cell2] = set()
    for pt in path:
        ox, oy = block(pt)
        free.update((ox + i, oy + k) for i in range(W) for k in range(W))
    for a, b in zip(path, path[1:]):
        dx, dy = b[0] - a[0], b[1] - a[1]
        ox, oy = block(a)
        if dx:
            gx = ox + W if dx > 0 else ox - 1
            free.update((gx, oy + k) for k in range(W))
        else:
            gy = oy + W if dy > 0 else oy - 1
            free.update((ox + i, gy) for i in range(W))
    sx0, sy0 = block(exit_pts[-1])
    sinks = frozenset((sx0 + i, sy0 + k) for i in range(W) for k in range(W))

    # attachment cells of copy 0
    cells = [tuple(seq.seed)]
    r = Replayer(seq.seed)
    for s in seq.steps:
        cells.append(r.apply(s))
    ox, oy = block(pts[0])
    seed_abs = (ox + W // 2, oy)
    attach = [seed_abs]
    for i in range(1, len(cells)):
        part = cells[:i]
        j = js[i]
        px0 = min(c[0] for c in part)
        px1 = max(c[0] for c in part)
        py0 = min(c[1] for c in part)
        py1 = max(c[1] for c in part)
        bx, by = block(pts[j])
        dx = dy = None
        for side in (_segment_dir(j), _segment_dir(j - 1)):
            if side is E_:
                dx = bx + W - 1 - px1
            elif side is W_:
                dx = bx - px0
            elif side is N_:
                dy = by + W - 1 - py1
            else:
                dy = by - py0
        attach.append((cells[i][0] + dx, cells[i][1] + dy))

    xs = [c[0] for c in free]
    ys = [c[1] for c in free]
    lo_x, hi_x, lo_y, hi_y = min(xs) - 2, max(xs) + 2, min(ys) - 2, max(ys) + 2
    depots = []
    motions = [S_] + [s.direction.opposite for s in seq.steps]
    for i, (p, motion) in enumerate(zip(attach, motions)):
        vx, vy = motion.vector
        x, y = p
        while lo_x <= x <= hi_x and lo_y <= y <= hi_y:
            x, y = x - vx, y - vy
            free.add((x, y))
        depots.append(Depot((x, y), motion, js[i], 4, copies))
    xs = [c[0] for c in free]
    ys = [c[1] for c in free]
    fx0, fx1, fy0, fy1 = min(xs) - 1, max(xs) + 1, min(ys) - 1, max(ys) + 1
    obstacles = frozenset(
        (x, y) for x in range(fx0, fx1 + 1) for y in range(fy0, fy1 + 1) if (x, y) not in free
    )
    return MazeLayout(obstacles, depots, canonical_polyomino(product), copies, sinks, W, J, CYCLE, tuple(js), frozenset(free))


def canonical_polyomino(P) -> Polyomino:
    return Polyomino(canonical_key(P.cells), check=False)


# --------------------------------------------------------------- pipeline


@dataclass
class PipelineReport:
    produced: int
    unit_steps: int
    congruent: list
    exit_steps: list
    first_complete_step: int | None
    first_exit_step: int | None
    ok: bool
    message: str = ""
    trace: list = field(default_factory=list, repr=False)

    @property
    def cycles(self) -> int:
        return cycle_of(self.unit_steps - 1) if self.unit_steps else 0

    @property
    def steady_rate(self) -> float | None:
        """Copies per cycle between the first and the last exit."""
        if len(self.exit_steps) < 2:
            return None
        span = cycle_of(self.exit_steps[-1]) - cycle_of(self.exit_steps[0])
        return (len(self.exit_steps) - 1) / span if span else None

    def exited_by_cycle(self, c: int) -> int:
        return sum(1 for g in self.exit_steps if cycle_of(g) <= c)


def trace_line(g: int, st: SettleStats) -> str:
    return f"{g} {st.direction.value} moved={st.moved} merges={st.merges}"


def run_pipeline(layout: MazeLayout, D: int | None = None, budget: int | None = None, frames=None) -> PipelineReport:
    """Run the factory until ``D`` assemblies reached the sink.

    ``frames`` may be a list; the world after each unit step is appended.
    """
    D = layout.copies if D is None else D
    if D > layout.copies:
        raise ValueError(f"layout holds tiles for {layout.copies} copies, asked for {D}")
    n = len(layout.product)
    if budget is None:
        budget = 4 * (layout.segments + 2 + D) + 8
    world = layout.world()
    key = canonical_key(layout.product.cells)
    congruent, exits, trace = [], [], []
    first_complete = None
    g = 0
    while len(exits) < D and g < budget:
        d = direction_at(g)
        world.emit(g, d)
        st = world.step(d)
        trace.append(trace_line(g, st))
        if first_complete is None and any(len(a) >= n for a in world.assemblies):
            first_complete = g + 1
        for a in world.collect():
            exits.append(g)
            congruent.append(canonical_key(a) == key)
        if frames is not None:
            frames.append(world.copy())
        g += 1
    ok = len(exits) >= D and all(congruent)
    if len(exits) < D:
        msg = f"step budget {budget} exhausted after {len(exits)} of {D} copies"
    elif not all(congruent):
        msg = f"copy {congruent.index(False)} is not congruent to the product"
    else:
        msg = "ok"
    return PipelineReport(len(exits), g, congruent, exits, first_complete, exits[0] if exits else None, ok, msg, trace)


# ------------------------------------------------------------------ files


def format_maze(layout: MazeLayout) -> str:
    (x0, y0), (x1, y1) = layout.bounds
    dep = {d.cell: k for k, d in enumerate(layout.depots)}
    rows = []
    for y in range(y1, y0 - 1, -1):
        row = []
        for x in range(x0, x1 + 1):
            c = (x, y)
            row.append("#" if c in layout.obstacles else "D" if c in dep else ".")
        rows.append("".join(row))
    return "\n".join(rows) + "\n"


def format_sidecar(layout: MazeLayout) -> str:
    (x0, y0), _ = layout.bounds
    sx = [c[0] for c in layout.sinks]
    sy = [c[1] for c in layout.sinks]
    lines = [
        "# unit step 0 is s, then the cycle repeats",
        "origin %d %d" % (x0, y0),
        "cycle " + " ".join(d.value for d in layout.schedule),
        "copies %d" % layout.copies,
        "corridor %d" % layout.corridor,
        "segments %d" % layout.segments,
        "sink %d %d %d %d" % (min(sx), min(sy), max(sx), max(sy)),
    ]
    for k, d in enumerate(layout.depots):
        lines.append(f"depot {k} {d.cell[0]} {d.cell[1]} {d.direction.value} {d.offset} {d.period} {d.capacity}")
    for row in _product_rows(layout.product):
        lines.append("product " + row)
    return "\n".join(lines) + "\n"


def _product_rows(P):
    from .grid import format_polyomino

    return format_polyomino(P).split()


def parse_maze(grid_text: str, sidecar_text: str) -> MazeLayout:
    """Rebuild a layout from a maze grid and its sidecar."""
    from .grid import parse_polyomino

    meta: dict = {}
    depots = {}
    product_rows = []
    for raw in sidecar_text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, *rest = line.split()
        if key == "depot":
            k, x, y, d, off, per, cap = rest
            depots[int(k)] = Depot((int(x), int(y)), Direction.parse(d), int(off), int(per), int(cap))
        elif key == "product":
            product_rows.append(rest[0])
        elif key == "cycle":
            meta[key] = tuple(Direction.parse(t) for t in rest)
        else:
            meta[key] = [int(t) for t in rest]
    if "origin" not in meta or not product_rows:
        raise ValueError("sidecar lacks origin or product lines")
    x0, y0 = meta["origin"]
    rows = [r for r in grid_text.splitlines() if r.strip()]
    obstacles = set()
    marks = set()
    for k, row in enumerate(rows):
        y = y0 + len(rows) - 1 - k
        for i, ch in enumerate(row):
            if ch == "#":
                obstacles.add((x0 + i, y))
            elif ch == "D":
                marks.add((x0 + i, y))
            elif ch != ".":
                raise ValueError(f"unexpected character {ch!r} in maze grid")
    dep_list = [depots[k] for k in sorted(depots)]
    if {d.cell for d in dep_list} != marks:
        raise ValueError("depot markers disagree with the sidecar")
    sx0, sy0, sx1, sy1 = meta["sink"]
    sinks = frozenset((x, y) for x in range(sx0, sx1 + 1) for y in range(sy0, sy1 + 1))
    product = parse_polyomino("\n".join(product_rows))
    return MazeLayout(
        frozenset(obstacles),
        dep_list,
        canonical_polyomino(product),
        meta.get("copies", [max((d.capacity for d in dep_list), default=1)])[0],
        sinks,
        meta.get("corridor", [0])[0],
        meta.get("segments", [0])[0],
        meta.get("cycle", CYCLE),
    )


def format_world(world: TiltWorld, bounds=None) -> str:
    """ASCII frame: '#' wall, 'o' tile, 'D' depot, '.' free."""
    occ = world.occupied()
    dep = {d.cell for d in world.depots}
    pts = list(world.obstacles) + list(occ) + list(dep)
    if bounds is None:
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        bounds = (min(xs), min(ys)), (max(xs), max(ys))
    (x0, y0), (x1, y1) = bounds
    rows = []
    for y in range(y1, y0 - 1, -1):
        rows.append(
            "".join(
                "#" if (x, y) in world.obstacles else "o" if (x, y) in occ else "D" if (x, y) in dep else "."
                for x in range(x0, x1 + 1)
            )
        )
    return "\n".join(rows) + "\n"
