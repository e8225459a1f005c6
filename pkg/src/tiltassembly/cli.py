"""Command line interface.

Exit codes: 0 yes/ok, 1 a definite no, 2 unsupported input or resource
limit, 64 malformed input or usage.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import cube3d, engine, maxtap, render, world
from .engine import ConstructionSequence, SequenceFormatError, Status
from .grid import (
    ENUMERATION_LIMIT,
    ResourceLimitError,
    ShapeError,
    enumerate_polyominoes,
    format_grid,
    format_layers,
    format_polyomino,
    is_layered_text,
    is_tree_shaped,
    parse_layers,
    parse_polyomino,
)

EXIT_OK, EXIT_NO, EXIT_UNSUPPORTED, EXIT_USAGE = 0, 1, 2, 64
_STATUS_EXIT = {
    Status.CONSTRUCTIBLE: EXIT_OK,
    Status.NOT_CONSTRUCTIBLE: EXIT_NO,
    Status.NOT_SUPPORTED: EXIT_UNSUPPORTED,
    Status.RESOURCE_LIMIT: EXIT_UNSUPPORTED,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _cell(text: str, dim: int = 2):
    try:
        vals = tuple(int(v) for v in text.replace(" ", "").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected {dim} comma-separated integers, got {text!r}") from None
    if len(vals) != dim:
        raise argparse.ArgumentTypeError(f"expected {dim} comma-separated integers, got {text!r}")
    return vals


def _cell3(text: str):
    return _cell(text, 3)


def _load_shape(path: str):
    """Polyomino, or a frozenset of 3D cells for layered files."""
    text = _read(path)
    if is_layered_text(text):
        return cube3d.as_polycube(parse_layers(text))
    return parse_polyomino(text)


def _load_sequence(path: str) -> ConstructionSequence:
    return ConstructionSequence.from_text(_read(path))


# ---------------------------------------------------------------- commands


def cmd_decide(args) -> int:
    shape = _load_shape(args.shape)
    if isinstance(shape, frozenset):
        res = cube3d.decide_polycube(shape, args.dirs, limit=args.limit or cube3d.CUBE_LIMIT)
    else:
        if args.exact:
            res = engine.decide_exact(shape, args.limit or engine.EXACT_LIMIT)
        else:
            res = engine.decide(shape, args.seed)
    print(res.status.value, file=sys.stderr)
    if res.reason:
        print(res.reason, file=sys.stderr)
    if res.constructible:
        _write(args.out, res.sequence.to_text())
    return _STATUS_EXIT[res.status]


def cmd_verify(args) -> int:
    P = parse_polyomino(_read(args.shape))
    rep = engine.verify(P, _load_sequence(args.sequence))
    print(rep.message)
    return EXIT_OK if rep.ok else EXIT_NO


def cmd_maxtap(args) -> int:
    P = parse_polyomino(_read(args.shape))
    method = args.method
    if method == "auto":
        method = "exact" if len(P) <= args.limit else "tree" if is_tree_shaped(P) else "shortest"
    try:
        if method == "exact":
            res = maxtap.exact_maxtap(P, args.limit)
        elif method == "tree":
            res = maxtap.path_result(P, maxtap.longest_sequential_path_tree(P), "tree_path_approx")
        else:
            res = maxtap.path_result(P, maxtap.longest_constructible_shortest_path(P), "shortest_path_approx")
    except ResourceLimitError as exc:
        print(f"resource_limit: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ValueError as exc:
        print(f"not_supported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    print(f"# {res.kind}: {res.size} of {len(P)} tiles")
    print(format_polyomino(res.subshape), end="")
    if args.out:
        _write(args.out, res.sequence.to_text())
    return EXIT_OK


def cmd_path(args) -> int:
    shape = _load_shape(args.shape)
    if isinstance(shape, frozenset):
        if args.source is None or args.target is None:
            raise UsageError("3D path search needs --from and --to")
        try:
            path = cube3d.constructible_path_3d(shape, _cell3(args.source), _cell3(args.target), args.dirs)
        except ResourceLimitError as exc:
            print(f"resource_limit: {exc}", file=sys.stderr)
            return EXIT_UNSUPPORTED
        if path is None:
            print("no constructible path", file=sys.stderr)
            return EXIT_NO
        for c in path:
            print("%d %d %d" % c)
        return EXIT_OK
    try:
        if is_tree_shaped(shape):
            path = maxtap.longest_sequential_path_tree(shape)
        else:
            path = maxtap.longest_constructible_shortest_path(shape)
    except ValueError as exc:
        print(f"not_supported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    for c in path:
        print("%d %d" % c)
    return EXIT_OK


def cmd_maze(args) -> int:
    text = _read(args.input)
    if any(ln.split()[:1] == ["seed"] for ln in text.splitlines()):
        seq = ConstructionSequence.from_text(text)
    else:
        res = engine.decide(parse_polyomino(text))
        if not res.constructible:
            print(res.status.value, file=sys.stderr)
            return _STATUS_EXIT[res.status]
        seq = res.sequence
    try:
        layout = world.generate_maze(seq, args.copies)
    except (engine.NoOpStep, ValueError) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_NO
    Path(args.prefix + ".maze").write_text(world.format_maze(layout))
    Path(args.prefix + ".sched").write_text(world.format_sidecar(layout))
    print(f"wrote {args.prefix}.maze and {args.prefix}.sched ({len(layout.depots)} depots, {layout.segments} turns)")
    return EXIT_OK


def cmd_simulate(args) -> int:
    sched = args.schedule or os.path.splitext(args.maze)[0] + ".sched"
    layout = world.parse_maze(_read(args.maze), _read(sched))
    frames = [] if args.frames else None
    rep = world.run_pipeline(layout, args.copies, args.budget, frames=frames)
    if args.trace:
        _write(args.trace, "\n".join(rep.trace) + "\n")
    if frames is not None:
        bounds = layout.bounds
        out = [(g, world.direction_at(g).value, world.format_world(w, bounds)) for g, w in enumerate(frames)]
        _write(args.frames, render.format_frames(out))
    print(f"copies {rep.produced}")
    print(f"unit_steps {rep.unit_steps}")
    print(f"first_copy_step {rep.first_complete_step}")
    print(f"exit_steps {' '.join(map(str, rep.exit_steps))}")
    print(f"congruent {' '.join('yes' if c else 'no' for c in rep.congruent)}")
    rate = rep.steady_rate
    print(f"steady_rate {rate:.3f} copies/cycle" if rate is not None else "steady_rate n/a")
    print(rep.message, file=sys.stderr if not rep.ok else sys.stdout)
    return EXIT_OK if rep.ok else EXIT_NO


def census_rows(max_n: int):
    """(n, shapes, simple, constructible, first non-constructible or None)."""
    rows = []
    for n in range(1, max_n + 1):
        total = simple = good = 0
        witness = None
        for P in enumerate_polyominoes(n):
            total += 1
            if P.is_simple:
                simple += 1
                ok = engine.decide_simple(P).constructible
            else:
                ok = engine.decide_exact(P, limit=max_n).constructible
            good += ok
            if not ok and witness is None:
                witness = P
        rows.append((n, total, simple, good, witness))
    return rows


def cmd_census(args) -> int:
    if args.max_n > ENUMERATION_LIMIT:
        print(f"resource_limit: census is capped at n={ENUMERATION_LIMIT}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    if args.max_n < 1:
        raise UsageError("--max-n must be positive")
    print("n\tshapes\tsimple\tconstructible\twitness")
    for n, total, simple, good, witness in census_rows(args.max_n):
        name = "-"
        if witness is not None:
            name = f"nonconstructible_{n}.txt"
            if args.witness_dir:
                Path(args.witness_dir).mkdir(parents=True, exist_ok=True)
                (Path(args.witness_dir) / name).write_text(format_polyomino(witness))
        print(f"{n}\t{total}\t{simple}\t{good}\t{name}")
    return EXIT_OK


def cmd_render(args) -> int:
    text = _read(args.input)
    if render.is_frames_text(text):
        frames = render.parse_frames(text)
        if args.format == "svg":
            _write(args.out, render.frames_svg(frames))
        else:
            _write(args.out, render.format_frames(frames))
        return EXIT_OK
    if is_layered_text(text):
        cells = parse_layers(text)
        if args.format == "svg":
            raise UsageError("svg output is 2D only")
        _write(args.out, format_layers(cells))
        return EXIT_OK
    if any(ch in text for ch in "oD"):
        if args.format == "svg":
            _write(args.out, render.maze_svg(text))
        else:
            _write(args.out, text)
        return EXIT_OK
    P = parse_polyomino(text)
    if args.format == "svg":
        _write(args.out, render.shape_svg(P.cells))
    else:
        _write(args.out, format_grid(P.cells))
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tilt", description="Tilt assembly toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("decide", help="decide constructibility and emit a sequence")
    d.add_argument("shape")
    d.add_argument("--seed", type=_cell, help="force the seed tile, as x,y")
    d.add_argument("--exact", action="store_true", help="exhaustive search (small shapes, holes allowed)")
    d.add_argument("--limit", type=int, default=None)
    d.add_argument("--dirs", default="all", choices=sorted(cube3d.PRESETS))
    d.add_argument("-o", "--out")
    d.set_defaults(func=cmd_decide)

    v = sub.add_parser("verify", help="replay a sequence against a shape")
    v.add_argument("shape")
    v.add_argument("sequence")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("maxtap", help="large constructible subshape")
    m.add_argument("shape")
    m.add_argument("--method", choices=["auto", "exact", "tree", "shortest"], default="auto")
    m.add_argument("--limit", type=int, default=engine.EXACT_LIMIT)
    m.add_argument("-o", "--out")
    m.set_defaults(func=cmd_maxtap)

    pa = sub.add_parser("path", help="constructible paths")
    pa.add_argument("shape")
    pa.add_argument("--from", dest="source")
    pa.add_argument("--to", dest="target")
    pa.add_argument("--dirs", default="all", choices=sorted(cube3d.PRESETS))
    pa.set_defaults(func=cmd_path)

    mz = sub.add_parser("maze", help="generate a pipelined factory")
    mz.add_argument("input", help="sequence file, or a shape file to decide first")
    mz.add_argument("--copies", "-D", type=int, default=3)
    mz.add_argument("--prefix", default="factory")
    mz.set_defaults(func=cmd_maze)

    s = sub.add_parser("simulate", help="run a factory")
    s.add_argument("maze")
    s.add_argument("schedule", nargs="?")
    s.add_argument("--copies", "-D", type=int, default=None)
    s.add_argument("--budget", type=int, default=None)
    s.add_argument("--trace")
    s.add_argument("--frames")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("census", help="enumerate and decide all small shapes")
    c.add_argument("--max-n", type=int, default=6)
    c.add_argument("--witness-dir")
    c.set_defaults(func=cmd_census)

    r = sub.add_parser("render", help="ascii or svg rendering")
    r.add_argument("input")
    r.add_argument("--format", choices=["ascii", "svg"], default="ascii")
    r.add_argument("-o", "--out")
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ShapeError, SequenceFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
