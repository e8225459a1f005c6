"""ASCII and SVG output for shapes and factory frames."""

from __future__ import annotations

from xml.sax.saxutils import quoteattr

from .grid import format_grid

CELL = 10
_FILL = {"tile": "#222222", "wall": "#9a9a9a", "depot": "#c0392b", "free": "#ffffff"}

FRAME_HEADER = "frame"


def shape_ascii(cells) -> str:
    return format_grid(cells)


def _svg(items, x0, y0, x1, y1, extra_groups=None) -> str:
    w = (x1 - x0 + 1) * CELL
    h = (y1 - y0 + 1) * CELL
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">']
    if extra_groups is None:
        extra_groups = [(None, items)]
    for gid, group in extra_groups:
        if gid is not None:
            out.append(f"<g id={quoteattr(gid)}>")
        for kind, (x, y) in group:
            px = (x - x0) * CELL
            py = (y1 - y) * CELL
            rid = f"{kind}-{x}-{y}" if gid is None else f"{gid}-{kind}-{x}-{y}"
            out.append(
                f'<rect id="{rid}" x="{px}" y="{py}" width="{CELL}" height="{CELL}" fill="{_FILL[kind]}"/>'
            )
        if gid is not None:
            out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _bounds(cells):
    xs = [c[0] for c in cells]
    ys = [c[1] for c in cells]
    return min(xs), min(ys), max(xs), max(ys)


def shape_svg(cells) -> str:
    """One square per tile, id ``tile-x-y`` in shape coordinates."""
    cells = sorted(set(cells))
    return _svg([("tile", c) for c in cells], *_bounds(cells))


def _grid_items(text: str):
    """Cells of an ASCII frame: '#' wall, 'o' tile, 'D' depot."""
    rows = [r for r in text.splitlines() if r.strip()]
    kinds = {"#": "wall", "o": "tile", "D": "depot"}
    items = []
    h = len(rows)
    for r, row in enumerate(rows):
        for x, ch in enumerate(row):
            if ch in kinds:
                items.append((kinds[ch], (x, h - 1 - r)))
            elif ch != ".":
                raise ValueError(f"unexpected character {ch!r}")
    return items, h, max(len(r) for r in rows)


def maze_svg(text: str) -> str:
    items, h, w = _grid_items(text)
    return _svg(items, 0, 0, w - 1, h - 1)


def format_frames(frames) -> str:
    """``frames`` is a list of (step, direction, ascii frame)."""
    out = []
    for g, d, body in frames:
        out.append(f"{FRAME_HEADER} {g} {d}")
        out.append(body.rstrip("\n"))
    return "\n".join(out) + "\n"


def parse_frames(text: str):
    frames = []
    cur = None
    for line in text.splitlines():
        if line.startswith(FRAME_HEADER + " "):
            _, g, d = line.split()
            cur = [int(g), d, []]
            frames.append(cur)
        elif cur is None:
            if line.strip():
                raise ValueError("frame file must start with a frame header")
        else:
            cur[2].append(line)
    return [(g, d, "\n".join(rows) + "\n") for g, d, rows in frames]


def is_frames_text(text: str) -> bool:
    return text.lstrip().startswith(FRAME_HEADER + " ")


def frames_svg(frames) -> str:
    """All frames in one document, one ``<g id="frame-g">`` group each."""
    groups = []
    w = h = 1
    for g, _d, body in frames:
        items, fh, fw = _grid_items(body)
        h, w = max(h, fh), max(w, fw)
        groups.append((f"frame-{g}", items))
    return _svg(None, 0, 0, w - 1, h - 1, groups)
