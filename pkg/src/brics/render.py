"""Static renderers: SVG for documents, ANSI backgrounds for terminals.

Geometry arrives as character-grid BlockRects; this module owns pixel
conversion (8x16 cells) and the per-depth outset that keeps nested
edges from coinciding. Renderers never recompute layout.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .refactor import FoldSpan
from .source import SourceText
from .viewmodel import DEFAULT_PALETTE, BlockRect, Palette

CELL_W = 8
CELL_H = 16
FONT_SIZE = 13
BASELINE = 12

# 256-color grayscale indices for the default palette, nearest-but-pinned:
# fills[0] -> 255, fills[1] -> 253, inactive -> 250.
_ANSI_PIN = {"#F5F5F5": 255, "#E8E8E8": 253, "#D0D0D0": 250}


def _ansi_index(color: str, palette: Palette) -> int:
    table = {
        palette.fills[0]: 255,
        palette.fills[1]: 253,
        palette.inactive_fill: 250,
    }
    if color in table:
        return table[color]
    if color in _ANSI_PIN:
        return _ANSI_PIN[color]
    # fall back to the nearest grayscale ramp entry (232..255 = 8+10k)
    value = int(color.lstrip("#")[0:2], 16)
    return 232 + max(0, min(23, round((value - 8) / 10)))


def render_svg(rects: list[BlockRect], fold_spans: list[FoldSpan],
               source: SourceText) -> str:
    """SVG document: block rectangles parent-before-child, then text.

    Each rect is outset by 2 px horizontally and 1 px vertically per
    level of (max_depth - depth), clamped at the canvas origin, so
    nested and sibling edges never coincide. Folded interiors omit
    their text lines; the placeholder is appended to the opener line.
    """
    max_depth = max((r.depth for r in rects), default=0)
    cols = 1 + max((len(l) for l in source.lines), default=0)
    width = cols * CELL_W + 2 * max_depth
    height = source.line_count * CELL_H + max_depth

    hidden: set[int] = set()
    placeholder_at: dict[int, str] = {}
    for span in fold_spans:
        hidden.update(range(span.first_hidden, span.last_hidden + 1))
        placeholder_at[span.first_hidden - 1] = span.placeholder

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}" '
        f'font-family="monospace" font-size="{FONT_SIZE}">'
    ]
    for r in rects:
        level = max_depth - r.depth
        x = max(0, r.left_col * CELL_W - 2 * level)
        y = max(0, (r.top_line - 1) * CELL_H - level)
        w = (r.right_col - r.left_col) * CELL_W + 4 * level
        h = (r.bottom_line - r.top_line + 1) * CELL_H + 2 * level
        parts.append(
            f'<rect x="{x}" y="{y}" width="{w}" height="{h}" '
            f'fill="{r.fill}" stroke="{r.outline}" stroke-width="1"/>')
    for number, content in enumerate(source.lines, start=1):
        if number in hidden:
            continue
        if number in placeholder_at:
            content = (content + " " if content.strip() else content)
            content += placeholder_at[number]
        if not content.strip():
            continue
        y = (number - 1) * CELL_H + BASELINE
        parts.append(
            f'<text x="0" y="{y}" xml:space="preserve">{escape(content)}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def render_ansi(rects: list[BlockRect], source: SourceText,
                palette: Palette = DEFAULT_PALETTE) -> str:
    """Terminal rendering with 256-color backgrounds.

    Every character cell gets the fill of the deepest covering rect;
    uncovered cells carry no background code. A reset ends every line,
    and stripping all escape codes reproduces the source text exactly.
    """
    out_lines: list[str] = []
    for number, content in enumerate(source.lines, start=1):
        covering = [r for r in rects
                    if r.top_line <= number <= r.bottom_line]
        chunks: list[str] = []
        current: int | None = None
        for col, ch in enumerate(content):
            bg = None
            for r in covering:
                if r.left_col <= col < r.right_col:
                    bg = _ansi_index(r.fill, palette)
            if bg != current:
                chunks.append("\x1b[0m" if bg is None else f"\x1b[48;5;{bg}m")
                current = bg
            chunks.append(ch)
        chunks.append("\x1b[0m")
        out_lines.append("".join(chunks))
    return "\n".join(out_lines)
