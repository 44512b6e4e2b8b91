"""Drawable geometry derived from a block tree.

Two consumers share this layer: the editor pane (character-grid
rectangles with alternating fills) and the overview minimap (the same
rectangles scaled by one uniform factor so block shapes keep their
aspect ratio). Conditional-compilation activity is computed here as
well because it only affects coloring.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .blockparse import BlockTree, CodeMask, scan_mask
from .errors import DirectiveExprError, GeometryMismatchError, RangeError
from .grammar import BlockKind, StructureGrammar
from .source import SourceText


def _parse_hex(color: str) -> tuple[int, int, int]:
    value = color.lstrip("#")
    return int(value[0:2], 16), int(value[2:4], 16), int(value[4:6], 16)


def _format_hex(rgb: tuple[int, int, int]) -> str:
    return "#{:02X}{:02X}{:02X}".format(*rgb)


@dataclass(frozen=True)
class Palette:
    """Fill colors for nested blocks; two fills alternate by depth."""

    fills: tuple[str, str] = ("#F5F5F5", "#E8E8E8")
    outline_darken: float = 0.12
    inactive_fill: str = "#D0D0D0"
    error_color: str = "#CC0000"

    def __post_init__(self):
        if len(self.fills) != 2 or self.fills[0] == self.fills[1]:
            raise ValueError("palette needs two distinct fills")
        if not 0 < self.outline_darken < 1:
            raise ValueError("outline_darken must be in (0, 1)")


DEFAULT_PALETTE = Palette()


def darken(color: str, fraction: float) -> str:
    """Per-channel round(channel * (1 - fraction))."""
    rgb = _parse_hex(color)
    return _format_hex(tuple(round(c * (1.0 - fraction)) for c in rgb))


def shade_for_depth(palette: Palette, depth: int) -> tuple[str, str]:
    """(fill, outline) for a block at the given nesting depth."""
    fill = palette.fills[depth % 2]
    return fill, darken(fill, palette.outline_darken)


@dataclass(frozen=True)
class BlockRect:
    """Character-grid rectangle for one block.

    Lines are 1-based inclusive; columns 0-based, right exclusive.
    """

    block_id: int
    top_line: int
    bottom_line: int
    left_col: int
    right_col: int
    depth: int
    fill: str
    outline: str
    active: bool = True

    def contains_cell(self, line: int, col: int) -> bool:
        return (self.top_line <= line <= self.bottom_line
                and self.left_col <= col < self.right_col)

    def to_dict(self) -> dict:
        return {
            "blockId": self.block_id,
            "topLine": self.top_line,
            "bottomLine": self.bottom_line,
            "leftCol": self.left_col,
            "rightCol": self.right_col,
            "depth": self.depth,
            "fill": self.fill,
            "outline": self.outline,
            "active": self.active,
        }


@dataclass(frozen=True)
class ActivityError:
    block_id: int
    line: int
    code: str
    message: str


@dataclass(frozen=True)
class ActivityMap:
    """Active flag per conditional_region block id for one define set."""

    active: dict[int, bool] = field(default_factory=dict)
    errors: tuple[ActivityError, ...] = ()

    def is_active(self, block_id: int) -> bool:
        return self.active.get(block_id, True)


def _indent_of(line: str) -> int:
    return len(line) - len(line.lstrip(" \t"))


def editor_rects(tree: BlockTree, source: SourceText, palette: Palette = DEFAULT_PALETTE,
                 activity: Optional[ActivityMap] = None) -> list[BlockRect]:
    """Rectangles in parent-before-child order; later entries paint on top.

    left_col is the minimum first-non-space column over the block's
    non-blank lines (the opener line's indent when every line is
    blank); right_col is one past the longest line in the range.
    Conditional regions marked inactive by the activity map take the
    palette's inactive fill.
    """
    rects: list[BlockRect] = []
    for node in tree.nodes:
        if node.last_line > source.line_count:
            raise GeometryMismatchError(
                f"block {node.id} ends at line {node.last_line}, "
                f"source has {source.line_count}")
        lines = source.lines[node.first_line - 1:node.last_line]
        non_blank = [l for l in lines if l.strip()]
        if non_blank:
            left = min(_indent_of(l) for l in non_blank)
        else:
            left = _indent_of(source.lines[node.open_line - 1])
        right = 1 + max(len(l) for l in lines)
        fill, outline = shade_for_depth(palette, node.depth)
        active = True
        if activity is not None and node.kind is BlockKind.CONDITIONAL_REGION:
            active = activity.is_active(node.id)
            if not active:
                fill = palette.inactive_fill
                outline = darken(fill, palette.outline_darken)
        rects.append(BlockRect(node.id, node.first_line, node.last_line,
                               left, right, node.depth, fill, outline, active))
    return rects


@dataclass(frozen=True)
class OverviewRect:
    """One block in the minimap: clipped character extents plus the
    exact pixel geometry (char extents times the uniform scale)."""

    block_id: int
    depth: int
    top_line: int
    bottom_line: int
    left_col: int
    right_col: int
    x: float
    y: float
    w: float
    h: float
    fill: str
    outline: str
    active: bool = True

    def to_dict(self) -> dict:
        return {
            "blockId": self.block_id,
            "depth": self.depth,
            "x": self.x, "y": self.y, "w": self.w, "h": self.h,
            "fill": self.fill,
            "outline": self.outline,
            "active": self.active,
        }


@dataclass(frozen=True)
class OverviewModel:
    scale: float
    width: int
    height: int
    from_line: int
    to_line: int
    granularity: int
    rects: tuple[OverviewRect, ...]
    error_lines: tuple[float, ...] = ()
    error_color: str = "#CC0000"

    def to_dict(self) -> dict:
        return {
            "scale": self.scale,
            "width": self.width,
            "height": self.height,
            "from": self.from_line,
            "to": self.to_line,
            "granularity": self.granularity,
            "rects": [r.to_dict() for r in self.rects],
            "errorLines": list(self.error_lines),
            "errorColor": self.error_color,
        }


def overview_model(tree: BlockTree, source: SourceText, view_w: int, view_h: int,
                   granularity: int, zoom: Optional[tuple[int, int]] = None,
                   palette: Palette = DEFAULT_PALETTE,
                   activity: Optional[ActivityMap] = None) -> OverviewModel:
    """Scaled-down model of the zoom range.

    One uniform scale applies to both axes: s = min(view_w / doc_cols,
    view_h / doc_lines), where doc_cols is one past the longest line in
    the zoom range (matching right_col) and doc_lines the range height.
    Blocks with depth <= granularity whose lines intersect the range are
    included, clipped to it; pixel geometry is the exact product of the
    clipped character extents and s.
    """
    a, b = zoom if zoom is not None else (1, source.line_count)
    if not (1 <= a <= b <= source.line_count):
        raise RangeError(f"zoom [{a},{b}] outside document (1..{source.line_count})")
    if granularity < 0:
        raise RangeError("granularity must be >= 0")
    if view_w <= 0 or view_h <= 0:
        raise RangeError("view dimensions must be positive")

    doc_lines = b - a + 1
    doc_cols = 1 + max(len(l) for l in source.lines[a - 1:b])
    scale = min(view_w / doc_cols, view_h / doc_lines)

    out: list[OverviewRect] = []
    for rect in editor_rects(tree, source, palette, activity):
        if rect.depth > granularity:
            continue
        if rect.bottom_line < a or rect.top_line > b:
            continue
        top = max(rect.top_line, a)
        bottom = min(rect.bottom_line, b)
        right = min(rect.right_col, doc_cols)
        left = min(rect.left_col, right - 1)
        out.append(OverviewRect(
            rect.block_id, rect.depth, top, bottom, left, right,
            x=left * scale, y=(top - a) * scale,
            w=(right - left) * scale, h=(bottom - top + 1) * scale,
            fill=rect.fill, outline=rect.outline, active=rect.active))
    return OverviewModel(scale, view_w, view_h, a, b, granularity, tuple(out),
                         error_color=palette.error_color)


def mark_errors(model: OverviewModel, error_lines: Iterable[int]) -> OverviewModel:
    """Add a full-width error line at y = (L - from) * scale per error
    line L inside the zoom range; duplicates collapse (idempotent)."""
    ys = set(model.error_lines)
    for line in error_lines:
        if model.from_line <= line <= model.to_line:
            ys.add((line - model.from_line) * model.scale)
    return replace(model, error_lines=tuple(sorted(ys)))


# ---------------------------------------------------------------------------
# conditional-compilation activity

class _ExprScanner:
    """Tokenizer + recursive-descent parser for directive expressions:
    defined(NAME), !, &&, ||, parentheses."""

    def __init__(self, text: str, defines: frozenset):
        self.text = text
        self.defines = defines
        self.pos = 0

    def error(self, what: str) -> DirectiveExprError:
        return DirectiveExprError(f"{what} in directive expression {self.text!r}")

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def eat(self, literal: str) -> bool:
        self.skip_ws()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def ident(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum()
                                             or self.text[self.pos] == "_"):
            self.pos += 1
        word = self.text[start:self.pos]
        if not word or word[0].isdigit():
            raise self.error("expected identifier")
        return word

    def parse(self) -> bool:
        value = self.disjunction()
        if not self.at_end():
            raise self.error("trailing input")
        return value

    def disjunction(self) -> bool:
        value = self.conjunction()
        while self.eat("||"):
            value = self.conjunction() or value
        return value

    def conjunction(self) -> bool:
        value = self.negation()
        while True:
            self.skip_ws()
            # refuse to read "&&" out of "&&&"-style garbage lazily: the
            # nested unary parse below will fail on the stray "&"
            if not self.eat("&&"):
                return value
            value = self.negation() and value

    def negation(self) -> bool:
        if self.eat("!"):
            return not self.negation()
        return self.atom()

    def atom(self) -> bool:
        self.skip_ws()
        if self.eat("("):
            value = self.disjunction()
            if not self.eat(")"):
                raise self.error("missing ')'")
            return value
        word = self.ident()
        if word != "defined":
            raise self.error(f"unknown operand {word!r}")
        if not self.eat("("):
            raise self.error("defined requires '(NAME)'")
        name = self.ident()
        if not self.eat(")"):
            raise self.error("missing ')' after defined")
        return name in self.defines


def evaluate_directive_expr(text: str, defines: Iterable[str]) -> bool:
    """True/False for a #if / #elif expression; raises E_EXPR when the
    text is not in the supported grammar."""
    return _ExprScanner(text, frozenset(defines)).parse()


def _directive_of(line: str, grammar: StructureGrammar) -> tuple[str, str]:
    """(directive tag, payload) for a directive line.

    Tags: "if", "ifdef", "ifndef", "else", "elif", "end".
    """
    cond = grammar.conditionals
    assert cond is not None
    body = line.lstrip(" \t")
    names = [("if", cond.if_), ("ifdef", cond.ifdef), ("ifndef", cond.ifndef),
             ("else", cond.else_), ("elif", cond.elif_), ("end", cond.end)]
    for tag, marker in sorted(names, key=lambda p: -len(p[1])):
        if body.startswith(marker):
            return tag, body[len(marker):].strip()
    raise AssertionError(f"no directive marker on line {line!r}")


def _stripped_line(source: SourceText, mask: CodeMask, line: int) -> str:
    start = source.char_starts[line - 1]
    content = source.lines[line - 1]
    return "".join(ch if mask.is_code(start + i) else " "
                   for i, ch in enumerate(content))


def conditional_activity(tree: BlockTree, source: SourceText,
                         grammar: StructureGrammar,
                         defines: Iterable[str]) -> ActivityMap:
    """Which conditional regions are compiled in for a set of defines.

    Sibling regions form chains (an opener directive followed by its
    else/elif continuations). Within a chain at most one branch is
    active: the first whose test passes, or the else branch when none
    did. Regions nested anywhere under an inactive region are inactive.
    Unparseable expressions mark their region inactive and are reported
    with code E_EXPR.
    """
    defined = frozenset(defines)
    active: dict[int, bool] = {}
    errors: list[ActivityError] = []
    if not any(n.kind is BlockKind.CONDITIONAL_REGION for n in tree.nodes):
        return ActivityMap(active)
    mask, _ = scan_mask(source, grammar)

    def test(node, tag: str, payload: str) -> bool:
        if tag == "else":
            return True
        if tag in ("ifdef", "ifndef"):
            name = payload.split()[0] if payload else ""
            if not name or name[0].isdigit() or not all(
                    c.isalnum() or c == "_" for c in name):
                errors.append(ActivityError(node.id, node.open_line, "E_EXPR",
                                            f"expected symbol after #{tag}"))
                return False
            present = name in defined
            return present if tag == "ifdef" else not present
        try:
            return evaluate_directive_expr(payload, defined)
        except DirectiveExprError as exc:
            errors.append(ActivityError(node.id, node.open_line, "E_EXPR", str(exc)))
            return False

    def walk(siblings, inherited: bool) -> None:
        taken = False
        chain_open = False
        for node in siblings:
            if node.kind is not BlockKind.CONDITIONAL_REGION:
                chain_open = False
                walk(node.children, inherited)
                continue
            tag, payload = _directive_of(
                _stripped_line(source, mask, node.open_line), grammar)
            if tag in ("if", "ifdef", "ifndef") or not chain_open:
                taken = False
                chain_open = True
            own = test(node, tag, payload)
            is_active = inherited and not taken and own
            if is_active:
                taken = True
            active[node.id] = is_active
            walk(node.children, is_active)
        return

    walk(tree.roots, True)
    return ActivityMap(active, tuple(errors))
