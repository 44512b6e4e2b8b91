"""Lexical block discovery.

The parser never builds a syntax tree. It classifies every character as
code, comment or string literal, then matches the grammar's delimiter
pairs over the code regions with a single stack. Preprocessor-style
conditional directives share that stack, so ``#if``/``#endif`` regions
nest with braces exactly as they interleave in the text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import RangeError
from .grammar import BlockKind, StructureGrammar, classify_block_kind
from .source import SourceText

CODE = 0
COMMENT = 1
STRING = 2

_MASK_NAMES = {CODE: "code", COMMENT: "comment", STRING: "string_literal"}

_WORD_CHARS = frozenset("_")


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


class CodeMask:
    """Per-character classification of a source text."""

    __slots__ = ("_data",)

    def __init__(self, data: bytearray):
        self._data = data

    def __len__(self) -> int:
        return len(self._data)

    def kind_at(self, index: int) -> int:
        return self._data[index]

    def is_code(self, index: int) -> bool:
        return self._data[index] == CODE

    def classify(self, index: int) -> str:
        return _MASK_NAMES[self._data[index]]

    def all_code(self, start: int, end: int) -> bool:
        """True when every character in [start, end) is plain code."""
        return all(b == CODE for b in self._data[start:end])

    def runs(self) -> Iterator[tuple[int, int, str]]:
        """Yield maximal (start, end, classification) runs in order."""
        data = self._data
        i = 0
        n = len(data)
        while i < n:
            j = i
            while j < n and data[j] == data[i]:
                j += 1
            yield i, j, _MASK_NAMES[data[i]]
            i = j


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    col: int
    code: str
    message: str


def scan_mask(source: SourceText, grammar: StructureGrammar) -> tuple[CodeMask, list[ParseDiagnostic]]:
    """Classify every character of the source.

    Regions are claimed left to right: at each point the earliest opener
    wins, ties go to the longer marker, then to listing order (line
    comments, block comments, strings). Line comments run to end of line
    excluding the newline itself. Block comments and strings run to their
    close marker; falling off the end of file keeps the region open and
    reports UNTERMINATED_COMMENT / UNTERMINATED_STRING at the opener.
    Strings honor their escape character, which protects the following
    character, and may span newlines.
    """
    text = source.text
    n = len(text)
    data = bytearray(n)
    diags: list[ParseDiagnostic] = []

    # (marker, sort rank, handler tag, close, escape)
    openers: list[tuple[str, int, str, str, str]] = []
    rank = 0
    for marker in grammar.line_comments:
        openers.append((marker, rank, "line", "", ""))
        rank += 1
    for pair in grammar.block_comments:
        openers.append((pair.open, rank, "block", pair.close, ""))
        rank += 1
    for syntax in grammar.strings:
        openers.append((syntax.open, rank, "string", syntax.close, syntax.escape))
        rank += 1

    if not openers:
        return CodeMask(data), diags

    nxt = [text.find(op[0]) for op in openers]
    pos = 0
    while pos < n:
        best = -1
        best_key = (n + 1, 0, 0)
        for i, (marker, order, _, _, _) in enumerate(openers):
            idx = nxt[i]
            if idx != -1 and idx < pos:
                idx = text.find(marker, pos)
                nxt[i] = idx
            if idx == -1:
                continue
            key = (idx, -len(marker), order)
            if key < best_key:
                best_key = key
                best = i
        if best == -1:
            break
        marker, _, tag, close, escape = openers[best]
        start = best_key[0]
        if tag == "line":
            end = text.find("\n", start + len(marker))
            if end == -1:
                end = n
            data[start:end] = bytes([COMMENT]) * (end - start)
            pos = end
        elif tag == "block":
            close_idx = text.find(close, start + len(marker))
            if close_idx == -1:
                data[start:n] = bytes([COMMENT]) * (n - start)
                line, col = source.index_to_pos(start)
                diags.append(ParseDiagnostic(line, col, "UNTERMINATED_COMMENT",
                                             f"comment opened with {marker!r} is never closed"))
                pos = n
            else:
                end = close_idx + len(close)
                data[start:end] = bytes([COMMENT]) * (end - start)
                pos = end
        else:
            i = start + len(marker)
            end = -1
            while i < n:
                if escape and text.startswith(escape, i):
                    i += len(escape) + 1
                    continue
                if text.startswith(close, i):
                    end = i + len(close)
                    break
                i += 1
            if end == -1:
                data[start:n] = bytes([STRING]) * (n - start)
                line, col = source.index_to_pos(start)
                diags.append(ParseDiagnostic(line, col, "UNTERMINATED_STRING",
                                             f"string opened with {marker!r} is never closed"))
                pos = n
            else:
                data[start:end] = bytes([STRING]) * (end - start)
                pos = end

    return CodeMask(data), diags


@dataclass(eq=True)
class BlockNode:
    """One discovered block; positions are inclusive on both ends."""

    id: int
    kind: BlockKind
    open_line: int
    open_col: int
    close_line: int
    close_col: int
    depth: int
    parent_id: Optional[int]
    token: Optional[str]
    children: list["BlockNode"] = field(default_factory=list)

    @property
    def first_line(self) -> int:
        return self.open_line

    @property
    def last_line(self) -> int:
        return self.close_line

    @property
    def open_pos(self) -> tuple[int, int]:
        return self.open_line, self.open_col

    @property
    def close_pos(self) -> tuple[int, int]:
        return self.close_line, self.close_col

    def contains(self, line: int, col: int) -> bool:
        return self.open_pos <= (line, col) <= self.close_pos

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "open": [self.open_line, self.open_col],
            "close": [self.close_line, self.close_col],
            "firstLine": self.first_line,
            "lastLine": self.last_line,
            "depth": self.depth,
            "parent": self.parent_id,
            "token": self.token,
            "children": [c.id for c in self.children],
        }


class BlockTree:
    """Forest of blocks in document order, addressable by preorder id."""

    def __init__(self, roots: list[BlockNode], line_count: int, line_lengths: tuple[int, ...]):
        self.roots = roots
        self.line_count = line_count
        self.line_lengths = line_lengths
        self.nodes: list[BlockNode] = []
        counter = 0

        def visit(node: BlockNode, depth: int, parent: Optional[int]) -> None:
            nonlocal counter
            node.id = counter
            node.depth = depth
            node.parent_id = parent
            counter += 1
            self.nodes.append(node)
            for child in node.children:
                visit(child, depth + 1, node.id)

        for root in roots:
            visit(root, 0, None)
        self._by_id = {node.id: node for node in self.nodes}

    def __len__(self) -> int:
        return len(self.nodes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BlockTree):
            return NotImplemented
        return self.roots == other.roots and self.line_count == other.line_count

    def __iter__(self) -> Iterator[BlockNode]:
        return iter(self.nodes)

    def node(self, block_id: int) -> BlockNode:
        return self._by_id[block_id]

    def get(self, block_id: int) -> Optional[BlockNode]:
        return self._by_id.get(block_id)

    def parent(self, node: BlockNode) -> Optional[BlockNode]:
        return None if node.parent_id is None else self._by_id[node.parent_id]

    @property
    def max_depth(self) -> int:
        return max((n.depth for n in self.nodes), default=-1)

    def to_dict(self) -> dict:
        return {
            "lineCount": self.line_count,
            "maxDepth": self.max_depth,
            "blocks": [n.to_dict() for n in self.nodes],
        }


def _scan_introducer(text: str, mask: CodeMask, open_idx: int) -> tuple[Optional[str], bool]:
    """Look backward from an open delimiter for the token introducing it.

    Skips whitespace and commented characters, then an optional balanced
    parenthesis group, then reads one identifier. Returns (token,
    saw_paren_group); token is None when nothing identifier-like
    precedes the delimiter.
    """

    def skip_back(i: int) -> int:
        while i >= 0 and (mask.kind_at(i) == COMMENT or text[i] in " \t\r\n"):
            i -= 1
        return i

    i = skip_back(open_idx - 1)
    saw_parens = False
    if i >= 0 and text[i] == ")" and mask.is_code(i):
        depth = 1
        i -= 1
        while i >= 0 and depth:
            if mask.is_code(i):
                if text[i] == ")":
                    depth += 1
                elif text[i] == "(":
                    depth -= 1
            i -= 1
        if depth:
            return None, False
        saw_parens = True
        i = skip_back(i)
    if i < 0 or not mask.is_code(i):
        return None, saw_parens
    j = i
    while j >= 0 and mask.is_code(j) and _is_word_char(text[j]):
        j -= 1
    word = text[j + 1:i + 1]
    if word and not word[0].isdigit():
        return word, saw_parens
    return None, saw_parens


_EV_OPEN = 0
_EV_CLOSE = 1
_EV_DIR_OPEN = 2
_EV_DIR_SWITCH = 3
_EV_DIR_CLOSE = 4


def _delimiter_events(text: str, mask: CodeMask, grammar: StructureGrammar) -> list[tuple[int, int, int, int]]:
    """(char index, event type, pair index, marker length) for every
    delimiter occurrence on code characters, in document order."""
    markers: list[tuple[str, int, int]] = []
    for pair_idx, pair in enumerate(grammar.blocks):
        markers.append((pair.open, _EV_OPEN, pair_idx))
        markers.append((pair.close, _EV_CLOSE, pair_idx))
    if not markers:
        return []
    events: list[tuple[int, int, int, int]] = []
    n = len(text)
    nxt = [text.find(m[0]) for m in markers]
    pos = 0
    while pos < n:
        best = -1
        best_key = (n + 1, 0, 0)
        for i, (marker, ev, pair_idx) in enumerate(markers):
            idx = nxt[i]
            if idx != -1 and idx < pos:
                idx = text.find(marker, pos)
                nxt[i] = idx
            if idx == -1:
                continue
            key = (idx, -len(marker), i)
            if key < best_key:
                best_key = key
                best = i
        if best == -1:
            break
        marker, ev, pair_idx = markers[best]
        idx = best_key[0]
        if mask.all_code(idx, idx + len(marker)):
            events.append((idx, ev, pair_idx, len(marker)))
            pos = idx + len(marker)
        else:
            pos = idx + 1
            nxt[best] = text.find(marker, pos)
    return events


def _directive_events(source: SourceText, mask: CodeMask,
                      grammar: StructureGrammar) -> list[tuple[int, int, int, int]]:
    """Conditional directive occurrences, one per line at most.

    A directive counts only when its marker is the first non-whitespace
    content of the line, sits on code characters, and is not immediately
    followed by a word character.
    """
    cond = grammar.conditionals
    if cond is None:
        return []
    markers = sorted(cond.all_markers(), key=len, reverse=True)
    switches = set(cond.switches())
    openers = set(cond.openers())
    text = source.text
    events: list[tuple[int, int, int, int]] = []
    for row, content in enumerate(source.lines):
        stripped = content.lstrip(" \t")
        if not stripped:
            continue
        col = len(content) - len(stripped)
        idx = source.char_starts[row] + col
        if not mask.is_code(idx):
            continue
        for marker in markers:
            if not stripped.startswith(marker):
                continue
            after = idx + len(marker)
            if after < len(text) and _is_word_char(text[after]):
                continue
            if not mask.all_code(idx, after):
                continue
            if marker in openers:
                ev = _EV_DIR_OPEN
            elif marker in switches:
                ev = _EV_DIR_SWITCH
            else:
                ev = _EV_DIR_CLOSE
            events.append((idx, ev, -1, len(marker)))
            break
    return events


class _Open:
    __slots__ = ("pair_idx", "open_line", "open_col", "kind", "token", "children")

    def __init__(self, pair_idx: int, open_line: int, open_col: int,
                 kind: BlockKind, token: Optional[str]):
        self.pair_idx = pair_idx
        self.open_line = open_line
        self.open_col = open_col
        self.kind = kind
        self.token = token
        self.children: list[BlockNode] = []


def parse_blocks(source: SourceText, grammar: StructureGrammar) -> tuple[BlockTree, list[ParseDiagnostic]]:
    """Build the block forest for a source text.

    Returns the tree plus all diagnostics (mask level and structural).
    A close with no matching open on top of the stack is reported as
    UNBALANCED_CLOSE and skipped; blocks still open at end of file are
    reported as UNCLOSED_BLOCK and closed at the end-of-file position.
    Diagnostics come back sorted by position.
    """
    mask, diags = scan_mask(source, grammar)
    events = _delimiter_events(source.text, mask, grammar)
    events.extend(_directive_events(source, mask, grammar))
    events.sort(key=lambda ev: (ev[0], ev[1]))

    roots: list[BlockNode] = []
    stack: list[_Open] = []

    def close_top(close_line: int, close_col: int) -> BlockNode:
        entry = stack.pop()
        node = BlockNode(
            id=-1, kind=entry.kind,
            open_line=entry.open_line, open_col=entry.open_col,
            close_line=close_line, close_col=close_col,
            depth=-1, parent_id=None, token=entry.token,
            children=entry.children,
        )
        if stack:
            stack[-1].children.append(node)
        else:
            roots.append(node)
        return node

    for idx, ev, pair_idx, length in events:
        line, col = source.index_to_pos(idx)
        if ev == _EV_OPEN:
            token, saw_parens = _scan_introducer(source.text, mask, idx)
            kind = classify_block_kind(grammar, token, saw_parens)
            stack.append(_Open(pair_idx, line, col, kind, token))
        elif ev == _EV_CLOSE:
            if stack and stack[-1].pair_idx == pair_idx:
                end_line, end_col = source.index_to_pos(idx + length - 1)
                close_top(end_line, end_col)
            else:
                marker = grammar.blocks[pair_idx].close
                diags.append(ParseDiagnostic(line, col, "UNBALANCED_CLOSE",
                                             f"{marker!r} has no matching open delimiter"))
        elif ev == _EV_DIR_OPEN:
            stack.append(_Open(-1, line, col, BlockKind.CONDITIONAL_REGION, None))
        elif ev == _EV_DIR_SWITCH:
            if stack and stack[-1].pair_idx == -1:
                close_top(line, col)
                end_line, end_col = source.index_to_pos(idx + length - 1)
                stack.append(_Open(-1, end_line, end_col, BlockKind.CONDITIONAL_REGION, None))
            else:
                diags.append(ParseDiagnostic(line, col, "UNBALANCED_CLOSE",
                                             "conditional switch outside any conditional region"))
        else:
            if stack and stack[-1].pair_idx == -1:
                end_line, end_col = source.index_to_pos(idx + length - 1)
                close_top(end_line, end_col)
            else:
                diags.append(ParseDiagnostic(line, col, "UNBALANCED_CLOSE",
                                             "conditional end outside any conditional region"))

    if stack:
        eof_line, eof_col = source.end_pos()
        while stack:
            entry = stack[-1]
            diags.append(ParseDiagnostic(entry.open_line, entry.open_col, "UNCLOSED_BLOCK",
                                         "block is never closed; closing at end of file"))
            close_top(eof_line, eof_col)

    diags.sort(key=lambda d: (d.line, d.col, d.code))
    tree = BlockTree(roots, source.line_count,
                     tuple(len(line) for line in source.lines))
    return tree, diags


def block_at(tree: BlockTree, line: int, col: int) -> Optional[BlockNode]:
    """Deepest block whose span contains the position, or None.

    Block boundaries are inclusive: the open and close delimiter
    characters belong to the block. Positions outside the document
    raise E_RANGE; a column equal to the line length (end of line)
    is valid.
    """
    if not 1 <= line <= tree.line_count:
        raise RangeError(f"line {line} outside document (1..{tree.line_count})")
    if not 0 <= col <= tree.line_lengths[line - 1]:
        raise RangeError(
            f"column {col} outside line {line} (0..{tree.line_lengths[line - 1]})")
    found: Optional[BlockNode] = None
    candidates = tree.roots
    while True:
        inner = None
        for node in candidates:
            if node.contains(line, col):
                inner = node
                break
        if inner is None:
            return found
        found = inner
        candidates = inner.children
