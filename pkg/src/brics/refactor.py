"""Block manipulation: dependency analysis, extract-to-method, folding.

The dependency analysis is lexical, not semantic. It works on the
comment/string-stripped text of the enclosing method at whole-line
granularity and is documented for a C-like single-declarator subset:
one variable per declaration, assignment via `=`, `++` or `--` on the
same line as the variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .blockparse import BlockNode, BlockTree, scan_mask
from .errors import (MultiOutputError, NameTakenError, NoEnclosingMethodError,
                     RangeError, UnknownBlockError)
from .grammar import BlockKind, StructureGrammar
from .source import SourceText

# Statement words that may precede an identifier without declaring it.
RESERVED_WORDS = frozenset({
    "return", "break", "continue", "goto", "case", "default",
    "throw", "new", "delete", "sizeof", "true", "false", "null", "this",
})

IDENT_RE = re.compile(r"(?<![A-Za-z0-9_])[A-Za-z_][A-Za-z0-9_]*")

FOLD_PLACEHOLDER = "⟨…⟩"  # ⟨…⟩


@dataclass(frozen=True)
class DepSets:
    """Identifiers flowing into and out of a block, in first-use order."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]


@dataclass(frozen=True)
class RefactorResult:
    new_source: str
    new_method_lines: tuple[int, int]
    call_line: int


@dataclass(frozen=True)
class FoldSpan:
    block_id: int
    first_hidden: int
    last_hidden: int
    placeholder: str = FOLD_PLACEHOLDER


@dataclass(frozen=True)
class _Token:
    name: str
    start: int
    end: int
    declared: bool
    assigned: bool


def _strip_to_spaces(source: SourceText, grammar: StructureGrammar) -> str:
    mask, _ = scan_mask(source, grammar)
    text = source.text
    return "".join(
        ch if (mask.is_code(i) or ch == "\n") else " "
        for i, ch in enumerate(text)
    )


def _line_span(source: SourceText, first: int, last: int) -> tuple[int, int]:
    """Char offsets [start, end) covering whole lines first..last."""
    start = source.char_starts[first - 1]
    end = source.char_starts[last - 1] + len(source.lines[last - 1])
    return start, end


def _scan_region(stripped: str, start: int, end: int, keywords: frozenset) -> list[_Token]:
    """Identifier tokens of stripped[start:end] with declared/assigned flags.

    declared: the previous identifier token is separated from this one
    by whitespace only (covers `int a`; any punctuation, keyword text or
    statement boundary in between disqualifies). assigned: the token is
    followed on its line by `=` (not `==`), `++` or `--`.
    """
    tokens: list[_Token] = []
    prev_end: Optional[int] = None
    for m in IDENT_RE.finditer(stripped, start, end):
        name = m.group()
        if name in keywords:
            prev_end = None  # keyword text breaks the whitespace-only gap
            continue
        declared = (prev_end is not None
                    and stripped[prev_end:m.start()].strip() == "")
        i = m.end()
        while i < end and stripped[i] in " \t":
            i += 1
        assigned = ((stripped.startswith("=", i) and not stripped.startswith("==", i))
                    or stripped.startswith("++", i)
                    or stripped.startswith("--", i))
        tokens.append(_Token(name, m.start(), m.end(), declared, assigned))
        prev_end = m.end()
    return tokens


def enclosing_method(tree: BlockTree, block: BlockNode) -> BlockNode:
    """Nearest callable-kind ancestor; E_NO_METHOD when there is none."""
    node = tree.parent(block)
    while node is not None:
        if node.kind is BlockKind.CALLABLE:
            return node
        node = tree.parent(node)
    raise NoEnclosingMethodError(
        f"block {block.id} is not inside a callable block")


def block_dependencies(source: SourceText, tree: BlockTree,
                       grammar: StructureGrammar, block_id: int) -> DepSets:
    """Inputs and outputs of a block relative to its enclosing method.

    Regions are whole lines: "earlier" runs from the method's first
    line to the line before the block, the block spans its own lines,
    "after" runs from the line after the block to the method's last
    line. inputs = referenced in the block, not declared there, and
    declared or assigned earlier; outputs = assigned in the block and
    referenced after it.
    """
    block = tree.get(block_id)
    if block is None:
        raise UnknownBlockError(f"no block with id {block_id}")
    method = enclosing_method(tree, block)
    keywords = frozenset(grammar.kinds) | RESERVED_WORDS
    stripped = _strip_to_spaces(source, grammar)

    b_start, b_end = _line_span(source, block.first_line, block.last_line)
    m_start, m_end = _line_span(source, method.first_line, method.last_line)

    block_toks = _scan_region(stripped, b_start, b_end, keywords)
    earlier_toks = _scan_region(stripped, m_start, b_start, keywords)
    after_toks = _scan_region(stripped, b_end, m_end, keywords)

    declared_in_block = {t.name for t in block_toks if t.declared}
    known_earlier = {t.name for t in earlier_toks if t.declared or t.assigned}
    referenced_after = {t.name for t in after_toks}

    inputs: list[str] = []
    outputs: list[str] = []
    for t in block_toks:
        if (t.name not in declared_in_block and t.name in known_earlier
                and t.name not in inputs):
            inputs.append(t.name)
        if t.assigned and t.name in referenced_after and t.name not in outputs:
            outputs.append(t.name)
    return DepSets(tuple(inputs), tuple(outputs))


def _declared_type(stripped: str, source: SourceText, method: BlockNode,
                   keywords: frozenset, name: str,
                   default_type: str) -> str:
    """Type word from the variable's declaration inside the method, or
    the grammar default."""
    m_start, m_end = _line_span(source, method.first_line, method.last_line)
    prev: Optional[re.Match] = None
    for m in IDENT_RE.finditer(stripped, m_start, m_end):
        if m.group() in keywords:
            prev = None
            continue
        if (m.group() == name and prev is not None
                and stripped[prev.end():m.start()].strip() == ""):
            return prev.group()
        prev = m
    return default_type


def _indent_of(line: str) -> str:
    return line[:len(line) - len(line.lstrip(" \t"))]


def extract_block(source: SourceText, tree: BlockTree, grammar: StructureGrammar,
                  block_id: int, new_name: str) -> RefactorResult:
    """Move a block into a new method inserted after its enclosing one.

    Parameters are the block's inputs in order; a single output becomes
    the return value and the call site assigns it. The block's whole
    lines are replaced by one call line at the block's indentation.
    """
    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", new_name):
        raise ValueError(f"invalid method name {new_name!r}")
    block = tree.get(block_id)
    if block is None:
        raise UnknownBlockError(f"no block with id {block_id}")
    method = enclosing_method(tree, block)
    if not (method.first_line < block.first_line
            and block.last_line < method.last_line):
        raise RangeError(
            "block shares a line with its enclosing method; reformat first")
    for node in tree.nodes:
        if node.id == block.id:
            continue
        if block.first_line <= node.first_line and node.last_line <= block.last_line:
            continue  # moves wholesale with the block
        # a foreign delimiter on a boundary line (say `} else {`) would be
        # deleted with the block's lines and corrupt the remainder
        if (block.first_line <= node.open_line <= block.last_line
                or block.first_line <= node.close_line <= block.last_line):
            raise RangeError(
                "block shares a line with another block's delimiter; reformat first")
    for node in tree.nodes:
        if node.kind is BlockKind.CALLABLE and node.token == new_name:
            raise NameTakenError(f"a callable named {new_name!r} already exists")

    deps = block_dependencies(source, tree, grammar, block_id)
    if len(deps.outputs) > 1:
        raise MultiOutputError(list(deps.outputs))

    keywords = frozenset(grammar.kinds) | RESERVED_WORDS
    stripped = _strip_to_spaces(source, grammar)
    type_of = lambda v: _declared_type(stripped, source, method, keywords, v,
                                       grammar.default_type)

    body = list(source.lines[block.first_line - 1:block.last_line])
    block_indent = _indent_of(body[0])
    method_indent = _indent_of(source.lines[method.first_line - 1])
    inner_indent = method_indent + "    "

    def reindent(line: str) -> str:
        if not line.strip():
            return ""
        if line.startswith(block_indent):
            line = line[len(block_indent):]
        return inner_indent + line

    output = deps.outputs[0] if deps.outputs else None
    ret_type = type_of(output) if output else "void"
    params = ", ".join(f"{type_of(v)} {v}" for v in deps.inputs)
    args = ", ".join(deps.inputs)
    call = f"{block_indent}{output + ' = ' if output else ''}{new_name}({args});"

    method_lines = [f"{method_indent}{ret_type} {new_name}({params}) {{"]
    method_lines.extend(reindent(l) for l in body)
    if output:
        method_lines.append(f"{inner_indent}return {output};")
    method_lines.append(f"{method_indent}}}")

    lines = list(source.lines)
    lines[block.first_line - 1:block.last_line] = [call]
    removed = block.last_line - block.first_line + 1
    insert_at = method.last_line - removed + 1  # 0-based: after method close
    lines[insert_at:insert_at] = [""] + method_lines

    first = insert_at + 2  # 1-based line of the new method header
    last = first + len(method_lines) - 1
    return RefactorResult("\n".join(lines), (first, last), block.first_line)


def fold_spans(tree: BlockTree, granularity: int) -> list[FoldSpan]:
    """Collapsible interiors one level below the granularity cut.

    One span per block at depth granularity+1 whose interior is
    non-empty; opener and closer lines stay visible, so blocks whose
    delimiters sit on adjacent (or the same) lines produce no span.
    """
    if granularity < 0:
        raise RangeError("granularity must be >= 0")
    spans: list[FoldSpan] = []
    for node in tree.nodes:
        if node.depth != granularity + 1:
            continue
        first, last = node.first_line + 1, node.last_line - 1
        if first <= last:
            spans.append(FoldSpan(node.id, first, last))
    return spans
