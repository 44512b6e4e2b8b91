"""Source text plus the derived line table used by every positional lookup.

Lines are 1-based, columns 0-based and counted in Unicode scalar values;
tabs occupy one column. Positions compare lexicographically as
``(line, col)`` tuples.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .errors import RangeError


@dataclass(frozen=True)
class SourceText:
    text: str
    lines: tuple[str, ...]
    char_starts: tuple[int, ...]
    byte_starts: tuple[int, ...]

    @classmethod
    def from_text(cls, text: str) -> "SourceText":
        lines = tuple(text.split("\n"))
        char_starts = []
        byte_starts = []
        char_pos = 0
        byte_pos = 0
        for line in lines:
            char_starts.append(char_pos)
            byte_starts.append(byte_pos)
            char_pos += len(line) + 1
            byte_pos += len(line.encode("utf-8")) + 1
        return cls(text, lines, tuple(char_starts), tuple(byte_starts))

    @property
    def line_count(self) -> int:
        return len(self.lines)

    def line(self, number: int) -> str:
        """Content of a 1-based line, without its newline."""
        if not 1 <= number <= len(self.lines):
            raise RangeError(f"line {number} outside document (1..{len(self.lines)})")
        return self.lines[number - 1]

    def line_length(self, number: int) -> int:
        return len(self.line(number))

    def index_to_pos(self, index: int) -> tuple[int, int]:
        """Char offset -> (line, col); index == len(text) names end of file."""
        if not 0 <= index <= len(self.text):
            raise RangeError(f"index {index} outside document (0..{len(self.text)})")
        row = bisect_right(self.char_starts, index) - 1
        return row + 1, index - self.char_starts[row]

    def pos_to_index(self, line: int, col: int) -> int:
        """(line, col) -> char offset; col may equal the line length."""
        content = self.line(line)
        if not 0 <= col <= len(content):
            raise RangeError(f"column {col} outside line {line} (0..{len(content)})")
        return self.char_starts[line - 1] + col

    def end_pos(self) -> tuple[int, int]:
        """Position one past the last character (end-of-file)."""
        return len(self.lines), len(self.lines[-1])
