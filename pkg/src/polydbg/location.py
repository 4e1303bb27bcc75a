"""Source coordinates shared by the language front end and the wire protocol.

Lines and columns are 1-based; lengths count Unicode scalar values, so the
same coordinates are stable across every consumer of the protocol.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceLocation:
    """A character range in one source file.

    `file_symbol` is the symbol-table id of the file's URI. `length` may
    span line breaks; newlines count as one character each.
    """

    file_symbol: int
    line: int
    column: int
    length: int

    def key(self) -> tuple[int, int, int, int]:
        return (self.file_symbol, self.line, self.column, self.length)

    def __str__(self) -> str:
        return f"{self.line}:{self.column}:{self.length}"


def line_offsets(text: str) -> list[int]:
    """Absolute offset of the first character of each 1-based line."""
    offsets = [0, 0]
    for i, ch in enumerate(text):
        if ch == "\n":
            offsets.append(i + 1)
    return offsets


def slice_at(text: str, loc: SourceLocation) -> str:
    """The exact source text covered by `loc`."""
    offs = line_offsets(text)
    if loc.line >= len(offs):
        raise ValueError(f"line {loc.line} out of range")
    start = offs[loc.line] + loc.column - 1
    return text[start : start + loc.length]
