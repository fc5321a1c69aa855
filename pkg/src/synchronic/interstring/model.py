"""The interstring data model: layers of cells of symbols.

An interstring is an outer sequence of layers; each layer is a sequence of
cells; each cell is a short sequence of symbols with a configurable maximum
length (default 4).  Layers and layer contents may grow without bound, the
cells may not: that bound is what keeps the structure flat and parseable in
one pass.

Text grammar: newline separates layers, ``;`` separates cells, whitespace
separates symbols, ``#`` starts a comment, blank lines are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

DEFAULT_MAX_CELL_LEN = 4

_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_LITERAL_RE = re.compile(r"^[0-9]+$")

Cell = tuple[str, ...]
Layer = tuple[Cell, ...]


class InterstringParseError(Exception):
    stage = "parse"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def is_literal(symbol: str) -> bool:
    return bool(_LITERAL_RE.match(symbol))


def is_identifier(symbol: str) -> bool:
    return bool(_IDENT_RE.match(symbol))


@dataclass(frozen=True)
class Interstring:
    layers: tuple[Layer, ...] = ()
    max_cell_len: int = DEFAULT_MAX_CELL_LEN

    @property
    def cell_count(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def cells(self):
        """Yield (layer_index, cell_index, cell) over all cells in order."""
        for li, layer in enumerate(self.layers):
            for ci, cell in enumerate(layer):
                yield li, ci, cell


def parse_interstring(text: str, max_cell_len: int = DEFAULT_MAX_CELL_LEN) -> Interstring:
    layers: list[Layer] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        cells: list[Cell] = []
        for chunk in stripped.split(";"):
            symbols = tuple(chunk.split())
            if not symbols:
                raise InterstringParseError("empty cell", lineno)
            if len(symbols) > max_cell_len:
                raise InterstringParseError(
                    f"cell length {len(symbols)} > {max_cell_len}", lineno
                )
            for symbol in symbols:
                if not (is_identifier(symbol) or is_literal(symbol)):
                    raise InterstringParseError(f"illegal symbol {symbol!r}", lineno)
            cells.append(symbols)
        layers.append(tuple(cells))
    return Interstring(layers=tuple(layers), max_cell_len=max_cell_len)


def format_interstring(istr: Interstring) -> str:
    lines = []
    for layer in istr.layers:
        lines.append(" ; ".join(" ".join(cell) for cell in layer))
    return "\n".join(lines) + ("\n" if lines else "")
