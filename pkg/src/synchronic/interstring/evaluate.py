"""Reference evaluators for interstrings.

``evaluate`` is the layer-parallel semantics: all cells of a layer read the
pre-layer environment and their writes commit together when the layer ends,
mirroring the machine's simultaneous-read, exclusive-write cycle.  It is the
oracle the compiler is checked against.

``evaluate_as_tree`` deliberately ignores sharing: every source is
recomputed by expanding its defining cell into a pure expression tree.  It
exists as an independent cross-check (the two must agree on clean inputs)
and to demonstrate what the sharing saves.
"""

from __future__ import annotations

from .algebra import Algebra
from .model import Interstring, is_literal
from .validate import validate


class EvaluationError(Exception):
    stage = "type"


def _source_value(symbol: str, env: dict[str, int], algebra: Algebra) -> int:
    if is_literal(symbol):
        return int(symbol) & algebra.mask
    if symbol not in env:
        raise EvaluationError(f"undefined source {symbol!r}")
    return env[symbol]


def evaluate(istr: Interstring, algebra: Algebra, env: dict[str, int]) -> dict[str, int]:
    """Run the interstring over the algebra, returning the final environment."""
    current = {name: value & algebra.mask for name, value in env.items()}
    for layer in istr.layers:
        commits: dict[str, int] = {}
        for cell in layer:
            dst, op, sources = cell[0], cell[1], cell[2:]
            if not algebra.has(op):
                raise EvaluationError(f"unknown operator {op!r}")
            args = [_source_value(s, current, algebra) for s in sources]
            if len(args) != algebra.arity(op):
                raise EvaluationError(
                    f"operator {op!r} expects {algebra.arity(op)} sources, got {len(args)}"
                )
            commits[dst] = algebra.apply(op, args)
        current.update(commits)
    return current


def evaluate_as_tree(istr: Interstring, algebra: Algebra, env: dict[str, int]) -> dict[str, int]:
    """Evaluate by full tree expansion, recomputing shared definitions.

    Exponential in dataflow depth; only use at test scale.
    """
    layers = istr.layers

    def latest_def(name: str, before: int) -> tuple[int, tuple[str, ...]] | None:
        for li in range(before - 1, -1, -1):
            for cell in layers[li]:
                if cell[0] == name:
                    return li, cell
        return None

    def value_of(symbol: str, before: int) -> int:
        if is_literal(symbol):
            return int(symbol) & algebra.mask
        found = latest_def(symbol, before)
        if found is None:
            if symbol not in env:
                raise EvaluationError(f"undefined source {symbol!r}")
            return env[symbol] & algebra.mask
        li, cell = found
        op, sources = cell[1], cell[2:]
        args = [value_of(s, li) for s in sources]
        return algebra.apply(op, args)

    result = {name: value & algebra.mask for name, value in env.items()}
    defined = {cell[0] for layer in layers for cell in layer}
    for name in defined:
        result[name] = value_of(name, len(layers))
    return result


def ensure_clean(istr: Interstring, algebra: Algebra, env: dict[str, int]) -> None:
    """Raise if validation of the interstring reports findings."""
    report = validate(istr, algebra, env.keys())
    if not report.ok:
        raise EvaluationError(f"validation failed: {report}")
