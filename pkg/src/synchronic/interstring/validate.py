"""Static checks on an interstring viewed as layered dataflow.

Each cell is destination, operator, then sources.  Within a layer no two
cells may write the same destination, and a source must be readable before
the layer starts: either an initial-environment name or the destination of
a strictly earlier layer.  Reading a name that only comes into existence in
the current layer is reported separately from a name that never exists at
all, because the fix differs (move the cell down a layer vs define the
name).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .algebra import Algebra
from .model import Interstring, is_identifier, is_literal

DUPLICATE_DESTINATION = "duplicate-destination"
UNDEFINED_SOURCE = "undefined-source"
SAME_LAYER_READ = "same-layer-read"
ARITY_MISMATCH = "arity-mismatch"
UNKNOWN_OPERATOR = "unknown-operator"
MALFORMED_CELL = "malformed-cell"


@dataclass(frozen=True)
class Finding:
    kind: str
    layer: int
    cell: int
    message: str

    def __str__(self) -> str:
        return f"layer {self.layer + 1} cell {self.cell + 1}: {self.kind}: {self.message}"


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def of_kind(self, kind: str) -> list[Finding]:
        return [f for f in self.findings if f.kind == kind]

    def __str__(self) -> str:
        if self.ok:
            return "clean"
        return "\n".join(str(f) for f in self.findings)


def validate(
    istr: Interstring,
    algebra: Algebra | None = None,
    env: Iterable[str] = (),
) -> ValidationReport:
    report = ValidationReport()
    known: set[str] = set(env)

    for li, layer in enumerate(istr.layers):
        layer_writes: set[str] = set()
        duplicates_seen: set[str] = set()
        for ci, cell in enumerate(layer):
            if len(cell) < 3:
                report.findings.append(
                    Finding(MALFORMED_CELL, li, ci,
                            f"cell needs destination, operator and sources, got {len(cell)} symbols")
                )
                continue
            dst = cell[0]
            if not is_identifier(dst):
                report.findings.append(
                    Finding(MALFORMED_CELL, li, ci, f"destination {dst!r} must be a name")
                )
                continue
            if dst in layer_writes and dst not in duplicates_seen:
                report.findings.append(
                    Finding(DUPLICATE_DESTINATION, li, ci, f"destination {dst!r} written twice in layer")
                )
                duplicates_seen.add(dst)
            layer_writes.add(dst)

        for ci, cell in enumerate(layer):
            if len(cell) < 3 or not is_identifier(cell[0]):
                continue
            op = cell[1]
            sources = cell[2:]
            if algebra is not None:
                if not algebra.has(op):
                    report.findings.append(Finding(UNKNOWN_OPERATOR, li, ci, f"operator {op!r}"))
                elif algebra.arity(op) != len(sources):
                    report.findings.append(
                        Finding(ARITY_MISMATCH, li, ci,
                                f"operator {op!r} expects {algebra.arity(op)} sources, got {len(sources)}")
                    )
            for src in sources:
                if is_literal(src):
                    continue
                if src in known:
                    continue
                if src in layer_writes:
                    report.findings.append(
                        Finding(SAME_LAYER_READ, li, ci,
                                f"source {src!r} is only written in this layer")
                    )
                else:
                    report.findings.append(
                        Finding(UNDEFINED_SOURCE, li, ci, f"source {src!r} is never defined")
                    )

        known |= layer_writes
    return report
