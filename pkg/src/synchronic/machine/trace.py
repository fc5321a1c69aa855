"""Line-oriented trace format and trace replay.

One record per committed cycle:

    cycle=<n> active=[i,j,...] writes=[(r,b,v),...] next=[...]

with all lists sorted ascending.  Replaying a trace against its image
reproduces the final state without re-executing any instruction.
"""

from __future__ import annotations

import re

from .core import HALTED, MachineConfig, MachineState, TraceRecord
from .image import Image, boot

_RECORD_RE = re.compile(
    r"^cycle=(\d+) active=\[([0-9,]*)\] writes=\[((?:\(\d+,\d+,\d+\))?(?:,\(\d+,\d+,\d+\))*)\]"
    r" next=\[([0-9,]*)\]$"
)
_WRITE_RE = re.compile(r"\((\d+),(\d+),(\d+)\)")


class TraceFormatError(Exception):
    stage = "parse"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def format_record(record: TraceRecord) -> str:
    active = ",".join(str(i) for i in record.active)
    writes = ",".join(f"({r},{b},{v})" for r, b, v in record.writes)
    nxt = ",".join(str(i) for i in record.next_active)
    return f"cycle={record.cycle} active=[{active}] writes=[{writes}] next=[{nxt}]"


def format_trace(records: list[TraceRecord]) -> str:
    return "".join(format_record(r) + "\n" for r in records)


def _parse_int_list(text: str) -> tuple[int, ...]:
    if not text:
        return ()
    return tuple(int(part) for part in text.split(","))


def parse_trace(text: str) -> list[TraceRecord]:
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        match = _RECORD_RE.match(line)
        if not match:
            raise TraceFormatError(f"malformed trace record: {line!r}", lineno)
        cycle = int(match.group(1))
        active = _parse_int_list(match.group(2))
        writes = tuple(
            (int(r), int(b), int(v)) for r, b, v in _WRITE_RE.findall(match.group(3))
        )
        next_active = _parse_int_list(match.group(4))
        records.append(TraceRecord(cycle, active, writes, next_active))
    return records


def replay(image: Image, records: list[TraceRecord], config: MachineConfig | None = None) -> MachineState:
    """Reconstruct the post-trace state by applying recorded writes in order."""
    state = boot(image, config)
    for record in records:
        if tuple(sorted(state.active)) != record.active:
            raise TraceFormatError(
                f"cycle {record.cycle}: trace activation {record.active} "
                f"does not match replayed state {sorted(state.active)}"
            )
        for reg, bit, value in record.writes:
            state.write_bit(reg, bit, value)
        state.active = set(record.next_active)
        state.cycle = record.cycle + 1
        if not state.active:
            state.status = HALTED
    return state
