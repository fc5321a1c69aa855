"""Two-phase, cycle-accurate execution of the register-array machine.

Every register of the machine holds one word that is either data or one of
four bit-level instructions.  Each cycle, every register in the activation
set decodes its own contents as of the start of the cycle (phase 1), then
all write requests commit together and the union of successor requests
becomes the next activation set (phase 2).  Reads never observe writes from
the same cycle.  Register 0 is a reserved sink: activation sent to it is
absorbed, which is how threads terminate (``jmp 0 0``).

Error conditions are part of the model: two writes to the same bit in one
cycle, duplicate activation of a register, successor indices past the end
of the array, and (optionally) execution of a register marked as data.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import IntEnum

WR0 = 0
WR1 = 1
CND = 2
JMP = 3


class Opcode(IntEnum):
    WR0 = 0
    WR1 = 1
    CND = 2
    JMP = 3

    @property
    def mnemonic(self) -> str:
        return self.name.lower()


DEFAULT_N_REGISTERS = 65536
DEFAULT_WORD_WIDTH = 64
DEFAULT_MAX_CYCLES = 100_000


def _is_pow2(x: int) -> bool:
    return x > 0 and (x & (x - 1)) == 0


@dataclass(frozen=True)
class MachineConfig:
    """Geometry of the register array plus run limits.

    An instruction word must fit its opcode, a register address and the
    wider of a bit index or a second register address, which bounds
    n_registers for a given word_width.
    """

    n_registers: int = DEFAULT_N_REGISTERS
    word_width: int = DEFAULT_WORD_WIDTH
    max_cycles: int = DEFAULT_MAX_CYCLES
    guard_checks: bool = False

    def __post_init__(self):
        if self.n_registers < 4 or not _is_pow2(self.n_registers):
            raise ValueError(f"n_registers must be a power of two >= 4, got {self.n_registers}")
        if self.word_width < 8 or not _is_pow2(self.word_width):
            raise ValueError(f"word_width must be a power of two >= 8, got {self.word_width}")
        need = 2 + self.addr_bits + max(self.bit_bits, self.addr_bits)
        if need > self.word_width:
            raise ValueError(
                f"instruction does not fit in one word: needs {need} bits, word is {self.word_width}"
            )
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be positive")

    @property
    def addr_bits(self) -> int:
        return self.n_registers.bit_length() - 1

    @property
    def bit_bits(self) -> int:
        return self.word_width.bit_length() - 1

    @property
    def word_mask(self) -> int:
        return (1 << self.word_width) - 1


def default_config(**overrides) -> MachineConfig:
    """Config from defaults plus SYNCHRONIC_N / SYNCHRONIC_W / SYNCHRONIC_MAXCYCLES."""
    values = {
        "n_registers": int(os.environ.get("SYNCHRONIC_N", DEFAULT_N_REGISTERS)),
        "word_width": int(os.environ.get("SYNCHRONIC_W", DEFAULT_WORD_WIDTH)),
        "max_cycles": int(os.environ.get("SYNCHRONIC_MAXCYCLES", DEFAULT_MAX_CYCLES)),
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    return MachineConfig(**values)


@dataclass(frozen=True)
class Instruction:
    opcode: Opcode
    a: int
    b: int

    def encode(self, config: MachineConfig) -> int:
        return encode(self, config)

    def text(self) -> str:
        if self.opcode is Opcode.JMP:
            return f"jmp {self.a} {self.b}"
        return f"{self.opcode.mnemonic} {self.a}.{self.b}"


def decode(word: int, config: MachineConfig) -> Instruction:
    """Total decode of one word: low 2 bits opcode, then operand fields.

    operand_a is addr_bits wide; operand_b is bit_bits wide for the write
    and conditional opcodes and addr_bits wide for jumps.  High bits are
    ignored.
    """
    opcode = Opcode(word & 0b11)
    a = (word >> 2) & (config.n_registers - 1)
    shift = 2 + config.addr_bits
    if opcode is Opcode.JMP:
        b = (word >> shift) & (config.n_registers - 1)
    else:
        b = (word >> shift) & (config.word_width - 1)
    return Instruction(opcode, a, b)


def encode(instr: Instruction, config: MachineConfig) -> int:
    if not 0 <= instr.a < config.n_registers:
        raise ValueError(f"operand_a {instr.a} out of range")
    limit = config.n_registers if instr.opcode is Opcode.JMP else config.word_width
    if not 0 <= instr.b < limit:
        raise ValueError(f"operand_b {instr.b} out of range")
    return int(instr.opcode) | (instr.a << 2) | (instr.b << (2 + config.addr_bits))


class MachineError(Exception):
    """Base of all machine-level error conditions; pinpoints the cycle."""

    kind = "MachineError"

    def __init__(self, cycle: int, detail: str):
        self.cycle = cycle
        self.detail = detail
        super().__init__(f"{detail} at cycle {cycle}")


class WriteContention(MachineError):
    kind = "WriteContention"

    def __init__(self, cycle: int, register: int, bit: int):
        self.register = register
        self.bit = bit
        super().__init__(cycle, f"WriteContention(register={register}, bit={bit})")


class ActivationContention(MachineError):
    kind = "ActivationContention"

    def __init__(self, cycle: int, register: int):
        self.register = register
        super().__init__(cycle, f"ActivationContention(register={register})")


class AddressOverflow(MachineError):
    kind = "AddressOverflow"

    def __init__(self, cycle: int, register: int):
        self.register = register
        super().__init__(cycle, f"AddressOverflow(register={register})")


class DataExecution(MachineError):
    kind = "DataExecution"

    def __init__(self, cycle: int, register: int):
        self.register = register
        super().__init__(cycle, f"DataExecution(register={register})")


class CycleLimitExceeded(MachineError):
    kind = "CycleLimitExceeded"

    def __init__(self, cycle: int):
        super().__init__(cycle, "CycleLimitExceeded")


RUNNING = "running"
HALTED = "halted"
ERRORED = "errored"


@dataclass
class MachineState:
    """Mutable machine state; registers are sparse (absent means zero)."""

    registers: dict[int, int] = field(default_factory=dict)
    active: set[int] = field(default_factory=set)
    cycle: int = 0
    status: str = RUNNING
    error: MachineError | None = None
    data_regions: frozenset[int] = frozenset()

    def read(self, index: int) -> int:
        return self.registers.get(index, 0)

    def read_bit(self, index: int, bit: int) -> int:
        return (self.registers.get(index, 0) >> bit) & 1

    def write_bit(self, index: int, bit: int, value: int) -> None:
        word = self.registers.get(index, 0)
        if value:
            word |= 1 << bit
        else:
            word &= ~(1 << bit)
        if word:
            self.registers[index] = word
        else:
            self.registers.pop(index, None)

    def copy(self) -> "MachineState":
        return MachineState(
            registers=dict(self.registers),
            active=set(self.active),
            cycle=self.cycle,
            status=self.status,
            error=self.error,
            data_regions=self.data_regions,
        )


@dataclass(frozen=True)
class TraceRecord:
    """One committed cycle: activation at start, writes, next activation."""

    cycle: int
    active: tuple[int, ...]
    writes: tuple[tuple[int, int, int], ...]
    next_active: tuple[int, ...]


def step(state: MachineState, config: MachineConfig) -> TraceRecord:
    """Execute one cycle in place and return its trace record.

    Raises MachineError without committing anything, leaving the state at
    the failing cycle; the caller marks the state errored.
    """
    if state.status != RUNNING:
        raise RuntimeError(f"cannot step a machine in status {state.status!r}")
    if not state.active:
        raise RuntimeError("cannot step with an empty activation set")

    cycle = state.cycle
    active = sorted(state.active)
    top = config.n_registers - 1

    if config.guard_checks and state.data_regions:
        for r in active:
            if r in state.data_regions:
                raise DataExecution(cycle, r)

    # Phase 1: every active register decodes its start-of-cycle contents.
    writes: dict[tuple[int, int], int] = {}
    successor_counts: dict[int, int] = {}
    for r in active:
        instr = decode(state.registers.get(r, 0), config)
        op = instr.opcode
        if op is Opcode.JMP:
            if instr.a + instr.b > top:
                raise AddressOverflow(cycle, instr.a + instr.b)
            successors = range(instr.a, instr.a + instr.b + 1)
        elif op is Opcode.CND:
            succ = r + 2 if state.read_bit(instr.a, instr.b) else r + 1
            if succ > top:
                raise AddressOverflow(cycle, succ)
            successors = (succ,)
        else:
            key = (instr.a, instr.b)
            if key in writes:
                raise WriteContention(cycle, instr.a, instr.b)
            writes[key] = int(op)  # WR0 -> 0, WR1 -> 1
            if r + 1 > top:
                raise AddressOverflow(cycle, r + 1)
            successors = (r + 1,)
        for s in successors:
            successor_counts[s] = successor_counts.get(s, 0) + 1

    for s in sorted(successor_counts):
        if s != 0 and successor_counts[s] > 1:
            raise ActivationContention(cycle, s)

    # Phase 2: commit writes, then swap in the next activation set.
    for (reg, bit), value in writes.items():
        state.write_bit(reg, bit, value)
    next_active = set(successor_counts)
    next_active.discard(0)
    state.active = next_active
    state.cycle = cycle + 1
    if not next_active:
        state.status = HALTED

    return TraceRecord(
        cycle=cycle,
        active=tuple(active),
        writes=tuple(sorted((r, b, v) for (r, b), v in writes.items())),
        next_active=tuple(sorted(next_active)),
    )


@dataclass
class RunResult:
    """Outcome of running an image: final state plus parallelism counters."""

    state: MachineState
    cycles: int
    peak_active: int
    total_active: int
    error: MachineError | None = None
    trace: list[TraceRecord] | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def mean_active(self) -> float:
        return self.total_active / self.cycles if self.cycles else 0.0


def run(state: MachineState, config: MachineConfig, trace: bool = False) -> RunResult:
    """Iterate step until halt, error, or the cycle limit.

    The state is advanced in place.  Machine errors are captured in the
    result (status becomes errored), not raised.
    """
    records: list[TraceRecord] | None = [] if trace else None
    peak = 0
    total = 0
    error: MachineError | None = None
    while state.status == RUNNING:
        if state.cycle >= config.max_cycles:
            error = CycleLimitExceeded(state.cycle)
            break
        size = len(state.active)
        try:
            record = step(state, config)
        except MachineError as exc:
            # the failing cycle committed nothing and does not count
            error = exc
            break
        peak = max(peak, size)
        total += size
        if records is not None:
            records.append(record)
    if error is not None:
        state.status = ERRORED
        state.error = error
    return RunResult(
        state=state,
        cycles=state.cycle,
        peak_active=peak,
        total_active=total,
        error=error,
        trace=records,
    )
