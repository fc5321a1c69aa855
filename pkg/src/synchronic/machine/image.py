"""Textual image format: initial register contents plus the entry activation set.

Line oriented, UTF-8, ``#`` starts a comment.  An optional ``config`` header
pins the machine geometry; ``entry`` names the registers active at cycle 0;
``reg`` lines define register contents either as one of the four
instructions or as a raw ``data`` word (data registers are guard-mapped).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    Instruction,
    MachineConfig,
    MachineState,
    Opcode,
    decode,
    default_config,
    encode,
)


class ImageError(Exception):
    """Malformed image text or contents that do not fit the machine."""

    stage = "parse"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class Image:
    """Initial register words, entry set, and guard metadata."""

    registers: dict[int, int] = field(default_factory=dict)
    entry: frozenset[int] = frozenset()
    data_regions: frozenset[int] = frozenset()
    config: MachineConfig | None = None

    def defined_indices(self) -> list[int]:
        return sorted(set(self.registers) | self.data_regions)


def _parse_bit_operand(text: str, line: int) -> tuple[int, int]:
    if "." not in text:
        raise ImageError(f"expected <reg>.<bit> operand, got {text!r}", line)
    a_text, b_text = text.split(".", 1)
    try:
        return int(a_text), int(b_text)
    except ValueError:
        raise ImageError(f"bad operand {text!r}", line) from None


def parse_register_statement(tokens: list[str], config: MachineConfig, line: int) -> tuple[int, bool]:
    """Parse the right-hand side of a reg line into (word, is_data)."""
    if not tokens:
        raise ImageError("missing register statement", line)
    mnemonic = tokens[0]
    if mnemonic == "data":
        if len(tokens) != 2:
            raise ImageError("data takes exactly one value", line)
        try:
            value = int(tokens[1], 0)
        except ValueError:
            raise ImageError(f"bad data literal {tokens[1]!r}", line) from None
        if not 0 <= value <= config.word_mask:
            raise ImageError(f"data value {value} exceeds {config.word_width}-bit word", line)
        return value, True
    if mnemonic in ("wr0", "wr1", "cnd"):
        if len(tokens) != 2:
            raise ImageError(f"{mnemonic} takes one <reg>.<bit> operand", line)
        a, b = _parse_bit_operand(tokens[1], line)
        opcode = {"wr0": Opcode.WR0, "wr1": Opcode.WR1, "cnd": Opcode.CND}[mnemonic]
    elif mnemonic == "jmp":
        if len(tokens) != 3:
            raise ImageError("jmp takes a target and an offset", line)
        try:
            a, b = int(tokens[1]), int(tokens[2])
        except ValueError:
            raise ImageError("bad jmp operands", line) from None
        opcode = Opcode.JMP
    else:
        raise ImageError(f"unknown statement {mnemonic!r}", line)
    try:
        return encode(Instruction(opcode, a, b), config), False
    except ValueError as exc:
        raise ImageError(str(exc), line) from None


def load_image(text: str, config: MachineConfig | None = None) -> Image:
    """Parse image text.  A config header overrides the passed-in config."""
    header_config: MachineConfig | None = None
    effective = config or default_config()
    registers: dict[int, int] = {}
    data_regions: set[int] = set()
    entry: set[int] = set()
    saw_entry = False
    first_directive_seen = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        tokens = stripped.split()
        directive = tokens[0]

        if directive == "config":
            if first_directive_seen:
                raise ImageError("config header must come first", lineno)
            pairs = {}
            for tok in tokens[1:]:
                if "=" not in tok:
                    raise ImageError(f"bad config token {tok!r}", lineno)
                key, value = tok.split("=", 1)
                try:
                    pairs[key] = int(value)
                except ValueError:
                    raise ImageError(f"bad config value {tok!r}", lineno) from None
            if set(pairs) != {"n", "w"}:
                raise ImageError("config header needs n=<int> w=<int>", lineno)
            try:
                header_config = MachineConfig(
                    n_registers=pairs["n"],
                    word_width=pairs["w"],
                    max_cycles=effective.max_cycles,
                    guard_checks=effective.guard_checks,
                )
            except ValueError as exc:
                raise ImageError(str(exc), lineno) from None
            effective = header_config
            first_directive_seen = True
            continue

        first_directive_seen = True
        if directive == "entry":
            if len(tokens) < 2:
                raise ImageError("entry needs at least one register index", lineno)
            for tok in tokens[1:]:
                try:
                    idx = int(tok)
                except ValueError:
                    raise ImageError(f"bad entry index {tok!r}", lineno) from None
                if not 1 <= idx < effective.n_registers:
                    raise ImageError(f"entry index {idx} out of range", lineno)
                entry.add(idx)
            saw_entry = True
        elif directive == "reg":
            if len(tokens) < 4 or tokens[2] != "=":
                raise ImageError("expected: reg <idx> = <statement>", lineno)
            try:
                idx = int(tokens[1])
            except ValueError:
                raise ImageError(f"bad register index {tokens[1]!r}", lineno) from None
            if not 1 <= idx < effective.n_registers:
                raise ImageError(f"register index {idx} out of range", lineno)
            if idx in registers or idx in data_regions:
                raise ImageError(f"duplicate definition of register {idx}", lineno)
            word, is_data = parse_register_statement(tokens[3:], effective, lineno)
            registers[idx] = word
            if is_data:
                data_regions.add(idx)
        else:
            raise ImageError(f"unknown directive {directive!r}", lineno)

    if not saw_entry:
        raise ImageError("no entry directive")
    return Image(
        registers=registers,
        entry=frozenset(entry),
        data_regions=frozenset(data_regions),
        config=header_config,
    )


def _statement_text(index: int, word: int, is_data: bool, config: MachineConfig) -> str:
    if not is_data:
        instr = decode(word, config)
        if encode(instr, config) == word:
            return f"reg {index} = {instr.text()}"
    return f"reg {index} = data {word}"


def dump_image(image: Image, config: MachineConfig | None = None) -> str:
    """Emit image text; load_image of the result reproduces the image."""
    config = image.config or config or default_config()
    lines = [f"config n={config.n_registers} w={config.word_width}"]
    if image.entry:
        lines.append("entry " + " ".join(str(i) for i in sorted(image.entry)))
    for index in image.defined_indices():
        word = image.registers.get(index, 0)
        lines.append(_statement_text(index, word, index in image.data_regions, config))
    return "\n".join(lines) + "\n"


def dump_state(state: MachineState, config: MachineConfig | None = None) -> str:
    """Emit the current machine state in image format.

    The activation set stands in for the entry directive, so a freshly
    booted image dumps back to itself; halted states carry no entry line.
    """
    config = config or default_config()
    lines = [f"config n={config.n_registers} w={config.word_width}"]
    lines.append(f"# cycle={state.cycle} status={state.status}")
    if state.active:
        lines.append("entry " + " ".join(str(i) for i in sorted(state.active)))
    for index in sorted(set(state.registers) | set(state.data_regions)):
        word = state.registers.get(index, 0)
        lines.append(_statement_text(index, word, index in state.data_regions, config))
    return "\n".join(lines) + "\n"


def boot(image: Image, config: MachineConfig | None = None) -> MachineState:
    """Initial machine state for an image; validates that the image fits."""
    config = image.config or config or default_config()
    if not image.entry:
        raise ImageError("image has an empty entry set")
    for idx in image.defined_indices():
        if not 1 <= idx < config.n_registers:
            raise ImageError(f"register index {idx} does not fit machine of {config.n_registers}")
    for idx in image.entry:
        if not 1 <= idx < config.n_registers:
            raise ImageError(f"entry index {idx} does not fit machine of {config.n_registers}")
    registers = {}
    for idx, word in image.registers.items():
        if word > config.word_mask:
            raise ImageError(f"register {idx} value exceeds {config.word_width}-bit word")
        if word:
            registers[idx] = word
    return MachineState(
        registers=registers,
        active=set(image.entry),
        data_regions=frozenset(image.data_regions),
    )
