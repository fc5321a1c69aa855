"""Two-pass assembler for the flat, labeled assembly language.

Earth stays close to the machine word: four mnemonics plus ``halt`` sugar,
``data`` words, label and const operands, and parameterized macro blocks
that expand textually with instance-unique label renaming.  Pass one
expands macros and assigns consecutive register indices (starting at 1,
register 0 is the activation sink); pass two resolves names and encodes
words.

The grammar is a superset of the machine image format: ``config``,
``entry`` with numeric indices and pinned ``reg <idx> = ...`` lines all
assemble, so disassembler output feeds straight back in.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..machine.core import Instruction, MachineConfig, Opcode, default_config, encode
from ..machine.image import Image

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_MACRO_HEAD_RE = re.compile(rf"^macro\s+({_IDENT})\s*\(([^)]*)\)\s*\{{$")
_USE_RE = re.compile(rf"^use\s+({_IDENT})\s*\(([^)]*)\)$")
_LABEL_RE = re.compile(rf"^({_IDENT})\s*:\s*(.*)$")
_NAME_PLUS_RE = re.compile(rf"^({_IDENT})(?:\+(\d+))?$")


class AsmError(Exception):
    stage = "parse"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class SymbolMap:
    """Resolved label addresses and macro-instance register regions."""

    labels: dict[str, int] = field(default_factory=dict)
    regions: dict[str, tuple[int, int]] = field(default_factory=dict)

    def format(self) -> str:
        lines = [f"label {name} {idx}" for name, idx in sorted(self.labels.items())]
        lines += [
            f"region {name} {start} {end}"
            for name, (start, end) in sorted(self.regions.items())
        ]
        return "\n".join(lines) + ("\n" if lines else "")


@dataclass
class AsmResult:
    image: Image
    symbols: SymbolMap
    config: MachineConfig


@dataclass
class _Line:
    text: str
    lineno: int
    instance: str | None  # innermost macro instance path, if any


_REGION_BEGIN = "\x00begin"
_REGION_END = "\x00end"


def _strip(raw: str) -> str:
    return raw.split("#", 1)[0].strip()


def _collect_macros(lines: list[tuple[int, str]]) -> tuple[dict, list[tuple[int, str]]]:
    macros: dict[str, tuple[list[str], list[tuple[int, str]]]] = {}
    rest: list[tuple[int, str]] = []
    i = 0
    while i < len(lines):
        lineno, text = lines[i]
        head = _MACRO_HEAD_RE.match(text)
        if not head:
            if text == "}":
                raise AsmError("unmatched '}'", lineno)
            rest.append((lineno, text))
            i += 1
            continue
        name = head.group(1)
        if name in macros:
            raise AsmError(f"duplicate macro {name!r}", lineno)
        params = [p.strip() for p in head.group(2).split(",") if p.strip()]
        if len(set(params)) != len(params):
            raise AsmError(f"duplicate macro parameter in {name!r}", lineno)
        body: list[tuple[int, str]] = []
        i += 1
        while i < len(lines) and lines[i][1] != "}":
            if _MACRO_HEAD_RE.match(lines[i][1]):
                raise AsmError("nested macro definitions are not supported", lines[i][0])
            body.append(lines[i])
            i += 1
        if i == len(lines):
            raise AsmError(f"macro {name!r} is missing its closing '}}'", lineno)
        i += 1  # skip '}'
        macros[name] = (params, body)
    return macros, rest


def _substitute(text: str, mapping: dict[str, str]) -> str:
    if not mapping:
        return text
    names = sorted(mapping, key=len, reverse=True)
    pattern = re.compile(r"\b(" + "|".join(re.escape(n) for n in names) + r")\b")
    return pattern.sub(lambda m: mapping[m.group(1)], text)


def _expand(
    lines: list[tuple[int, str]],
    macros: dict,
    stack: tuple[str, ...],
    counter: list[int],
    instance: str | None,
    out: list[_Line],
) -> None:
    for lineno, text in lines:
        use = _USE_RE.match(text)
        if not use:
            out.append(_Line(text, lineno, instance))
            continue
        name = use.group(1)
        if name not in macros:
            raise AsmError(f"unknown macro {name!r}", lineno)
        if name in stack:
            raise AsmError(f"recursive macro expansion of {name!r}", lineno)
        params, body = macros[name]
        args = [a.strip() for a in use.group(2).split(",") if a.strip()]
        if len(args) != len(params):
            raise AsmError(
                f"macro {name!r} expects {len(params)} arguments, got {len(args)}", lineno
            )
        counter[0] += 1
        ordinal = counter[0]
        path = f"{name}#{ordinal}" if instance is None else f"{instance}/{name}#{ordinal}"
        local_labels = [
            m.group(1)
            for _, body_text in body
            if (m := _LABEL_RE.match(body_text))
        ]
        mapping = dict(zip(params, args))
        for label in local_labels:
            if label in mapping:
                raise AsmError(
                    f"macro {name!r}: label {label!r} shadows a parameter", lineno
                )
            mapping[label] = f"{label}__u{ordinal}"
        substituted = [(ln, _substitute(t, mapping)) for ln, t in body]
        out.append(_Line(_REGION_BEGIN, lineno, path))
        _expand(substituted, macros, stack + (name,), counter, path, out)
        out.append(_Line(_REGION_END, lineno, path))


def _parse_operand(text: str, lineno: int):
    """An operand is an int literal, a name, or name+int; resolved in pass 2."""
    try:
        return int(text, 0)
    except ValueError:
        pass
    m = _NAME_PLUS_RE.match(text)
    if not m:
        raise AsmError(f"bad operand {text!r}", lineno)
    return (m.group(1), int(m.group(2) or 0))


@dataclass
class _Statement:
    kind: str  # wr0 wr1 cnd jmp data
    operands: tuple
    lineno: int
    index: int | None = None  # assigned in placement
    instance: str | None = None


def _parse_statement(tokens: list[str], lineno: int) -> _Statement:
    kind = tokens[0]
    if kind == "halt":
        if len(tokens) != 1:
            raise AsmError("halt takes no operands", lineno)
        return _Statement("jmp", (0, 0), lineno)
    if kind in ("wr0", "wr1", "cnd"):
        if len(tokens) != 2 or "." not in tokens[1]:
            raise AsmError(f"{kind} takes one <reg>.<bit> operand", lineno)
        a_text, b_text = tokens[1].rsplit(".", 1)
        return _Statement(kind, (_parse_operand(a_text, lineno), _parse_operand(b_text, lineno)), lineno)
    if kind == "jmp":
        if len(tokens) != 3:
            raise AsmError("jmp takes a target and an offset", lineno)
        return _Statement(kind, (_parse_operand(tokens[1], lineno), _parse_operand(tokens[2], lineno)), lineno)
    if kind == "data":
        if len(tokens) != 2:
            raise AsmError("data takes exactly one value", lineno)
        return _Statement(kind, (_parse_operand(tokens[1], lineno),), lineno)
    raise AsmError(f"unknown statement {kind!r}", lineno)


def assemble(
    source: str,
    config: MachineConfig | None = None,
    strict_regions: bool = False,
) -> AsmResult:
    """Assemble earth source into an image, symbol map and guard map."""
    effective = config or default_config()
    raw_lines = [
        (lineno, stripped)
        for lineno, raw in enumerate(source.splitlines(), start=1)
        if (stripped := _strip(raw))
    ]
    macros, rest = _collect_macros(raw_lines)
    flat: list[_Line] = []
    _expand(rest, macros, (), [0], None, flat)

    # Placement pass: bind labels, assign consecutive indices from 1.
    labels: dict[str, int] = {}
    consts: dict[str, int] = {}
    statements: list[_Statement] = []
    entry_operands: list[tuple] = []
    region_spans: dict[str, list[int]] = {}
    open_instances: list[str] = []
    used_indices: dict[int, int] = {}  # index -> lineno
    cursor = 1

    def place(stmt: _Statement, pinned: int | None) -> None:
        nonlocal cursor
        index = pinned if pinned is not None else cursor
        if index in used_indices:
            raise AsmError(
                f"register {index} already defined at line {used_indices[index]}", stmt.lineno
            )
        if index < 1:
            raise AsmError("register 0 is the reserved sink", stmt.lineno)
        used_indices[index] = stmt.lineno
        stmt.index = index
        stmt.instance = open_instances[-1] if open_instances else None
        statements.append(stmt)
        cursor = index + 1
        for path in open_instances:
            region_spans.setdefault(path, [index, index])
            span = region_spans[path]
            span[0] = min(span[0], index)
            span[1] = max(span[1], index)

    for line in flat:
        if line.text == _REGION_BEGIN:
            open_instances.append(line.instance)
            continue
        if line.text == _REGION_END:
            open_instances.pop()
            continue
        text = line.text
        label_match = _LABEL_RE.match(text)
        if label_match:
            name = label_match.group(1)
            if name in labels:
                raise AsmError(f"duplicate label {name!r}", line.lineno)
            labels[name] = cursor
            text = label_match.group(2).strip()
            if not text:
                continue
        tokens = text.split()
        directive = tokens[0]
        if directive == "config":
            pairs = dict(tok.split("=", 1) for tok in tokens[1:] if "=" in tok)
            if set(pairs) != {"n", "w"}:
                raise AsmError("config needs n=<int> w=<int>", line.lineno)
            try:
                effective = MachineConfig(
                    n_registers=int(pairs["n"]),
                    word_width=int(pairs["w"]),
                    max_cycles=effective.max_cycles,
                    guard_checks=effective.guard_checks,
                )
            except ValueError as exc:
                raise AsmError(str(exc), line.lineno) from None
        elif directive == "entry":
            if len(tokens) < 2:
                raise AsmError("entry needs at least one label or index", line.lineno)
            entry_operands.extend(
                (_parse_operand(tok, line.lineno), line.lineno) for tok in tokens[1:]
            )
        elif directive == "const":
            if len(tokens) != 4 or tokens[2] != "=":
                raise AsmError("expected: const NAME = <int>", line.lineno)
            name = tokens[1]
            if name in consts:
                raise AsmError(f"duplicate const {name!r}", line.lineno)
            try:
                consts[name] = int(tokens[3], 0)
            except ValueError:
                raise AsmError(f"bad const value {tokens[3]!r}", line.lineno) from None
        elif directive == "at":
            if len(tokens) != 2:
                raise AsmError("at takes one register index", line.lineno)
            try:
                cursor = int(tokens[1])
            except ValueError:
                raise AsmError(f"bad index {tokens[1]!r}", line.lineno) from None
        elif directive == "reg":
            if len(tokens) < 4 or tokens[2] != "=":
                raise AsmError("expected: reg <idx> = <statement>", line.lineno)
            try:
                pinned = int(tokens[1])
            except ValueError:
                raise AsmError(f"bad register index {tokens[1]!r}", line.lineno) from None
            place(_parse_statement(tokens[3:], line.lineno), pinned)
        else:
            place(_parse_statement(tokens, line.lineno), None)

    if not entry_operands:
        raise AsmError("no entry directive")

    # Resolution pass: names to indices, then encode.
    def resolve(operand, lineno: int) -> int:
        if isinstance(operand, int):
            return operand
        name, offset = operand
        if name in labels:
            return labels[name] + offset
        if name in consts:
            return consts[name] + offset
        raise AsmError(f"unknown label or const {name!r}", lineno)

    registers: dict[int, int] = {}
    data_regions: set[int] = set()
    resolved_jmps: list[tuple[_Statement, int, int]] = []
    for stmt in statements:
        if stmt.index >= effective.n_registers:
            raise AsmError(f"register {stmt.index} exceeds the register array", stmt.lineno)
        if stmt.kind == "data":
            value = resolve(stmt.operands[0], stmt.lineno)
            if not 0 <= value <= effective.word_mask:
                raise AsmError(f"data value {value} exceeds word width", stmt.lineno)
            registers[stmt.index] = value
            data_regions.add(stmt.index)
            continue
        a = resolve(stmt.operands[0], stmt.lineno)
        b = resolve(stmt.operands[1], stmt.lineno)
        opcode = {"wr0": Opcode.WR0, "wr1": Opcode.WR1, "cnd": Opcode.CND, "jmp": Opcode.JMP}[stmt.kind]
        if opcode is Opcode.JMP:
            if a + b >= effective.n_registers:
                raise AsmError(
                    f"jmp activation range {a}..{a + b} exceeds the register array", stmt.lineno
                )
            resolved_jmps.append((stmt, a, b))
        try:
            registers[stmt.index] = encode(Instruction(opcode, a, b), effective)
        except ValueError as exc:
            raise AsmError(f"operand out of range: {exc}", stmt.lineno) from None

    entry: set[int] = set()
    for operand, lineno in entry_operands:
        idx = resolve(operand, lineno)
        if not 1 <= idx < effective.n_registers:
            raise AsmError(f"entry index {idx} out of range", lineno)
        entry.add(idx)

    symbols = SymbolMap(
        labels=dict(labels),
        regions={path: (span[0], span[1]) for path, span in region_spans.items()},
    )
    if strict_regions:
        _check_regions(resolved_jmps, symbols)

    image = Image(
        registers=registers,
        entry=frozenset(entry),
        data_regions=frozenset(data_regions),
        config=None,
    )
    return AsmResult(image=image, symbols=symbols, config=effective)


def _check_regions(resolved_jmps: list[tuple[_Statement, int, int]], symbols: SymbolMap) -> None:
    """With strict regions, a jmp fan-out may not cross its region's end."""
    for stmt, target, offset in resolved_jmps:
        if stmt.instance is None or target == 0:
            continue
        start, end = symbols.regions[stmt.instance]
        if start <= target <= end and target + offset > end:
            raise AsmError(
                f"jmp fan-out {target}..{target + offset} crosses region end {end}",
                stmt.lineno,
            )
