"""Value algebra for interstring evaluation: unsigned words plus an operator table."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable


@dataclass(frozen=True)
class Operator:
    name: str
    arity: int
    fn: Callable[..., int]


def _shl(width):
    def op(a, b):
        return 0 if b >= width else (a << b) & ((1 << width) - 1)

    return op


def _shr(width):
    def op(a, b):
        return 0 if b >= width else a >> b

    return op


def default_operators(width: int) -> dict[str, Operator]:
    mask = (1 << width) - 1
    table = {
        "add": Operator("add", 2, lambda a, b: (a + b) & mask),
        "sub": Operator("sub", 2, lambda a, b: (a - b) & mask),
        "mul": Operator("mul", 2, lambda a, b: (a * b) & mask),
        "and": Operator("and", 2, lambda a, b: a & b),
        "or": Operator("or", 2, lambda a, b: a | b),
        "xor": Operator("xor", 2, lambda a, b: a ^ b),
        "not": Operator("not", 1, lambda a: (~a) & mask),
        "shl": Operator("shl", 2, _shl(width)),
        "shr": Operator("shr", 2, _shr(width)),
        "eq": Operator("eq", 2, lambda a, b: 1 if a == b else 0),
        "lt": Operator("lt", 2, lambda a, b: 1 if a < b else 0),
        "mov": Operator("mov", 1, lambda a: a),
    }
    return table


@dataclass(frozen=True)
class Algebra:
    """Unsigned integers modulo 2**width with a named operator table."""

    width: int = 32
    operators: dict[str, Operator] = field(default_factory=dict)

    def __post_init__(self):
        if not self.operators:
            object.__setattr__(self, "operators", default_operators(self.width))

    @property
    def mask(self) -> int:
        return (1 << self.width) - 1

    def has(self, name: str) -> bool:
        return name in self.operators

    def arity(self, name: str) -> int:
        return self.operators[name].arity

    def apply(self, name: str, args: list[int]) -> int:
        op = self.operators[name]
        if len(args) != op.arity:
            raise ValueError(f"operator {name} expects {op.arity} operands, got {len(args)}")
        return op.fn(*args) & self.mask
