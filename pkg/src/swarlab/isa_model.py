"""Instruction models and the counting context algorithms execute through.

Three models are defined.  OPAL admits only logical operations, addition and
subtraction on straight-line code; PAL adds flow control (``if``/``while``)
and comparisons; FULL adds shifts and remainders for the shift/division based
methods.  Every operation executed through a :class:`CountingContext` is
charged to exactly one :class:`OpClass`, and an operation the active model
does not admit raises :class:`ModelViolation` before it runs.

Counting follows C operator usage: one unit per operator application.
Immediate operands are free; ``LOADCONST`` is charged only when a constant is
materialised into a register variable and ``MOVE`` for register copies.  Both
are reported but left out of the headline total.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from . import bitword
from .bitword import BitWord, WidthError, _make, _mask

__all__ = [
    "OpClass",
    "InstructionModel",
    "ModelViolation",
    "OpCounter",
    "RunReport",
    "CountingContext",
    "counted_op",
    "CSV_HEADER",
]


class OpClass(enum.IntEnum):
    AND = 0
    OR = 1
    XOR = 2
    NOT = 3
    ADD = 4
    SUB = 5
    LOADCONST = 6
    MOVE = 7
    COMPARE = 8
    BRANCH = 9
    SHIFT = 10
    MOD = 11


_OPAL_CLASSES = frozenset(
    {
        OpClass.AND,
        OpClass.OR,
        OpClass.XOR,
        OpClass.NOT,
        OpClass.ADD,
        OpClass.SUB,
        OpClass.LOADCONST,
        OpClass.MOVE,
    }
)
_PAL_CLASSES = _OPAL_CLASSES | {OpClass.BRANCH, OpClass.COMPARE}
_FULL_CLASSES = _PAL_CLASSES | {OpClass.SHIFT, OpClass.MOD}


class InstructionModel(enum.Enum):
    OPAL = "OPAL"
    PAL = "PAL"
    FULL = "FULL"

    @property
    def allowed_classes(self) -> frozenset[OpClass]:
        return _ALLOWED[self]

    def admits(self, cls: OpClass) -> bool:
        return cls in _ALLOWED[self]


_ALLOWED = {
    InstructionModel.OPAL: _OPAL_CLASSES,
    InstructionModel.PAL: frozenset(_PAL_CLASSES),
    InstructionModel.FULL: frozenset(_FULL_CLASSES),
}


class ModelViolation(RuntimeError):
    """An operation outside the active instruction model was attempted."""

    def __init__(self, model: InstructionModel, cls: OpClass):
        super().__init__(f"{cls.name} is not allowed in the {model.value} model")
        self.model = model
        self.op_class = cls


_HIDDEN = (OpClass.LOADCONST, OpClass.MOVE)


@dataclass(frozen=True)
class OpCounter:
    """Per-class execution counts, indexed by :class:`OpClass`."""

    counts: tuple[int, ...] = (0,) * len(OpClass)

    def __getitem__(self, cls: OpClass) -> int:
        return self.counts[cls]

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def headline(self) -> int:
        """Operator count without register loads and copies."""
        return self.total - sum(self.counts[c] for c in _HIDDEN)

    def as_dict(self) -> dict[str, int]:
        return {c.name.lower(): self.counts[c] for c in OpClass}


CSV_HEADER = (
    "algorithm",
    "model",
    "width",
    "input",
    "output",
    "total",
    *(c.name.lower() for c in OpClass),
)


@dataclass(frozen=True)
class RunReport:
    algorithm: str
    model: str
    width: int
    input: str
    output: str | int
    counter: OpCounter
    branches_taken: int = 0

    def csv_row(self) -> list:
        # "total" is the headline operator count; loads and moves have
        # their own columns.
        return [
            self.algorithm,
            self.model,
            self.width,
            self.input,
            self.output,
            self.counter.headline,
            *self.counter.counts,
        ]


_AND, _OR, _XOR, _NOT, _ADD, _SUB = 0, 1, 2, 3, 4, 5
_LOADCONST, _MOVE, _COMPARE, _BRANCH, _SHIFT, _MOD = 6, 7, 8, 9, 10, 11


class CountingContext:
    """Executes word operations for one run and tallies them by class.

    Contexts are single-use and not meant to be shared between threads.
    """

    __slots__ = ("model", "width", "_mask", "_counts", "_taken", "_extras")

    def __init__(self, model: InstructionModel, width: int):
        self.model = model
        self.width = width
        self._mask = _mask(width)
        self._counts = [0] * len(OpClass)
        self._taken = 0
        # Classes beyond OPAL are the only ones that need a model check.
        self._extras = model.allowed_classes - _OPAL_CLASSES

    def _require(self, cls: OpClass) -> None:
        if cls not in self._extras:
            raise ModelViolation(self.model, cls)

    def _check(self, a: BitWord) -> None:
        if a._width != self.width:
            raise WidthError(f"operand width {a._width} in a {self.width}-bit context")

    def word(self, value: int) -> BitWord:
        """An immediate operand; not charged."""
        return _make(value & self._mask, self.width)

    def and_(self, a: BitWord, b: BitWord) -> BitWord:
        w = self.width
        if a._width != w or b._width != w:
            raise WidthError("operand width does not match the context")
        self._counts[_AND] += 1
        return _make(a._value & b._value, w)

    def or_(self, a: BitWord, b: BitWord) -> BitWord:
        w = self.width
        if a._width != w or b._width != w:
            raise WidthError("operand width does not match the context")
        self._counts[_OR] += 1
        return _make(a._value | b._value, w)

    def xor(self, a: BitWord, b: BitWord) -> BitWord:
        w = self.width
        if a._width != w or b._width != w:
            raise WidthError("operand width does not match the context")
        self._counts[_XOR] += 1
        return _make(a._value ^ b._value, w)

    def not_(self, a: BitWord) -> BitWord:
        self._check(a)
        self._counts[_NOT] += 1
        return _make(a._value ^ self._mask, self.width)

    def add(self, a: BitWord, b: BitWord) -> BitWord:
        w = self.width
        if a._width != w or b._width != w:
            raise WidthError("operand width does not match the context")
        self._counts[_ADD] += 1
        return _make((a._value + b._value) & self._mask, w)

    def sub(self, a: BitWord, b: BitWord) -> BitWord:
        w = self.width
        if a._width != w or b._width != w:
            raise WidthError("operand width does not match the context")
        self._counts[_SUB] += 1
        return _make((a._value - b._value) & self._mask, w)

    def const(self, value: int | BitWord) -> BitWord:
        """Materialise a constant into a register."""
        self._counts[_LOADCONST] += 1
        if isinstance(value, BitWord):
            self._check(value)
            return value
        return _make(value & self._mask, self.width)

    def move(self, a: BitWord) -> BitWord:
        self._check(a)
        self._counts[_MOVE] += 1
        return a

    def shr(self, a: BitWord, k: int) -> BitWord:
        self._require(OpClass.SHIFT)
        self._check(a)
        self._counts[_SHIFT] += 1
        return bitword.shr(a, k)

    def shl(self, a: BitWord, k: int) -> BitWord:
        self._require(OpClass.SHIFT)
        self._check(a)
        self._counts[_SHIFT] += 1
        return bitword.shl(a, k)

    def mod(self, a: BitWord, m: int) -> BitWord:
        """Remainder by a small modulus, left in a register of full width."""
        self._require(OpClass.MOD)
        self._check(a)
        self._counts[_MOD] += 1
        return _make(bitword.rem(a, m), self.width)

    def nonzero(self, a: BitWord) -> BitWord:
        """``a != 0`` as a 0/1 register value."""
        self._require(OpClass.COMPARE)
        self._check(a)
        self._counts[_COMPARE] += 1
        return _make(1 if a._value else 0, self.width)

    def charge_branch(self) -> None:
        self._require(OpClass.BRANCH)
        self._counts[_BRANCH] += 1

    def test(self, a: BitWord) -> bool:
        """Evaluate a loop or ``if`` condition ``a != 0``; one BRANCH."""
        if _BRANCH_CLASS not in self._extras:
            raise ModelViolation(self.model, OpClass.BRANCH)
        self._counts[_BRANCH] += 1
        if a._value:
            self._taken += 1
            return True
        return False

    def op(self, cls: OpClass, *operands):
        """Generic dispatch by operation class."""
        return _DISPATCH[cls](self, *operands)

    @property
    def counter(self) -> OpCounter:
        return OpCounter(tuple(self._counts))

    @property
    def branches_taken(self) -> int:
        return self._taken

    def report(self, algorithm: str, input: BitWord, output) -> RunReport:
        if isinstance(output, BitWord):
            output = bitword.to_hex(output)
        return RunReport(
            algorithm=algorithm,
            model=self.model.value,
            width=self.width,
            input=bitword.to_hex(input),
            output=output,
            counter=self.counter,
            branches_taken=self._taken,
        )


_BRANCH_CLASS = OpClass.BRANCH

_DISPATCH = {
    OpClass.AND: CountingContext.and_,
    OpClass.OR: CountingContext.or_,
    OpClass.XOR: CountingContext.xor,
    OpClass.NOT: CountingContext.not_,
    OpClass.ADD: CountingContext.add,
    OpClass.SUB: CountingContext.sub,
    OpClass.LOADCONST: CountingContext.const,
    OpClass.MOVE: CountingContext.move,
    OpClass.COMPARE: CountingContext.nonzero,
    OpClass.BRANCH: CountingContext.test,
    OpClass.SHIFT: CountingContext.shr,
    OpClass.MOD: CountingContext.mod,
}


def counted_op(ctx: CountingContext, cls: OpClass, *operands):
    return ctx.op(cls, *operands)
