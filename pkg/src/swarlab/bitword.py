"""Fixed-width unsigned words with two's-complement wraparound.

A ``BitWord`` is the value universe for every algorithm in the package.  All
arithmetic is modulo ``2**width`` and no operation ever changes the width.
Bit positions are numbered from 0 at the least significant end.
"""

from __future__ import annotations

import string

__all__ = [
    "BitWord",
    "WidthError",
    "add",
    "sub",
    "and_",
    "or_",
    "xor",
    "not_",
    "shr",
    "shl",
    "rem",
    "bit",
    "from_hex",
    "to_hex",
    "zero",
    "one",
    "ones",
]

HOST_WORD_LIMIT = 1 << 64

_MASKS: dict[int, int] = {}


class WidthError(ValueError):
    """Operands of different widths were combined."""


def _mask(width: int) -> int:
    m = _MASKS.get(width)
    if m is None:
        m = _MASKS[width] = (1 << width) - 1
    return m


_new = object.__new__


class BitWord:
    """An immutable ``width``-bit unsigned integer."""

    __slots__ = ("_value", "_width")

    def __init__(self, value: int, width: int):
        if not isinstance(width, int) or width < 1:
            raise ValueError(f"width must be a positive integer, got {width!r}")
        if not isinstance(value, int):
            raise TypeError(f"value must be an int, got {type(value).__name__}")
        if value < 0 or value >> width:
            raise ValueError(f"value {value:#x} does not fit in {width} bits")
        self._value = value
        self._width = width

    @classmethod
    def wrap(cls, value: int, width: int) -> BitWord:
        """Reduce an arbitrary Python int modulo ``2**width``."""
        if width < 1:
            raise ValueError(f"width must be a positive integer, got {width!r}")
        return _make(value & _mask(width), width)

    @property
    def value(self) -> int:
        return self._value

    @property
    def width(self) -> int:
        return self._width

    def __int__(self) -> int:
        return self._value

    __index__ = __int__

    def __bool__(self) -> bool:
        return self._value != 0

    def __eq__(self, other):
        if isinstance(other, BitWord):
            return self._width == other._width and self._value == other._value
        return NotImplemented

    def __hash__(self):
        return hash((self._width, self._value))

    def __repr__(self):
        return f"BitWord(0x{to_hex(self)}, {self._width})"

    def __reduce__(self):
        return (BitWord, (self._value, self._width))

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __and__(self, other):
        return and_(self, other)

    def __or__(self, other):
        return or_(self, other)

    def __xor__(self, other):
        return xor(self, other)

    def __invert__(self):
        return not_(self)

    def __neg__(self):
        return _make(-self._value & _mask(self._width), self._width)

    def __rshift__(self, k):
        return shr(self, k)

    def __lshift__(self, k):
        return shl(self, k)

    def __mod__(self, m):
        return rem(self, m)


def _make(value: int, width: int) -> BitWord:
    # Unchecked constructor for values already reduced modulo 2**width.
    w = _new(BitWord)
    w._value = value
    w._width = width
    return w


def _same_width(a: BitWord, b: BitWord) -> int:
    if a._width != b._width:
        raise WidthError(f"width mismatch: {a._width} vs {b._width}")
    return a._width


def add(a: BitWord, b: BitWord) -> BitWord:
    w = _same_width(a, b)
    return _make((a._value + b._value) & _mask(w), w)


def sub(a: BitWord, b: BitWord) -> BitWord:
    w = _same_width(a, b)
    return _make((a._value - b._value) & _mask(w), w)


def and_(a: BitWord, b: BitWord) -> BitWord:
    w = _same_width(a, b)
    return _make(a._value & b._value, w)


def or_(a: BitWord, b: BitWord) -> BitWord:
    w = _same_width(a, b)
    return _make(a._value | b._value, w)


def xor(a: BitWord, b: BitWord) -> BitWord:
    w = _same_width(a, b)
    return _make(a._value ^ b._value, w)


def not_(a: BitWord) -> BitWord:
    return _make(a._value ^ _mask(a._width), a._width)


def _check_shift(a: BitWord, k: int) -> None:
    if not 0 <= k < a._width:
        raise ValueError(f"shift amount {k} outside [0, {a._width})")


def shr(a: BitWord, k: int) -> BitWord:
    """Logical right shift with zero fill."""
    _check_shift(a, k)
    return _make(a._value >> k, a._width)


def shl(a: BitWord, k: int) -> BitWord:
    _check_shift(a, k)
    return _make((a._value << k) & _mask(a._width), a._width)


def rem(a: BitWord, m: int) -> int:
    """Remainder of ``a`` divided by a small host-word modulus, as an int."""
    if m < 2:
        raise ValueError(f"modulus must be at least 2, got {m}")
    if m >= HOST_WORD_LIMIT:
        raise ValueError(f"modulus {m} does not fit in a host word")
    return a._value % m


def bit(a: BitWord, i: int) -> int:
    if not 0 <= i < a._width:
        raise IndexError(f"bit position {i} outside [0, {a._width})")
    return (a._value >> i) & 1


def zero(width: int) -> BitWord:
    return BitWord(0, width)


def one(width: int) -> BitWord:
    return BitWord(1, width)


def ones(width: int) -> BitWord:
    return BitWord(_mask(width), width)


def from_hex(s: str, width: int) -> BitWord:
    """Parse hex text (optionally ``0x``-prefixed) or ``0o``-prefixed octal.

    Raises ValueError on foreign characters or when the value does not fit
    in ``width`` bits.
    """
    text = s.strip()
    base, digits = 16, string.hexdigits
    low = text.lower()
    if low.startswith("0o"):
        base, digits, text = 8, string.octdigits, text[2:]
    elif low.startswith("0x"):
        text = text[2:]
    if not text or any(c not in digits for c in text):
        raise ValueError(f"not a base-{base} number: {s!r}")
    return BitWord(int(text, base), width)


def to_hex(a: BitWord) -> str:
    """Upper-case hex, most significant digit first, no prefix or padding."""
    return format(a._value, "X")
