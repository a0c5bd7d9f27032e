"""Reference answers.  Deliberately simple, never charged to a counter."""

from __future__ import annotations

from .bitword import BitWord
from .constgen import FieldLayout


def nu(x: BitWord) -> int:
    """Number of set bits, read off the binary digits one by one."""
    return format(x.value, "b").count("1")


def parity(x: BitWord) -> int:
    return nu(x) % 2


def field_shift(x: BitWord, layout: FieldLayout) -> BitWord:
    """Copy each field's low bit to its high bit and clear the low bit."""
    v = x.value
    for i, j in layout.fields:
        b = (v >> i) & 1
        v &= ~((1 << i) | (1 << j))
        v |= b << j
    return BitWord(v, x.width)
