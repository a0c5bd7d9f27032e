"""Field layouts and per-stage constants for the SWAR algorithms.

Every constant is derived from a layout rule, so any supported width can be
generated.  The 32-bit outputs coincide with the hand-written listings the
algorithms were first published with.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .bitword import BitWord

__all__ = [
    "Kind",
    "FieldLayout",
    "MaskSet",
    "FoldLayout",
    "hibits_mask",
    "shift_constants",
    "parity_masks",
    "logsq_masks",
    "logsq_keep_care",
    "fold_layout",
    "fold_condition_holds",
    "hakmem_constants",
    "sqrt_field_len",
    "gen_constants",
    "CONSTANT_SETS",
    "MIN_STAGED_WIDTH",
    "MAX_STAGED_WIDTH",
]

MIN_STAGED_WIDTH = 8
MAX_STAGED_WIDTH = 4096


class Kind(enum.Enum):
    MASK = "MASK"
    ADDCONST = "ADDCONST"
    CLEARMASK = "CLEARMASK"


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _require_staged_width(width: int, minimum: int) -> None:
    if not is_power_of_two(width) or not minimum <= width <= MAX_STAGED_WIDTH:
        raise ValueError(
            f"width must be a power of two in [{minimum}, {MAX_STAGED_WIDTH}], got {width}"
        )


@dataclass(frozen=True)
class FieldLayout:
    """Disjoint fields ``(low, high)`` of a ``width``-bit word, ascending."""

    width: int
    fields: tuple[tuple[int, int], ...]
    field_len: int | None = None

    def __post_init__(self):
        prev_high = -1
        for i, j in self.fields:
            if not j > i:
                raise ValueError(f"field ({i}, {j}) needs high > low")
            if i <= prev_high:
                raise ValueError(f"field ({i}, {j}) overlaps or is out of order")
            if j >= self.width:
                raise ValueError(f"field ({i}, {j}) exceeds width {self.width}")
            prev_high = j

    @classmethod
    def uniform(cls, width: int, field_len: int) -> FieldLayout:
        """Back-to-back fields of ``field_len`` bits covering the word."""
        if field_len < 2 or width % field_len:
            raise ValueError(f"field length {field_len} does not tile width {width}")
        fields = tuple((b, b + field_len - 1) for b in range(0, width, field_len))
        return cls(width, fields, field_len)

    def interior_mask(self) -> int:
        """Positions strictly between each field's low and high bit."""
        m = 0
        for i, j in self.fields:
            m |= ((1 << (j - i - 1)) - 1) << (i + 1)
        return m


@dataclass(frozen=True)
class MaskSet:
    algorithm: str
    width: int
    stages: tuple[tuple[tuple[Kind, BitWord], ...], ...]

    def flat(self) -> list[tuple[int, Kind, BitWord]]:
        return [
            (index, kind, value)
            for index, stage in zip(self.stage_numbers(), self.stages)
            for kind, value in stage
        ]

    def stage_numbers(self) -> range:
        # logsq stages count from 1; everything else from 0.
        start = 1 if self.algorithm == "logsq" else 0
        return range(start, start + len(self.stages))

    def values(self) -> list[int]:
        return [v.value for _, _, v in self.flat()]


def _word(value: int, width: int) -> BitWord:
    return BitWord(value & ((1 << width) - 1), width)


def hibits_mask(width: int, field_len: int) -> BitWord:
    """One bit at the most significant position of every field."""
    if field_len < 1 or width % field_len:
        raise ValueError(f"field length {field_len} does not divide width {width}")
    v = 0
    for top in range(field_len - 1, width, field_len):
        v |= 1 << top
    return BitWord(v, width)


def sqrt_field_len(width: int) -> int:
    """Field length for the square-root counter: 2**floor(log2(width) / 2)."""
    return 1 << (width.bit_length() - 1) // 2


@lru_cache(maxsize=None)
def shift_constants(layout: FieldLayout) -> tuple[BitWord, BitWord, BitWord]:
    """``(clear_mask, add_const, keep_mask)`` moving each field's low bit up.

    Clearing the high bit, adding ``2**j - 2**i`` and masking the run
    ``i..j-1`` away leaves bit ``i``'s value at ``j``, provided the positions
    in between were zero.
    """
    w = layout.width
    highs = sum(1 << j for _, j in layout.fields)
    addc = sum((1 << j) - (1 << i) for i, j in layout.fields)
    return _word(~highs, w), _word(addc, w), _word(~addc, w)


@lru_cache(maxsize=None)
def parity_masks(width: int) -> MaskSet:
    """Constants for the OPAL modified parity, one stage per field doubling."""
    if not is_power_of_two(width) or not 4 <= width <= MAX_STAGED_WIDTH:
        raise ValueError(f"width must be a power of two in [4, {MAX_STAGED_WIDTH}], got {width}")
    odd = sum(1 << p for p in range(1, width, 2))
    stages = [((Kind.MASK, _word(odd, width)),)]
    for s in range(1, width.bit_length() - 1):
        size = 1 << s
        addc = mask = 0
        for base in range(0, width, 2 * size):
            lo_top = base + size - 1
            hi_top = base + 2 * size - 1
            addc += (1 << hi_top) - (1 << lo_top)
            mask |= 1 << hi_top
        stages.append(((Kind.ADDCONST, _word(addc, width)), (Kind.MASK, _word(mask, width))))
    return MaskSet("parity", width, tuple(stages))


class _LogsqStep(NamedTuple):
    addc: int
    keep: int  # bits that must survive the clear
    clear: int  # bits that must be cleared


def _logsq_recipe(half: int) -> list[tuple[int, list[_LogsqStep]]]:
    """Region-relative stage plan for counting ``half`` bits.

    After stage ``s`` the count of each ``2**(s+1)``-bit field sits with its
    least significant bit at the field's top position.  Merging moves the
    lower field's ``s + 1`` count bits up by ``2**s``, most significant bit
    first so the path of every carry is clear.
    """
    plan = []
    for s in range(half.bit_length() - 1):
        size = 1 << s
        tops = [base + size - 1 for base in range(0, half, 2 * size)]
        select = sum(((1 << (s + 1)) - 1) << t for t in tops)
        steps = []
        for q in reversed(range(s + 1)):
            addc = keep = clear = 0
            for t in tops:
                i, j = t + q, t + q + size
                addc += (1 << j) - (1 << i)
                clear |= (1 << j) - (1 << i)
                # unmoved lower count bits, plus everything moved so far
                keep |= ((1 << q) - 1) << t
                keep |= ((1 << (s - q + 1)) - 1) << j
            steps.append(_LogsqStep(addc, keep, clear))
        plan.append((select, steps))
    return plan


# The published 32-bit routine fills the keep masks' unused upper bits
# irregularly.  Those bits never meet a set bit, so adopting them changes no
# result; _adopt() refuses any value that disagrees on a bit that matters.
_LISTING_KEEP_32 = (
    (0xAAAA,),
    (0x73333, 0x79999),
    (0x61E1F, 0x70F0F, 0x78787),
    (0x7C03FF, 0x3E01FF, 0x1FF00FF, 0xF807F),
)


def _adopt(canonical: int, published: int, care: int) -> int:
    if (canonical ^ published) & care:
        raise AssertionError(f"{published:#x} disagrees with {canonical:#x} on live bits")
    return published


@lru_cache(maxsize=None)
def logsq_masks(width: int, offset: int = 0) -> MaskSet:
    """Stage constants for the OPAL count of ``width // 2`` bits.

    Each stage is ``MASK`` (the lower fields' count bits) followed by
    ``(ADDCONST, CLEARMASK)`` pairs, one per count bit.  ``offset`` shifts the
    whole schedule up so it counts bits ``offset .. offset + width//2 - 1``;
    bits shifted past the word are dropped.
    """
    _require_staged_width(width, MIN_STAGED_WIDTH)
    half = width // 2
    extent = (1 << (half + half.bit_length() - 1)) - 1
    stages = []
    for s, (select, steps) in enumerate(_logsq_recipe(half)):
        stage = [(Kind.MASK, select)]
        for q, step in enumerate(steps):
            keep = extent & ~step.addc
            if width == 32:
                keep = _adopt(keep, _LISTING_KEEP_32[s][q], step.keep | step.clear)
            stage += [(Kind.ADDCONST, step.addc), (Kind.CLEARMASK, keep)]
        stages.append(tuple((k, _word(v << offset, width)) for k, v in stage))
    return MaskSet("logsq", width, tuple(stages))


def logsq_keep_care(width: int) -> list[list[int]]:
    """Per stage, per step: the keep-mask bits that can meet a set bit."""
    _require_staged_width(width, MIN_STAGED_WIDTH)
    return [
        [step.keep | step.clear for step in steps]
        for _, steps in _logsq_recipe(width // 2)
    ]


class FoldLayout(NamedTuple):
    k: int
    mask: BitWord
    modulus: int
    fold_shifts: tuple[int, ...]


def fold_condition_holds(width: int, k: int) -> bool:
    """Field size ``k`` can hold the count of odd fields: 2**k - 1 > ceil(n/k)."""
    return (1 << k) - 1 > math.ceil(width / k)


@lru_cache(maxsize=None)
def fold_layout(width: int, k: int | None = None) -> FoldLayout:
    """Layout for the xor-then-count parity.

    Without ``k`` the smallest power of two satisfying the field condition is
    chosen.  An explicit ``k`` is returned as given, even if it violates the
    condition; callers decide what to do about that.
    """
    if width < 2:
        raise ValueError(f"width must be at least 2, got {width}")
    if k is None:
        k = 1
        while not fold_condition_holds(width, k):
            k *= 2
    elif not is_power_of_two(k):
        raise ValueError(f"field size must be a power of two, got {k}")
    mask = sum(1 << p for p in range(0, width, k))
    shifts = []
    s = 1
    while s < k:
        shifts.append(s)
        s *= 2
    return FoldLayout(k, BitWord(mask, width), (1 << k) - 1, tuple(shifts))


@lru_cache(maxsize=None)
def hakmem_constants(width: int) -> tuple[BitWord, BitWord]:
    """Octal-digit masks: ``3`` in every digit, and ``7`` in every even digit."""
    if width < 1:
        raise ValueError(f"width must be positive, got {width}")
    digits = range(0, width, 3)
    twobits = sum(0o3 << p for p in digits)
    threebits = sum(0o7 << p for p in digits if p % 6 == 0)
    return _word(twobits, width), _word(threebits, width)


def _sqrt_set(width: int) -> MaskSet:
    _require_staged_width(width, 16)
    m = hibits_mask(width, sqrt_field_len(width))
    return MaskSet("sqrt", width, (((Kind.MASK, m),),))


def _fold_set(width: int) -> MaskSet:
    layout = fold_layout(width)
    return MaskSet("fold", width, (((Kind.MASK, layout.mask),),))


def _hakmem_set(width: int) -> MaskSet:
    if not 4 <= width <= 62:
        raise ValueError(f"width must be in [4, 62], got {width}")
    two, three = hakmem_constants(width)
    return MaskSet("hakmem", width, (((Kind.MASK, two), (Kind.MASK, three)),))


CONSTANT_SETS = {
    "sqrt": _sqrt_set,
    "logsq": logsq_masks,
    "parity": parity_masks,
    "fold": _fold_set,
    "hakmem": _hakmem_set,
}


def gen_constants(name: str, width: int) -> MaskSet:
    try:
        build = CONSTANT_SETS[name]
    except KeyError:
        raise ValueError(
            f"unknown constant set {name!r}; choose from {', '.join(CONSTANT_SETS)}"
        ) from None
    return build(width)
