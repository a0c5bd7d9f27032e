"""Bit counting and parity algorithms, run through a counting context.

Every function takes the input word and an optional :class:`CountingContext`.
Without one, a fresh context for the algorithm's declared model is used, so
a PAL algorithm handed an OPAL context fails loudly on its first branch.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

from . import oracle
from .bitword import BitWord
from .constgen import (
    FieldLayout,
    Kind,
    MaskSet,
    MAX_STAGED_WIDTH,
    fold_condition_holds,
    fold_layout,
    hakmem_constants,
    hibits_mask,
    is_power_of_two,
    logsq_masks,
    parity_masks,
    shift_constants,
    sqrt_field_len,
)
from .isa_model import CountingContext, InstructionModel, RunReport

OPAL = InstructionModel.OPAL
PAL = InstructionModel.PAL
FULL = InstructionModel.FULL

HAKMEM_MAX_WIDTH = 62


class UnsupportedWidth(ValueError):
    pass


class WidthExceeded(UnsupportedWidth):
    """Word too long for the mod-63 digit sum."""


class ConditionViolated(ValueError):
    """Fold field size too small: 2**k - 1 > ceil(n/k) fails."""


def _ctx(ctx, model, x):
    return CountingContext(model, x.width) if ctx is None else ctx


def _require_pow2(width: int, minimum: int) -> None:
    if not (is_power_of_two(width) and minimum <= width <= MAX_STAGED_WIDTH):
        raise UnsupportedWidth(
            f"width must be a power of two in [{minimum}, {MAX_STAGED_WIDTH}], got {width}"
        )


def _log2(n: int) -> int:
    return n.bit_length() - 1


def _wegner_loop(ctx: CountingContext, x: BitWord) -> BitWord:
    one = ctx.word(1)
    total = ctx.const(0)
    while ctx.test(x):
        x = ctx.and_(x, ctx.sub(x, one))
        total = ctx.add(total, one)
    return total


def wegner_count(x: BitWord, ctx: CountingContext | None = None) -> int:
    """Count ones by deleting the lowest one until nothing is left."""
    ctx = _ctx(ctx, PAL, x)
    return _wegner_loop(ctx, x).value


def wegner_zero_count(x: BitWord, ctx: CountingContext | None = None) -> int:
    """Count ones as width minus the Wegner count of the complement."""
    ctx = _ctx(ctx, PAL, x)
    zeros = _wegner_loop(ctx, ctx.not_(x))
    return ctx.sub(ctx.word(x.width), zeros).value


def pal_sqrt_count(a: BitWord, ctx: CountingContext | None = None) -> int:
    """O(sqrt n) count: Wegner's step applied to all fields at once.

    The top bit of every field is a spacer.  Ones sitting at spacer positions
    are counted first, then the spacers are set and each pass deletes one bit
    from every non-empty field; a field that had nothing left loses its
    spacer instead.  An emptied field borrows from its neighbour, which
    stands in for the neighbour's own decrement.
    """
    n = a.width
    _require_pow2(n, 16)
    ctx = _ctx(ctx, PAL, a)
    f = sqrt_field_len(n)
    hibits = hibits_mask(n, f)
    one = ctx.word(1)

    total = _wegner_loop(ctx, ctx.and_(a, hibits))
    count = ctx.const(n // f)
    oldhi = ctx.const(hibits)
    a = ctx.or_(a, oldhi)
    while ctx.test(oldhi):
        t = ctx.sub(ctx.sub(ctx.sub(a, oldhi), oldhi), one)
        a = ctx.and_(a, t)
        newhi = ctx.and_(a, oldhi)
        x = ctx.xor(newhi, oldhi)
        while ctx.test(x):
            x = ctx.and_(x, ctx.sub(x, one))
            count = ctx.sub(count, one)
        oldhi = ctx.move(newhi)
        total = ctx.add(total, count)
    return total.value


@lru_cache(maxsize=None)
def default_shift_layout(width: int) -> FieldLayout:
    """Nibble fields, low bit to high bit; the CLI's layout for opal-shift."""
    return FieldLayout.uniform(width, 4)


def opal_field_shift(
    x: BitWord, layout: FieldLayout, ctx: CountingContext | None = None
) -> BitWord:
    """Move each field's low bit to its high bit in three operations.

    Positions strictly inside a field must be zero; otherwise that field's
    bits come out unspecified.  Other fields are unaffected.
    """
    if layout.width != x.width:
        raise ValueError(f"layout width {layout.width} != word width {x.width}")
    ctx = _ctx(ctx, OPAL, x)
    clear, addc, keep = shift_constants(layout)
    x = ctx.and_(x, clear)
    x = ctx.add(x, addc)
    return ctx.and_(x, keep)


def _run_stages(ctx: CountingContext, x: BitWord, masks: MaskSet) -> BitWord:
    # Straight-line: the loop only unrolls the constant schedule.
    for stage in masks.stages:
        for kind, c in stage:
            if kind is Kind.MASK:
                y = ctx.and_(x, c)
                x = ctx.sub(x, y)
            elif kind is Kind.ADDCONST:
                y = ctx.add(y, c)
            else:
                y = ctx.and_(y, c)
        x = ctx.add(x, y)
    return x


def opal_modified_count_half(x: BitWord, ctx: CountingContext | None = None) -> BitWord:
    """``nu(x) * 2**(n/2 - 1)`` for ``x < 2**(n/2)``.

    The count ends up with its least significant bit at position ``n/2 - 1``
    and occupies ``log2(n/2) + 1`` bits.  Bits of ``x`` above the low half are
    not cleared; they pass through and are added onto the result.
    """
    n = x.width
    _require_pow2(n, 8)
    ctx = _ctx(ctx, OPAL, x)
    return _run_stages(ctx, x, logsq_masks(n))


class _CountPlan(NamedTuple):
    low: BitWord
    high: BitWord
    low_masks: MaskSet
    high_masks: MaskSet
    transfer: tuple[tuple[BitWord, BitWord], ...]
    overlap: tuple[tuple[BitWord, BitWord, BitWord], ...]


def counted_bits(width: int) -> int:
    """m = n - log2(n): how many low bits the OPAL count covers."""
    return width - _log2(width)


@lru_cache(maxsize=None)
def _count_plan(n: int) -> _CountPlan:
    lg = _log2(n)
    half = n // 2
    m = n - lg
    d = half - lg  # the high run covers bits d .. m-1
    region = (1 << half) - 1

    def carry_move(i: int, j: int) -> tuple[BitWord, BitWord]:
        _, addc, keep = shift_constants(FieldLayout(n, ((i, j),)))
        return addc, keep

    # lg count bits from position half-1 up by d, top bit first
    transfer = tuple(carry_move(half - 1 + q, half - 1 + q + d) for q in reversed(range(lg)))
    overlap = tuple(
        (BitWord(1 << p, n), *carry_move(p, m - 1)) for p in range(d, half)
    )
    return _CountPlan(
        BitWord(region, n),
        BitWord(region << d, n),
        logsq_masks(n),
        logsq_masks(n, d),
        transfer,
        overlap,
    )


def opal_modified_count(x: BitWord, ctx: CountingContext | None = None) -> BitWord:
    """``nu(x mod 2**m) * 2**(m-1)`` with ``m = n - log2(n)``, straight-line.

    The low half and the bits ``n/2 - log2 n .. m - 1`` are counted by two
    runs of the half-word routine.  The low result is lifted to the high
    result's position one count bit at a time, and the overlap's ones are
    lifted individually and subtracted.
    """
    n = x.width
    _require_pow2(n, 16)
    ctx = _ctx(ctx, OPAL, x)
    plan = _count_plan(n)
    lo = _run_stages(ctx, ctx.and_(x, plan.low), plan.low_masks)
    hi = _run_stages(ctx, ctx.and_(x, plan.high), plan.high_masks)
    for addc, keep in plan.transfer:
        lo = ctx.and_(ctx.add(lo, addc), keep)
    acc = ctx.add(hi, lo)
    for select, addc, keep in plan.overlap:
        y = ctx.and_(x, select)
        y = ctx.and_(ctx.add(y, addc), keep)
        acc = ctx.sub(acc, y)
    return acc


def extract_count(encoded: BitWord, algorithm: str) -> int:
    """Read the count out of a modified-count result.  Not charged."""
    n = encoded.width
    if algorithm == "opal-count-half":
        return encoded.value >> (n // 2 - 1)
    if algorithm == "opal-count":
        return encoded.value >> (counted_bits(n) - 1)
    raise ValueError(f"{algorithm!r} does not produce an encoded count")


def pal_logsq_count(x: BitWord, ctx: CountingContext | None = None) -> int:
    """Full-word count built around the OPAL modified count.

    The top ``log2 n`` bits are set aside, the rest is counted by
    :func:`opal_modified_count`, the encoded count is moved down one bit at a
    time by mask-test-accumulate, and the set-aside bits are tested one by one.
    """
    n = x.width
    _require_pow2(n, 16)
    ctx = _ctx(ctx, PAL, x)
    m = counted_bits(n)
    top = ctx.word(((1 << (n - m)) - 1) << m)
    saved = ctx.and_(x, top)
    x = ctx.xor(x, saved)
    enc = opal_modified_count(x, ctx)

    result = ctx.const(0)
    for b in range(n - m):
        if ctx.test(ctx.and_(enc, ctx.word(1 << (m - 1 + b)))):
            result = ctx.add(result, ctx.word(1 << b))
    one = ctx.word(1)
    for p in range(m, n):
        if ctx.test(ctx.and_(saved, ctx.word(1 << p))):
            result = ctx.add(result, one)
    return result.value


def opal_modified_parity(x: BitWord, ctx: CountingContext | None = None) -> BitWord:
    """Parity delivered in the top bit: ``2**(n-1) * (nu(x) mod 2)``.

    Pairs are xored into their upper bit, then each stage carries the top bit
    of a lower field into the top bit of its neighbour, doubling field size.
    """
    n = x.width
    _require_pow2(n, 4)
    ctx = _ctx(ctx, OPAL, x)
    (first,), *rest = parity_masks(n).stages
    x = ctx.xor(x, ctx.add(x, x))
    x = ctx.and_(x, first[1])
    for (_, addc), (_, mask) in rest:
        x = ctx.and_(ctx.add(x, addc), mask)
    return x


def pal_parity(x: BitWord, ctx: CountingContext | None = None) -> int:
    ctx = _ctx(ctx, PAL, x)
    return ctx.nonzero(opal_modified_parity(x, ctx)).value


def xor_fold_parity(
    x: BitWord,
    ctx: CountingContext | None = None,
    k: int | None = None,
    check: bool = True,
) -> int:
    """Xor each ``k``-bit field into its low bit, then count those mod 2**k - 1.

    ``k`` defaults to the smallest workable field size.  With ``check`` off a
    too-small ``k`` is run anyway, which is how counterexamples are shown.
    """
    n = x.width
    layout = fold_layout(n, k)
    if check and not fold_condition_holds(n, layout.k):
        raise ConditionViolated(
            f"k={layout.k}: 2**k - 1 = {layout.modulus} is not above ceil({n}/{layout.k})"
        )
    ctx = _ctx(ctx, FULL, x)
    for s in layout.fold_shifts:
        x = ctx.xor(x, ctx.shr(x, s))
    x = ctx.and_(x, layout.mask)
    r = ctx.mod(x, layout.modulus)
    return ctx.and_(r, ctx.word(1)).value


def hakmem_count(a: BitWord, ctx: CountingContext | None = None, check: bool = True) -> int:
    """Octal digit sums, paired into base-64 digits, summed by mod 63."""
    n = a.width
    if n < 4:
        raise UnsupportedWidth(f"width must be at least 4, got {n}")
    if check and n > HAKMEM_MAX_WIDTH:
        raise WidthExceeded(f"width {n} exceeds {HAKMEM_MAX_WIDTH}; mod 63 would alias")
    ctx = _ctx(ctx, FULL, a)
    twobits, threebits = hakmem_constants(n)
    b = ctx.and_(ctx.shr(a, 1), twobits)
    a = ctx.sub(a, b)  # 2x + y + z per octal digit
    b = ctx.and_(ctx.shr(b, 1), twobits)
    a = ctx.sub(a, b)  # x + y + z
    b = ctx.move(a)
    b = ctx.shr(b, 3)
    a = ctx.add(a, b)
    a = ctx.and_(a, threebits)
    return ctx.mod(a, 63).value


class OutputKind(enum.Enum):
    COUNT = "COUNT"
    SCALED_COUNT = "SCALED_COUNT"
    PARITY_BIT = "PARITY_BIT"
    SCALED_PARITY = "SCALED_PARITY"
    WORD = "WORD"


@dataclass(frozen=True)
class AlgorithmDescriptor:
    id: str
    model: InstructionModel
    width_constraint: str
    output_kind: OutputKind
    func: Callable[[BitWord, CountingContext], object]
    supports: Callable[[int], bool]
    project: Callable[[BitWord], BitWord] | None = None

    def check_width(self, width: int) -> None:
        if not self.supports(width):
            exc = WidthExceeded if self.id == "hakmem" and width > 62 else UnsupportedWidth
            raise exc(f"{self.id} needs {self.width_constraint}; got width {width}")

    def prepare(self, x: BitWord) -> BitWord:
        """Restrict an arbitrary word to the algorithm's input domain."""
        return x if self.project is None else self.project(x)

    def expected(self, x: BitWord):
        """Oracle answer for a prepared input, in decoded form."""
        kind = self.output_kind
        if kind is OutputKind.COUNT:
            return oracle.nu(x)
        if kind is OutputKind.PARITY_BIT:
            return oracle.parity(x)
        if kind is OutputKind.SCALED_PARITY:
            return oracle.parity(x) << (x.width - 1)
        if kind is OutputKind.SCALED_COUNT:
            bits = x.width // 2 if self.id == "opal-count-half" else counted_bits(x.width)
            return oracle.nu(BitWord(x.value & ((1 << bits) - 1), x.width))
        return oracle.field_shift(x, default_shift_layout(x.width)).value

    def decode(self, output) -> int:
        if self.output_kind is OutputKind.SCALED_COUNT:
            return extract_count(output, self.id)
        return output.value if isinstance(output, BitWord) else output


def _pow2_at_least(minimum: int) -> Callable[[int], bool]:
    return lambda w: is_power_of_two(w) and minimum <= w <= MAX_STAGED_WIDTH


def _low_half(x: BitWord) -> BitWord:
    return BitWord(x.value & ((1 << (x.width // 2)) - 1), x.width)


@lru_cache(maxsize=None)
def _shift_interior(width: int) -> int:
    return default_shift_layout(width).interior_mask()


def _shift_domain(x: BitWord) -> BitWord:
    return BitWord(x.value & ~_shift_interior(x.width), x.width)


def _opal_shift_default(x: BitWord, ctx: CountingContext | None = None) -> BitWord:
    return opal_field_shift(x, default_shift_layout(x.width), ctx)


_ANY = "any width"
REGISTRY: dict[str, AlgorithmDescriptor] = {
    d.id: d
    for d in [
        AlgorithmDescriptor("wegner", PAL, _ANY, OutputKind.COUNT, wegner_count, lambda w: w >= 1),
        AlgorithmDescriptor(
            "wegner-zero", PAL, _ANY, OutputKind.COUNT, wegner_zero_count, lambda w: w >= 1
        ),
        AlgorithmDescriptor(
            "pal-sqrt", PAL, "power of two in [16, 4096]", OutputKind.COUNT,
            pal_sqrt_count, _pow2_at_least(16),
        ),
        AlgorithmDescriptor(
            "opal-shift", OPAL, "multiple of 4", OutputKind.WORD,
            _opal_shift_default, lambda w: w >= 4 and w % 4 == 0, _shift_domain,
        ),
        AlgorithmDescriptor(
            "opal-count-half", OPAL, "power of two in [8, 4096]", OutputKind.SCALED_COUNT,
            opal_modified_count_half, _pow2_at_least(8), _low_half,
        ),
        AlgorithmDescriptor(
            "opal-count", OPAL, "power of two in [16, 4096]", OutputKind.SCALED_COUNT,
            opal_modified_count, _pow2_at_least(16),
        ),
        AlgorithmDescriptor(
            "pal-logsq", PAL, "power of two in [16, 4096]", OutputKind.COUNT,
            pal_logsq_count, _pow2_at_least(16),
        ),
        AlgorithmDescriptor(
            "opal-parity", OPAL, "power of two in [4, 4096]", OutputKind.SCALED_PARITY,
            opal_modified_parity, _pow2_at_least(4),
        ),
        AlgorithmDescriptor(
            "pal-parity", PAL, "power of two in [4, 4096]", OutputKind.PARITY_BIT,
            pal_parity, _pow2_at_least(4),
        ),
        AlgorithmDescriptor(
            "xor-fold-parity", FULL, "width >= 2", OutputKind.PARITY_BIT,
            xor_fold_parity, lambda w: w >= 2,
        ),
        AlgorithmDescriptor(
            "hakmem", FULL, "width in [4, 62]", OutputKind.COUNT,
            hakmem_count, lambda w: 4 <= w <= HAKMEM_MAX_WIDTH,
        ),
    ]
}


def get(algorithm: str) -> AlgorithmDescriptor:
    try:
        return REGISTRY[algorithm]
    except KeyError:
        raise KeyError(
            f"unknown algorithm {algorithm!r}; choose from {', '.join(REGISTRY)}"
        ) from None


def run(algorithm: str, x: BitWord) -> RunReport:
    """Run one algorithm under its declared model and report the profile."""
    desc = get(algorithm)
    desc.check_width(x.width)
    ctx = CountingContext(desc.model, x.width)
    out = desc.func(x, ctx)
    return ctx.report(desc.id, x, out)
