import math
import random

import pytest
from hypothesis import given, settings, strategies as st

import listings
from swarlab import algorithms as alg
from swarlab.bitword import BitWord, ones
from swarlab.constgen import FieldLayout
from swarlab.isa_model import CountingContext, InstructionModel, ModelViolation, OpClass
from swarlab.oracle import nu, parity

OPAL, PAL, FULL = InstructionModel.OPAL, InstructionModel.PAL, InstructionModel.FULL


def W(v, w=32):
    return BitWord(v, w)


def profile(func, x, model, *args):
    ctx = CountingContext(model, x.width)
    out = func(x, ctx, *args) if not args else func(x, *args, ctx)
    return out, ctx


def rand_words(width, n, seed=0):
    rng = random.Random(seed)
    return [BitWord(rng.getrandbits(width), width) for _ in range(n)]


# --- Wegner ---------------------------------------------------------------

def test_wegner_examples():
    out, ctx = profile(alg.wegner_count, W(0), PAL)
    assert out == 0 and ctx.branches_taken == 0
    out, ctx = profile(alg.wegner_count, W(0x88888888), PAL)
    assert out == 8 and ctx.branches_taken == 8
    assert ctx.counter[OpClass.BRANCH] == 9
    assert alg.wegner_count(W(0xDEADBEEF)) == 24


def test_wegner_zero_examples():
    out, ctx = profile(alg.wegner_zero_count, ones(32), PAL)
    assert out == 32 and ctx.branches_taken == 0
    out, ctx = profile(alg.wegner_zero_count, W(0), PAL)
    assert out == 0 and ctx.branches_taken == 32
    out, ctx = profile(alg.wegner_zero_count, W(0xFFFFFFF0), PAL)
    assert out == 28 and ctx.branches_taken == 4


@given(st.integers(1, 200).flatmap(lambda w: st.integers(0, (1 << w) - 1).map(lambda v: BitWord(v, w))))
def test_wegner_iteration_law(x):
    out, ctx = profile(alg.wegner_count, x, PAL)
    assert out == nu(x) == ctx.branches_taken
    out, ctx = profile(alg.wegner_zero_count, x, PAL)
    assert out == nu(x) and ctx.branches_taken == x.width - nu(x)


def test_pal_algorithms_need_branches():
    with pytest.raises(ModelViolation):
        alg.wegner_count(W(3), CountingContext(OPAL, 32))
    with pytest.raises(ModelViolation):
        alg.pal_sqrt_count(W(3), CountingContext(OPAL, 32))
    with pytest.raises(ModelViolation):
        alg.xor_fold_parity(W(3), CountingContext(PAL, 32))
    with pytest.raises(ModelViolation):
        alg.hakmem_count(W(3), CountingContext(PAL, 32))


# --- square-root counter ---------------------------------------------------

def test_sqrt_examples():
    assert alg.pal_sqrt_count(W(0)) == 0
    out, ctx = profile(alg.pal_sqrt_count, W(0x88888888), PAL)
    assert out == 8
    # one pass of the outer loop, then the exit test
    assert ctx.counter[OpClass.XOR] == 1


def test_sqrt_zero_makes_one_pass():
    _, ctx = profile(alg.pal_sqrt_count, W(0, 1024), PAL)
    assert ctx.counter[OpClass.XOR] == 1


def test_sqrt_matches_c_listing():
    for x in rand_words(32, 3000, seed=1) + [W(0), ones(32), W(0x88888888), W(0x77777777)]:
        assert alg.pal_sqrt_count(x) == listings.c_bitcount_sqrt(x.value) == nu(x)


@pytest.mark.parametrize("width", [16, 32, 64, 128, 256, 512, 1024, 4096])
def test_sqrt_random(width):
    for x in rand_words(width, 200, seed=width) + [W(0, width), ones(width)]:
        assert alg.pal_sqrt_count(x) == nu(x)


def test_sqrt_growth():
    totals = {}
    for n in (64, 256, 1024):
        _, ctx = profile(alg.pal_sqrt_count, ones(n), PAL)
        totals[n] = ctx.counter.headline
    assert 1.7 <= totals[256] / totals[64] <= 2.7
    assert 1.7 <= totals[1024] / totals[256] <= 2.7


def test_sqrt_width_limits():
    for w in (8, 24, 8192):
        with pytest.raises(alg.UnsupportedWidth):
            alg.pal_sqrt_count(W(0, w))


# --- field shift -----------------------------------------------------------

def test_field_shift_examples():
    lay = FieldLayout(4, ((0, 3),))
    assert alg.opal_field_shift(W(1, 4), lay) == W(0b1000, 4)
    assert alg.opal_field_shift(W(0, 4), lay) == W(0, 4)
    lay2 = FieldLayout(8, ((0, 3), (4, 7)))
    out, ctx = profile(alg.opal_field_shift, W(0x11, 8), OPAL, lay2)
    assert out == W(0x88, 8)
    assert ctx.counter.total == 3


@pytest.mark.parametrize("fields", [1, 2, 64, 256])
def test_field_shift_cost_is_constant(fields):
    width = 4 * fields
    lay = FieldLayout.uniform(width, 4)
    x = BitWord(random.Random(fields).getrandbits(width) & ~lay.interior_mask(), width)
    _, ctx = profile(alg.opal_field_shift, x, OPAL, lay)
    assert ctx.counter.total == 3


# --- OPAL modified count ---------------------------------------------------

def test_half_count_examples():
    assert alg.extract_count(alg.opal_modified_count_half(W(0)), "opal-count-half") == 0
    enc = alg.opal_modified_count_half(W(0xFFFF))
    assert enc == W(listings.c_bitcount_low16(0xFFFF))
    assert alg.extract_count(enc, "opal-count-half") == 16


def test_half_count_equals_listing_on_whole_16_bit_domain():
    for v in range(1 << 16):
        enc = alg.opal_modified_count_half(W(v))
        assert enc.value == listings.c_bitcount_low16(v) == nu(W(v)) << 15


def test_half_count_upper_bits_pass_through():
    for x in rand_words(32, 500, seed=3):
        assert alg.opal_modified_count_half(x).value == listings.c_bitcount_low16(x.value)


@pytest.mark.parametrize("width", [8, 16, 64, 128, 1024])
def test_half_count_other_widths(width):
    half = width // 2
    for x in rand_words(half, 300, seed=width):
        x = BitWord(x.value, width)
        enc = alg.opal_modified_count_half(x)
        assert enc.value == nu(x) << (half - 1)


def test_full_count_examples():
    assert alg.extract_count(alg.opal_modified_count(W(0)), "opal-count") == 0
    enc = alg.opal_modified_count(W(2**27 - 1))
    assert enc.value == 27 << 26
    assert alg.extract_count(enc, "opal-count") == 27
    assert alg.opal_modified_count(W(0xF8000000)).value == 0


@pytest.mark.parametrize("width", [16, 32, 64, 128, 256, 512, 2048])
def test_full_count_is_exact_encoding(width):
    m = alg.counted_bits(width)
    for x in rand_words(width, 200, seed=width) + [ones(width), W(0, width)]:
        enc = alg.opal_modified_count(x)
        assert enc.value == nu(BitWord(x.value % (1 << m), width)) << (m - 1)


def test_full_count_growth_is_log_squared():
    totals = {}
    for n in (64, 128, 256, 512, 1024):
        _, ctx = profile(alg.opal_modified_count, W(0, n), OPAL)
        totals[n] = ctx.counter.total
    for n in (64, 128, 256, 512):
        predicted = (math.log2(2 * n) / math.log2(n)) ** 2
        assert abs(totals[2 * n] / totals[n] / predicted - 1) <= 0.15


def test_extract_count_rejects_unencoded():
    with pytest.raises(ValueError):
        alg.extract_count(W(0), "wegner")


def test_logsq_examples():
    assert alg.pal_logsq_count(W(0)) == 0
    assert alg.pal_logsq_count(ones(32)) == 32


@pytest.mark.parametrize("width", [16, 32, 64, 128, 256, 1024])
def test_logsq_random(width):
    for x in rand_words(width, 200, seed=width) + [ones(width), W(0, width)]:
        assert alg.pal_logsq_count(x) == nu(x)


# --- parity --------------------------------------------------------------

def test_opal_parity_examples():
    assert alg.opal_modified_parity(W(0)) == W(0)
    assert alg.opal_modified_parity(W(1)) == W(0x80000000)


def test_opal_parity_matches_listing():
    for x in rand_words(32, 3000, seed=5):
        assert alg.opal_modified_parity(x).value == listings.c_parity_opal(x.value)


def test_opal_parity_exhaustive_16():
    for v in range(1 << 16):
        assert alg.opal_modified_parity(W(v, 16)).value == parity(W(v, 16)) << 15


@pytest.mark.parametrize("width", [4, 8, 64, 256, 4096])
def test_opal_parity_formula(width):
    for x in rand_words(width, 50, seed=width):
        out, ctx = profile(alg.opal_modified_parity, x, OPAL)
        assert out.value == parity(x) << (width - 1)
        assert ctx.counter.total == 2 * int(math.log2(width)) + 1


def test_pal_parity():
    assert alg.pal_parity(W(0)) == 0
    assert alg.pal_parity(W(1)) == 1
    for x in rand_words(128, 500, seed=7):
        out, ctx = profile(alg.pal_parity, x, PAL)
        assert out == parity(x)
        assert ctx.counter[OpClass.COMPARE] == 1


def test_xor_fold_examples():
    assert alg.xor_fold_parity(W(0x3)) == 0
    assert alg.xor_fold_parity(W(0x7)) == 1
    _, ctx = profile(alg.xor_fold_parity, W(0x1234), FULL)
    assert ctx.counter.total == 7


def test_xor_fold_matches_listing():
    for x in rand_words(32, 3000, seed=9):
        assert alg.xor_fold_parity(x) == listings.c_parity_fold(x.value) == parity(x)


def test_xor_fold_condition():
    x = BitWord(sum(1 << (4 * t) for t in range(15)), 60)
    with pytest.raises(alg.ConditionViolated):
        alg.xor_fold_parity(x, k=4)
    assert alg.xor_fold_parity(x, k=4, check=False) == 0
    assert parity(x) == 1
    assert alg.xor_fold_parity(x) == 1


@pytest.mark.parametrize("width", [2, 3, 5, 17, 56, 60, 100, 255, 2032])
def test_xor_fold_odd_widths(width):
    for x in rand_words(width, 300, seed=width) + [ones(width)]:
        assert alg.xor_fold_parity(x) == parity(x)


def test_xor_fold_two_more_instructions_at_2032():
    _, ctx = profile(alg.xor_fold_parity, ones(2032), FULL)
    assert ctx.counter.total == 9


# --- HAKMEM ----------------------------------------------------------------

def test_hakmem_examples():
    assert alg.hakmem_count(W(0)) == 0
    assert alg.hakmem_count(ones(36)) == 36
    with pytest.raises(alg.WidthExceeded):
        alg.hakmem_count(ones(63))
    assert alg.hakmem_count(ones(63), check=False) == 0


def test_hakmem_matches_listing():
    for x in rand_words(32, 3000, seed=11):
        assert alg.hakmem_count(x) == listings.c_bitcount_hakmem(x.value) == nu(x)


@pytest.mark.parametrize("width", range(4, 63))
def test_hakmem_all_widths(width):
    for x in rand_words(width, 100, seed=width) + [ones(width)]:
        assert alg.hakmem_count(x) == nu(x)


# --- registry -----------------------------------------------------------------

def test_registry_ids():
    assert set(alg.REGISTRY) == {
        "wegner", "wegner-zero", "pal-sqrt", "opal-shift", "opal-count-half",
        "opal-count", "pal-logsq", "opal-parity", "pal-parity", "xor-fold-parity", "hakmem",
    }


@pytest.mark.parametrize("algo", sorted(alg.REGISTRY))
def test_run_reports_declared_model(algo):
    desc = alg.get(algo)
    width = 32
    x = desc.prepare(BitWord(0x9E3779B9, width))
    report = alg.run(algo, x)
    assert report.model == desc.model.value
    for cls in OpClass:
        if report.counter[cls]:
            assert desc.model.admits(cls)


@pytest.mark.parametrize("algo", [a for a, d in alg.REGISTRY.items() if d.model is OPAL])
@pytest.mark.parametrize("width", [16, 64, 512])
def test_opal_algorithms_are_oblivious(algo, width):
    desc = alg.get(algo)
    seen = set()
    for x in rand_words(width, 100, seed=width) + [W(0, width), ones(width)]:
        ctx = CountingContext(OPAL, width)
        desc.func(desc.prepare(x), ctx)
        c = ctx.counter
        assert c[OpClass.BRANCH] == c[OpClass.SHIFT] == c[OpClass.MOD] == 0
        seen.add(c.counts)
    assert len(seen) == 1


@pytest.mark.parametrize("algo", sorted(alg.REGISTRY))
def test_runs_are_reproducible(algo):
    desc = alg.get(algo)
    x = desc.prepare(BitWord(0x0123456789ABCDEF, 64)) if desc.supports(64) else None
    if x is None:
        x = desc.prepare(BitWord(0x89ABCDEF, 32))
    assert alg.run(algo, x) == alg.run(algo, x)


def test_exact_counts_at_32():
    _, ctx = profile(alg.opal_modified_count_half, W(0x1234), OPAL)
    assert ctx.counter.total == 32
    _, ctx = profile(alg.opal_modified_parity, W(0x1234), OPAL)
    assert ctx.counter.total == 11


@pytest.mark.parametrize("width", [8, 16, 32, 64, 128, 256, 512, 1024])
def test_half_count_formula(width):
    s = int(math.log2(width // 2))
    _, ctx = profile(alg.opal_modified_count_half, W(0, width), OPAL)
    assert ctx.counter.total == s * s + 4 * s


@settings(max_examples=300)
@given(st.sampled_from([16, 32, 64, 128, 256]).flatmap(
    lambda w: st.integers(0, (1 << w) - 1).map(lambda v: BitWord(v, w))))
def test_all_counters_agree(x):
    n = nu(x)
    assert alg.wegner_count(x) == n
    assert alg.wegner_zero_count(x) == n
    assert alg.pal_sqrt_count(x) == n
    assert alg.pal_logsq_count(x) == n
    assert alg.pal_parity(x) == n % 2
    assert alg.xor_fold_parity(x) == n % 2
