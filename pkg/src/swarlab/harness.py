"""Oracle-equivalence runs over exhaustive or seeded-random input sets."""

from __future__ import annotations

import random
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import algorithms
from .bitword import BitWord, to_hex
from .isa_model import CountingContext

EXHAUSTIVE = "EXHAUSTIVE"
RANDOM = "RANDOM"
MAX_EXHAUSTIVE_BITS = 24

VERIFY_HEADER = ("algorithm", "width", "mode", "samples", "mismatches")


@dataclass(frozen=True)
class VerifyConfig:
    algorithm: str
    width: int
    mode: str = RANDOM
    samples: int | None = None
    seed: int | None = None
    # EXHAUSTIVE enumerates x < 2**domain_bits; defaults to the full width.
    domain_bits: int | None = None

    def __post_init__(self):
        if self.mode == EXHAUSTIVE:
            bits = self.width if self.domain_bits is None else self.domain_bits
            if not 0 < bits <= min(self.width, MAX_EXHAUSTIVE_BITS):
                raise ValueError(
                    f"exhaustive domain of {bits} bits at width {self.width} is not "
                    f"allowed (at most {MAX_EXHAUSTIVE_BITS} bits)"
                )
        elif self.mode == RANDOM:
            if self.samples is None or self.samples < 1:
                raise ValueError("random mode needs a sample count of at least 1")
            if self.seed is None:
                raise ValueError("random mode needs an explicit seed")
        else:
            raise ValueError(f"unknown mode {self.mode!r}")

    def inputs(self) -> Sequence[int]:
        if self.mode == EXHAUSTIVE:
            bits = self.width if self.domain_bits is None else self.domain_bits
            return range(1 << bits)
        rng = random.Random(self.seed)
        return [rng.getrandbits(self.width) for _ in range(self.samples)]


@dataclass
class VerifyResult:
    config: VerifyConfig
    samples: int = 0
    mismatches: int = 0
    counterexample: BitWord | None = None  # smallest failing (prepared) input
    profiles: set[tuple[int, ...]] = field(default_factory=set)

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def csv_row(self) -> list:
        c = self.config
        return [c.algorithm, c.width, c.mode, self.samples, self.mismatches]

    def merge(self, samples: int, mismatches: int, worst: int | None, profiles) -> None:
        self.samples += samples
        self.mismatches += mismatches
        self.profiles |= profiles
        if worst is not None:
            w = self.config.width
            if self.counterexample is None or worst < self.counterexample.value:
                self.counterexample = BitWord(worst, w)


def check_values(algorithm: str, width: int, values, collect_profiles: bool = False):
    """Run one chunk; returns (samples, mismatches, smallest bad input, profiles)."""
    desc = algorithms.get(algorithm)
    desc.check_width(width)
    func, model = desc.func, desc.model
    bad = 0
    worst = None
    profiles = set()
    for v in values:
        x = desc.prepare(BitWord(v, width))
        ctx = CountingContext(model, width)
        if desc.decode(func(x, ctx)) != desc.expected(x):
            bad += 1
            if worst is None or x.value < worst:
                worst = x.value
        if collect_profiles:
            profiles.add(ctx.counter.counts)
    return len(values), bad, worst, profiles


def _chunks(values: Sequence[int], n: int) -> list[Sequence[int]]:
    size = -(-len(values) // n)
    return [values[i : i + size] for i in range(0, len(values), size)]


def verify(config: VerifyConfig, jobs: int = 1, collect_profiles: bool = False) -> VerifyResult:
    """Compare an algorithm with the oracle on every input the config names.

    With ``jobs > 1`` the inputs are split across worker processes; the
    merged result does not depend on scheduling.
    """
    algorithms.get(config.algorithm).check_width(config.width)
    values = config.inputs()
    result = VerifyResult(config)
    if jobs <= 1 or len(values) < 2 * jobs:
        result.merge(*check_values(config.algorithm, config.width, values, collect_profiles))
        return result
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [
            pool.submit(check_values, config.algorithm, config.width, chunk, collect_profiles)
            for chunk in _chunks(values, jobs * 4)
        ]
        for f in futures:
            result.merge(*f.result())
    return result


def describe_counterexample(result: VerifyResult) -> str:
    x = result.counterexample
    desc = algorithms.get(result.config.algorithm)
    ctx = CountingContext(desc.model, x.width)
    got = desc.decode(desc.func(x, ctx))
    return (
        f"counterexample: algorithm={desc.id} width={x.width} input={to_hex(x)} "
        f"got={got} expected={desc.expected(x)}"
    )
