"""Command line: verify, count, sweep, gen-constants.

CSV goes to standard output (or ``--out``); diagnostics go to standard error.
Exit status is 0 exactly when everything checked out.
"""

from __future__ import annotations

import argparse
import csv
import os
import random
import sys

from . import algorithms, constgen
from .bitword import BitWord, from_hex, to_hex
from .harness import EXHAUSTIVE, RANDOM, VERIFY_HEADER, VerifyConfig, describe_counterexample, verify
from .isa_model import CSV_HEADER, ModelViolation

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_MODEL = 3


class _Output:
    def __init__(self, path):
        self.path = path

    def __enter__(self):
        self.fh = open(self.path, "w", newline="") if self.path else sys.stdout
        return csv.writer(self.fh, lineterminator="\n")

    def __exit__(self, *exc):
        if self.path:
            self.fh.close()
        else:
            self.fh.flush()


def parse_widths(text: str) -> list[int]:
    """``"64,256,1024"`` or ``"8..4096"`` (the powers of two in between)."""
    if ".." in text:
        lo, hi = (int(t) for t in text.split("..", 1))
        widths = []
        w = 1
        while w <= hi:
            if w >= lo:
                widths.append(w)
            w *= 2
        return widths
    return [int(t) for t in text.split(",") if t.strip()]


def parse_input(spec: str, width: int, rng: random.Random | None = None) -> BitWord:
    s = spec.strip().lower()
    if s in ("all-ones", "ones"):
        return BitWord((1 << width) - 1, width)
    if s in ("all-zeros", "zeros"):
        return BitWord(0, width)
    if s == "random":
        if rng is None:
            raise ValueError("--input random needs --seed")
        return BitWord(rng.getrandbits(width), width)
    return from_hex(spec, width)


def cmd_verify(config: VerifyConfig, jobs: int = 1, out: str | None = None) -> int:
    result = verify(config, jobs=jobs)
    with _Output(out) as w:
        w.writerow(VERIFY_HEADER)
        w.writerow(result.csv_row())
    if not result.ok:
        print(describe_counterexample(result), file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_count(algorithm: str, width: int, input_spec: str, seed: int | None = None,
              out: str | None = None) -> int:
    rng = random.Random(seed) if seed is not None else None
    report = algorithms.run(algorithm, parse_input(input_spec, width, rng))
    with _Output(out) as w:
        w.writerow(CSV_HEADER)
        w.writerow(report.csv_row())
    return EXIT_OK


def cmd_sweep(algorithm: str, widths: list[int], input_spec: str, seed: int | None = None,
              out: str | None = None) -> int:
    desc = algorithms.get(algorithm)
    for width in widths:
        desc.check_width(width)
    rng = random.Random(seed) if seed is not None else None
    rows = [algorithms.run(algorithm, parse_input(input_spec, w, rng)).csv_row() for w in widths]
    with _Output(out) as w:
        w.writerow(CSV_HEADER)
        w.writerows(rows)
    return EXIT_OK


def cmd_gen_constants(name: str, width: int, out: str | None = None) -> int:
    masks = constgen.gen_constants(name, width)
    with _Output(out) as w:
        w.writerow(("stage", "kind", "hex_value"))
        for stage, kind, value in masks.flat():
            w.writerow((stage, kind.value, to_hex(value)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swarlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="compare an algorithm with the oracle")
    v.add_argument("--algo", required=True, choices=sorted(algorithms.REGISTRY))
    v.add_argument("--width", type=int, required=True)
    v.add_argument("--mode", choices=(EXHAUSTIVE, RANDOM), type=str.upper, default=RANDOM)
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--domain-bits", type=int,
                   help="EXHAUSTIVE only: enumerate inputs below 2**BITS")
    v.add_argument("--jobs", type=int, default=1,
                   help="worker processes (0 = one per CPU)")
    v.add_argument("--out")

    c = sub.add_parser("count", help="run once and print the instruction profile")
    c.add_argument("--algo", required=True, choices=sorted(algorithms.REGISTRY))
    c.add_argument("--width", type=int, required=True)
    c.add_argument("--input", default="random",
                   help="hex, 0o-octal, all-ones, all-zeros or random (with --seed)")
    c.add_argument("--seed", type=int)
    c.add_argument("--out")

    s = sub.add_parser("sweep", help="profile one algorithm across widths")
    s.add_argument("--algo", required=True, choices=sorted(algorithms.REGISTRY))
    s.add_argument("--widths", required=True, help='"64,256,1024" or "8..4096"')
    s.add_argument("--input", default="all-ones")
    s.add_argument("--seed", type=int)
    s.add_argument("--out")

    g = sub.add_parser("gen-constants", help="print a constant schedule")
    g.add_argument("--algo", required=True, choices=sorted(constgen.CONSTANT_SETS))
    g.add_argument("--width", type=int, required=True)
    g.add_argument("--out")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            config = VerifyConfig(args.algo, args.width, args.mode, args.samples,
                                  args.seed, args.domain_bits)
            jobs = args.jobs or os.cpu_count() or 1
            return cmd_verify(config, jobs, args.out)
        if args.command == "count":
            return cmd_count(args.algo, args.width, args.input, args.seed, args.out)
        if args.command == "sweep":
            return cmd_sweep(args.algo, parse_widths(args.widths), args.input, args.seed,
                             args.out)
        return cmd_gen_constants(args.algo, args.width, args.out)
    except ModelViolation as exc:
        print(f"model violation: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
