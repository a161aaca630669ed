"""Command-line front end: solve, verify, gen and bench."""
from __future__ import annotations

import argparse
import csv
import logging
import os
import random
import sys
import time

from .core import Instance
from .fileio import ParseError, emit_instance, emit_solution, parse_instance, solution_dict
from .oracle import DEFAULT_BUDGET, BudgetExceeded, brute_force
from .solver import solve, solves_bound

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVARIANT = 2
EXIT_MISMATCH = 3


def _read_instance(path: str) -> Instance:
    if path == "-":
        return parse_instance(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def random_instance(seed: int, n: int, m: int, p: int, density: float) -> Instance:
    if not 0 <= density <= 1:
        raise ValueError(f"density must lie in [0, 1], got {density}")
    rng = random.Random(seed)
    rows = tuple(tuple(rng.random() < density for _ in range(m)) for _ in range(n))
    return Instance(n, m, p, rows)


def cmd_solve(args: argparse.Namespace) -> int:
    inst = _read_instance(args.path)
    report = solve(inst, threads=args.threads, trace=args.trace)
    doc = solution_dict(report.allocation, report.conversions, report.trace if args.trace else None)
    _write(emit_solution(doc), args.output)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    inst = _read_instance(args.path)
    oracle = brute_force(inst, budget=args.budget)
    report = solve(inst, threads=args.threads)
    ours, best = report.key, oracle.best_key
    status = "MATCH" if ours == best else "MISMATCH"
    print(
        f"{status} solver={ours.nonzero_product} zeros={ours.zeros} "
        f"oracle={best.nonzero_product} zeros={best.zeros}"
    )
    return EXIT_OK if status == "MATCH" else EXIT_MISMATCH


def cmd_gen(args: argparse.Namespace) -> int:
    inst = random_instance(args.seed, args.n, args.m, args.p, args.density)
    _write(emit_instance(inst), args.output)
    return EXIT_OK


def _parse_sizes(text: str) -> list[tuple[int, int]]:
    sizes = []
    for part in text.split(","):
        n, _, m = part.strip().partition("x")
        sizes.append((int(n), int(m)))
    return sizes


def cmd_bench(args: argparse.Namespace) -> int:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["n", "m", "p", "seconds", "conversions", "max_matching_solves", "solve_bound"])
    ok = True
    for n, m in _parse_sizes(args.sizes):
        inst = random_instance(args.seed, n, m, args.p, args.density)
        start = time.perf_counter()
        report = solve(inst, threads=args.threads)
        elapsed = time.perf_counter() - start
        bound = solves_bound(n)
        writer.writerow([n, m, args.p, f"{elapsed:.4f}", len(report.conversions), report.max_solves_per_phase, bound])
        if report.max_solves_per_phase > bound or len(report.conversions) > m:
            ok = False
            print(f"step bound exceeded for n={n}, m={m}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twovalue-nsw", description="Exact NSW for goods valued 1 or p/2.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve an instance file ('-' for stdin)")
    p_solve.add_argument("path")
    p_solve.add_argument("--trace", action="store_true", help="include the rule trace")
    p_solve.add_argument("--threads", type=int, default=1)
    p_solve.add_argument("-o", "--output")
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="compare the solver against exhaustive search")
    p_verify.add_argument("path")
    p_verify.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="largest n^m to enumerate")
    p_verify.add_argument("--threads", type=int, default=1)
    p_verify.set_defaults(func=cmd_verify)

    p_gen = sub.add_parser("gen", help="write a seeded random instance")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--m", type=int, required=True)
    p_gen.add_argument("--p", type=int, default=3)
    p_gen.add_argument("--density", type=float, default=0.5)
    p_gen.add_argument("-o", "--output")
    p_gen.set_defaults(func=cmd_gen)

    p_bench = sub.add_parser("bench", help="time the solver over a size ladder, CSV on stdout")
    p_bench.add_argument("--sizes", default="10x30,20x60,30x100", help="comma-separated NxM list")
    p_bench.add_argument("--p", type=int, default=3)
    p_bench.add_argument("--density", type=float, default=0.5)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--threads", type=int, default=1)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("NSW_LOG", "WARNING").upper(), stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, BudgetExceeded, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as e:
        print(f"internal invariant failed [{type(e).__name__}]: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
