"""Command line front end: instance generation, selection, self-check, benchmark.

Instance files hold one array per line, values separated by spaces or tabs;
blank lines and lines starting with '#' are ignored. All commands are
deterministic given their flags and seed. Exit codes: 0 success, 1 self-check
mismatch or resource refusal, 2 unusable input or flags, 3 k out of range.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CartselError,
    ConfigError,
    ContractError,
    EmptyInputError,
    InvalidValueError,
    ParseError,
)
from .oracle import DEFAULT_CAP, brute_multi
from .pairwise import MODES
from .tree import TreeConfig, build_tree

__all__ = [
    "BenchRecord",
    "CSV_COLUMNS",
    "VerifyReport",
    "main",
    "parse_k_spec",
    "read_instance",
    "run_bench",
    "run_verification",
    "write_instance",
]

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_RANGE = 3

CSV_COLUMNS = (
    "mode",
    "n",
    "m",
    "alpha",
    "k",
    "trial",
    "seed",
    "runtime_seconds",
    "runtime_excl_load_seconds",
    "values_generated",
    "root_pool_size",
)

BENCH_MODES = MODES + ("naive",)


def _format_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def read_instance(path) -> list[np.ndarray]:
    """Parse an instance file into one array per non-comment line."""
    rows: list[list] = []
    any_float = False
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            body = line.strip()
            if not body or body.startswith("#"):
                continue
            tokens = body.split()
            values: list = []
            for tok in tokens:
                try:
                    values.append(int(tok))
                    continue
                except ValueError:
                    pass
                try:
                    x = float(tok)
                except ValueError:
                    raise ParseError(
                        f"line {line_no}: cannot read value {tok!r}", line_no
                    )
                if not math.isfinite(x):
                    raise ParseError(
                        f"line {line_no}: non-finite value {tok!r}", line_no
                    )
                values.append(x)
                any_float = True
            rows.append(values)
    if not rows:
        raise ParseError("no arrays found in instance file")
    dtype = np.float64 if any_float else np.int64
    return [np.array(row, dtype=dtype) for row in rows]


def write_instance(arrays, fh) -> None:
    """Write arrays as an instance file, one line per array."""
    for arr in arrays:
        fh.write(" ".join(_format_value(v) for v in arr))
        fh.write("\n")


def _open_out(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def cmd_gen(args) -> int:
    if args.n < 1 or args.m < 1:
        raise ConfigError(f"need n >= 1 and m >= 1, got n={args.n} m={args.m}")
    rng = np.random.default_rng(args.seed)
    arrays = _draw_instance(rng, args.n, args.m, args.dist)
    out, close = _open_out(args.out)
    try:
        write_instance(arrays, out)
    finally:
        if close:
            out.close()
    return EXIT_OK


def _draw_instance(rng, n, m, dist):
    if dist == "ints":
        return [rng.integers(0, 1 << 30, size=n, dtype=np.int64) for _ in range(m)]
    if dist == "reals":
        return [rng.random(n) for _ in range(m)]
    raise ConfigError(f"unknown distribution {dist!r}")


def cmd_select(args) -> int:
    arrays = read_instance(args.input)
    config = TreeConfig(alpha=args.alpha, mode=args.mode, sorted_output=args.sorted)
    t0 = time.perf_counter()
    tree = build_tree(arrays, config)
    t1 = time.perf_counter()
    result = tree.select_k(args.k)
    t2 = time.perf_counter()
    out, close = _open_out(args.out)
    try:
        for v in result:
            out.write(_format_value(v))
            out.write("\n")
    finally:
        if close:
            out.close()
    snap = tree.stats()
    print(f"runtime_seconds={t2 - t0!r}", file=sys.stderr)
    print(f"runtime_excl_load_seconds={t2 - t1!r}", file=sys.stderr)
    print(f"values_generated={snap.values_generated}", file=sys.stderr)
    print(f"tuple_pops={snap.tuple_pops}", file=sys.stderr)
    print(f"root_pool_size={snap.root_pool_size}", file=sys.stderr)
    return EXIT_OK


@dataclass
class VerifyReport:
    """Outcome of one verification sweep against the brute-force baseline."""

    cases: int = 0
    oracle_failures: list[dict] = field(default_factory=list)
    agreement_failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.oracle_failures and not self.agreement_failures


def run_verification(
    n_max: int = 8, m_max: int = 5, trials: int = 20, seed: int = 0, cap: int = DEFAULT_CAP
) -> VerifyReport:
    """Sweep random instances, checking both modes against full enumeration.

    For every m <= m_max, n <= n_max, and trial a fresh integer instance is
    drawn from (seed, m, n, trial); selections at k in {1, 2, ceil(total/2),
    total} plus ten random k are compared to the sorted enumeration prefix,
    exactly, and the two modes are compared to each other.
    """
    report = VerifyReport()
    for m in range(1, m_max + 1):
        for n in range(1, n_max + 1):
            for trial in range(trials):
                rng = np.random.default_rng([seed, m, n, trial])
                arrays = [
                    rng.integers(0, 4 * n + 4, size=n).astype(np.int64)
                    for _ in range(m)
                ]
                total = n**m
                full = brute_multi(arrays, total, cap)
                ks = {1, total, (total + 1) // 2}
                if total >= 2:
                    ks.add(2)
                ks.update(int(x) for x in rng.integers(1, total + 1, size=10))
                for k in sorted(ks):
                    expect = full[:k]
                    got = {}
                    for mode in MODES:
                        tree = build_tree(arrays, TreeConfig(mode=mode))
                        got[mode] = np.sort(tree.select_k(k))
                        report.cases += 1
                        if not np.array_equal(got[mode], expect):
                            report.oracle_failures.append(
                                dict(seed=seed, m=m, n=n, trial=trial, k=k, mode=mode)
                            )
                    if not np.array_equal(got["standard"], got["wobbly"]):
                        report.agreement_failures.append(
                            dict(seed=seed, m=m, n=n, trial=trial, k=k)
                        )
    return report


def cmd_verify(args) -> int:
    report = run_verification(args.n_max, args.m_max, args.trials, args.seed, args.cap)
    if report.cases == 0:
        print("warning: no cases run", file=sys.stderr)
        print("cases=0")
        return EXIT_OK
    print(
        f"cases={report.cases} oracle_failures={len(report.oracle_failures)} "
        f"agreement_failures={len(report.agreement_failures)}"
    )
    for fail in report.oracle_failures:
        print(
            "MISMATCH seed={seed} m={m} n={n} trial={trial} k={k} mode={mode}".format(
                **fail
            )
        )
    for fail in report.agreement_failures:
        print(
            "MODE-DISAGREEMENT seed={seed} m={m} n={n} trial={trial} k={k}".format(
                **fail
            )
        )
    return EXIT_OK if report.ok else EXIT_FAIL


@dataclass
class BenchRecord:
    """One CSV row of the benchmark harness."""

    mode: str
    n: int
    m: int
    alpha: float
    k: int
    trial: str
    seed: int
    runtime_seconds: float
    runtime_excl_load_seconds: float
    values_generated: float
    root_pool_size: float

    def row(self) -> list:
        return [
            self.mode,
            self.n,
            self.m,
            self.alpha,
            self.k,
            self.trial,
            self.seed,
            repr(self.runtime_seconds),
            repr(self.runtime_excl_load_seconds),
            _trim_int(self.values_generated),
            _trim_int(self.root_pool_size),
        ]


def _trim_int(x):
    return int(x) if float(x).is_integer() else x


def parse_k_spec(spec: str) -> list[int]:
    """Read a k list: '4,8,64', '2^12', or a power range '2^10..2^20'.

    The result is deduplicated and ascending, so benchmark output is always
    monotone in k.
    """
    spec = spec.strip()
    rng = re.fullmatch(r"2\^(\d+)\.\.2\^(\d+)", spec)
    if rng:
        lo, hi = int(rng.group(1)), int(rng.group(2))
        if lo > hi:
            raise ConfigError(f"empty k range {spec!r}")
        ks = [2**e for e in range(lo, hi + 1)]
    else:
        ks = []
        for tok in spec.split(","):
            tok = tok.strip()
            pw = re.fullmatch(r"2\^(\d+)", tok)
            if pw:
                ks.append(2 ** int(pw.group(1)))
                continue
            try:
                ks.append(int(tok))
            except ValueError:
                raise ConfigError(f"cannot read k value {tok!r}")
    ks = sorted(set(ks))
    if not ks or ks[0] < 1:
        raise ConfigError(f"k values must be >= 1, got {spec!r}")
    return ks


def run_bench(
    n, m, alpha, ks, modes, trials, seed, dist="ints", cap=DEFAULT_CAP
) -> list[BenchRecord]:
    """Time selections over one seeded instance; one record per (mode, k, trial)
    plus a trailing mean record per (mode, k)."""
    for mode in modes:
        if mode not in BENCH_MODES:
            raise ConfigError(f"unknown mode {mode!r}, expected one of {BENCH_MODES}")
    if trials < 1:
        raise ConfigError(f"need trials >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    arrays = _draw_instance(rng, n, m, dist)
    total = n**m
    records: list[BenchRecord] = []
    for mode in modes:
        for k in ks:
            if k > total:
                raise ContractError(f"k={k} exceeds the product size {total}")
            runtimes, excls, gens, pools = [], [], [], []
            for trial in range(trials):
                if mode == "naive":
                    t0 = time.perf_counter()
                    brute_multi(arrays, k, cap)
                    t1 = time.perf_counter()
                    rt, rx, vg, rp = t1 - t0, t1 - t0, total, total
                else:
                    t0 = time.perf_counter()
                    tree = build_tree(arrays, TreeConfig(alpha=alpha, mode=mode))
                    t1 = time.perf_counter()
                    tree.select_k(k)
                    t2 = time.perf_counter()
                    snap = tree.stats()
                    rt, rx = t2 - t0, t2 - t1
                    vg, rp = snap.values_generated, snap.root_pool_size
                records.append(
                    BenchRecord(mode, n, m, alpha, k, str(trial), seed, rt, rx, vg, rp)
                )
                runtimes.append(rt)
                excls.append(rx)
                gens.append(vg)
                pools.append(rp)
            records.append(
                BenchRecord(
                    mode,
                    n,
                    m,
                    alpha,
                    k,
                    "mean",
                    seed,
                    sum(runtimes) / trials,
                    sum(excls) / trials,
                    sum(gens) / trials,
                    sum(pools) / trials,
                )
            )
    return records


def cmd_bench(args) -> int:
    if args.n < 1 or args.m < 1:
        raise ConfigError(f"need n >= 1 and m >= 1, got n={args.n} m={args.m}")
    ks = parse_k_spec(args.k)
    modes = [tok.strip() for tok in args.modes.split(",") if tok.strip()]
    records = run_bench(
        args.n, args.m, args.alpha, ks, modes, args.trials, args.seed, args.dist, args.cap
    )
    out, close = _open_out(args.csv)
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.row())
    finally:
        if close:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cartsel",
        description="k smallest sums over the Cartesian product of input arrays",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a seeded random instance file")
    gen.add_argument("--n", type=int, required=True, help="values per array")
    gen.add_argument("--m", type=int, required=True, help="number of arrays")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--dist", choices=("ints", "reals"), default="ints")
    gen.add_argument("--out", default=None, help="output path (default stdout)")
    gen.set_defaults(func=cmd_gen)

    sel = sub.add_parser("select", help="select the k smallest sums of an instance")
    sel.add_argument("--input", required=True, help="instance file path")
    sel.add_argument("--k", type=int, required=True)
    sel.add_argument("--alpha", type=float, default=1.1)
    sel.add_argument("--mode", choices=MODES, default="standard")
    sel.add_argument("--sorted", action="store_true", help="sort the output values")
    sel.add_argument("--out", default=None, help="output path (default stdout)")
    sel.set_defaults(func=cmd_select)

    ver = sub.add_parser("verify", help="check both modes against brute force")
    ver.add_argument("--n-max", type=int, default=8)
    ver.add_argument("--m-max", type=int, default=5)
    ver.add_argument("--trials", type=int, default=20)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--cap", type=int, default=DEFAULT_CAP)
    ver.set_defaults(func=cmd_verify)

    ben = sub.add_parser("bench", help="time selections and write a CSV report")
    ben.add_argument("--n", type=int, required=True)
    ben.add_argument("--m", type=int, required=True)
    ben.add_argument("--alpha", type=float, default=1.1)
    ben.add_argument("--k", required=True, help="k list: '4,8', '2^12', or '2^10..2^20'")
    ben.add_argument("--modes", default="standard,wobbly")
    ben.add_argument("--trials", type=int, default=20)
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--csv", default=None, help="CSV path (default stdout)")
    ben.add_argument("--dist", choices=("ints", "reals"), default="ints")
    ben.add_argument("--cap", type=int, default=DEFAULT_CAP)
    ben.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigError, EmptyInputError, InvalidValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except CartselError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
