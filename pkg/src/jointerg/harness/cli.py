"""
Command line interface.

    jointerg run <config.toml> [--out-dir D] [--threads T] [--seed S]
    jointerg suite [--tag T] [--out-dir D] [--threads T] [--seed S]
    jointerg pet-trace "<p1>, <p2>, ..." --ring Z [--mode symbolic|specialized]

Exit codes: 0 all verdicts pass, 1 some verdict fails, 2 config parse or
validation error, 3 a size budget was exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..algebra import ConfigurationError, Ring
from ..numerics import set_threads
from ..polynomials import PolynomialSyntaxError, split_top_level
from .config import ConfigError
from .experiments import pet_trace_adhoc
from .runner import (BUDGET_ERRORS, EXIT_BUDGET, EXIT_CONFIG, EXIT_FAIL, EXIT_OK, ResultRecord,
                     run_path, suite, write_outputs)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out-dir", default="results", help="directory for CSV and JSON outputs")
    p.add_argument("--threads", type=int, default=1, help="worker threads for large sums")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jointerg",
                                 description="Joint ergodicity experiments on rotation systems")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run one experiment config")
    p.add_argument("config")
    _common(p)
    p = sub.add_parser("suite", help="run the bundled experiment configs")
    p.add_argument("--tag", default=None, help="only configs carrying this tag")
    _common(p)
    p = sub.add_parser("pet-trace", help="PET-reduce a polynomial system and print the trace")
    p.add_argument("polys", help='comma-separated polynomials, e.g. "n^2, n"')
    p.add_argument("--ring", default="Z")
    p.add_argument("--mode", choices=["symbolic", "specialized"], default="symbolic")
    p.add_argument("--max-depth", type=int, default=64)
    p.add_argument("--max-size", type=int, default=4096)
    _common(p)
    return ap


def _report(rec: ResultRecord) -> None:
    status = "PASS" if rec.passed else "FAIL"
    print(f"{rec.name}: {status} ({rec.wall_time_s:.2f} s)")
    for k, v in rec.verdicts.items():
        print(f"  {'ok  ' if v else 'FAIL'} {k}")
    for f in rec.files:
        print(f"  wrote {f}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_CONFIG
    set_threads(args.threads)
    try:
        if args.command == "run":
            rec = run_path(args.config, args.out_dir, args.threads, args.seed)
            _report(rec)
            return EXIT_OK if rec.passed else EXIT_FAIL
        if args.command == "suite":
            report = suite(args.tag, args.out_dir, args.threads, args.seed,
                           progress=lambda m: print(m, flush=True))
            print(report.table())
            if report.errors:
                return EXIT_BUDGET
            return EXIT_OK if report.passed else EXIT_FAIL
        ring = Ring.from_name(args.ring)
        out = pet_trace_adhoc(split_top_level(args.polys), ring, mode=args.mode,
                              max_depth=args.max_depth, max_size=args.max_size,
                              seed=args.seed or 0)
        trace = out.extra["traces"][0]
        print(f"{trace['system']} over {trace['ring']}: k = {trace['k']}, "
              f"depth = {trace['depth']}")
        for r in out.rows:
            print(f"  depth {r['depth']:>2} {r['kind']:<8} size {r['size']:>5} "
                  f"weight {r['weight']}" + (f"  i0={r['i0']}" if r["i0"] else ""))
        rec = ResultRecord(name="pet-trace", kind="pet-trace", columns=out.columns,
                           rows=out.rows, verdicts={}, seed=args.seed or 0,
                           threads=args.threads, extra=out.extra)
        write_outputs(rec, args.out_dir)
        print(f"  wrote {Path(args.out_dir) / 'pet-trace.trace.json'}")
        return EXIT_OK
    except BUDGET_ERRORS as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, ConfigurationError, PolynomialSyntaxError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
