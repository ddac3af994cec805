"""Command-line driver: jimple-bmc <file>.jimple [options]."""

from __future__ import annotations

import argparse
import concurrent.futures
import sys

from . import opmodels
from .driver import RunConfig, VerifierError, build_pipeline, verify
from .goto.printer import pretty_print
from .jimple import ClassTableError, JimpleLexError, JimpleParseError
from .lowering import LoweringError
from .report import EXIT_UNKNOWN, report
from .solver import SolverConfigError, resolve_solver
from .symex import Checks


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="jimple-bmc",
        description="Bounded model checker for Jimple programs (Soot text format).",
    )
    p.add_argument("paths", nargs="*", help=".jimple file or directory of .jimple files")
    p.add_argument("--function", help="entry function (default: main)")
    strat = p.add_mutually_exclusive_group()
    strat.add_argument(
        "--k-induction", action="store_true", help="prove with k-induction"
    )
    strat.add_argument(
        "--incremental-bmc", action="store_true", help="increase the bound until conclusive"
    )
    p.add_argument("--unwind", type=int, default=10, help="loop unwind bound / maximum k")
    p.add_argument(
        "--unwinding-assertions",
        action="store_true",
        help="claim loops fully unwound; turns bounded safety into a proof",
    )
    p.add_argument("--overflow-check", action="store_true", help="check signed overflow on + - *")
    p.add_argument("--no-bounds-check", action="store_true", help="disable array bounds checks")
    p.add_argument(
        "--no-div-by-zero-check", action="store_true", help="disable division checks"
    )
    p.add_argument("--no-pointer-check", action="store_true", help="disable null checks")
    p.add_argument("--smt-solver", help="path to an SMT solver binary (SMT-LIB2 on stdin)")
    p.add_argument("--timeout", type=float, default=60.0, help="per-solve timeout in seconds")
    p.add_argument("--json-output", action="store_true", help="machine-readable verdict")
    p.add_argument(
        "--goto-functions-only",
        action="store_true",
        help="dump the lowered GOTO program and exit",
    )
    p.add_argument("--smt-formula", help="dump the emitted SMT-LIB2 text to this file")
    p.add_argument("--list-models", action="store_true", help="print the operational models")
    p.add_argument(
        "--suite",
        action="store_true",
        help="treat each input file as an independent program and verify all",
    )
    return p


def config_from_args(args: argparse.Namespace, paths: list[str]) -> RunConfig:
    strategy = "bmc"
    if args.k_induction:
        strategy = "k-induction"
    elif args.incremental_bmc:
        strategy = "incremental"
    checks = Checks(
        overflow=args.overflow_check,
        bounds=not args.no_bounds_check,
        div_by_zero=not args.no_div_by_zero_check,
        null_deref=not args.no_pointer_check,
    )
    return RunConfig(
        paths=paths,
        entry=args.function,
        strategy=strategy,
        unwind=args.unwind,
        checks=checks,
        unwinding_assertions=args.unwinding_assertions,
        solver_path=args.smt_solver,
        timeout=args.timeout,
        json_output=args.json_output,
        smt_dump=args.smt_formula,
    )


def _run_one(cfg: RunConfig) -> tuple[int, str]:
    verdict = verify(cfg)
    return report(verdict, cfg)


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    if args.list_models:
        for line in opmodels.describe_catalog():
            print(line)
        return 0
    if not args.paths:
        print("error: no input files", file=sys.stderr)
        return EXIT_UNKNOWN
    try:
        if args.goto_functions_only:
            ctx = build_pipeline(args.paths)
            print(pretty_print(ctx.program), end="")
            return 0
        # Solver problems should surface before any verification work.
        resolve_solver(args.smt_solver)
        if args.suite:
            return _run_suite(args)
        cfg = config_from_args(args, args.paths)
        code, text = _run_one(cfg)
        print(text)
        return code
    except (
        VerifierError,
        JimpleParseError,
        JimpleLexError,
        ClassTableError,
        LoweringError,
        SolverConfigError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN


def _run_suite(args: argparse.Namespace) -> int:
    from pathlib import Path

    files: list[str] = []
    for p in args.paths:
        path = Path(p)
        if path.is_dir():
            files.extend(str(f) for f in sorted(path.glob("*.jimple")))
        else:
            files.append(p)
    results: dict[str, tuple[int, str]] = {}

    def work(f: str) -> tuple[str, tuple[int, str]]:
        cfg = config_from_args(args, [f])
        try:
            return f, _run_one(cfg)
        except (VerifierError, JimpleParseError, LoweringError) as exc:
            return f, (EXIT_UNKNOWN, f"error: {exc}")

    with concurrent.futures.ThreadPoolExecutor(max_workers=4) as pool:
        for f, outcome in pool.map(work, files):
            results[f] = outcome
    worst = 0
    for f in files:
        code, text = results[f]
        verdict_line = text.strip().splitlines()[-1] if text.strip() else "?"
        print(f"{f}: {verdict_line}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
