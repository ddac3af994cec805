"""Verification strategies and verdict assembly.

Three strategies share one pipeline (instrument, unroll, encode, solve):

- plain BMC at a fixed bound;
- incremental BMC, growing the bound until a bug or a completeness proof;
- k-induction: per k, a base case, a forward (loop-completeness)
  condition, and an inductive step over havocked loop state.

Every failure verdict carries a counterexample that has been replayed on
the concrete interpreter before being reported.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from .goto import ir as g
from .jimple import build_class_table, parse_class
from .lowering import LoweringContext, lower_program
from . import opmodels
from .solver import SolverCommand, SolverResult, resolve_solver, solve
from .symex import (
    Checks,
    Counterexample,
    SsaEquationSet,
    StepUnsupportedError,
    build_trace,
    encode_vc,
    instrument,
    replay,
    unroll,
)
from .symex.cfg import IrreducibleError


class VerifierError(Exception):
    pass


@dataclass
class RunConfig:
    paths: list[str]
    entry: str | None = None
    strategy: str = "bmc"  # bmc | incremental | k-induction
    unwind: int = 10  # bound for bmc; maximum k for iterative strategies
    checks: Checks = field(default_factory=Checks)
    unwinding_assertions: bool = False
    solver_path: str | None = None
    timeout: float = 60.0
    json_output: bool = False
    smt_dump: str | None = None

    def __post_init__(self) -> None:
        if self.unwind < 1:
            raise VerifierError("unwind bound must be >= 1")


@dataclass
class ObligationStatus:
    property_class: str
    pos: str
    message: str
    status: str  # pass | fail | discharged | bounded | unknown


@dataclass
class Verdict:
    kind: str  # failed | successful | safe-within-bound | unknown
    bound: int
    counterexample: Counterexample | None = None
    reason: str = ""
    obligations: list[ObligationStatus] = field(default_factory=list)
    unknown_calls: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    times: dict[str, float] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.kind == "failed"


# ---------------------------------------------------------------------------
# Program loading


def load_classes(paths: list[str]):
    files: list[Path] = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            files.extend(sorted(path.glob("*.jimple")))
        elif path.exists():
            files.append(path)
        else:
            raise VerifierError(f"input not found: {p}")
    if not files:
        raise VerifierError("no .jimple inputs given")
    return [parse_class(f.read_text(), str(f)) for f in files]


def build_pipeline(paths: list[str]) -> LoweringContext:
    classes = load_classes(paths)
    table = build_class_table(classes, is_modeled_external=opmodels.is_modeled_class)
    return lower_program(table)


def pick_entry(ctx: LoweringContext, selector: str | None) -> str:
    if selector:
        hits = ctx.function_named(selector)
        if not hits:
            raise VerifierError(f"no function matches --function {selector}")
        if len(hits) > 1:
            raise VerifierError(f"--function {selector} is ambiguous: {', '.join(hits)}")
        return hits[0]
    mains = [name for name in ctx.program.functions if name.rpartition("::")[2].startswith("main_")]
    if not mains:
        raise VerifierError("no main function found; use --function")
    if len(mains) > 1:
        raise VerifierError(f"multiple mains: {', '.join(mains)}; use --function")
    return mains[0]


# ---------------------------------------------------------------------------
# Shared machinery


def _solve(formula, command: SolverCommand, cfg: RunConfig, times: dict) -> SolverResult:
    t0 = time.monotonic()
    res = solve(formula, command, timeout=cfg.timeout, dump_path=cfg.smt_dump)
    times["solver"] = times.get("solver", 0.0) + (time.monotonic() - t0)
    return res


def _obligation_table(ssa: SsaEquationSet, default: str) -> list[ObligationStatus]:
    out = []
    for o in ssa.obligations:
        if o.property_class is g.PropertyClass.UNWINDING:
            continue
        status = "discharged" if o.discharged else default
        out.append(
            ObligationStatus(o.property_class.value, str(o.pos), o.message, status)
        )
    return out


def _failed_verdict(
    program: g.GotoProgram,
    entry: str,
    ssa: SsaEquationSet,
    model,
    k: int,
    times: dict,
) -> Verdict:
    cex = build_trace(model, ssa)
    out = replay(program, entry, cex.inputs)
    ok = (
        out.kind == "violation"
        and out.violated is not None
        and out.violated.property_class == cex.violated.property_class
        and out.violated.pos == cex.violated.pos
    )
    if not ok:
        got = out.violated.property_class.value if out.violated else out.kind
        return Verdict(
            "unknown",
            k,
            reason=f"counterexample failed replay validation (got {got})",
            times=times,
        )
    table = _obligation_table(ssa, "unknown")
    for row in table:
        if row.pos == str(cex.violated.pos) and row.property_class in (
            cex.violated.property_class.value,
            "overflow",
            "underflow",
        ):
            row.status = "fail"
    return Verdict(
        "failed",
        k,
        counterexample=cex,
        obligations=table,
        unknown_calls=[f"{s} at {p}" for s, p in program.unknown_calls],
        times=times,
        notes=["counterexample confirmed by concrete replay"],
    )


def _success_notes(program: g.GotoProgram) -> tuple[list[str], list[str]]:
    unknowns = [f"{s} at {p}" for s, p in program.unknown_calls]
    notes = []
    if unknowns:
        notes.append("safe modulo unknown calls (their results were havocked)")
    return notes, unknowns


# ---------------------------------------------------------------------------
# Strategies


def run_bmc(
    program: g.GotoProgram,
    entry: str,
    k: int,
    cfg: RunConfig,
    command: SolverCommand,
) -> Verdict:
    times: dict[str, float] = {}
    t0 = time.monotonic()
    ssa = unroll(program, entry, k)
    times["symex"] = time.monotonic() - t0
    props = ssa.property_obligations()
    if props:
        res = _solve(encode_vc(ssa, props), command, cfg, times)
        if res.status == "sat":
            return _failed_verdict(program, entry, ssa, res.model, k, times)
        if res.status == "unknown":
            return Verdict("unknown", k, reason=res.reason, times=times)
    unwinding = ssa.unwinding_obligations()
    notes, unknowns = _success_notes(program)
    if not unwinding:
        return Verdict(
            "successful", k, obligations=_obligation_table(ssa, "pass"),
            notes=notes, unknown_calls=unknowns, times=times,
        )
    if cfg.unwinding_assertions:
        res = _solve(encode_vc(ssa, unwinding), command, cfg, times)
        if res.status == "unsat":
            return Verdict(
                "successful", k, obligations=_obligation_table(ssa, "pass"),
                notes=notes, unknown_calls=unknowns, times=times,
            )
        if res.status == "unknown":
            return Verdict("unknown", k, reason=res.reason, times=times)
        notes = [f"unwinding assertion fails at bound {k}"] + notes
    return Verdict(
        "safe-within-bound", k, obligations=_obligation_table(ssa, "bounded"),
        notes=notes, unknown_calls=unknowns, times=times,
    )


def run_incremental(
    program: g.GotoProgram,
    entry: str,
    k_max: int,
    cfg: RunConfig,
    command: SolverCommand,
) -> Verdict:
    times: dict[str, float] = {}
    last_ssa: SsaEquationSet | None = None
    for k in range(1, k_max + 1):
        ssa = unroll(program, entry, k)
        last_ssa = ssa
        props = ssa.property_obligations()
        if props:
            res = _solve(encode_vc(ssa, props), command, cfg, times)
            if res.status == "sat":
                return _failed_verdict(program, entry, ssa, res.model, k, times)
            if res.status == "unknown":
                return Verdict("unknown", k, reason=res.reason, times=times)
        unwinding = ssa.unwinding_obligations()
        notes, unknowns = _success_notes(program)
        if not unwinding:
            return Verdict(
                "successful", k, obligations=_obligation_table(ssa, "pass"),
                notes=notes + [f"completeness established at k={k}"],
                unknown_calls=unknowns, times=times,
            )
        res = _solve(encode_vc(ssa, unwinding), command, cfg, times)
        if res.status == "unsat":
            return Verdict(
                "successful", k, obligations=_obligation_table(ssa, "pass"),
                notes=notes + [f"completeness established at k={k}"],
                unknown_calls=unknowns, times=times,
            )
        if res.status == "unknown":
            return Verdict("unknown", k, reason=res.reason, times=times)
    notes, unknowns = _success_notes(program)
    return Verdict(
        "safe-within-bound", k_max,
        obligations=_obligation_table(last_ssa, "bounded") if last_ssa else [],
        notes=notes, unknown_calls=unknowns, times=times,
    )


def run_kinduction(
    program: g.GotoProgram,
    entry: str,
    k_max: int,
    cfg: RunConfig,
    command: SolverCommand,
) -> Verdict:
    times: dict[str, float] = {}
    step_note: str | None = None
    for k in range(1, k_max + 1):
        # Base case: plain BMC at k.
        ssa = unroll(program, entry, k)
        props = ssa.property_obligations()
        if props:
            res = _solve(encode_vc(ssa, props), command, cfg, times)
            if res.status == "sat":
                return _failed_verdict(program, entry, ssa, res.model, k, times)
            if res.status == "unknown":
                return Verdict("unknown", k, reason=res.reason, times=times)
        notes, unknowns = _success_notes(program)
        # Forward condition: every loop provably exits within k.
        unwinding = ssa.unwinding_obligations()
        forward_holds = not unwinding
        if unwinding:
            res = _solve(encode_vc(ssa, unwinding), command, cfg, times)
            if res.status == "unsat":
                forward_holds = True
            elif res.status == "unknown":
                return Verdict("unknown", k, reason=res.reason, times=times)
        if forward_holds:
            return Verdict(
                "successful", k, obligations=_obligation_table(ssa, "pass"),
                notes=notes + [f"forward condition holds at k={k}"],
                unknown_calls=unknowns, times=times,
            )
        # Inductive step: havoc loop state, assume k iterations, assert k+1.
        try:
            step_ssa = unroll(program, entry, k, step_mode=True)
        except StepUnsupportedError as exc:
            step_note = f"inductive step skipped: {exc}"
            continue
        step_props = step_ssa.property_obligations()
        if not step_props:
            return Verdict(
                "successful", k, obligations=_obligation_table(ssa, "pass"),
                notes=notes + [f"inductive step holds at k={k} (no violable claims)"],
                unknown_calls=unknowns, times=times,
            )
        res = _solve(encode_vc(step_ssa, step_props), command, cfg, times)
        if res.status == "unsat":
            return Verdict(
                "successful", k, obligations=_obligation_table(ssa, "pass"),
                notes=notes + [f"inductive step holds at k={k}"],
                unknown_calls=unknowns, times=times,
            )
        if res.status == "unknown":
            return Verdict("unknown", k, reason=res.reason, times=times)
    reason = "k-induction inconclusive"
    if step_note:
        reason += f" ({step_note})"
    return Verdict("unknown", k_max, reason=reason, times=times)


# ---------------------------------------------------------------------------
# One-call entry used by the CLI and tests


def verify(cfg: RunConfig) -> Verdict:
    ctx = build_pipeline(cfg.paths)
    program = instrument(ctx.program, cfg.checks)
    diags = g.validate(program)
    if diags:
        raise VerifierError("invalid GOTO program:\n" + "\n".join(str(d) for d in diags))
    entry = pick_entry(ctx, cfg.entry)
    command = resolve_solver(cfg.solver_path)
    t0 = time.monotonic()
    try:
        if cfg.strategy == "bmc":
            verdict = run_bmc(program, entry, cfg.unwind, cfg, command)
        elif cfg.strategy == "incremental":
            verdict = run_incremental(program, entry, cfg.unwind, cfg, command)
        elif cfg.strategy == "k-induction":
            verdict = run_kinduction(program, entry, cfg.unwind, cfg, command)
        else:
            raise VerifierError(f"unknown strategy {cfg.strategy}")
    except IrreducibleError as exc:
        verdict = Verdict("unknown", cfg.unwind, reason=str(exc))
    verdict.times["total"] = time.monotonic() - t0
    return verdict
