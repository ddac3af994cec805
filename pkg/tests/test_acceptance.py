"""Acceptance suite.

Each test realizes one exit criterion and prints a PASS/FAIL line (visible
under ``pytest -s`` or in the failure report).  Criteria:

  A1  benchmark-table reproduction: 21 fixtures, exact verdicts, all
      counterexamples replay-confirmed, under 60 s wall time
  A2  golden lowering of the worked increment example
  A3  VC shape: the five published conjuncts and the sole overflow claim
  A4  oracle equivalence on >= 500 random width-4 programs at bound 5
  A5  overflow predicate vs width-8 recomputation, all 3 x 256 cases
  A6  k-induction proves the nondet-bound loop within 5 s
  A7  every failure verdict in the corpus replays to the same violation
"""

from __future__ import annotations

import concurrent.futures
import random
import time

import pytest

from jimple_bmc.driver import RunConfig, run_bmc, verify
from jimple_bmc.goto import ir as g
from jimple_bmc.goto.ir import PropertyClass
from jimple_bmc.solver import resolve_solver, terms as t
from jimple_bmc.symex import Checks, build_trace, encode_vc, instrument, replay, unroll

from helpers import FIXTURES, ProgramGen, exhaustive_oracle, lower_files

# (fixture, expected verdict, expected property class)
TABLE3 = [
    ("TC00_overflow_add", "failed", PropertyClass.OVERFLOW),
    ("TC01_overflow_field", "failed", PropertyClass.OVERFLOW),
    ("TC02_underflow_add", "failed", PropertyClass.UNDERFLOW),
    ("TC03_underflow_sub", "failed", PropertyClass.UNDERFLOW),
    ("TC04_div_by_zero", "failed", PropertyClass.DIV_BY_ZERO),
    ("TC05_rem_by_zero", "failed", PropertyClass.DIV_BY_ZERO),
    ("TC06_bounds_read", "failed", PropertyClass.BOUNDS),
    ("TC07_bounds_write", "failed", PropertyClass.BOUNDS),
    ("TC08_bounds_nondet_length", "failed", PropertyClass.BOUNDS),
    ("TC09_bounds_offbyone_loop", "failed", PropertyClass.BOUNDS),
    ("TC10_assert_direct", "failed", PropertyClass.USER_ASSERT),
    ("TC11_assert_after_rem", "failed", PropertyClass.USER_ASSERT),
    ("TC12_assert_field", "failed", PropertyClass.USER_ASSERT),
    ("TC13_assert_loop_sum", "failed", PropertyClass.USER_ASSERT),
    ("TC14_assert_boolean", "failed", PropertyClass.USER_ASSERT),
    ("TC15_assert_branch", "failed", PropertyClass.USER_ASSERT),
    ("TC16_safe_guarded_add", "successful", None),
    ("TC17_safe_guarded_div", "successful", None),
    ("TC18_safe_array_loop", "successful", None),
    ("TC19_safe_guarded_assert", "successful", None),
    ("TC20_safe_object", "successful", None),
]


def _report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    tail = f" ({detail})" if detail else ""
    print(f"[{status}] {name}{tail}")


def _verify_tc(name: str):
    cfg = RunConfig(
        paths=[str(FIXTURES / "tc" / f"{name}.jimple")],
        strategy="bmc",
        unwind=10,
        checks=Checks(overflow=True),
    )
    return name, verify(cfg)


def test_a1_table3_reproduction():
    """All 21 benchmarks: exact verdicts, confirmed counterexamples, <60s."""
    t0 = time.monotonic()
    results: dict[str, object] = {}
    with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
        for name, verdict in pool.map(lambda row: _verify_tc(row[0]), TABLE3):
            results[name] = verdict
    elapsed = time.monotonic() - t0

    wrong = []
    unconfirmed = []
    for name, expected, expected_class in TABLE3:
        v = results[name]
        if v.kind != expected:
            wrong.append((name, expected, v.kind))
            continue
        if expected == "failed":
            cex = v.counterexample
            if cex is None or cex.violated.property_class != expected_class:
                wrong.append(
                    (name, expected_class, cex and cex.violated.property_class)
                )
            out = replay_check(name, v)
            if not out:
                unconfirmed.append(name)
    correct = len(TABLE3) - len(wrong)
    ok = not wrong and not unconfirmed and elapsed < 60.0
    _report(
        "A1 benchmark-table reproduction",
        ok,
        f"{correct}/{len(TABLE3)} correct, "
        f"{16 - len(unconfirmed)}/16 confirmed, {elapsed:.1f}s",
    )
    assert not wrong, wrong
    assert not unconfirmed, unconfirmed
    assert elapsed < 60.0, f"suite took {elapsed:.1f}s"


def replay_check(name: str, verdict) -> bool:
    """Independent re-replay of a failure verdict's counterexample."""
    from jimple_bmc.driver import build_pipeline, pick_entry

    ctx = build_pipeline([str(FIXTURES / "tc" / f"{name}.jimple")])
    program = instrument(ctx.program, Checks(overflow=True))
    entry = pick_entry(ctx, None)
    cex = verdict.counterexample
    out = replay(program, entry, cex.inputs)
    return (
        out.kind == "violation"
        and out.violated.property_class == cex.violated.property_class
        and out.violated.pos == cex.violated.pos
    )


def test_a2_golden_lowering_of_increment():
    ctx = lower_files("Foo.jimple")
    fn = ctx.program.functions["Foo::increment_int_int"]
    core = [i for i in fn.body if not isinstance(i, (g.Decl, g.Dead, g.EndFunction))]
    shape = [type(i).__name__ for i in core]
    ok = shape == ["Assign"] * 6 + ["ReturnI"]
    # Prologue identity reads (receiver cast + parameter), member read,
    # add, member write, member read, return.
    ok = ok and isinstance(core[0].value, g.Cast) and core[0].atomic
    ok = ok and isinstance(core[1].value, g.Symbol) and core[1].atomic
    ok = ok and isinstance(core[2].value, g.Member)
    ok = ok and isinstance(core[3].value, g.Binary) and core[3].value.op == "+"
    ok = ok and isinstance(core[4].target, g.Member)
    ok = ok and isinstance(core[5].value, g.Member)
    ok = ok and isinstance(core[6].value, g.Symbol)
    _report("A2 golden lowering (increment)", ok)
    assert ok, shape


def test_a3_vc_shape_matches_published_conjuncts():
    ctx = lower_files("Foo.jimple")
    prog = instrument(ctx.program, Checks(overflow=True, null_deref=False))
    ssa = unroll(prog, "Foo::increment_int_int", 10)
    eqs = ssa.equations
    ok = [e.display for e in eqs[:5]] == ["@this", "r0", "@parameter0", "i0", "$i1"]
    ok = ok and eqs[0].kind == "havoc" and isinstance(eqs[0].rhs, t.Sym)
    ok = ok and eqs[1].rhs == t.Sym(t.BvSort(32), eqs[0].lhs)
    ok = ok and eqs[2].kind == "havoc"
    ok = ok and eqs[3].rhs == t.Sym(t.BvSort(32), eqs[2].lhs)
    ok = ok and isinstance(eqs[4].rhs, t.Select)
    props = ssa.property_obligations()
    ok = ok and len(props) == 1
    claim = props[0].claim
    ok = ok and isinstance(claim, t.Not) and isinstance(claim.a, t.OverflowPred)
    if ok:
        i0 = [e.lhs for e in eqs if e.display == "i0"][0]
        i1 = [e.lhs for e in eqs if e.display == "$i1"][0]
        ok = {claim.a.a, claim.a.b} == {
            t.Sym(t.BvSort(32), i0),
            t.Sym(t.BvSort(32), i1),
        }
    _report("A3 VC shape (five conjuncts + overflow claim)", ok)
    assert ok


def _bmc_verdict(program: g.GotoProgram, command, k: int = 5):
    cfg = RunConfig(paths=["<generated>"], strategy="bmc", unwind=k)
    return run_bmc(program, "main_void", k, cfg, command)


def test_a4_oracle_equivalence_on_random_programs():
    """>= 500 random programs: BMC at bound 5 == exhaustive interpretation."""
    command = resolve_solver()
    rng = random.Random(0xE5B3C)
    gen = ProgramGen(rng)
    programs = []
    for _ in range(500):
        p = gen.generate()
        programs.append(instrument(p, Checks(overflow=True)))

    def check(indexed):
        i, prog = indexed
        oracle = exhaustive_oracle(prog, "main_void")
        verdict = _bmc_verdict(prog, command)
        expected = "failed" if oracle.violated else "successful"
        agree = verdict.kind == expected
        return i, agree, expected, verdict.kind

    disagreements = []
    with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
        for i, agree, expected, got in pool.map(check, enumerate(programs)):
            if not agree:
                disagreements.append((i, expected, got))
    _report(
        "A4 oracle equivalence",
        not disagreements,
        f"{len(programs) - len(disagreements)}/{len(programs)} agree",
    )
    assert not disagreements, disagreements[:5]


def test_a5_overflow_semantics_vs_width8_recomputation():
    """overflow(op, a, b) at width 4 against width-8 recomputation."""
    mismatches = []
    for op, pyop in (("add", lambda a, b: a + b), ("sub", lambda a, b: a - b), ("mul", lambda a, b: a * b)):
        for ua in range(16):
            for ub in range(16):
                pred = t.OverflowPred(t.BOOL, op, t.Sym(t.BvSort(4), "a"), t.Sym(t.BvSort(4), "b"))
                got = bool(t.eval_term(pred, {"a": ua, "b": ub}))
                # Width-8 recomputation: sign-extend, compute exactly (the
                # 8-bit range holds every 4-bit op result), compare range.
                sa, sb = t.to_signed(ua, 4), t.to_signed(ub, 4)
                wide = t.to_signed(
                    t.to_unsigned(pyop(sa, sb), 8), 8
                )
                expected = not (-8 <= wide <= 7)
                if got != expected:
                    mismatches.append((op, sa, sb, got, expected))
    _report("A5 overflow vs width-8 recomputation", not mismatches, "768 cases")
    assert not mismatches, mismatches[:5]


def test_a6_kinduction_unbounded_proof_within_5s():
    cfg = RunConfig(
        paths=[str(FIXTURES / "KInduction.jimple")],
        entry="loop",
        strategy="k-induction",
        unwind=10,
    )
    t0 = time.monotonic()
    v = verify(cfg)
    elapsed = time.monotonic() - t0
    ok = v.kind == "successful" and elapsed < 5.0
    _report("A6 k-induction unbounded proof", ok, f"{elapsed:.2f}s at k={v.bound}")
    assert v.kind == "successful"
    assert elapsed < 5.0
    # Plain BMC cannot conclude at any fixed bound with unwinding assertions.
    for k in (2, 6):
        b = verify(
            RunConfig(
                paths=[str(FIXTURES / "KInduction.jimple")],
                entry="loop",
                strategy="bmc",
                unwind=k,
                unwinding_assertions=True,
            )
        )
        assert b.kind == "safe-within-bound"


def test_a7_counterexample_replay_across_corpus():
    """100% of failure verdicts replay to the same class and position."""
    command = resolve_solver()
    total = 0
    confirmed = 0
    # The buggy benchmark families.
    for name, expected, _cls in TABLE3:
        if expected != "failed":
            continue
        _, v = _verify_tc(name)
        assert v.kind == "failed"
        total += 1
        if replay_check(name, v):
            confirmed += 1
    # Plus random violating programs straight through the pipeline pieces.
    rng = random.Random(99)
    gen = ProgramGen(rng)
    found = 0
    while found < 25:
        prog = instrument(gen.generate(), Checks(overflow=True))
        ssa = unroll(prog, "main_void", 5)
        props = ssa.property_obligations()
        if not props:
            continue
        from jimple_bmc.solver import solve

        res = solve(encode_vc(ssa, props), command, timeout=30)
        if res.status != "sat":
            continue
        found += 1
        total += 1
        cex = build_trace(res.model, ssa)
        out = replay(prog, "main_void", cex.inputs)
        if (
            out.kind == "violation"
            and out.violated.property_class == cex.violated.property_class
            and out.violated.pos == cex.violated.pos
        ):
            confirmed += 1
    ok = confirmed == total
    _report("A7 counterexample replay", ok, f"{confirmed}/{total} confirmed")
    assert confirmed == total
