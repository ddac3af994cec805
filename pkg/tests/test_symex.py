"""Symbolic execution: SSA construction, instrumentation, unrolling."""

from __future__ import annotations

import pytest

from jimple_bmc.goto import ir as g
from jimple_bmc.goto.ir import PropertyClass
from jimple_bmc.solver import terms as t
from jimple_bmc.symex import Checks, encode_vc, instrument, unroll
from jimple_bmc.symex.cfg import find_loops, unroll_function

from helpers import exhaustive_oracle, instrumented, lower_files, lower_text

I32 = g.INT32


def _increment_ssa():
    ctx = lower_files("Foo.jimple")
    prog = instrumented(ctx, overflow=True, null_deref=False)
    return unroll(prog, "Foo::increment_int_int", 10)


# ---------------------------------------------------------------------------
# The published VC shape


def test_vc_first_five_equations_match_published_conjuncts():
    ssa = _increment_ssa()
    eqs = ssa.equations
    displays = [e.display for e in eqs[:5]]
    assert displays == ["@this", "r0", "@parameter0", "i0", "$i1"]
    # @this = nondet()
    assert eqs[0].kind == "havoc" and isinstance(eqs[0].rhs, t.Sym)
    # r0 = @this
    assert eqs[1].rhs == t.Sym(t.BvSort(32), eqs[0].lhs)
    # @parameter0 = nondet()
    assert eqs[2].kind == "havoc" and isinstance(eqs[2].rhs, t.Sym)
    # i0 = @parameter0
    assert eqs[3].rhs == t.Sym(t.BvSort(32), eqs[2].lhs)
    # $i1 = r0->member
    assert isinstance(eqs[4].rhs, t.Select)
    assert eqs[4].rhs.array.name.startswith("#field::Foo::member")
    assert eqs[4].rhs.index == t.Sym(t.BvSort(32), eqs[1].lhs)


def test_vc_sole_overflow_obligation():
    ssa = _increment_ssa()
    props = ssa.property_obligations()
    assert len(props) == 1
    ob = props[0]
    assert ob.property_class is PropertyClass.OVERFLOW
    claim = ob.claim
    assert isinstance(claim, t.Not) and isinstance(claim.a, t.OverflowPred)
    operands = {claim.a.a, claim.a.b}
    i0 = t.Sym(t.BvSort(32), _name_of(ssa, "i0"))
    i1 = t.Sym(t.BvSort(32), _name_of(ssa, "$i1"))
    assert operands == {i0, i1}


def _name_of(ssa, display):
    return [e.lhs for e in ssa.equations if e.display == display][0]


# ---------------------------------------------------------------------------
# Equation accounting


def test_straight_line_equation_count_equals_assignment_count():
    text = """
    public class S extends java.lang.Object {
        public static int run(int) {
            int i0, a, b;
            i0 := @parameter0: int;
            a = i0;
            b = a;
            return b;
        }
    }
    """
    ctx = lower_text(text)
    prog = instrumented(ctx)
    entry = [n for n in ctx.program.functions if "run" in n][0]
    ssa = unroll(prog, entry, 1)
    # One havoc for the parameter global, one per executed assignment
    # (prologue copy + two body assignments), one for the return value? No:
    # returns do not emit equations. No guards, no phis on straight line.
    kinds = [e.kind for e in ssa.equations]
    assert kinds == ["havoc", "assign", "assign", "assign"]
    assert all(e.guard == t.TRUE for e in ssa.equations)


def test_single_assignment_invariant():
    ssa = _increment_ssa()
    seen = set()
    for e in ssa.equations:
        assert e.lhs not in seen
        seen.add(e.lhs)


def test_symbols_referenced_are_defined_or_inputs():
    ssa = _increment_ssa()
    defined = {e.lhs for e in ssa.equations}
    inputs = {i.name for i in ssa.inputs} | {i.length_input for i in ssa.inputs}
    initial = set(ssa.initial_arrays)
    known = defined | inputs | initial
    for e in ssa.equations:
        for name in t.free_symbols(e.rhs):
            assert name in known, name
    for o in ssa.obligations:
        for name in t.free_symbols(t.and_(o.guard, t.not_(o.claim))):
            assert name in known, name


def test_nondet_freshness():
    text = """
    public class N extends java.lang.Object {
        public static int run() {
            java.util.Random r;
            int a, b, c;
            r = new java.util.Random;
            specialinvoke r.<java.util.Random: void <init>()>();
            a = virtualinvoke r.<java.util.Random: int nextInt()>();
            b = virtualinvoke r.<java.util.Random: int nextInt()>();
            c = a + b;
            return c;
        }
    }
    """
    ctx = lower_text(text)
    prog = instrumented(ctx)
    entry = [n for n in ctx.program.functions if "run" in n][0]
    ssa = unroll(prog, entry, 5)
    names = [i.name for i in ssa.inputs]
    assert len(names) == len(set(names)) == 2


# ---------------------------------------------------------------------------
# Instrumentation


def _overflow_obls(program):
    ssa = unroll(program, next(iter(program.functions)), 5)
    return ssa


def test_constant_addition_discharged_without_solver():
    text = """
    public class C extends java.lang.Object {
        public static int run() {
            int a;
            a = 2 + 3;
            return a;
        }
    }
    """
    ctx = lower_text(text)
    prog = instrumented(ctx, overflow=True)
    entry = [n for n in ctx.program.functions if "run" in n][0]
    ssa = unroll(prog, entry, 5)
    assert len(ssa.obligations) == 1
    assert ssa.obligations[0].discharged
    assert ssa.property_obligations() == []  # nothing for the solver


def test_division_check_emitted():
    text = """
    public class D extends java.lang.Object {
        public static int run(int, int) {
            int a, b, q;
            a := @parameter0: int;
            b := @parameter1: int;
            q = a / b;
            return q;
        }
    }
    """
    ctx = lower_text(text)
    prog = instrumented(ctx)
    entry = [n for n in ctx.program.functions if "run" in n][0]
    ssa = unroll(prog, entry, 5)
    props = ssa.property_obligations()
    assert [o.property_class for o in props] == [PropertyClass.DIV_BY_ZERO]


def test_checks_flag_controls_emission():
    ctx = lower_files("Foo.jimple")
    without = instrument(ctx.program, Checks(overflow=False, null_deref=False))
    ssa = unroll(without, "Foo::increment_int_int", 5)
    assert ssa.property_obligations() == []


def test_null_check_before_member_access():
    ctx = lower_files("Foo.jimple")
    prog = instrument(ctx.program, Checks(overflow=False, null_deref=True))
    ssa = unroll(prog, "Foo::increment_int_int", 5)
    props = ssa.property_obligations()
    assert props and all(o.property_class is PropertyClass.NULL_DEREF for o in props)
    # Violable: the receiver ranges over {null, fresh object}.
    f = encode_vc(ssa, props[:1])
    from jimple_bmc.solver import solve

    assert solve(f, timeout=30).status == "sat"


# ---------------------------------------------------------------------------
# Loops and unrolling


LOOP3 = """
public class L extends java.lang.Object {
    public static int run() {
        int i, s;
        i = 0;
        s = 0;
     head:
        if i >= 3 goto done;
        s = s + 1;
        i = i + 1;
        goto head;
     done:
        return s;
    }
}
"""


def test_find_loops_on_lowered_body():
    ctx = lower_text(LOOP3)
    fn = [f for n, f in ctx.program.functions.items() if "run" in n][0]
    loops = find_loops(fn)
    assert len(loops) == 1
    assert len(loops[0].back_sources) == 1


def test_bounded_loop_fully_unrolls_at_sufficient_k():
    ctx = lower_text(LOOP3)
    prog = instrumented(ctx, overflow=True)
    entry = [n for n in ctx.program.functions if "run" in n][0]
    ssa5 = unroll(prog, entry, 5)
    # Trip count 3 < 5: the loop exits on every path, no reachable cut.
    assert ssa5.unwinding_obligations() == []


def test_insufficient_k_leaves_unwinding_obligation():
    ctx = lower_text(LOOP3)
    prog = instrumented(ctx, overflow=True)
    entry = [n for n in ctx.program.functions if "run" in n][0]
    ssa2 = unroll(prog, entry, 2)
    assert ssa2.unwinding_obligations()


def test_verdict_stable_between_k3_and_k5():
    """Trip-3 loop: identical (safe) verdicts at k = 3 and k = 5."""
    ctx = lower_text(LOOP3)
    prog = instrumented(ctx, overflow=True)
    entry = [n for n in ctx.program.functions if "run" in n][0]
    from jimple_bmc.solver import solve

    for k in (3, 5):
        ssa = unroll(prog, entry, k)
        props = ssa.property_obligations()
        if props:
            assert solve(encode_vc(ssa, props), timeout=30).status == "unsat"
    # And the oracle agrees there is no violation at all.
    assert not exhaustive_oracle(prog, entry).violated


def test_constant_loop_folds_to_single_path():
    """Constant trip counts execute concretely: no phis, no guards."""
    ctx = lower_text(LOOP3)
    prog = instrumented(ctx)
    entry = [n for n in ctx.program.functions if "run" in n][0]
    ssa = unroll(prog, entry, 5)
    assert not any(e.kind == "phi" for e in ssa.equations)


def test_symbolic_loop_produces_phis():
    text = """
    public class L2 extends java.lang.Object {
        public static int run(int) {
            int i0, i, s;
            i0 := @parameter0: int;
            i = 0;
            s = 0;
         head:
            if i >= i0 goto done;
            s = s + 1;
            i = i + 1;
            goto head;
         done:
            return s;
        }
    }
    """
    ctx = lower_text(text)
    prog = instrumented(ctx)
    entry = [n for n in ctx.program.functions if "run" in n][0]
    ssa = unroll(prog, entry, 4)
    # Exit paths for 0..4 iterations merge at the loop exit.
    assert any(e.kind == "phi" for e in ssa.equations)
    assert any(e.kind == "guard" for e in ssa.equations)


def test_branch_join_produces_phi_with_both_values():
    text = """
    public class B extends java.lang.Object {
        public static int run(int) {
            int i0, r;
            i0 := @parameter0: int;
            r = 1;
            if i0 >= 0 goto pos;
            r = 2;
         pos:
            return r;
        }
    }
    """
    ctx = lower_text(text)
    prog = instrumented(ctx)
    entry = [n for n in ctx.program.functions if "run" in n][0]
    ssa = unroll(prog, entry, 3)
    phis = [e for e in ssa.equations if e.kind == "phi" and e.display == "r"]
    assert len(phis) == 1
    assert isinstance(phis[0].rhs, t.Ite)


def test_irreducible_flow_rejected():
    body = [
        g.Decl("x", I32),
        g.Assign(g.Symbol("x", I32), g.Constant(0, I32)),
        g.IfI(g.Binary("<", g.Symbol("x", I32), g.Constant(1, I32)), "B"),
        g.LabelI("A"),
        g.Assign(g.Symbol("x", I32), g.Constant(1, I32)),
        g.LabelI("B"),
        g.Assign(g.Symbol("x", I32), g.Constant(2, I32)),
        g.GotoI("A"),
    ]
    fn = g.GotoFunction("f", body + [g.EndFunction()])
    from jimple_bmc.symex.cfg import IrreducibleError

    with pytest.raises(IrreducibleError):
        unroll_function(fn, 3)


def test_recursion_bounded_not_crashing():
    text = """
    public class R extends java.lang.Object {
        public static int down(int) {
            int i0, r, s;
            i0 := @parameter0: int;
            if i0 <= 0 goto base;
            s = i0 - 1;
            r = staticinvoke <R: int down(int)>(s);
            return r;
         base:
            return 0;
        }
    }
    """
    ctx = lower_text(text)
    prog = instrumented(ctx)
    entry = [n for n in ctx.program.functions if "down" in n][0]
    ssa = unroll(prog, entry, 3)
    assert any("recursion" in o.message for o in ssa.unwinding_obligations())


# ---------------------------------------------------------------------------
# encode_vc basics


def test_encode_vc_no_obligations_is_false():
    ssa = _increment_ssa()
    f = encode_vc(ssa, [])
    assert f.assertion == t.FALSE


def test_encode_vc_trivial_unsat_example():
    """C := {x = 5}, P := (x = 5): formula is unsatisfiable."""
    body = [
        g.Decl("x", I32),
        g.Assign(g.Symbol("x", I32), g.Constant(5, I32)),
        g.AssertI(
            g.Binary("==", g.Symbol("x", I32), g.Constant(5, I32)),
            PropertyClass.USER_ASSERT,
            "",
        ),
        g.ReturnI(None),
        g.Dead("x"),
    ]
    fn = g.GotoFunction("f", body + [g.EndFunction()])
    prog = g.GotoProgram(functions={"f": fn})
    ssa = unroll(prog, "f", 1)
    # x = 5 makes the claim fold to true at translation time.
    assert all(o.discharged for o in ssa.obligations)


def test_encode_vc_two_obligations_selects_second():
    body = [
        g.Decl("x", I32),
        g.Assign(g.Symbol("x", I32), g.Nondet(I32)),
        g.AssertI(
            g.Binary("<=", g.Constant(-100, I32), g.Constant(0, I32)),
            PropertyClass.USER_ASSERT,
            "always true",
        ),
        g.AssertI(
            g.Binary("<", g.Symbol("x", I32), g.Constant(3, I32)),
            PropertyClass.USER_ASSERT,
            "violable",
        ),
        g.ReturnI(None),
        g.Dead("x"),
    ]
    fn = g.GotoFunction("f", body + [g.EndFunction()])
    prog = g.GotoProgram(functions={"f": fn})
    ssa = unroll(prog, "f", 1)
    props = ssa.property_obligations()
    assert len(props) == 1  # the first folded away
    from jimple_bmc.solver import solve
    from jimple_bmc.symex import first_violated

    res = solve(encode_vc(ssa, props), timeout=30)
    assert res.status == "sat"
    violated = first_violated(res.model, props)
    assert violated is not None and violated.message == "violable"
