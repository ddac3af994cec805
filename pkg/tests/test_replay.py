"""Concrete interpreter and counterexample replay."""

from __future__ import annotations

from jimple_bmc.goto.ir import PropertyClass
from jimple_bmc.solver import solve
from jimple_bmc.symex import build_trace, encode_vc, replay, unroll
from jimple_bmc.symex.replay import Interpreter, ListInputProvider
from jimple_bmc.symex.ssa import InputValue

from helpers import exhaustive_oracle, instrumented, lower_text

OFF_BY_ONE = """
public class O extends java.lang.Object {
    public static void main() {
        int[] a;
        int v;
        a = newarray (int)[3];
        v = a[3];
        return;
    }
}
"""


def _prog(text, **checks):
    ctx = lower_text(text)
    prog = instrumented(ctx, **checks)
    entry = [n for n in ctx.program.functions if "main" in n][0]
    return prog, entry


def test_off_by_one_read_hits_bounds_assert():
    prog, entry = _prog(OFF_BY_ONE)
    out = replay(prog, entry, [])
    assert out.kind == "violation"
    assert out.violated.property_class is PropertyClass.BOUNDS


def test_safe_fixture_terminates_normally():
    prog, entry = _prog(
        """
        public class S extends java.lang.Object {
            public static void main() {
                int a, b;
                a = 1;
                b = a + 2;
                return;
            }
        }
        """,
        overflow=True,
    )
    out = replay(prog, entry, [])
    assert out.kind == "normal"


def test_inputs_consumed_in_order():
    prog, entry = _prog(
        """
        public class I extends java.lang.Object {
            public static void main() {
                int x, y, q;
                x = staticinvoke <Verifier: int nondetInt()>();
                y = staticinvoke <Verifier: int nondetInt()>();
                q = x / y;
                return;
            }
        }
        """
    )
    ok = replay(prog, entry, [InputValue("x", "scalar", value=10), InputValue("y", "scalar", value=2)])
    assert ok.kind == "normal"
    bad = replay(prog, entry, [InputValue("x", "scalar", value=10), InputValue("y", "scalar", value=0)])
    assert bad.kind == "violation"
    assert bad.violated.property_class is PropertyClass.DIV_BY_ZERO


def test_guarded_branches_make_division_safe():
    prog, entry = _prog(
        """
        public class B extends java.lang.Object {
            public static void main() {
                int x, r, q;
                x = staticinvoke <Verifier: int nondetInt()>();
                if x >= 0 goto pos;
                r = 0 - 1;
                goto join;
             pos:
                r = 1;
             join:
                q = 10 / r;
                return;
            }
        }
        """
    )
    ssa = unroll(prog, entry, 3)
    res = solve(encode_vc(ssa), timeout=30)
    assert res.status == "unsat"  # r is -1 or 1 on every path


def test_trace_steps_match_taken_branch_and_replay():
    prog, entry = _prog(
        """
        public class B2 extends java.lang.Object {
            public static void main() {
                int x, r, q;
                x = staticinvoke <Verifier: int nondetInt()>();
                if x >= 0 goto pos;
                r = 1;
                goto join;
             pos:
                r = 0;
             join:
                q = 10 / r;
                return;
            }
        }
        """
    )
    ssa = unroll(prog, entry, 3)
    res = solve(encode_vc(ssa), timeout=30)
    assert res.status == "sat"
    cex = build_trace(res.model, ssa)
    # The violating path takes the x >= 0 branch (r = 0).
    assert cex.inputs[0].value >= 0
    r_steps = [s for s in cex.steps if s.symbol == "r"]
    assert [s.value for s in r_steps] == [0]
    out = replay(prog, entry, cex.inputs)
    assert out.kind == "violation"
    assert out.violated.property_class is cex.violated.property_class
    assert out.violated.pos == cex.violated.pos


def test_exhaustive_oracle_counts_runs():
    prog, entry = _prog(
        """
        public class E extends java.lang.Object {
            public static void main() {
                boolean b;
                int q, d;
                b = staticinvoke <Verifier: boolean nondetBoolean()>();
                d = 1;
                if b != 0 goto go;
                d = 0;
             go:
                q = 4 / d;
                return;
            }
        }
        """
    )
    verdict = exhaustive_oracle(prog, entry)
    assert verdict.runs == 2
    assert verdict.violated
    assert PropertyClass.DIV_BY_ZERO in verdict.classes


def test_object_inputs_seed_fields():
    text = """
    public class F extends java.lang.Object {
        public int v;

        public static int read(F) {
            F r0;
            int $i0;
            r0 := @parameter0: F;
            $i0 = r0.<F: int v>;
            return $i0;
        }
    }
    """
    ctx = lower_text(text)
    prog = instrumented(ctx, null_deref=True)
    entry = [n for n in ctx.program.functions if "read" in n][0]
    null_in = [InputValue("p", "ref", is_null=True)]
    out = replay(prog, entry, null_in)
    assert out.kind == "violation"
    assert out.violated.property_class is PropertyClass.NULL_DEREF
    obj_in = [InputValue("p", "ref", is_null=False, fields={"F.v": 41})]
    interp = Interpreter(prog, ListInputProvider(obj_in))
    out2 = interp.run(entry)
    assert out2.kind == "normal"
