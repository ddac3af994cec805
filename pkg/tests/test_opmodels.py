"""Operational models: catalog resolution, intrinsics, array initialization."""

from __future__ import annotations

from jimple_bmc import opmodels
from jimple_bmc.goto import ir as g
from jimple_bmc.goto.ir import PropertyClass
from jimple_bmc.jimple import build_class_table, parse_class
from jimple_bmc.jimple.ast import J_BOOLEAN, J_INT, J_VOID, MethodSig
from jimple_bmc.opmodels import ModelKind, find_model, resolve_call
from helpers import exhaustive_oracle, instrumented, lower_text, verify_files


def _table(*texts):
    classes = [parse_class(t) for t in texts]
    return build_class_table(classes, is_modeled_external=opmodels.is_modeled_class)


FOO = """
public class Foo extends java.lang.Object {
    public int increment(int) {
        Foo r0; int i0;
        r0 := @this: Foo;
        i0 := @parameter0: int;
        return i0;
    }
}
"""


def test_random_nextint_is_nondet_intrinsic():
    sig = MethodSig("java.util.Random", J_INT, "nextInt", ())
    model = find_model(sig)
    assert model is not None and model.kind is ModelKind.NONDET
    assert model.result_type == J_INT


def test_user_function_takes_precedence():
    table = _table(FOO)
    sig = MethodSig("Foo", J_INT, "increment", (J_INT,))
    res = resolve_call(sig, table)
    assert res.user is not None and res.model is None


def test_unknown_is_a_value_not_an_error():
    table = _table(FOO)
    sig = MethodSig("com.example.Gone", J_VOID, "vanish", ())
    res = resolve_call(sig, table)
    assert res.unknown


def test_println_resolves_to_noop():
    sig = MethodSig("java.io.PrintStream", J_VOID, "println", (J_INT,))
    model = find_model(sig)
    assert model is not None and model.kind is ModelKind.NOOP


def test_catalog_determinism():
    sig = MethodSig("java.util.Random", J_BOOLEAN, "nextBoolean", ())
    assert find_model(sig) == find_model(sig)


def test_at_most_one_catalog_match_per_signature():
    for entry in opmodels.CATALOG:
        sig = MethodSig(
            entry.class_name,
            entry.result_type or J_VOID,
            entry.method_name,
            entry.params or (),
        )
        matches = [m for m in opmodels.CATALOG if m.matches(sig)]
        assert len(matches) == 1, sig


PRINT_PROGRAM = """
public class P extends java.lang.Object {{
    public static void main() {{
        java.lang.System r1;
        java.io.PrintStream out;
        int x, q;
        x = staticinvoke <Verifier: int nondetInt()>();
        {print_stmt}
        q = 100 / x;
        return;
    }}
}}
"""


def test_println_noop_leaves_verdict_unchanged(tmp_path):
    """Deleting the println call must not change the verdict."""
    with_print = PRINT_PROGRAM.format(
        print_stmt=(
            "out = <java.lang.System: java.io.PrintStream out>;\n"
            "        virtualinvoke out.<java.io.PrintStream: void println(int)>(x);"
        )
    )
    without_print = PRINT_PROGRAM.format(print_stmt="")
    va = verify_files(tmp_path, {"A.jimple": with_print}, strategy="bmc", unwind=2)
    vb = verify_files(tmp_path, {"B.jimple": without_print}, strategy="bmc", unwind=2)
    assert va.kind == vb.kind == "failed"
    assert (
        va.counterexample.violated.property_class
        == vb.counterexample.violated.property_class
    )
    assert not va.unknown_calls  # println was modeled, not havocked


def test_verifier_assume_prunes_paths(tmp_path):
    text = """
    public class A extends java.lang.Object {
        public static void main() {
            int x, q;
            boolean $z0;
            x = staticinvoke <Verifier: int nondetInt()>();
            $z0 = 0 == 1;
            staticinvoke <Verifier: void assume(boolean)>($z0);
            q = 100 / x;
            return;
        }
    }
    """
    v = verify_files(tmp_path, {"A.jimple": text}, strategy="bmc", unwind=2)
    assert v.kind == "successful"  # assume(false) makes everything vacuous


def test_assert_intrinsic_constant_true_vacuously_safe(tmp_path):
    text = """
    public class A extends java.lang.Object {
        public static void main() {
            boolean $z0;
            $z0 = 1 == 1;
            staticinvoke <Verifier: void assert(boolean)>($z0);
            return;
        }
    }
    """
    v = verify_files(tmp_path, {"A.jimple": text}, strategy="bmc", unwind=1)
    assert v.kind == "successful"


def test_kotlin_checknotnull_on_nondet_reference(tmp_path):
    """The kotlinc-emitted null guard flags nondet-null parameters."""
    text = """
    public class K extends java.lang.Object {
        public static void use(java.lang.Object) {
            java.lang.Object r0;
            r0 := @parameter0: java.lang.Object;
            staticinvoke <kotlin.jvm.internal.Intrinsics: void checkNotNull(java.lang.Object)>(r0);
            return;
        }
    }
    """
    v = verify_files(
        tmp_path, {"K.jimple": text}, entry="use", strategy="bmc", unwind=2
    )
    assert v.kind == "failed"
    assert v.counterexample.violated.property_class is PropertyClass.NULL_DEREF
    assert v.counterexample.inputs[0].is_null


def test_kotlin_assertions_enabled_reads_true():
    text = """
    public class KA extends java.lang.Object {
        public static void main() {
            boolean $z0;
            int x;
            $z0 = <kotlin._Assertions: boolean ENABLED>;
            if $z0 == 0 goto skip;
            x = 1 / 0;
         skip:
            return;
        }
    }
    """
    ctx = lower_text(text)
    prog = instrumented(ctx)
    entry = [n for n in ctx.program.functions if "main" in n][0]
    # ENABLED folds to true, so the guarded division is reachable.
    verdict = exhaustive_oracle(prog, entry)
    assert verdict.violated and PropertyClass.DIV_BY_ZERO in verdict.classes


def test_arrays_fill_synthetic_body(tmp_path):
    text = """
    public class AF extends java.lang.Object {
        public static void main() {
            int[] a;
            int v;
            boolean $z0;
            a = newarray (int)[3];
            staticinvoke <java.util.Arrays: void fill(int[],int)>(a, 9);
            v = a[2];
            $z0 = v == 9;
            staticinvoke <Verifier: void assert(boolean)>($z0);
            return;
        }
    }
    """
    v = verify_files(tmp_path, {"AF.jimple": text}, strategy="bmc", unwind=6)
    assert v.kind == "successful"
    assert not v.unknown_calls


# ---------------------------------------------------------------------------
# Array initialization model


def test_intarray3_zero_initialized():
    text = """
    public class Z extends java.lang.Object {
        public static void main() {
            int[] a;
            int v;
            boolean $z0;
            a = newarray (int)[3];
            v = a[1];
            $z0 = v == 0;
            staticinvoke <Verifier: void assert(boolean)>($z0);
            return;
        }
    }
    """
    ctx = lower_text(text)
    prog = instrumented(ctx)
    entry = [n for n in ctx.program.functions if "main" in n][0]
    assert not exhaustive_oracle(prog, entry).violated


def test_intarray0_any_read_violates_bounds(tmp_path):
    text = """
    public class Z0 extends java.lang.Object {
        public static void main() {
            int[] a;
            int v;
            a = newarray (int)[0];
            v = a[0];
            return;
        }
    }
    """
    v = verify_files(tmp_path, {"Z0.jimple": text}, strategy="bmc", unwind=3)
    assert v.kind == "failed"
    assert v.counterexample.violated.property_class is PropertyClass.BOUNDS


def test_nondet_length_read_at_n_minus_one(tmp_path):
    """IntArray(n) with nondet n read at n-1 and no guard: n could be 0.

    Expected value established by the exhaustive interpreter over n in
    [0, 4] before asserting the BMC verdict.
    """
    text = """
    public class NL extends java.lang.Object {
        public static void main() {
            int[] a;
            int n, m, v;
            n = staticinvoke <Verifier: int nondetInt()>();
            if n < 0 goto end;
            if n > 4 goto end;
            a = newarray (int)[n];
            m = n - 1;
            v = a[m];
         end:
            return;
        }
    }
    """
    ctx = lower_text(text)
    prog = instrumented(ctx)
    entry = [n for n in ctx.program.functions if "main" in n][0]

    # Oracle over the bounded domain: a violation exists (n = 0 -> a[-1]).
    from jimple_bmc.symex.replay import Interpreter, ListInputProvider
    from jimple_bmc.symex.ssa import InputValue

    seen = set()
    for n in range(0, 5):
        out = Interpreter(
            prog, ListInputProvider([InputValue("n", "scalar", value=n)])
        ).run(entry)
        seen.add((out.kind, out.violated.property_class if out.violated else None))
    assert ("violation", PropertyClass.BOUNDS) in seen

    v = verify_files(tmp_path, {"NL.jimple": text}, strategy="bmc", unwind=6)
    assert v.kind == "failed"
    assert v.counterexample.violated.property_class is PropertyClass.BOUNDS


def test_negative_constant_length_is_bounds_violation(tmp_path):
    text = """
    public class NC extends java.lang.Object {
        public static void main() {
            int[] a;
            int n;
            n = 0 - 2;
            a = newarray (int)[n];
            return;
        }
    }
    """
    v = verify_files(tmp_path, {"NC.jimple": text}, strategy="bmc", unwind=3)
    assert v.kind == "failed"
    assert v.counterexample.violated.property_class is PropertyClass.BOUNDS


def test_list_models_output():
    lines = opmodels.describe_catalog()
    assert any("nextInt" in l for l in lines)
    assert any("ENABLED" in l for l in lines)
