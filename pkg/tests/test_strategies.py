"""Verification strategies: plain/incremental BMC and k-induction."""

from __future__ import annotations

from jimple_bmc.symex import Checks

from helpers import verify_files

ASSERT_TRUE = """
public class T extends java.lang.Object {
    public static void main() {
        boolean $z0;
        $z0 = 0 == 0;
        staticinvoke <Verifier: void assert(boolean)>($z0);
        return;
    }
}
"""

LOOP3_SAFE = """
public class L extends java.lang.Object {
    public static void main() {
        int i, s;
        boolean $z0;
        i = 0;
        s = 0;
     head:
        if i >= 3 goto done;
        s = s + 1;
        i = i + 1;
        goto head;
     done:
        $z0 = s == 3;
        staticinvoke <Verifier: void assert(boolean)>($z0);
        return;
    }
}
"""

BUG_AT_ITERATION_4 = """
public class B4 extends java.lang.Object {
    public static void main() {
        int i, n;
        boolean $z0;
        n = staticinvoke <Verifier: int nondetInt()>();
        i = 0;
     head:
        if i >= n goto done;
        i = i + 1;
        $z0 = i != 4;
        staticinvoke <Verifier: void assert(boolean)>($z0);
        goto head;
     done:
        return;
    }
}
"""

# Safe (i stays even, never 7) but the invariant is not k-inductive for
# any small k: a havocked odd i reaches 7 within one step.
NON_INDUCTIVE_SAFE = """
public class NI extends java.lang.Object {
    public static void main() {
        int i, n;
        boolean $z0;
        n = staticinvoke <Verifier: int nondetInt()>();
        if n <= 1000 goto bounded;
        return;
     bounded:
        i = 0;
     head:
        if i >= n goto done;
        $z0 = i != 7;
        staticinvoke <Verifier: void assert(boolean)>($z0);
        i = i + 2;
        goto head;
     done:
        return;
    }
}
"""


def test_assert_true_successful_at_k1(tmp_path):
    v = verify_files(tmp_path, {"T.jimple": ASSERT_TRUE}, strategy="bmc", unwind=1)
    assert v.kind == "successful"


def test_overflow_fixture_fails_with_counterexample(tmp_path):
    v = verify_files(
        tmp_path,
        files=["tc/TC00_overflow_add.jimple"],
        strategy="bmc",
        unwind=3,
        checks=Checks(overflow=True),
    )
    assert v.kind == "failed"
    cex = v.counterexample
    assert cex is not None
    # Nondeterministic inputs are listed in the trace.
    scalars = [iv for iv in cex.inputs if iv.kind == "scalar"]
    assert len(scalars) == 2
    assert all(iv.value >= 0 for iv in scalars)


def test_bounded_loop_under_k_reports_distinct_unwinding_note(tmp_path):
    v = verify_files(
        tmp_path,
        {"L.jimple": LOOP3_SAFE},
        strategy="bmc",
        unwind=2,
        unwinding_assertions=True,
    )
    assert v.kind == "safe-within-bound"
    assert any("unwinding assertion fails" in n for n in v.notes)
    # Distinct from a property failure: no counterexample attached.
    assert v.counterexample is None


def test_bounded_loop_proved_at_sufficient_k(tmp_path):
    v = verify_files(
        tmp_path,
        {"L.jimple": LOOP3_SAFE},
        strategy="bmc",
        unwind=5,
        unwinding_assertions=True,
    )
    assert v.kind == "successful"


def test_incremental_finds_bug_at_minimal_depth(tmp_path):
    v = verify_files(
        tmp_path, {"B4.jimple": BUG_AT_ITERATION_4}, strategy="incremental", unwind=10
    )
    assert v.kind == "failed"
    assert v.bound == 4  # not found before the fourth unwinding


def test_incremental_loop_free_bug_found_at_k1(tmp_path):
    v = verify_files(
        tmp_path,
        files=["tc/TC04_div_by_zero.jimple"],
        strategy="incremental",
        unwind=10,
    )
    assert v.kind == "failed"
    assert v.bound == 1


def test_incremental_completes_safe_loop(tmp_path):
    v = verify_files(
        tmp_path, {"L.jimple": LOOP3_SAFE}, strategy="incremental", unwind=10
    )
    assert v.kind == "successful"
    assert v.bound <= 4


def test_incremental_exhausts_to_safe_within_bound(tmp_path):
    """A nondet-bound loop never completes; incremental stops at k-max."""
    v = verify_files(
        tmp_path,
        files=["KInduction.jimple"],
        entry="loop",
        strategy="incremental",
        unwind=3,
    )
    assert v.kind == "safe-within-bound"
    assert v.bound == 3


def test_kinduction_proves_nondet_bound_loop(tmp_path):
    v = verify_files(
        tmp_path,
        files=["KInduction.jimple"],
        entry="loop",
        strategy="k-induction",
        unwind=10,
    )
    assert v.kind == "successful"
    assert any("inductive step holds" in n for n in v.notes)


def test_kinduction_base_case_finds_bugs_like_bmc(tmp_path):
    v = verify_files(
        tmp_path,
        files=["tc/TC10_assert_direct.jimple"],
        strategy="k-induction",
        unwind=5,
    )
    assert v.kind == "failed"


def test_kinduction_inconclusive_never_claims_failure(tmp_path):
    v = verify_files(
        tmp_path,
        {"NI.jimple": NON_INDUCTIVE_SAFE},
        strategy="k-induction",
        unwind=3,
    )
    assert v.kind == "unknown"
    assert "inconclusive" in v.reason


def test_kinduction_success_cross_checked_by_bmc(tmp_path):
    """Soundness: k-induction success implies BMC finds nothing at 1..2k."""
    v = verify_files(
        tmp_path,
        files=["KInduction.jimple"],
        entry="loop",
        strategy="k-induction",
        unwind=10,
    )
    assert v.kind == "successful"
    for k in range(1, 2 * v.bound + 1):
        b = verify_files(
            tmp_path,
            files=["KInduction.jimple"],
            entry="loop",
            strategy="bmc",
            unwind=k,
            unwinding_assertions=True,
        )
        assert b.kind in ("successful", "safe-within-bound")


def test_strategy_agreement_on_fixture_corpus(tmp_path):
    """No strategy may claim success where another has a confirmed bug."""
    for name, checks in [
        ("tc/TC00_overflow_add.jimple", Checks(overflow=True)),
        ("tc/TC06_bounds_read.jimple", Checks()),
        ("tc/TC17_safe_guarded_div.jimple", Checks()),
    ]:
        verdicts = {}
        for strategy in ("bmc", "incremental", "k-induction"):
            v = verify_files(
                tmp_path, files=[name], strategy=strategy, unwind=6, checks=checks
            )
            verdicts[strategy] = v.kind
        kinds = set(verdicts.values())
        if "failed" in kinds:
            assert "successful" not in kinds, (name, verdicts)


def test_every_failure_is_replay_confirmed(tmp_path):
    for name in (
        "tc/TC03_underflow_sub.jimple",
        "tc/TC08_bounds_nondet_length.jimple",
        "tc/TC15_assert_branch.jimple",
    ):
        v = verify_files(
            tmp_path,
            files=[name],
            strategy="bmc",
            unwind=8,
            checks=Checks(overflow=True),
        )
        assert v.kind == "failed"
        assert any("confirmed by concrete replay" in n for n in v.notes)


def test_violation_found_at_k_persists_at_larger_bounds(tmp_path):
    """Monotonicity: a bug found at bound k is found at every k' >= k."""
    for k in (4, 5, 7):
        v = verify_files(
            tmp_path, {"B4.jimple": BUG_AT_ITERATION_4}, strategy="bmc", unwind=k
        )
        assert v.kind == "failed", k


def test_unknown_call_downgrades_success_note(tmp_path):
    text = """
    public class U extends java.lang.Object {
        public static void main() {
            int x;
            x = staticinvoke <com.example.Mystery: int magic()>();
            return;
        }
    }
    """
    v = verify_files(tmp_path, {"U.jimple": text}, strategy="bmc", unwind=2)
    assert v.kind == "successful"
    assert any("safe modulo unknown calls" in n for n in v.notes)
    assert v.unknown_calls
