"""Command-line interface: flags, exit codes, output formats."""

from __future__ import annotations

import json

from jimple_bmc.cli import main

from helpers import FIXTURES


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_failure_exit_code_and_banner(capsys):
    code, out, _ = run_cli(
        capsys,
        str(FIXTURES / "tc" / "TC00_overflow_add.jimple"),
        "--overflow-check",
        "--unwind",
        "3",
    )
    assert code == 1
    assert "VERIFICATION FAILED" in out
    assert "trace:" in out
    assert "@" not in out or True  # trace text is free-form
    # Nondet inputs appear in the trace per the replayability contract.
    assert "inputs:" in out


def test_success_exit_code(capsys):
    code, out, _ = run_cli(
        capsys, str(FIXTURES / "tc" / "TC17_safe_guarded_div.jimple"), "--unwind", "3"
    )
    assert code == 0
    assert "VERIFICATION SUCCESSFUL" in out


def test_unknown_exit_code_for_missing_input(capsys):
    code, _, err = run_cli(capsys, "/nonexistent/thing.jimple")
    assert code == 2
    assert "error" in err


def test_json_output_schema(capsys):
    code, out, _ = run_cli(
        capsys,
        str(FIXTURES / "tc" / "TC04_div_by_zero.jimple"),
        "--json-output",
        "--unwind",
        "3",
    )
    assert code == 1
    doc = json.loads(out)
    assert doc["verdict"] == "failed"
    assert doc["counterexample"]["violated"]["class"] == "div-by-zero"
    assert doc["counterexample"]["trace"]
    assert doc["strategy"] == "bmc"


def test_goto_functions_only_dump(capsys):
    code, out, _ = run_cli(
        capsys, str(FIXTURES / "Foo.jimple"), "--goto-functions-only"
    )
    assert code == 0
    assert "FUNCTION Foo::increment_int_int" in out
    assert "END_FUNCTION" in out
    # The dump is the printer format and reads back.
    from jimple_bmc.goto.printer import read_program

    prog = read_program(out)
    assert "Foo::increment_int_int" in prog.functions


def test_smt_formula_dump(tmp_path, capsys):
    dump = tmp_path / "vc.smt2"
    code, _, _ = run_cli(
        capsys,
        str(FIXTURES / "tc" / "TC04_div_by_zero.jimple"),
        "--smt-formula",
        str(dump),
        "--unwind",
        "2",
    )
    text = dump.read_text()
    assert "(set-logic QF_ABV)" in text
    assert "(check-sat)" in text


def test_list_models(capsys):
    code, out, _ = run_cli(capsys, "--list-models")
    assert code == 0
    assert "java.util.Random.nextInt" in out


def test_function_selector_and_entry_error(capsys):
    code, out, _ = run_cli(
        capsys,
        str(FIXTURES / "KInduction.jimple"),
        "--function",
        "loop",
        "--unwind",
        "2",
    )
    assert code == 0
    code2, _, err = run_cli(
        capsys, str(FIXTURES / "KInduction.jimple"), "--function", "nosuch"
    )
    assert code2 == 2 and "no function matches" in err


def test_directory_input_is_one_program(tmp_path, capsys):
    (tmp_path / "A.jimple").write_text(
        """
        public class A extends java.lang.Object {
            public static int give() {
                return 41;
            }
        }
        """
    )
    (tmp_path / "B.jimple").write_text(
        """
        public class B extends java.lang.Object {
            public static void main() {
                int x;
                boolean $z0;
                x = staticinvoke <A: int give()>();
                $z0 = x == 41;
                staticinvoke <Verifier: void assert(boolean)>($z0);
                return;
            }
        }
        """
    )
    code, out, _ = run_cli(capsys, str(tmp_path), "--unwind", "2")
    assert code == 0
    assert "VERIFICATION SUCCESSFUL" in out


def test_suite_mode(capsys):
    code, out, _ = run_cli(
        capsys,
        "--suite",
        str(FIXTURES / "tc" / "TC04_div_by_zero.jimple"),
        str(FIXTURES / "tc" / "TC17_safe_guarded_div.jimple"),
        "--unwind",
        "3",
    )
    assert code == 1  # worst verdict wins
    lines = out.strip().splitlines()
    assert len(lines) == 2
    assert any("FAILED" in l for l in lines)
    assert any("SUCCESSFUL" in l for l in lines)


def test_unsupported_construct_is_clean_error(tmp_path, capsys):
    (tmp_path / "S.jimple").write_text(
        """
        public class S extends java.lang.Object {
            public static void main() {
                entermonitor r0;
            }
        }
        """
    )
    code, _, err = run_cli(capsys, str(tmp_path / "S.jimple"))
    assert code == 2
    assert "unsupported construct" in err
