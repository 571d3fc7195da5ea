"""Command-line surface: exit codes, output contracts, flags."""

from __future__ import annotations

import io

from axiotome.cli import main
from axiotome.syntax import parse_program

from conftest import BOOL_FNS, CORE, corpus_path, corpus_text

CORE_PATHS = [str(corpus_path(n)) for n in CORE]
BOOL_PATHS = [str(corpus_path(n)) for n in BOOL_FNS]


def run(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


# -------------------------------------------------------------------- check

def test_check_core_module_is_clean():
    code, out, _ = run("check", *CORE_PATHS)
    assert code == 0
    assert "¶notNotFalse: accepted" in out
    assert "¶and°LeftFalse: accepted" in out


def test_check_original_de_morgan_exits_one_with_four_findings():
    code, out, _ = run("check", *BOOL_PATHS, str(corpus_path("de_morgan_original.axm")), "--machine")
    assert code == 1
    lines = [l for l in out.splitlines() if l]
    assert len(lines) == 4
    assert all(l.startswith("E-UNJUSTIFIED-STEP\terror\t") for l in lines)


def test_check_faulty_fixture_exits_one_with_one_finding():
    code, out, _ = run("check", *BOOL_PATHS, str(corpus_path("not_not_false_faulty.axm")), "--machine")
    assert code == 1
    lines = [l for l in out.splitlines() if l]
    assert len(lines) == 1
    assert "E-UNJUSTIFIED-STEP" in lines[0] and "$not°T" in lines[0]


def test_check_strict_escalates_inferred_vias():
    relaxed, _, _ = run("check", *CORE_PATHS)
    strict, out, _ = run("check", *CORE_PATHS, "--strict")
    assert relaxed == 0 and strict == 1
    assert "¶notNotFalse: rejected" in out


def test_check_unreadable_file_exits_two():
    code, _, err = run("check", "no-such-file.axm")
    assert code == 2
    assert "cannot read" in err


def test_joint_checking_equals_concatenation(tmp_path):
    merged = tmp_path / "merged.axm"
    merged.write_text("".join(corpus_text(n) + "\n" for n in CORE), encoding="utf-8")
    separate = run("check", *CORE_PATHS, "--machine")
    joint = run("check", str(merged), "--machine")
    strip = lambda text: [l.split("\t")[0] + "|" + l.split("\t")[5] for l in text.splitlines() if l]
    assert separate[0] == joint[0]
    assert strip(separate[1]) == strip(joint[1])


def test_operator_injection_flag(tmp_path):
    source = tmp_path / "infix.axm"
    source.write_text(
        "theorem ¶t: ∀a ∈ Boolean: a ∨ a ↔ a\n"
        "proof by cases of a using Boolean = False U True\n"
        "case ∀a ∈ False:\n  0. a ∨ a\n  1. False ∨ False via ∀a ∈ False\n"
        "  2. False via $or°FF\n  3. a via ∀a ∈ False\n"
        "case ∀a ∈ True:\n  0. a ∨ a\n  1. True ∨ True via ∀a ∈ True\n"
        "  2. True via $or°TT\n  3. a via ∀a ∈ True\n",
        encoding="utf-8",
    )
    failing = run("check", *BOOL_PATHS, str(source))
    assert failing[0] == 1  # the glyph is undeclared without the flag
    code, out, _ = run("check", *BOOL_PATHS, str(source), "--operator", "∨=or")
    assert code == 0
    ascii_alias = run("check", *BOOL_PATHS, str(source), "--operator", "\\/=or")
    assert ascii_alias[0] == 0


# ----------------------------------------------------------------- validate

def test_validate_reports_statement_truth():
    code, out, _ = run("validate", *BOOL_PATHS, str(corpus_path("de_morgan_original.axm")))
    assert code == 0
    assert "¶deMorgan1: valid" in out


def test_validate_counterexample_exits_one(tmp_path):
    source = tmp_path / "wrong.axm"
    source.write_text("theorem ¶notIsId: ∀a ∈ Boolean: not(a) ↔ a\nproof\n  0. not(a)\n",
                      encoding="utf-8")
    code, out, _ = run("validate", *BOOL_PATHS, str(source))
    assert code == 1
    assert "¶notIsId: invalid counterexample a = False" in out


def test_validate_infinite_domain_is_inconclusive(tmp_path):
    source = tmp_path / "nats.axm"
    source.write_text(
        corpus_text("natural_numbers.axm")
        + "theorem ¶idNat: ∀n ∈ NaturalNumber: n ↔ n\nproof\n  0. n\n",
        encoding="utf-8",
    )
    code, out, _ = run("validate", str(source))
    assert code == 0
    assert "¶idNat: inconclusive" in out


# --------------------------------------------------------------------- eval

def test_eval_examples():
    assert run("eval", "not(not(False))", *BOOL_PATHS) == (0, "False\n", "")
    assert run("eval", "or(False, True)", *BOOL_PATHS)[1] == "True\n"
    code, out, _ = run("eval", "if(True, False, True)", *BOOL_PATHS,
                       str(corpus_path("if_function.axm")))
    assert (code, out) == (0, "False\n")


def test_eval_rejects_unknown_names():
    code, out, _ = run("eval", "mystery(False)", *BOOL_PATHS)
    assert code == 1
    assert "E-UNRESOLVED" in out


# --------------------------------------------------------------------- fill

def test_fill_repairs_de_morgan(tmp_path):
    target = tmp_path / "repaired.axm"
    code, out, _ = run("fill", str(corpus_path("de_morgan_original.axm")), *BOOL_PATHS,
                       "-o", str(target))
    assert code == 0
    assert "¶deMorgan1: repaired" in out
    check = run("check", *BOOL_PATHS, str(target))
    assert check[0] == 0
    repaired = parse_program(target.read_text(encoding="utf-8"))
    corrected = parse_program(corpus_text("de_morgan_corrected.axm"))
    assert repaired.statements == corrected.statements


def test_fill_clean_file_is_a_formatting_noop(tmp_path):
    target = tmp_path / "out.axm"
    code, out, _ = run("fill", str(corpus_path("de_morgan_corrected.axm")), *BOOL_PATHS,
                       "-o", str(target))
    assert code == 0
    assert "no repairs needed" in out
    fmt_once = target.read_text(encoding="utf-8")
    run("fmt", str(target))
    assert target.read_text(encoding="utf-8") == fmt_once


def test_fill_reports_irreparable_with_suggestion(tmp_path):
    target = tmp_path / "out.axm"
    code, out, _ = run("fill", str(corpus_path("not_not_false_faulty.axm")), *BOOL_PATHS,
                       "-o", str(target))
    assert code == 1
    assert "not repairable by insertion" in out
    assert "suggest via $not°F" in out


# ---------------------------------------------------------------------- fmt

def test_fmt_is_idempotent(tmp_path):
    source = tmp_path / "file.axm"
    source.write_text(corpus_text("and_left_false_theorem.axm"), encoding="utf-8")
    run("fmt", str(source))
    once = source.read_bytes()
    run("fmt", str(source))
    assert source.read_bytes() == once


def test_fmt_normalizes_name_separators(tmp_path):
    source = tmp_path / "file.axm"
    source.write_text(corpus_text("and_left_false_theorem.axm"), encoding="utf-8")
    run("fmt", str(source))
    text = source.read_text(encoding="utf-8")
    assert "$and°FF" in text and "$and.FF" not in text


def test_fmt_check_flags_unformatted_files(tmp_path):
    source = tmp_path / "file.axm"
    source.write_text("type   False ≡ Product[]", encoding="utf-8")
    code, out, _ = run("fmt", "--check", str(source))
    assert code == 1
    assert "needs formatting" in out
    assert source.read_text(encoding="utf-8").startswith("type   False")  # untouched


def test_fmt_unparsable_file_exits_one(tmp_path):
    source = tmp_path / "bad.axm"
    source.write_text("type ≡ Product[", encoding="utf-8")
    code, out, _ = run("fmt", str(source))
    assert code == 1
    assert "E-SYNTAX" in out


# ------------------------------------------------------------------ general

def test_usage_error_exits_two():
    assert run("frobnicate", "x.axm")[0] == 2
    assert run("check")[0] == 2


def test_machine_output_is_byte_stable_across_runs():
    args = ("check", *BOOL_PATHS, str(corpus_path("de_morgan_original.axm")), "--machine")
    assert run(*args) == run(*args)
