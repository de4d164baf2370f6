import io
import subprocess
import sys
from pathlib import Path

import pytest

from hybridkb.cli import Session, main, repl, run_batch
from hybridkb.kb import SessionConfig

ROOT = Path(__file__).resolve().parents[1]
DIALOGUE = ROOT / "demos" / "kb" / "mercedes.kb"
FAMILY = """\
(defconcept Father (:and Male (:at-least 1 Child)))
(defconcept Successful-Father (:and Father (:all Child College-Graduate)))
"""
EXPECTED = ["John is likely (0.8) to be rich.", "John is rich.", "John is likely (0.8) to be rich."]


def batch(files=(), evals=(), **cfg):
    out, err = io.StringIO(), io.StringIO()
    status = run_batch([str(f) for f in files], list(evals), SessionConfig(**cfg), out, err)
    return status, out.getvalue(), err.getvalue()


def test_dialogue_batch():
    status, out, err = batch([DIALOGUE])
    assert status == 0
    assert out.splitlines() == EXPECTED


def test_empty_file(tmp_path):
    empty = tmp_path / "empty.kb"
    empty.write_text("")
    assert batch([empty]) == (0, "", "")


def test_syntax_error_names_line(tmp_path):
    bad = tmp_path / "bad.kb"
    bad.write_text("(tell (A x))\n(ask (A x))\n(tell (A x)\n")
    status, out, err = batch([bad])
    assert status != 0
    assert f"{bad}:3" in err


def test_engine_error_position_and_strict_stop(tmp_path):
    f = tmp_path / "cyc.kb"
    f.write_text("(defrule ab :if (A ?x) :then (B ?x) :sufficiency 0.5)\n"
                 "(defrule ba :if (B ?x) :then (A ?x) :sufficiency 0.5)\n"
                 "(tell (A x))\n(ask (B x))\n")
    status, out, err = batch([f])
    assert status == 1 and f"{f}:2" in err and out == "x is likely (0.5) to be b.\n"
    status, out, err = batch([f], strict=True)
    assert status == 1 and out == ""


def test_missing_file():
    status, out, err = batch(["/nonexistent/kb.kb"])
    assert status == 1 and "nonexistent" in err


def test_trace_shows_downgrade_pair():
    status, out, err = batch(evals=["(tell (Rich-person John))", "(tell ((Rich-person John) 0.8))"], trace=True)
    lines = [l for l in err.splitlines() if l.startswith("effect:")]
    assert lines[-2:] == ["effect: forget (Rich-person John) -> deductive",
                          "effect: tell ((Rich-person John) 0.8) -> approximate"]
    assert "trace: (Rich-person John) old=[1,1] new=[0.8,0.8] via=input" in err


def run_repl(text, **cfg):
    out, err = io.StringIO(), io.StringIO()
    status = repl(SessionConfig(**cfg), io.StringIO(text), out, err)
    return status, out.getvalue(), err.getvalue()


def test_repl_taxonomy():
    _, out, _ = run_repl(FAMILY + ":taxonomy\n:quit\n")
    assert "    Father\n      Successful-Father" in out


def test_repl_set_changes_operator():
    text = ("(defconcept SF (:all Child CG))\n(tell ((Child John Philip) 0.9))\n(tell ((CG Philip) 0.7))\n"
            "(ask (SF John))\n:set implication lukasiewicz\n(ask (SF John))\n:quit\n")
    _, out, err = run_repl(text)
    assert out.splitlines() == ["John is likely (0.7) to be sf.", "John is likely (0.8) to be sf."]


def test_repl_multiline_statements_and_errors_survive():
    text = "(defrule m\n  :if (A ?x)\n  :then (B ?x)\n  :sufficiency 0.4)\n(tell (A x)\n)\n(bogus)\n:nope\n(ask (B x))\n"
    status, out, err = run_repl(text)
    assert status == 0
    assert out.splitlines() == ["x is likely (0.4) to be b."]
    assert "<stdin>:7" in err and ":nope" in err


def test_repl_facts_and_reset():
    text = "(tell ((A x) 0.5))\n:facts\n:facts y\n:reset\n:facts\n(ask (A x))\n:quit\n"
    _, out, _ = run_repl(text)
    assert out.splitlines() == ["(A x) 0.5 0.5 asserted", "unknown"]


def test_reset_matches_fresh_session():
    s = Session(SessionConfig(), io.StringIO(), io.StringIO())
    fresh = s.kb.snapshot()
    s.run_text(DIALOGUE.read_text())
    s.directive(":reset")
    assert s.kb.snapshot() == fresh and s.kb.log == []


def test_batch_and_repl_agree_in_machine_format():
    _, out_batch, _ = batch([DIALOGUE], format="machine")
    _, out_repl, _ = run_repl(DIALOGUE.read_text(), format="machine")
    assert out_batch == out_repl
    assert out_batch.splitlines() == ["(Rich John) 0.8 1 inferred", "(Rich John) 1 1 deduced",
                                      "(Rich John) 0.8 1 inferred"]


def test_bad_flag_value():
    with pytest.raises(SystemExit):
        main(["--tnorm", "drastic"])
    assert main(["--threshold", "1.5", "--eval", "(tell (A x))"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hybridkb", "--load", str(DIALOGUE)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == EXPECTED
