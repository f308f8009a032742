from __future__ import annotations

import io
import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

from logiplan.cli import main, normalize_answer
from logiplan.logic import read_terms, variant

ACQUIRERS = str(resources.files("logiplan.samples").joinpath("acquirers.pl"))
PLANS = resources.files("logiplan.samples").joinpath("plans")


def run(*argv, stdin: str | None = None, monkeypatch=None):
    out = io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(list(argv), out)
    return code, out.getvalue()


def test_query_prints_transcript():
    code, text = run("query", "-c", ACQUIRERS, "-g", "not_in_same_country(lehman_brothers, Y)")
    lines = text.splitlines()
    assert code == 0 and len(lines) == 5
    assert lines[0] == "Y = gringotts ;" and lines[-1] == "Y = tellsons_bank."


def test_query_false_and_true():
    assert run("query", "-c", ACQUIRERS, "-g", "acquirer(nobody)")[1] == "false.\n"
    assert run("query", "-c", ACQUIRERS, "-g", "acquirer(medici)")[1].startswith("true")


def test_query_json():
    code, text = run("query", "--json", "-c", ACQUIRERS, "-g", "acquirer_country(medici, C)")
    assert json.loads(text)["solutions"] == [{"C": "it"}]


def test_consult_listing_round_trips():
    code, text = run("consult", "--listing", ACQUIRERS)
    assert code == 0
    listed = [t.term for t in read_terms(text)]
    original = [t.term for t in read_terms(Path(ACQUIRERS).read_text())]
    assert len(listed) == len(original)
    assert all(variant(a, b) for a, b in zip(listed, original))


def test_gen_fixture_then_ingest(tmp_path):
    d = tmp_path / "d"
    assert run("gen-fixture", "--seed", "7", "--out", str(d))[0] == 0
    code, text = run("ingest", "--data", str(d))
    assert code == 0 and "payments: 1000" in text.splitlines()


def test_ingest_uses_env_var(tmp_path, monkeypatch):
    run("gen-fixture", "--seed", "1", "--out", str(tmp_path), "--payments", "50")
    monkeypatch.setenv("LOGIPLAN_DATA_DIR", str(tmp_path))
    code, text = run("ingest", "--json")
    assert code == 0 and json.loads(text)["tables"]["payments"] == 50


def test_eval_plan_clean():
    code, text = run("eval-plan", str(PLANS.joinpath("clean.json")))
    assert code == 0 and "score: 1.0" in text


def test_eval_plan_json():
    code, text = run("eval-plan", "--json", str(PLANS.joinpath("combined.json")))
    body = json.loads(text)
    assert body["score"] == 0.4 and {v["kind"] for v in body["violations"]} == {"LlmAssert", "RelationMisuse"}


def test_run_task_with_plan_book(fixture_dir, tmp_path):
    book = tmp_path / "book.json"
    book.write_text(json.dumps([{"question": "How many?", "plan": json.loads(PLANS.joinpath("clean.json").read_text())}]))
    code, text = run("run-task", "--data", str(fixture_dir), "--plans", str(book), "-q", "How many?", "--out", str(tmp_path))
    assert code == 0 and text.strip()


def test_run_task_without_provider_is_user_error(fixture_dir, monkeypatch):
    monkeypatch.delenv("LOGIPLAN_LLM_URL", raising=False)
    assert run("run-task", "--data", str(fixture_dir), "-q", "x")[0] == 1


def test_bench_reports_accuracy(fixture_dir, tmp_path):
    tasks = tmp_path / "tasks.json"
    tasks.write_text(json.dumps([{"question": "How many?", "guidance": "", "answer": "nope"}]))
    book = tmp_path / "book.json"
    book.write_text(json.dumps([{"question": "How many?", "plan": json.loads(PLANS.joinpath("clean.json").read_text())}]))
    code, text = run("bench", "--data", str(fixture_dir), "--plans", str(book), "--tasks", str(tasks), "--out", str(tmp_path))
    assert code == 0 and "accuracy" in text


def test_repl_non_interactive(monkeypatch):
    code, text = run("repl", "-c", ACQUIRERS, stdin="acquirer_country(X, nl).\n", monkeypatch=monkeypatch)
    assert code == 0
    assert text.splitlines() == ["X = dagoberts_vault ;", "X = dagoberts_geldpakhuis."]


@pytest.mark.parametrize(
    "argv",
    [["query"], ["nonsense"], ["query", "-g", "x", "--bogus"], ["eval-plan", "/no/such/file.json"], ["ingest"]],
)
def test_user_errors_exit_one(argv, monkeypatch):
    monkeypatch.delenv("LOGIPLAN_DATA_DIR", raising=False)
    assert run(*argv)[0] == 1


def test_normalize_answer():
    assert normalize_answer("  Swift  Charge ") == normalize_answer("swift charge")


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "logiplan.cli", "query", "-g", "X = 1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "X = 1.\n"
