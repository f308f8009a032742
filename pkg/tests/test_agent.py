from __future__ import annotations

import json
from importlib import resources

import pytest

from logiplan.agent import (
    SECTIONS,
    Agent,
    GenerationParams,
    PlanBookProvider,
    Policy,
    PromptContext,
    RejectingProvider,
    ReplayProvider,
    ScriptedProvider,
    SessionHistory,
    build_prompt,
    format_relation,
    prompt_key,
)
from logiplan.agent.providers import HttpProvider
from logiplan.errors import ExecutionError, PlanRejected, ProviderError
from logiplan.tools.relation import Relation

from support import GOLDEN, golden_context


def sample(name: str) -> str:
    return resources.files("logiplan.samples").joinpath(*name.split("/")).read_text()


CLEAN = sample("plans/clean.json")
UNINST = sample("plans/uninstantiated.json")
SORTED = sample("plans/sort_on_relation.json")


@pytest.fixture
def agent(dataset, registry, tmp_path):
    return Agent(dataset, registry, out_dir=tmp_path / "out")


def brute_force_clean(dataset) -> int:
    return sum(1 for p in dataset.iter_payments() if p.issuing_country == "GB" and p.ip_country == "FR")


# -- prompt ------------------------------------------------------------------------------


def test_golden_prompt():
    assert build_prompt(golden_context()) == GOLDEN.read_text()


def test_sections_in_order():
    text = build_prompt(golden_context())
    positions = [text.index(f"<{tag}>") for tag in SECTIONS]
    assert positions == sorted(positions)
    assert all(text.count(f"</{tag}>") == 1 for tag in SECTIONS)


def test_prompt_depends_only_on_context():
    ctx = PromptContext(query="q")
    assert build_prompt(ctx) == build_prompt(PromptContext(query="q"))
    assert build_prompt(ctx) != build_prompt(PromptContext(query="r"))


def test_custom_template():
    tpl = "".join(f"<{t}>${v}</{t}>" for t, v in [("query", "query"), ("history", "history")])
    out = build_prompt(PromptContext(query="hello", history=[("a", "b")]), tpl)
    assert out == "<query>hello</query><history>User: a\nAnswer: b</history>"


# -- history -----------------------------------------------------------------------------


def test_history_keeps_last_ten():
    h = SessionHistory()
    for i in range(15):
        h.append(f"q{i}", str(i))
    assert len(h) == 10
    assert h.turns()[0] == ("q5", "5") and h.turns()[-1] == ("q14", "14")


def test_history_capacity_validated():
    with pytest.raises(ValueError):
        SessionHistory(0)


# -- providers ---------------------------------------------------------------------------


def test_prompt_key_is_sha256():
    assert len(prompt_key("x")) == 64 and prompt_key("x") != prompt_key("y")


def test_http_provider_needs_url(monkeypatch):
    monkeypatch.delenv("LOGIPLAN_LLM_URL", raising=False)
    with pytest.raises(ProviderError):
        HttpProvider()


def test_replay_records_then_replays(tmp_path):
    rec = ReplayProvider(tmp_path, record=ScriptedProvider(["first"]))
    assert rec.send("p", GenerationParams()) == "first"
    body = json.loads(rec.path_for("p").read_text())
    assert body == {"prompt": "p", "text": "first"}
    assert ReplayProvider(tmp_path).send("p", GenerationParams()) == "first"
    with pytest.raises(ProviderError):
        ReplayProvider(tmp_path).send("other", GenerationParams())


def test_plan_book_matches_query():
    book = PlanBookProvider({"How many?": "A", "How many payments?": "B"})
    prompt = build_prompt(PromptContext(query="how many  payments?"))
    assert book.send(prompt, GenerationParams()) == "B"
    with pytest.raises(ProviderError):
        book.send(build_prompt(PromptContext(query="nothing")), GenerationParams())


# -- runtime -----------------------------------------------------------------------------


def test_clean_plan_answer_matches_brute_force(agent, dataset):
    res = agent.run("How many GB cards paid from France?", ScriptedProvider([CLEAN]))
    assert res.answer == str(brute_force_clean(dataset))
    assert res.report.score == 1.0 and res.retries == 0
    assert agent.history.turns() == [("How many GB cards paid from France?", res.answer)]


def test_low_score_triggers_retry_with_feedback(agent):
    provider = ScriptedProvider([UNINST, CLEAN])
    res = agent.run("count", provider, Policy())
    assert res.retries == 1
    assert "UninstantiatedInput" in provider.prompts[1]
    assert [s["attempt"] for s in res.trace] == [0, 1]


def test_retry_bound(agent):
    provider = ScriptedProvider([SORTED] * 10)
    with pytest.raises(PlanRejected) as ei:
        agent.run("q", provider, Policy(max_retries=3))
    assert len(ei.value.trace) == 4 and len(provider.prompts) == 4
    assert len(agent.history) == 0


def test_unparseable_reply_is_retried(agent):
    res = agent.run("q", ScriptedProvider(["not json", CLEAN]))
    assert "error" in res.trace[0] and res.retries == 1


def test_threshold_zero_accepts_everything(agent):
    res = agent.run("q", ScriptedProvider([SORTED]), Policy(threshold=0.0))
    assert res.report.score == 0.6


def test_provider_failure_propagates(agent):
    with pytest.raises(ProviderError):
        agent.run("q", RejectingProvider())
    assert len(agent.history) == 0


def test_execution_failure_carries_trace(agent):
    plan = json.loads(CLEAN)
    plan["action"] = [":- query_data(payments, [], [], R), count(R, [[count], [-1]])."]
    with pytest.raises(ExecutionError) as ei:
        agent.run("q", ScriptedProvider([json.dumps(plan)]))
    assert ei.value.trace


def test_replay_run_is_deterministic(dataset, registry, tmp_path):
    first = Agent(dataset, registry, out_dir=tmp_path).run(
        "q", ReplayProvider(tmp_path / "replay", record=ScriptedProvider([CLEAN]))
    )
    again = Agent(dataset, registry, out_dir=tmp_path).run("q", ReplayProvider(tmp_path / "replay"))
    assert again.answer == first.answer
    assert again.trace[0]["prompt_sha256"] == first.trace[0]["prompt_sha256"]


def test_history_reaches_next_prompt(agent):
    provider = ScriptedProvider([CLEAN, CLEAN])
    agent.run("first question", provider)
    agent.run("second question", provider)
    assert "User: first question" in provider.prompts[1]


def test_plan_book_tasks_on_fixture(dataset, registry, tmp_path):
    book = PlanBookProvider.load(resources.files("logiplan.samples").joinpath("plan_book.json"))
    tasks = json.loads(sample("dabstep_tasks.json"))
    for task in tasks:
        res = Agent(dataset, registry, out_dir=tmp_path).run(task["question"], book)
        assert res.report.score == 1.0 and res.answer


@pytest.mark.parametrize("example", range(3))
def test_prompt_examples_are_clean(agent, example):
    from logiplan.agent.prompt import default_examples

    text = default_examples()[example]
    start = text.index("{")
    res = agent.run("example", ScriptedProvider([text[start:]]))
    assert res.report.score == 1.0


def test_format_relation():
    assert format_relation(Relation(["n"], [(3,)])) == "3"
    assert format_relation(Relation(["a", "bb"], [("x", 1.5), ("yyy", 2)])) == "a    bb\nx    1.5\nyyy  2"
