from __future__ import annotations

import json
import random
from importlib import resources

import pytest
from hypothesis import given
from hypothesis import strategies as st

from logiplan.agent import execute_plan
from logiplan.errors import InstantiationError, LogiplanError, PlanError
from logiplan.evaluator import (
    DEFAULT_RUBRIC,
    FIELDS,
    LLM_ASSERT,
    RELATION_MISUSE,
    UNINSTANTIATED,
    RubricConfig,
    Violation,
    analyze_program,
    evaluate_plan,
    parse_plan_envelope,
    plan_for,
    score,
)
from logiplan.logic.solver import SolveBudget

FIXTURE_SCORES = {"clean": 1.0, "uninstantiated": 0.0, "llm_assert": 0.8, "sort_on_relation": 0.6, "combined": 0.4}


def envelope(*action, result="R", evaluation=1.0, **extra) -> str:
    body = {"explanation": "", "gaps": [], "findings": [], "plan": [], "action": list(action), "result": result,
            "evaluation": evaluation}
    body.update(extra)
    return json.dumps(body)


def kinds(report):
    return [(v.kind, v.location) for v in report.violations]


# -- envelope --------------------------------------------------------------------------


def test_two_action_lines_give_two_units():
    env = parse_plan_envelope(envelope(":- query_data(payments, [], [], R).", ":- count(R, N)."))
    assert len(env.units) == 2
    assert list(env.to_json()) == list(FIELDS)


def test_fenced_envelope_is_accepted():
    text = "```json\n" + envelope(":- X = 1.", result="X") + "\n```"
    assert parse_plan_envelope(text).result == "X"


def test_missing_field_is_named():
    body = json.loads(envelope(":- true."))
    del body["gaps"]
    with pytest.raises(PlanError, match="gaps"):
        parse_plan_envelope(json.dumps(body))


def test_parse_error_has_position():
    with pytest.raises(PlanError, match="line 1"):
        parse_plan_envelope(envelope("foo("))


def test_invalid_json():
    with pytest.raises(PlanError):
        parse_plan_envelope("{not json")


# -- analysis --------------------------------------------------------------------------


def test_unbound_filter_is_uninstantiated(registry):
    r = evaluate_plan(envelope(":- query_data(payments, F, [], R)."), registry)
    [(kind, where)] = kinds(r)
    assert kind == UNINSTANTIATED and where.startswith("goal 1:") and r.score == 0.0


def test_helper_assert_costs_point_two(registry):
    r = evaluate_plan(envelope("helper(T, R) :- query_data(T, [], [], R).", ":- helper(payments, R)."), registry)
    assert kinds(r) == [(LLM_ASSERT, "helper/2")] and r.score == 0.8


def test_sort_on_relation(registry):
    r = evaluate_plan(envelope(":- query_data(payments, [], [], R), sort(R, S)."), registry)
    assert [k for k, _ in kinds(r)] == [RELATION_MISUSE] and r.score == 0.6


@pytest.mark.parametrize("native", ["findall(X, member(X, R), L)", "aggregate_all(count, member(_, R), L)", "msort(R, L)"])
def test_other_natives_on_relation(registry, native):
    r = evaluate_plan(envelope(f":- query_data(payments, [], [], R), {native}."), registry)
    assert RELATION_MISUSE in [k for k, _ in kinds(r)]


def test_binding_before_use_is_clean(registry):
    r = evaluate_plan(envelope(":- F = [card_scheme, 'NexPay'], query_data(payments, F, [], R), count(R, N).", result="N"), registry)
    assert r.violations == [] and r.score == 1.0


def test_disjunction_branch_counts(registry):
    r = evaluate_plan(envelope(":- ( F = [] ; true ), query_data(payments, F, [], R)."), registry)
    assert r.score == 0.0


def test_negation_binds_nothing(registry):
    r = evaluate_plan(envelope(":- \\+ F = [], query_data(payments, F, [], R)."), registry)
    assert r.score == 0.0


def test_runtime_assert_counts_once_per_predicate(registry):
    r = evaluate_plan(envelope(":- assertz(seen(a)), assertz(seen(b)), findall(X, seen(X), R)."), registry)
    assert kinds(r) == [(LLM_ASSERT, "seen/1")]


def test_unknown_predicate_rejects_plan(registry):
    with pytest.raises(PlanError, match="unknown predicate"):
        evaluate_plan(envelope(":- no_such_thing(R)."), registry)


def test_claimed_score_is_reported_not_trusted(registry):
    r = evaluate_plan(envelope(":- query_data(payments, F, [], R).", evaluation=1.0), registry)
    assert r.claimed == 1.0 and r.score == 0.0
    assert json.loads(r.dumps())["claimed"] == 1.0


@pytest.mark.parametrize("name, expected", sorted(FIXTURE_SCORES.items()))
def test_fixture_scores(registry, name, expected):
    text = resources.files("logiplan.samples").joinpath("plans", f"{name}.json").read_text()
    assert evaluate_plan(text, registry).score == expected


# -- score ---------------------------------------------------------------------------------


def v(kind):
    return Violation(kind, "goal 1", DEFAULT_RUBRIC.penalties[kind])


def test_score_examples():
    assert score([]) == 1.0
    assert score([v(LLM_ASSERT)]) == 0.8
    assert score([v(LLM_ASSERT), v(RELATION_MISUSE)]) == 0.4
    assert score([v(RELATION_MISUSE)] * 3) == 0.0


violation_lists = st.lists(st.sampled_from([UNINSTANTIATED, LLM_ASSERT, RELATION_MISUSE]).map(v), max_size=8)


@given(violation_lists, st.sampled_from([UNINSTANTIATED, LLM_ASSERT, RELATION_MISUSE]))
def test_score_bounds_and_monotonicity(vs, extra):
    s = score(vs)
    assert 0.0 <= s <= 1.0
    assert (s == 1.0) == (not vs)
    assert score(vs + [v(extra)]) <= s


def test_custom_rubric():
    cfg = RubricConfig(penalties={UNINSTANTIATED: 1.0, LLM_ASSERT: 0.1, RELATION_MISUSE: 0.5}, fatal={UNINSTANTIATED})
    vs = [Violation(LLM_ASSERT, "x", 0.1)]
    assert score(vs, cfg) == 0.9


def test_determinism(registry):
    text = resources.files("logiplan.samples").joinpath("plans", "combined.json").read_text()
    assert evaluate_plan(text, registry).to_json() == evaluate_plan(text, registry).to_json()


# -- soundness corpus ---------------------------------------------------------------------

FILTERS = ["[]", "[card_scheme, 'NexPay']", "[gt, eur_amount, 50]", "[and, [aci, 'D'], [is_credit, true]]"]
PROJECTIONS = ["[]", "[merchant, eur_amount]", "[card_scheme, eur_amount, aci]"]


def random_plan(rng: random.Random) -> str:
    """A pipeline over a small variable pool; some inputs are left unbound on purpose."""
    rels = ["R0"]
    goals = [f"query_data(payments, {rng.choice(FILTERS)}, {rng.choice(PROJECTIONS)}, R0)"]
    helper = rng.random() < 0.2
    for i in range(1, rng.randint(2, 6)):
        src = rng.choice(rels) if rng.random() < 0.85 else f"U{i}"
        out = f"R{i}"
        kind = rng.random()
        if kind < 0.2:
            if rng.random() < 0.5:
                goals.append(f"F{i} = {rng.choice(FILTERS)}")
                goals.append(f"filter({src}, F{i}, {out})")
            else:
                goals.append(f"filter({src}, F{i + 1}, {out})")
        elif kind < 0.35:
            goals.append(f"aggregate({src}, [], [count, eur_amount], {out})")
        elif kind < 0.5:
            goals.append(f"sort_rel({src}, eur_amount, desc, {rng.choice(['all', '3', 'K'])}, {out})")
        elif kind < 0.6:
            goals.append(f"( G{i} = [] ; true ), filter({src}, G{i}, {out})")
        elif kind < 0.7:
            goals.append(f"( {src} = [] -> {out} = {src} ; filter({src}, [], {out}) )")
        elif kind < 0.8:
            goals.append(f"\\+ X{i} = [], filter({src}, [], {out})")
        elif kind < 0.9 and helper:
            goals.append(f"step({src}, {out})")
        else:
            goals.append(f"count({src}, {out})")
        rels.append(out)
    action = []
    if helper:
        action.append(f"step(A, B) :- {rng.choice(['filter(A, [], B)', 'filter(A, Z, B)', 'count(A, B)'])}.")
    action.append(":- " + ", ".join(goals) + ".")
    return envelope(*action, result=rels[-1])


def test_soundness_corpus(registry, bound_kb):
    rng = random.Random(2024)
    passed = 0
    for _ in range(200):
        text = random_plan(rng)
        env = parse_plan_envelope(text)
        plan = plan_for(env, registry, bound_kb)
        findings = analyze_program(plan, registry, bound_kb)
        if any(f.kind == UNINSTANTIATED for f in findings):
            continue
        passed += 1
        try:
            execute_plan(plan, bound_kb, SolveBudget(max_steps=200_000))
        except InstantiationError as e:  # pragma: no cover - the property under test
            pytest.fail(f"analyzer passed a plan that raised {e}:\n{text}")
        except LogiplanError:
            pass
    assert passed >= 50
