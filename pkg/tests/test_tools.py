from __future__ import annotations

import json

import pytest

from logiplan.errors import InstantiationError, PermissionError_, ToolError
from logiplan.logic import KnowledgeBase, format_term, solve
from logiplan.tools import ToolEnv, ToolRegistry
from logiplan.tools.relation import relation_from_term


def first(kb, goal):
    for s in solve(kb, goal):
        return s
    return None


def test_manifest_shape(registry):
    assert len(registry) == 37
    for spec in registry:
        assert all(m in "+-" for m in spec.modes)
        assert spec.doc
    assert ("query_data", 4) in registry
    q = registry.get(("query_data", 4))
    assert q.inputs == [0, 1, 2] and q.outputs == [3]


def test_listing_has_one_line_per_tool(registry):
    lines = registry.listing().splitlines()
    assert len(lines) == len(registry)
    assert lines[0].startswith("query_data(-TableName, -Filter, -Projection, +")


def test_query_data_matches_python_filter(bound_kb, dataset):
    s = first(bound_kb, "query_data(payments, [and, [card_scheme, 'SwiftCharge'], [gt, eur_amount, 100]], [psp_reference], R)")
    got = [r[0] for r in relation_from_term(s["R"]).rows]
    h = dataset.payments.header
    cs, amt, ref = h.index("card_scheme"), h.index("eur_amount"), h.index("psp_reference")
    want = [r[ref] for r in dataset.payments.rows if r[cs] == "SwiftCharge" and r[amt] > 100]
    assert got == want and want


def test_count_returns_relation(bound_kb):
    s = first(bound_kb, "query_data(merchant_data, [], [merchant], R), count(R, N)")
    assert format_term(s["N"]) == "[[count], [5]]"


def test_pipeline_aggregate_sort(bound_kb, dataset):
    s = first(
        bound_kb,
        "query_data(payments, [], [merchant, eur_amount], R), aggregate(R, [merchant], [sum, eur_amount], A),"
        " sort_rel(A, sum_eur_amount, desc, 1, Top)",
    )
    top = relation_from_term(s["Top"])
    totals: dict[str, float] = {}
    for p in dataset.iter_payments():
        totals[p.merchant] = totals.get(p.merchant, 0.0) + p.eur_amount
    best = max(totals, key=totals.get)
    assert top.rows[0][0] == best
    assert top.rows[0][1] == pytest.approx(totals[best], abs=1e-6)


@pytest.mark.parametrize(
    "goal",
    ["query_data(T, [], [], R)", "filter(X, [], Y)", "filter_transactions_complex(X, [], Y)", "benchmark_merchant_performance(P, R)"],
)
def test_unbound_input_is_instantiation_error(bound_kb, goal):
    with pytest.raises(InstantiationError):
        list(solve(bound_kb, goal))


def test_unknown_table_is_tool_error(bound_kb):
    with pytest.raises(ToolError):
        list(solve(bound_kb, "query_data(nope, [], [], R)"))


def test_composed_tool_runs(bound_kb):
    s = first(bound_kb, "get_merchant_config(M), categorize_transactions(M, account_type, C)")
    rel = relation_from_term(s["C"])
    assert rel.header == ("account_type", "count_account_type")
    assert sum(r[1] for r in rel.rows) == 5


def test_view_stub_writes_json(dataset, registry, tmp_path):
    kb = KnowledgeBase()
    registry.bind(kb, ToolEnv.for_dataset(dataset, tmp_path))
    assert first(kb, "query_data(merchant_data, [], [merchant], R), display_merchant_summary_table(R)") is not None
    [path] = list(tmp_path.glob("display_merchant_summary_table-*.json"))
    body = json.loads(path.read_text())
    assert body["header"] == ["merchant"] and len(body["rows"]) == 5


def test_tools_cannot_be_redefined(bound_kb):
    with pytest.raises(PermissionError_):
        bound_kb.consult("query_data(a, b, c, d).")


def test_tool_without_dataset_reports_error(registry, tmp_path):
    kb = KnowledgeBase()
    registry.bind(kb, ToolEnv(out_dir=tmp_path))
    with pytest.raises(ToolError):
        list(solve(kb, "query_data(payments, [], [], R)"))


def test_fee_tool_adds_columns(bound_kb):
    s = first(bound_kb, "query_data(payments, [merchant, 'Rafa_AI'], [], P), calculate_transaction_fee(P, F)")
    rel = relation_from_term(s["F"])
    assert rel.header[-2:] == ("fee_rule_id", "fee")
    assert all(r[-1] >= 0 for r in rel.rows)


def test_load_registry_from_path(tmp_path):
    from importlib import resources

    src = resources.files("logiplan.assets").joinpath("manifest.json").read_text()
    p = tmp_path / "m.json"
    p.write_text(src)
    assert len(ToolRegistry.load(p)) == 37
