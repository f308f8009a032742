"""Python implementations behind the registry's ``core`` and ``view-stub`` tools.

Each implementation takes a :class:`ToolEnv` followed by the tool's input
arguments as Python values (relations as :class:`Relation`) and returns a tuple
with one value per output argument.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from ..errors import ToolError
from . import relation as ra
from .relation import Relation, RelationError


@dataclass
class ToolEnv:
    """What the tools can reach: a table source, optionally a full Dataset, and a directory for views."""

    tables: Callable[[str], Relation] | None = None
    dataset: Any = None
    out_dir: Path = field(default_factory=lambda: Path("out"))

    @classmethod
    def for_dataset(cls, dataset, out_dir: str | Path = "out") -> "ToolEnv":
        return cls(tables=dataset.table, dataset=dataset, out_dir=Path(out_dir))

    @classmethod
    def for_tables(cls, tables: dict[str, Relation], out_dir: str | Path = "out") -> "ToolEnv":
        def lookup(name: str) -> Relation:
            try:
                return tables[name]
            except KeyError:
                raise RelationError("unknown_table", f"unknown table '{name}' (tables: {', '.join(tables)})") from None

        return cls(tables=lookup, out_dir=Path(out_dir))

    def table(self, name: str) -> Relation:
        if self.tables is None:
            raise ToolError("no dataset is loaded")
        return self.tables(name)

    def need_dataset(self, tool: str):
        if self.dataset is None:
            raise ToolError(f"{tool} needs a loaded dataset")
        return self.dataset


# -- Table 1 and relation algebra -----------------------------------------------------------


def query_data(env: ToolEnv, table, filt, projection):
    if not isinstance(table, str):
        raise RelationError("malformed", f"table name must be an atom, got {table!r}")
    rel = env.table(table)
    pred = ra.compile_filter(filt, rel.header)
    if not isinstance(projection, list):
        raise RelationError("malformed", "projection must be a list of field names")
    idx = [rel.index(f) for f in projection] if projection else None
    if idx is None:
        rows = [r for r in rel.rows if pred(r)]
        return (Relation(rel.header, rows),)
    rows = [tuple(r[i] for i in idx) for r in rel.rows if pred(r)]
    return (Relation(projection, rows),)


def filter_(env, rel, expr):
    return (ra.filter_rel(rel, expr),)


def project(env, rel, fields):
    if not isinstance(fields, list):
        raise RelationError("malformed", "projection must be a list of field names")
    return (ra.project(rel, fields),)


def count(env, rel):
    return (ra.count(rel),)


def aggregate(env, rel, group_by, spec):
    if not isinstance(group_by, list) or not isinstance(spec, list):
        raise RelationError("malformed", "aggregate expects a group-by list and an [op, field] spec")
    return (ra.aggregate(rel, group_by, spec),)


def sort_rel(env, rel, fld, order, k):
    return (ra.sort_rel(rel, fld, order, k),)


def anomaly(env, rel):
    return (ra.anomaly(rel),)


# -- dataset tools ----------------------------------------------------------------------------


def _payments(rel: Relation, tool: str):
    from ..dabstep.model import PAYMENT_COLUMNS, Payment

    needed = ("merchant", "card_scheme", "year", "day_of_year", "is_credit", "eur_amount",
              "issuing_country", "acquirer_country", "aci")
    missing = [c for c in needed if c not in rel.header]
    if missing:
        raise RelationError("unknown_field", f"{tool} needs the field(s) {', '.join(missing)}")
    pos = {c: rel.header.index(c) for c in PAYMENT_COLUMNS if c in rel.header}
    for r in rel.rows:
        yield Payment(**{c: (r[pos[c]] if c in pos else None) for c in PAYMENT_COLUMNS})


def calculate_transaction_fee(env, rel):
    from ..dabstep.fees import applicable_fee

    ds = env.need_dataset("calculate_transaction_fee")
    for extra in ("fee_rule_id", "fee"):
        if extra in rel.header:
            raise RelationError("domain", f"relation already has a '{extra}' field")
    rows = []
    for r, p in zip(rel.rows, _payments(rel, "calculate_transaction_fee")):
        rid, fee = applicable_fee(ds, p)
        rows.append(r + (rid, fee))
    return (Relation(rel.header + ("fee_rule_id", "fee"), rows),)


def calculate_merchant_fraud_rate(env, merchant, year):
    from ..dabstep.fees import merchant_monthly_stats

    ds = env.need_dataset("calculate_merchant_fraud_rate")
    stats = merchant_monthly_stats(ds, str(merchant), int(year))
    return (Relation(
        ["merchant", "year", "month", "total_volume", "fraud_volume", "fraud_level"],
        [(s.merchant, s.year, s.month, float(s.total_volume), float(s.fraud_volume), s.fraud_level) for s in stats],
    ),)


def _rate_by_group(rel: Relation, group_by, flag_field: str, out_name: str, invert: bool):
    if not isinstance(group_by, list):
        raise RelationError("malformed", "group-by must be a list of field names")
    gi = [rel.index(g) for g in group_by]
    fi = rel.index(flag_field)
    groups: dict[tuple, list[int]] = {}
    for r in rel.rows:
        hit = bool(r[fi]) != invert
        c = groups.setdefault(tuple(r[i] for i in gi), [0, 0])
        c[0] += hit
        c[1] += 1
    return Relation(list(group_by) + [out_name], [k + (100.0 * h / n,) for k, (h, n) in groups.items()])


def calculate_authorization_rate(env, rel, group_by):
    return (_rate_by_group(rel, group_by, "is_refused_by_adyen", "authorization_rate", invert=True),)


def calculate_chargeback_rate(env, rel, group_by):
    return (_rate_by_group(rel, group_by, "has_fraudulent_dispute", "chargeback_rate", invert=False),)


def analyze_volume_trends(env, rel):
    from ..dabstep.fees import month_of

    yi, di, ai = rel.index("year"), rel.index("day_of_year"), rel.index("eur_amount")
    groups: dict[tuple, list] = {}
    for r in rel.rows:
        groups.setdefault((r[yi], month_of(r[di])), []).append(r[ai])
    return (Relation(
        ["year", "month", "transactions", "volume"],
        [k + (len(v), math.fsum(v)) for k, v in sorted(groups.items())],
    ),)


def identify_local_acquiring_opportunities(env, rel):
    ii, ci, ai = rel.index("issuing_country"), rel.index("acquirer_country"), rel.index("eur_amount")
    groups: dict[Any, list] = {}
    for r in rel.rows:
        if r[ii] != r[ci]:
            groups.setdefault(r[ii], []).append(r[ai])
    rows = [(k, len(v), math.fsum(v)) for k, v in groups.items()]
    rows.sort(key=lambda t: -t[2])
    return (Relation(["issuing_country", "cross_border_transactions", "cross_border_volume"], rows),)


def analyze_aci_usage(env, merchant, year):
    """Total fees the merchant's fraudulent payments would incur under each ACI."""
    from ..dabstep.fees import applicable_fee

    ds = env.need_dataset("analyze_aci_usage")
    merchant, year = str(merchant), int(year)
    h = ds.payments.header
    acis = sorted({r[h.index("aci")] for r in ds.payments.rows} | {a for rule in ds.fee_rules for a in (rule.aci or ())})
    targets = [p for p in ds.iter_payments() if p.merchant == merchant and p.year == year and p.has_fraudulent_dispute]
    if not targets and merchant not in ds.merchants:
        raise ToolError(f"unknown merchant {merchant!r}")
    rows = []
    for aci in acis:
        rows.append((aci, math.fsum(applicable_fee(ds, p, aci=aci)[1] for p in targets)))
    return (Relation(["aci", "fee"], rows),)


# -- views --------------------------------------------------------------------------------


def view_stub(name: str) -> Callable:
    def write(env: ToolEnv, rel: Relation):
        env.out_dir.mkdir(parents=True, exist_ok=True)
        stamp = time.strftime("%Y%m%dT%H%M%S") + f"{time.time_ns() % 1_000_000_000:09d}"
        path = env.out_dir / f"{name}-{stamp}.json"
        path.write_text(json.dumps({"view": name, "header": list(rel.header), "rows": [list(r) for r in rel.rows]}, default=str))
        return ()

    return write


CORE: dict[str, Callable] = {
    "query_data": query_data,
    "filter": filter_,
    "project": project,
    "count": count,
    "aggregate": aggregate,
    "sort_rel": sort_rel,
    "anomaly": anomaly,
    "calculate_transaction_fee": calculate_transaction_fee,
    "calculate_merchant_fraud_rate": calculate_merchant_fraud_rate,
    "calculate_authorization_rate": calculate_authorization_rate,
    "calculate_chargeback_rate": calculate_chargeback_rate,
    "analyze_volume_trends": analyze_volume_trends,
    "identify_local_acquiring_opportunities": identify_local_acquiring_opportunities,
    "analyze_aci_usage": analyze_aci_usage,
}
