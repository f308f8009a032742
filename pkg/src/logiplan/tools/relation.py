"""Relations (``[Header|Data]`` tables) and the relation-algebra operations behind the tools.

Everything here is plain Python over immutable :class:`Relation` values; the
conversion to and from logic terms lives at the bottom of the module.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from ..errors import ToolError
from ..logic.terms import (
    NIL,
    Atom,
    Compound,
    LazyCompound,
    LazyList,
    Term,
    Var,
    from_term,
    lazy_list,
    list_items,
    mklist,
    to_term,
)

COMPARATORS = ("eq", "ne", "lt", "le", "gt", "ge")
CONNECTIVES = ("and", "or", "not")
AGG_OPS = ("sum", "avg", "min", "max", "count")


class RelationError(ToolError):
    """A tool was given a bad relation, field, or expression.

    ``kind`` is one of ``unknown_field``, ``unknown_table``, ``type``,
    ``malformed`` or ``domain``.
    """

    def __init__(self, kind: str, message: str) -> None:
        super().__init__(message)
        self.kind = kind


@dataclass(frozen=True)
class Relation:
    header: tuple[str, ...]
    rows: tuple[tuple, ...]

    def __init__(self, header: Sequence[str], rows: Sequence[Sequence[Any]] = ()) -> None:
        header = tuple(header)
        if len(set(header)) != len(header):
            raise RelationError("malformed", f"duplicate field names in header {list(header)}")
        for h in header:
            if not isinstance(h, str):
                raise RelationError("malformed", f"header fields must be names, got {h!r}")
        width = len(header)
        rows = tuple(r if type(r) is tuple else tuple(r) for r in rows)
        for i, r in enumerate(rows):
            if len(r) != width:
                raise RelationError("malformed", f"row {i + 1} has {len(r)} values, header has {width}")
        object.__setattr__(self, "header", header)
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)

    def index(self, field: str) -> int:
        try:
            return self.header.index(field)
        except ValueError:
            raise RelationError("unknown_field", f"unknown field '{field}' (fields: {', '.join(self.header)})") from None

    def column(self, field: str) -> list:
        i = self.index(field)
        return [r[i] for r in self.rows]

    def to_lists(self) -> list[list]:
        return [list(self.header)] + [list(r) for r in self.rows]

    def to_term(self) -> "RelationTerm":
        return RelationTerm(self)


# -- value semantics ---------------------------------------------------------------------


def is_numeric(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _text(v: Any) -> str:
    if v is True:
        return "true"
    if v is False:
        return "false"
    if v is None:
        return "null"
    return str(v)


def compare_values(a: Any, b: Any) -> int:
    """Numeric comparison when both sides are numbers, lexicographic on text otherwise."""
    if is_numeric(a) and is_numeric(b):
        return (a > b) - (a < b)
    x, y = _text(a), _text(b)
    return (x > y) - (x < y)


_CMP: dict[str, Callable[[int], bool]] = {
    "eq": lambda c: c == 0,
    "ne": lambda c: c != 0,
    "lt": lambda c: c < 0,
    "le": lambda c: c <= 0,
    "gt": lambda c: c > 0,
    "ge": lambda c: c >= 0,
}
# symbolic spellings accepted for the comparators, prefix or infix
SYMBOLS = {"=": "eq", "==": "eq", "\\=": "ne", "!=": "ne", "<": "lt", "=<": "le", "<=": "le", ">": "gt", ">=": "ge"}


def sort_key(v: Any):
    return (0, v, "") if is_numeric(v) else (1, 0, _text(v))


# -- filter expressions ----------------------------------------------------------------------


def compile_filter(expr: Any, header: Sequence[str]) -> Callable[[tuple], bool]:
    """Turn a filter expression (nested Python lists) into a row predicate.

    ``[]`` accepts every row. Leaves are ``[field, value]`` (equality) or
    ``[op, field, value]`` (``op`` may also be a symbol such as ``>=``, and a
    symbol may sit between field and value); connectives are ``[and|Es]``, ``[or|Es]``, ``[not, E]``.
    """
    header = list(header)

    def field_index(name: Any) -> int:
        if not isinstance(name, str) or name not in header:
            raise RelationError("unknown_field", f"unknown field '{_text(name)}' in filter (fields: {', '.join(header)})")
        return header.index(name)

    def build(e: Any) -> Callable[[tuple], bool]:
        if not isinstance(e, list) or not e:
            raise RelationError("malformed", f"malformed filter expression {e!r}")
        head = e[0]
        if head in ("and", "or") and (len(e) != 2 or isinstance(e[1], list)):
            children = [build(c) for c in e[1:]]
            if not children:
                raise RelationError("malformed", f"'{head}' needs at least one child expression")
            if head == "and":
                return lambda row: all(c(row) for c in children)
            return lambda row: any(c(row) for c in children)
        if head == "not" and len(e) == 2 and isinstance(e[1], list):
            inner = build(e[1])
            return lambda row: not inner(row)
        if len(e) == 3 and isinstance(e[1], str) and e[1] in SYMBOLS and head in header:
            e = [SYMBOLS[e[1]], head, e[2]]
            head = e[0]
        if len(e) == 3 and isinstance(head, str) and SYMBOLS.get(head, head) in _CMP:
            i, value, test = field_index(e[1]), e[2], _CMP[SYMBOLS.get(head, head)]
            return lambda row: test(compare_values(row[i], value))
        if len(e) == 2 and not isinstance(e[1], list):
            i, value = field_index(head), e[1]
            if is_numeric(value):
                return lambda row: compare_values(row[i], value) == 0
            text = _text(value)
            return lambda row: _text(row[i]) == text
        raise RelationError("malformed", f"malformed filter expression {e!r}")

    if expr == [] or expr is None:
        return lambda row: True
    return build(expr)


# -- operations ------------------------------------------------------------------------------


def filter_rel(rel: Relation, expr: Any) -> Relation:
    pred = compile_filter(expr, rel.header)
    return Relation(rel.header, [r for r in rel.rows if pred(r)])


def project(rel: Relation, fields: Sequence[str]) -> Relation:
    fields = list(fields)
    if not fields:
        raise RelationError("domain", "projection must name at least one field")
    idx = [rel.index(f) for f in fields]
    return Relation(fields, [tuple(r[i] for i in idx) for r in rel.rows])


def count(rel: Relation) -> Relation:
    return Relation(["count"], [(len(rel.rows),)])


def _numeric_column(rel: Relation, field: str, op: str) -> int:
    i = rel.index(field)
    for r in rel.rows:
        if not is_numeric(r[i]):
            raise RelationError("type", f"{op} needs a numeric field, '{field}' holds {_text(r[i])!r}")
    return i


def _agg(op: str, values: list):
    if op == "count":
        return len(values)
    if op == "sum":
        if all(isinstance(v, int) for v in values):
            return sum(values)
        return math.fsum(values)
    if op == "avg":
        if all(isinstance(v, int) for v in values):
            return sum(values) / len(values)
        return math.fsum(values) / len(values)
    if op == "min":
        return min(values)
    return max(values)


def aggregate(rel: Relation, group_by: Sequence[str], spec: Sequence[Any]) -> Relation:
    spec = list(spec)
    if len(spec) != 2 or spec[0] not in AGG_OPS or not isinstance(spec[1], str):
        raise RelationError("malformed", f"aggregate spec must be [op, field] with op in {list(AGG_OPS)}, got {spec!r}")
    op, field = spec
    group_by = list(group_by)
    gidx = [rel.index(g) for g in group_by]
    if op == "count":
        vi = rel.index(field)
    else:
        vi = _numeric_column(rel, field, op)
    groups: dict[tuple, list] = {}
    for r in rel.rows:
        groups.setdefault(tuple(r[i] for i in gidx), []).append(r[vi])
    name = f"{op}_{field}"
    if name in group_by:
        raise RelationError("domain", f"aggregate column '{name}' clashes with a group field")
    if not group_by:
        values = groups.get((), [])
        if not values and op not in ("count", "sum"):
            return Relation([name], [])
        return Relation([name], [(_agg(op, values),)])
    return Relation(group_by + [name], [key + (_agg(op, vals),) for key, vals in groups.items()])


def sort_rel(rel: Relation, field: str, order: str = "asc", k: int | str = "all") -> Relation:
    i = rel.index(field)
    if order not in ("asc", "desc"):
        raise RelationError("domain", f"sort order must be asc or desc, got {order!r}")
    if k != "all" and (not isinstance(k, int) or isinstance(k, bool) or k <= 0):
        raise RelationError("domain", f"k must be a positive integer or 'all', got {k!r}")
    rows = sorted(rel.rows, key=lambda r: sort_key(r[i]), reverse=order == "desc")
    if k != "all":
        rows = rows[:k]
    return Relation(rel.header, rows)


AMOUNT_FIELD = "eur_amount"
GROUP_FIELDS = ("ip_country", "issuing_country")
MAD_SCALE = 1.4826
Z_THRESHOLD = 3.0


def _flags(values: list[float]) -> list[int]:
    med = statistics.median(values)
    dev = [abs(v - med) for v in values]
    mad = statistics.median(dev)
    if mad == 0:
        # degenerate spread: anything off the median is an outlier
        return [1 if d > 0 else 0 for d in dev]
    scale = MAD_SCALE * mad
    return [1 if d / scale > Z_THRESHOLD else 0 for d in dev]


def anomaly(rel: Relation) -> Relation:
    """Flag rows whose amount is a robust outlier within its country group."""
    if AMOUNT_FIELD not in rel.header:
        raise RelationError("unknown_field", f"anomaly needs the '{AMOUNT_FIELD}' field")
    group = next((g for g in GROUP_FIELDS if g in rel.header), None)
    if group is None:
        raise RelationError("unknown_field", f"anomaly needs one of the fields {', '.join(GROUP_FIELDS)}")
    if "is_anomaly" in rel.header:
        raise RelationError("domain", "relation already has an is_anomaly field")
    vi = _numeric_column(rel, AMOUNT_FIELD, "anomaly")
    gi = rel.index(group)
    members: dict[Any, list[int]] = {}
    for n, r in enumerate(rel.rows):
        members.setdefault(r[gi], []).append(n)
    flags = [0] * len(rel.rows)
    for idxs in members.values():
        for n, f in zip(idxs, _flags([rel.rows[n][vi] for n in idxs])):
            flags[n] = f
    return Relation(("is_anomaly",) + rel.header, [(f,) + r for f, r in zip(flags, rel.rows)])


# -- terms ------------------------------------------------------------------------------------


def _row_term(row: tuple) -> Term:
    return mklist([to_term(v) for v in row])


class RelationTerm(LazyCompound):
    """``[Header|Data]`` backed by a :class:`Relation`; rows become terms only when visited."""

    __slots__ = ("relation", "_cell")

    def __init__(self, relation: Relation) -> None:
        self.name = "."
        self.relation = relation
        self._cell = None

    @property
    def args(self) -> tuple[Term, Term]:
        if self._cell is None:
            rel = self.relation
            self._cell = (mklist([Atom(h) for h in rel.header]), lazy_list(rel.rows, _row_term))
        return self._cell


def relation_from_term(t: Term) -> Relation:
    if isinstance(t, RelationTerm):
        return t.relation
    if isinstance(t, Compound) and t.name == "." and len(t.args) == 2:
        head, tail = t.args
        header = list_items(head)
        if header is None:
            raise RelationError("malformed", "relation header must be a proper list")
        header_vals = [from_term(h) for h in header]
        if isinstance(tail, LazyList) and tail._convert is _row_term:
            rows = tail.python_items()
        else:
            row_terms = list_items(tail)
            if row_terms is None:
                raise RelationError("malformed", "relation data must be a proper list of rows")
            rows = []
            for rt in row_terms:
                items = list_items(rt)
                if items is None:
                    raise RelationError("malformed", "every relation row must be a proper list")
                rows.append(tuple(from_term(x) for x in items))
        for h in header_vals:
            if not isinstance(h, str):
                raise RelationError("malformed", f"header fields must be atoms, got {h!r}")
        return Relation(header_vals, rows)
    if t is NIL:
        raise RelationError("malformed", "a relation needs at least a header row")
    if type(t) is Var:
        raise RelationError("malformed", "relation argument is unbound")
    raise RelationError("malformed", "expected a relation [Header|Data]")


def python_value(t: Term) -> Any:
    """Convert a ground tool argument (filter, projection, field, ...) to Python."""
    try:
        return from_term(t)
    except ValueError as e:
        raise RelationError("malformed", str(e)) from None
