"""Independent reference implementations used to check the package.

Nothing here imports the engine's solver, relation algebra or fee code; each
oracle works on plain Python data so that agreement is meaningful.
"""

from __future__ import annotations

import csv
import itertools
import json
import random
import re
from dataclasses import dataclass, field
from pathlib import Path

# ---------------------------------------------------------------------------------------
# Datalog: random hierarchical programs and a bottom-up evaluator
# ---------------------------------------------------------------------------------------

CONSTANTS = ("a", "b", "c", "d", "e")


@dataclass
class Literal:
    pred: str
    args: tuple[str, ...]
    negated: bool = False


@dataclass
class Rule:
    head: Literal
    body: list[Literal]


@dataclass
class Program:
    arity: dict[str, int]
    facts: dict[str, set[tuple[str, ...]]]
    rules: list[Rule] = field(default_factory=list)

    @property
    def preds(self) -> list[str]:
        return list(self.arity)

    def text(self) -> str:
        lines = []
        for p, rows in self.facts.items():
            for row in sorted(rows):
                lines.append(f"{p}({', '.join(row)}).")
        for r in self.rules:
            body = ", ".join(("\\+ " if lit.negated else "") + f"{lit.pred}({', '.join(lit.args)})" for lit in r.body)
            lines.append(f"{r.head.pred}({', '.join(r.head.args)}) :- {body}.")
        return "\n".join(lines) + "\n"


def _is_var(s: str) -> bool:
    return s[:1].isupper()


def random_program(rng: random.Random, max_preds: int = 6, max_facts: int = 30, max_rules: int = 4) -> Program:
    """Non-recursive program: a rule for p_i only mentions p_j with j < i, so it is stratified.

    Negated literals only use variables bound by earlier positive literals, so
    negation is always called on ground goals.
    """
    n = rng.randint(2, max_preds)
    preds = [f"p{i}" for i in range(n)]
    arity = {p: rng.randint(1, 2) for p in preds}
    n_edb = rng.randint(1, max(1, n - 1))
    facts: dict[str, set] = {p: set() for p in preds}
    for _ in range(rng.randint(0, max_facts)):
        p = rng.choice(preds[:n_edb] if rng.random() < 0.8 else preds)
        facts[p].add(tuple(rng.choice(CONSTANTS) for _ in range(arity[p])))
    rules = []
    for _ in range(rng.randint(0, max_rules)):
        hi = rng.randint(1, n - 1)
        head_pred = preds[hi]
        lower = preds[:hi]
        vars_ = ["X", "Y", "Z", "W"]
        body: list[Literal] = []
        bound: list[str] = []
        for _ in range(rng.randint(1, 3)):
            p = rng.choice(lower)
            args = tuple(rng.choice(vars_) if rng.random() < 0.75 else rng.choice(CONSTANTS) for _ in range(arity[p]))
            body.append(Literal(p, args))
            bound.extend(a for a in args if _is_var(a) and a not in bound)
        if rng.random() < 0.5:
            p = rng.choice(lower)
            pool = bound or []
            args = tuple(rng.choice(pool) if pool and rng.random() < 0.7 else rng.choice(CONSTANTS) for _ in range(arity[p]))
            body.append(Literal(p, args, negated=True))
        head_args = tuple(rng.choice(bound) if bound and rng.random() < 0.8 else rng.choice(CONSTANTS) for _ in range(arity[head_pred]))
        rules.append(Rule(Literal(head_pred, head_args), body))
    return Program(arity, facts, rules)


def _match(args, row, env):
    env = dict(env)
    for a, v in zip(args, row):
        if _is_var(a):
            if a in env and env[a] != v:
                return None
            env[a] = v
        elif a != v:
            return None
    return env


def bottom_up(prog: Program) -> dict[str, set[tuple[str, ...]]]:
    """Least model, computed predicate by predicate in dependency order."""
    model = {p: set(rows) for p, rows in prog.facts.items()}
    for p in prog.preds:
        for r in (r for r in prog.rules if r.head.pred == p):
            envs = [{}]
            for lit in r.body:
                nxt = []
                for env in envs:
                    if lit.negated:
                        row = tuple(env[a] if _is_var(a) else a for a in lit.args)
                        if row not in model[lit.pred]:
                            nxt.append(env)
                    else:
                        for row in model[lit.pred]:
                            e = _match(lit.args, row, env)
                            if e is not None:
                                nxt.append(e)
                envs = nxt
            for env in envs:
                model[p].add(tuple(env[a] if _is_var(a) else a for a in r.head.args))
    return model


# ---------------------------------------------------------------------------------------
# Unification: textbook Robinson algorithm over tuples
# ---------------------------------------------------------------------------------------
# ("v", name) | ("a", name) | ("i", int) | ("f", name, (args...))


def random_term(rng: random.Random, depth: int = 3, var_names=("X", "Y", "Z", "U")):
    r = rng.random()
    if depth == 0 or r < 0.3:
        k = rng.random()
        if k < 0.45:
            return ("v", rng.choice(var_names))
        if k < 0.8:
            return ("a", rng.choice(("a", "b", "c")))
        return ("i", rng.randint(0, 2))
    name = rng.choice(("f", "g", "h"))
    arity = {"f": 1, "g": 2, "h": 2}[name]
    return ("f", name, tuple(random_term(rng, depth - 1, var_names) for _ in range(arity)))


def walk(t, s):
    while t[0] == "v" and t[1] in s:
        t = s[t[1]]
    return t


def occurs(name, t, s) -> bool:
    t = walk(t, s)
    if t[0] == "v":
        return t[1] == name
    if t[0] == "f":
        return any(occurs(name, a, s) for a in t[2])
    return False


def mgu(a, b, s=None):
    s = dict(s or {})
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = walk(x, s), walk(y, s)
        if x == y:
            continue
        if x[0] == "v":
            if occurs(x[1], y, s):
                return None
            s[x[1]] = y
        elif y[0] == "v":
            if occurs(y[1], x, s):
                return None
            s[y[1]] = x
        elif x[0] == "f" and y[0] == "f" and x[1] == y[1] and len(x[2]) == len(y[2]):
            stack.extend(zip(x[2], y[2]))
        else:
            return None
    return s


def apply(t, s):
    t = walk(t, s)
    if t[0] == "f":
        return ("f", t[1], tuple(apply(a, s) for a in t[2]))
    return t


# ---------------------------------------------------------------------------------------
# Relation algebra by brute force over lists of dicts
# ---------------------------------------------------------------------------------------


def _num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def cmp_values(a, b) -> int:
    if _num(a) and _num(b):
        return (a > b) - (a < b)
    x, y = str(a), str(b)
    return (x > y) - (x < y)


def eval_filter(expr, row: dict) -> bool:
    if expr == []:
        return True
    head = expr[0]
    if head == "and" and (len(expr) != 2 or isinstance(expr[1], list)):
        return all(eval_filter(e, row) for e in expr[1:])
    if head == "or" and (len(expr) != 2 or isinstance(expr[1], list)):
        return any(eval_filter(e, row) for e in expr[1:])
    if head == "not" and len(expr) == 2 and isinstance(expr[1], list):
        return not eval_filter(expr[1], row)
    if len(expr) == 3:
        c = cmp_values(row[expr[1]], expr[2])
        return {"eq": c == 0, "ne": c != 0, "lt": c < 0, "le": c <= 0, "gt": c > 0, "ge": c >= 0}[head]
    return cmp_values(row[head], expr[1]) == 0


def random_relation(rng: random.Random):
    """Header of 1-4 fields mixing numeric and text columns, 0-20 rows."""
    names = rng.sample(["a", "b", "c", "d"], rng.randint(1, 4))
    kinds = {n: rng.choice(("int", "text")) for n in names}
    rows = []
    for _ in range(rng.randint(0, 20)):
        rows.append(tuple(rng.randint(0, 5) if kinds[n] == "int" else rng.choice(("x", "y", "z")) for n in names))
    return names, kinds, rows


def random_filter(rng: random.Random, names, kinds, depth: int = 3):
    r = rng.random()
    if depth > 0 and r < 0.3:
        conn = rng.choice(("and", "or"))
        return [conn] + [random_filter(rng, names, kinds, depth - 1) for _ in range(rng.randint(1, 3))]
    if depth > 0 and r < 0.4:
        return ["not", random_filter(rng, names, kinds, depth - 1)]
    f = rng.choice(names)
    value = rng.randint(0, 5) if kinds[f] == "int" else rng.choice(("x", "y", "z"))
    if rng.random() < 0.1:
        value = rng.choice(("x", 3))
    if rng.random() < 0.4:
        return [f, value]
    return [rng.choice(("eq", "ne", "lt", "le", "gt", "ge")), f, value]


def bf_filter(header, rows, expr):
    return [r for r in rows if eval_filter(expr, dict(zip(header, r)))]


def bf_project(header, rows, fields):
    return [tuple(dict(zip(header, r))[f] for f in fields) for r in rows]


def bf_aggregate(header, rows, group_by, op, fld):
    groups: dict[tuple, list] = {}
    order: list[tuple] = []
    for r in rows:
        d = dict(zip(header, r))
        k = tuple(d[g] for g in group_by)
        if k not in groups:
            groups[k] = []
            order.append(k)
        groups[k].append(d[fld])
    if not group_by and not rows:
        if op == "count":
            return [(0,)]
        if op == "sum":
            return [(0,)]
        return []

    def agg(vals):
        if op == "count":
            return len(vals)
        if op == "sum":
            return sum(vals)
        if op == "avg":
            return sum(vals) / len(vals)
        return min(vals) if op == "min" else max(vals)

    return [k + (agg(groups[k]),) for k in order]


def bf_sort(header, rows, fld, order, k):
    i = header.index(fld)
    idx = list(range(len(rows)))
    # selection by repeated scanning keeps ties in input order
    out = []
    remaining = idx[:]
    while remaining:
        best = remaining[0]
        for j in remaining[1:]:
            c = cmp_values(rows[j][i], rows[best][i])
            if (order == "asc" and c < 0) or (order == "desc" and c > 0):
                best = j
        out.append(rows[best])
        remaining.remove(best)
    return out if k == "all" else out[:k]


# ---------------------------------------------------------------------------------------
# Fees: nested-loop join over the raw files of a dumped dataset
# ---------------------------------------------------------------------------------------

_MONTH_ENDS = (31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334, 365)


def month_from_day(day: int) -> int:
    for m, end in enumerate(_MONTH_ENDS, 1):
        if day <= end:
            return m
    return 12


def _scale(tok: str) -> float:
    tok = tok.strip().rstrip("%")
    mult = 1
    if tok[-1:].lower() == "k":
        mult, tok = 1_000, tok[:-1]
    elif tok[-1:].lower() == "m":
        mult, tok = 1_000_000, tok[:-1]
    return float(tok) * mult


def range_ok(spec: str, value: float) -> bool:
    spec = spec.strip()
    if spec.startswith(">"):
        return value > _scale(spec[1:])
    if spec.startswith("<"):
        return value < _scale(spec[1:])
    m = re.fullmatch(r"([\d.]+[kKmM%]?)-([\d.]+[kKmM%]?)", spec)
    if m:
        return _scale(m.group(1)) <= value <= _scale(m.group(2))
    return value == _scale(spec)


def delay_ok(spec: str, merchant_delay: str) -> bool:
    if spec in ("immediate", "manual"):
        return merchant_delay == spec
    if merchant_delay == "manual":
        return False
    days = 0.0 if merchant_delay == "immediate" else float(merchant_delay)
    return range_ok(spec, days)


def _set(v) -> bool:
    return v is not None and v != []


def oracle_fees(data_dir: str | Path) -> dict[str, float]:
    """Total fee per merchant, recomputed from the CSV/JSON files alone."""
    d = Path(data_dir)
    rules = json.loads((d / "fees.json").read_text())
    merchants = {m["merchant"]: m for m in json.loads((d / "merchant_data.json").read_text())}
    with open(d / "payments.csv", newline="") as f:
        pays = list(csv.DictReader(f))

    def truth(s: str) -> bool:
        return s.strip().lower() in ("true", "1")

    volume: dict[tuple, float] = {}
    fraud: dict[tuple, float] = {}
    for p in pays:
        key = (p["merchant"], int(p["year"]), month_from_day(int(p["day_of_year"])))
        amt = float(p["eur_amount"])
        volume[key] = volume.get(key, 0.0) + amt
        if truth(p["has_fraudulent_dispute"]):
            fraud[key] = fraud.get(key, 0.0) + amt

    totals: dict[str, float] = {}
    for p in pays:
        m = merchants[p["merchant"]]
        key = (p["merchant"], int(p["year"]), month_from_day(int(p["day_of_year"])))
        vol = volume[key]
        level = 100.0 * fraud.get(key, 0.0) / vol if vol else 0.0
        is_credit = truth(p["is_credit"])
        intra = p["issuing_country"] == p["acquirer_country"]
        best = None
        for r in rules:
            ok = True
            ok &= not _set(r["card_scheme"]) or r["card_scheme"] == p["card_scheme"]
            ok &= not _set(r["account_type"]) or m["account_type"] in r["account_type"]
            ok &= not _set(r["capture_delay"]) or delay_ok(r["capture_delay"], m["capture_delay"])
            ok &= not _set(r["monthly_fraud_level"]) or range_ok(r["monthly_fraud_level"], level)
            ok &= not _set(r["monthly_volume"]) or range_ok(r["monthly_volume"], vol)
            ok &= not _set(r["merchant_category_code"]) or m["merchant_category_code"] in r["merchant_category_code"]
            ok &= r["is_credit"] is None or bool(r["is_credit"]) == is_credit
            ok &= not _set(r["aci"]) or p["aci"] in r["aci"]
            ok &= r["intracountry"] is None or bool(r["intracountry"]) == intra
            if not ok:
                continue
            spec = sum(_set(r[f]) if f not in ("is_credit", "intracountry") else r[f] is not None
                       for f in ("card_scheme", "account_type", "capture_delay", "monthly_fraud_level",
                                 "monthly_volume", "merchant_category_code", "is_credit", "aci", "intracountry"))
            if best is None or spec > best[0] or (spec == best[0] and r["ID"] < best[1]["ID"]):
                best = (spec, r)
        r = best[1]
        fee = r["fixed_amount"] + r["rate"] * float(p["eur_amount"]) / 10000
        totals[p["merchant"]] = totals.get(p["merchant"], 0.0) + fee
    return totals


def oracle_monthly(data_dir: str | Path) -> dict[tuple, tuple[float, float]]:
    d = Path(data_dir)
    out: dict[tuple, list] = {}
    with open(d / "payments.csv", newline="") as f:
        for p in csv.DictReader(f):
            key = (p["merchant"], int(p["year"]), month_from_day(int(p["day_of_year"])))
            acc = out.setdefault(key, [0.0, 0.0])
            acc[0] += float(p["eur_amount"])
            if p["has_fraudulent_dispute"].strip().lower() in ("true", "1"):
                acc[1] += float(p["eur_amount"])
    return {k: (v[0], v[1]) for k, v in out.items()}


def pairs(iterable):
    a, b = itertools.tee(iterable)
    next(b, None)
    return zip(a, b)
