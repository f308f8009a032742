"""The planner's JSON envelope and the executable plan extracted from its action lines."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Callable

from ..errors import PlanError, PrologSyntaxError
from ..logic.kb import CONTROL, Clause, Directive, flatten_conjunction, parse_program
from ..logic.terms import Atom, Compound, Term, Var, term_vars

FIELDS = ("explanation", "gaps", "findings", "plan", "action", "result", "evaluation")

_FENCE = re.compile(r"^\s*```[a-zA-Z0-9_-]*\s*\n(.*?)\n?\s*```\s*$", re.S)


@dataclass
class PlanEnvelope:
    explanation: str
    gaps: list[str]
    findings: list[str]
    plan: list[str]
    action: list[str]
    result: str
    evaluation: float
    units: list[Clause | Directive] = field(default_factory=list, repr=False)

    @property
    def program_text(self) -> str:
        return "\n".join(self.action)

    def to_json(self) -> dict:
        return {name: getattr(self, name) for name in FIELDS}


def _strip_fences(text: str) -> str:
    m = _FENCE.match(text)
    if m:
        return m.group(1)
    # tolerate prose around a fenced block
    start = text.find("```")
    if start >= 0:
        end = text.rfind("```")
        if end > start:
            inner = text[start + 3:end]
            nl = inner.find("\n")
            if nl >= 0 and not inner[:nl].strip().startswith("{"):
                inner = inner[nl + 1:]
            return inner
    return text


def _str_list(value, name: str) -> list[str]:
    if isinstance(value, str):
        return [value]
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise PlanError(f"envelope field '{name}' must be a list of strings")
    return list(value)


def parse_plan_envelope(text: str) -> PlanEnvelope:
    """Parse the JSON response (optionally inside a code fence) and the logic program in ``action``."""
    body = _strip_fences(text.strip())
    try:
        obj = json.loads(body)
    except json.JSONDecodeError as e:
        raise PlanError(f"envelope is not valid JSON: {e}") from None
    if not isinstance(obj, dict):
        raise PlanError("envelope must be a JSON object")
    missing = [f for f in FIELDS if f not in obj]
    if missing:
        raise PlanError(f"envelope is missing field(s): {', '.join(missing)}")
    try:
        evaluation = float(obj["evaluation"])
    except (TypeError, ValueError):
        raise PlanError("envelope field 'evaluation' must be a number") from None
    result = obj["result"]
    if not isinstance(result, str):
        result = json.dumps(result)
    env = PlanEnvelope(
        explanation=str(obj["explanation"]),
        gaps=_str_list(obj["gaps"], "gaps"),
        findings=_str_list(obj["findings"], "findings"),
        plan=_str_list(obj["plan"], "plan"),
        action=_str_list(obj["action"], "action"),
        result=result,
        evaluation=evaluation,
    )
    try:
        env.units = parse_program(env.program_text, provenance="llm")
    except PrologSyntaxError as e:
        raise PlanError(f"action does not parse: {e}") from e
    return env


@dataclass
class Plan:
    """Goals to run in order (sharing one variable namespace) plus clauses the plan defines."""

    goals: list[Term]
    clauses: list[Clause]
    varnames: dict[str, Var]
    result_var: Var | None = None

    def goal_term(self) -> Term:
        if not self.goals:
            return Atom("true")
        out = self.goals[-1]
        for g in reversed(self.goals[:-1]):
            out = Compound(",", (g, out))
        return out

    def defined(self) -> set[tuple[str, int]]:
        return {c.indicator for c in self.clauses}


def _rename_shared(t: Term, local: dict[str, Var], shared: dict[str, Var]) -> Term:
    ids = {}
    for name, v in local.items():
        if name.startswith("_"):
            continue
        ids[v.id] = shared.setdefault(name, Var(name))

    def walk(x):
        if isinstance(x, Var):
            return ids.get(x.id, x)
        if isinstance(x, Compound):
            return Compound(x.name, tuple(walk(a) for a in x.args))
        return x

    return walk(t)


def _pick_result(result: str, varnames: dict[str, Var], goals: list[Term]) -> Var | None:
    tokens = re.findall(r"[A-Z_][A-Za-z0-9_]*", result or "")
    for tok in tokens:
        if tok in varnames:
            return varnames[tok]
    if goals:
        named = [v for v in term_vars(goals[-1]) if not v.name.startswith("_")]
        if named:
            return named[-1]
    return None


def build_plan(env: PlanEnvelope, is_goal_predicate: Callable[[tuple[str, int]], bool]) -> Plan:
    """Split parsed action units into goals and clause definitions.

    Directives (``:- G.`` / ``?- G.``) are goals. A bodiless unit whose predicate
    cannot be defined by a plan (control constructs, builtins, tools, library
    predicates) is also a goal. Everything else defines a clause. With no goals,
    ``main/0`` or ``main/1`` is run when the plan defines it.
    """
    shared: dict[str, Var] = {}
    goals: list[Term] = []
    clauses: list[Clause] = []
    for u in env.units:
        if isinstance(u, Directive):
            goals.extend(flatten_conjunction(_rename_shared(u.goal, u.varnames, shared)))
            continue
        key = u.indicator
        if not u.body and (key in CONTROL or is_goal_predicate(key)):
            goals.extend(flatten_conjunction(_rename_shared(u.head, u.varnames, shared)))
            continue
        clauses.append(u)
    if not goals:
        defined = {c.indicator for c in clauses}
        if ("main", 1) in defined:
            goals = [Compound("main", (shared.setdefault("Result", Var("Result")),))]
        elif ("main", 0) in defined:
            goals = [Atom("main")]
    return Plan(goals, clauses, shared, _pick_result(env.result, shared, goals))
