"""Static checks on a plan: groundness of tool inputs, plan-asserted predicates, relation misuse.

The analysis walks the plan's goals left to right and tracks, for every
variable, one of three abstract values: free (absent from the state), ground,
or ground-and-holding-a-relation. Helper predicates are analysed at each call
site by abstract head unification, with a guard against recursion. Builtins
without a dedicated rule are treated optimistically: every variable in their
arguments is assumed ground afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import PlanError
from ..logic.builtins import BUILTINS
from ..logic.kb import CONTROL, Clause, KnowledgeBase, flatten_conjunction, var_names_of
from ..logic.terms import Atom, Compound, LazyCompound, Term, Var, rename_vars, term_vars
from ..logic.writer import format_term
from .envelope import Plan

UNINSTANTIATED = "UninstantiatedInput"
LLM_ASSERT = "LlmAssert"
RELATION_MISUSE = "RelationMisuse"

GROUND = "g"
RELATION = "r"

_ARITH_CMP = {"<", ">", "=<", ">=", "=:=", "=\\="}
_NO_BIND = {
    "var", "nonvar", "atom", "number", "integer", "float", "atomic", "compound", "callable",
    "string", "is_list", "ground", "==", "\\==", "@<", "@>", "@=<", "@>=", "\\=",
    "write", "print", "writeq", "write_canonical", "writeln", "nl", "tab", "halt",
    "retract", "retractall", "dynamic", "discontiguous",
}
_SORTS = {("sort", 2): 0, ("msort", 2): 0, ("sort", 4): 2, ("predsort", 3): 1, ("keysort", 2): 0}
_ALL_SOLUTIONS = {("findall", 3), ("findall", 4), ("aggregate_all", 3), ("bagof", 3), ("setof", 3)}
_ASSERTS = {"assert", "asserta", "assertz"}


@dataclass(frozen=True)
class Finding:
    kind: str
    location: str


class _State:
    """Abstract values per variable id, with alias classes for free variables unified together."""

    __slots__ = ("val", "alias")

    def __init__(self, val=None, alias=None) -> None:
        self.val: dict[int, str] = val or {}
        self.alias: dict[int, frozenset[int]] = alias or {}

    def copy(self) -> "_State":
        return _State(dict(self.val), dict(self.alias))

    def get(self, v: Var) -> str | None:
        return self.val.get(v.id)

    def set(self, v: Var, value: str) -> None:
        for i in self.alias.get(v.id, (v.id,)):
            if self.val.get(i) != RELATION:
                self.val[i] = value

    def join_alias(self, a: Var, b: Var) -> None:
        merged = self.alias.get(a.id, frozenset((a.id,))) | self.alias.get(b.id, frozenset((b.id,)))
        for i in merged:
            self.alias[i] = merged

    def ground(self, t: Term) -> bool:
        return all(v.id in self.val for v in term_vars(t))

    def ground_all(self, t: Term) -> None:
        for v in term_vars(t):
            if v.id not in self.val:
                self.set(v, GROUND)

    @staticmethod
    def merge(branches: list["_State"]) -> "_State":
        if not branches:
            return _State()
        first = branches[0]
        val = {}
        for i, x in first.val.items():
            vals = [b.val.get(i) for b in branches]
            if all(v is not None for v in vals):
                val[i] = RELATION if all(v == RELATION for v in vals) else GROUND
        return _State(val, dict(first.alias))


def _key(goal: Term) -> tuple[str, int] | None:
    if isinstance(goal, Atom):
        return (goal.name, 0)
    if isinstance(goal, Compound):
        return (goal.name, len(goal.args))
    return None


def _args(goal: Term) -> tuple[Term, ...]:
    return goal.args if isinstance(goal, Compound) else ()


def _clause_key(t: Term) -> tuple[str, int] | None:
    if isinstance(t, Compound) and t.name == ":-" and len(t.args) == 2:
        t = t.args[0]
    return _key(t)


class Analyzer:
    def __init__(self, plan: Plan, registry, kb: KnowledgeBase | None = None, max_depth: int = 40) -> None:
        self.plan = plan
        self.registry = registry
        self.kb = kb if kb is not None else KnowledgeBase()
        self.max_depth = max_depth
        self.findings: list[Finding] = []
        self._seen: set[Finding] = set()
        self.local: dict[tuple[str, int], list[Clause]] = {}
        for c in plan.clauses:
            self.local.setdefault(c.indicator, []).append(c)
        self.asserted = set(self.local)
        for g in plan.goals:
            self._collect_asserts(g)
        for cs in self.local.values():
            for c in cs:
                for g in c.body:
                    self._collect_asserts(g)
        self._names = var_names_of(plan.varnames)
        self._stack: list[tuple[str, int]] = []

    # -- bookkeeping ---------------------------------------------------------------------
    def _report(self, kind: str, location: str) -> None:
        f = Finding(kind, location)
        if f not in self._seen:
            self._seen.add(f)
            self.findings.append(f)

    def _collect_asserts(self, g: Term) -> None:
        stack = [g]
        while stack:
            t = stack.pop()
            if not isinstance(t, Compound) or isinstance(t, LazyCompound):
                continue
            if t.name in _ASSERTS and len(t.args) == 1:
                key = _clause_key(t.args[0])
                if key is not None:
                    self.asserted.add(key)
            stack.extend(t.args)

    def _where(self, where: str, goal: Term, names: dict[int, str]) -> str:
        return f"{where}: {format_term(goal, var_names=names)}"

    # -- entry point ---------------------------------------------------------------------
    def run(self) -> list[Finding]:
        for key in self.local:
            self._report(LLM_ASSERT, f"{key[0]}/{key[1]}")
        st = _State()
        for i, g in enumerate(self.plan.goals, 1):
            st = self.goal(g, st, f"goal {i}", self._names, 0)
        return self.findings

    # -- goals ---------------------------------------------------------------------------
    def goal(self, g: Term, st: _State, where: str, names: dict[int, str], depth: int) -> _State:
        if isinstance(g, Var):
            return st
        key = _key(g)
        if key is None:
            raise PlanError(f"{where}: goal is not callable: {format_term(g, var_names=names)}")
        name, arity = key
        args = _args(g)
        if key == (",", 2):
            for sub in flatten_conjunction(g):
                st = self.goal(sub, st, where, names, depth)
            return st
        if key == (";", 2):
            left, right = args
            if _key(left) in {("->", 2), ("*->", 2)}:
                c, t = _args(left)
                a = self.goal(t, self.goal(c, st.copy(), where, names, depth), where, names, depth)
            else:
                a = self.goal(left, st.copy(), where, names, depth)
            b = self.goal(right, st.copy(), where, names, depth)
            return _State.merge([a, b])
        if key in {("->", 2), ("*->", 2)}:
            return self.goal(args[1], self.goal(args[0], st, where, names, depth), where, names, depth)
        if key in {("\\+", 1), ("not", 1)}:
            self.goal(args[0], st.copy(), where, names, depth)
            return st
        if name == "call" and arity >= 1:
            target = args[0]
            if isinstance(target, (Atom, Compound)):
                extra = args[1:]
                if isinstance(target, Atom) and extra:
                    target = Compound(target.name, extra)
                elif isinstance(target, Compound) and extra:
                    target = Compound(target.name, target.args + extra)
                return self.goal(target, st, where, names, depth)
            for a in args[1:]:
                st.ground_all(a)
            return st
        if key == ("forall", 2):
            self._misuse_check(g, st, where, names, args)
            inner = self.goal(args[0], st.copy(), where, names, depth)
            self.goal(args[1], inner, where, names, depth)
            return st
        if key in _ALL_SOLUTIONS:
            self._misuse_check(g, st, where, names, args[:2])
            inner_goal = args[1]
            while isinstance(inner_goal, Compound) and inner_goal.name == "^" and len(inner_goal.args) == 2:
                inner_goal = inner_goal.args[1]
            self.goal(inner_goal, st.copy(), where, names, depth)
            for a in args[2:]:
                st.ground_all(a)
            return st
        if key in _SORTS:
            pos = _SORTS[key]
            lst = args[pos]
            if any(st.get(v) == RELATION for v in term_vars(lst)):
                self._report(RELATION_MISUSE, self._where(where, g, names))
            if st.ground(lst):
                st.ground_all(args[-1])
            return st

        spec = self.registry.get(key) if self.registry is not None else None
        if spec is not None:
            return self._tool(g, args, spec.inputs, spec.outputs, spec.relation_outputs(), st, where, names)
        fp = self.kb.foreign.get(key)
        if fp is not None:
            return self._tool(g, args, fp.input_positions, fp.output_positions, [], st, where, names)

        if key in CONTROL or key in BUILTINS:
            return self._builtin(g, name, args, st, where, names)
        if key in self.local:
            return self._inline(g, args, self.local[key], st, names, depth)
        clauses = self.kb.clauses(key)
        if clauses:
            return self._inline(g, args, clauses, st, names, depth)
        if key in self.asserted or key in self.kb.dynamic:
            st.ground_all(g)
            return st
        raise PlanError(f"{where}: unknown predicate {name}/{arity}")

    def _misuse_check(self, g, st, where, names, parts) -> None:
        for p in parts:
            if any(st.get(v) == RELATION for v in term_vars(p)):
                self._report(RELATION_MISUSE, self._where(where, g, names))
                return

    def _tool(self, g, args, inputs, outputs, rel_outputs, st, where, names) -> _State:
        for i in inputs:
            if not st.ground(args[i]):
                self._report(UNINSTANTIATED, self._where(where, g, names))
                break
        for i in outputs:
            a = args[i]
            if isinstance(a, Var) and i in rel_outputs:
                st.set(a, RELATION)
            else:
                st.ground_all(a)
        return st

    def _builtin(self, g, name, args, st, where, names) -> _State:
        arity = len(args)
        if name in _ASSERTS and arity == 1:
            key = _clause_key(args[0])
            if key is not None:
                self._report(LLM_ASSERT, f"{key[0]}/{key[1]}")
            return st
        if name in _NO_BIND:
            return st
        if name == "=" and arity == 2:
            self.unify(args[0], args[1], st)
            return st
        if name == "is" and arity == 2:
            if not st.ground(args[1]):
                self._report(UNINSTANTIATED, self._where(where, g, names))
            st.ground_all(args[0])
            return st
        if name in _ARITH_CMP and arity == 2:
            if not (st.ground(args[0]) and st.ground(args[1])):
                self._report(UNINSTANTIATED, self._where(where, g, names))
            return st
        if name == "between" and arity == 3:
            if not (st.ground(args[0]) and st.ground(args[1])):
                self._report(UNINSTANTIATED, self._where(where, g, names))
            st.ground_all(args[2])
            return st
        if name == "length" and arity == 2:
            st.ground_all(args[1])
            return st
        if name == "format":
            if arity == 3:
                sink = args[0]
                if isinstance(sink, Compound) and len(sink.args) == 1:
                    st.ground_all(sink.args[0])
            return st
        for a in args:
            st.ground_all(a)
        return st

    def _inline(self, g, args, clauses: list[Clause], st: _State, names, depth: int) -> _State:
        key = _key(g)
        if key in self._stack or depth >= self.max_depth:
            st.ground_all(g)
            return st
        if all(not c.body for c in clauses) and all(not term_vars(c.head) for c in clauses):
            st.ground_all(g)
            return st
        self._stack.append(key)
        try:
            outcomes = []
            for n, c in enumerate(clauses, 1):
                mapping: dict[int, Var] = {}
                head = rename_vars(c.head, mapping)
                body = [rename_vars(b, mapping) for b in c.body]
                local = st.copy()
                self.unify(g, head, local)
                cnames = dict(names)
                cnames.update({mapping[v.id].id: nm for nm, v in c.varnames.items() if v.id in mapping})
                where = f"{key[0]}/{key[1]} clause {n}"
                for b in body:
                    local = self.goal(b, local, where, cnames, depth + 1)
                self.unify(g, head, local)
                outcomes.append(local)
        finally:
            self._stack.pop()
        merged = _State.merge(outcomes)
        out = st.copy()
        for v in term_vars(g):
            val = merged.get(v)
            if val is not None:
                out.val[v.id] = val
        return out

    # -- abstract unification -------------------------------------------------------------
    def unify(self, a: Term, b: Term, st: _State) -> None:
        if isinstance(a, LazyCompound) or isinstance(b, LazyCompound):
            st.ground_all(a)
            st.ground_all(b)
            return
        if isinstance(a, Var) and isinstance(b, Var):
            va, vb = st.get(a), st.get(b)
            if va is not None and vb is None:
                st.set(b, va)
            elif vb is not None and va is None:
                st.set(a, vb)
            elif va is None and vb is None:
                st.join_alias(a, b)
            return
        if isinstance(b, Var):
            a, b = b, a
        if isinstance(a, Var):
            if st.ground(b):
                st.set(a, GROUND)
            elif st.get(a) is not None:
                st.ground_all(b)
            return
        if isinstance(a, Compound) and isinstance(b, Compound):
            if a.name == b.name and len(a.args) == len(b.args):
                for x, y in zip(a.args, b.args):
                    self.unify(x, y, st)


def analyze_program(plan: Plan, registry, kb: KnowledgeBase | None = None) -> list[Finding]:
    """Findings for ``plan`` in discovery order; raises PlanError for calls to unknown predicates."""
    return Analyzer(plan, registry, kb).run()
