"""Depth-first SLD resolution with cut, if-then-else and negation as failure.

The machine is iterative: a continuation is a linked tuple
``(goal, cut_barrier, depth, next)`` and backtracking pops choicepoints from an
explicit stack, so proof depth is limited by :class:`SolveBudget` rather than
by the Python call stack.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Iterator, TextIO

from ..errors import BudgetExceeded, ExistenceError, InstantiationError, PrologTypeError
from .kb import Clause, KnowledgeBase
from .reader import read_term
from .terms import Atom, Compound, Float, Int, LazyCompound, Str, Term, Var, term_vars
from .unify import Substitution
from .writer import format_term


@dataclass(frozen=True)
class SolveBudget:
    max_depth: int = 10_000
    max_steps: int = 1_000_000

    def __post_init__(self) -> None:
        if self.max_depth <= 0 or self.max_steps <= 0:
            raise ValueError("budget limits must be positive")


FAIL = object()


class _CutTo:
    __slots__ = ("height",)

    def __init__(self, height: int) -> None:
        self.height = height


_FAIL_GOAL = Atom("fail")

# choicepoint kinds
_ALT, _CLAUSES, _GEN = 0, 1, 2


class _ChoicePoint:
    __slots__ = ("kind", "mark", "cont", "goal_args", "clauses", "idx", "n", "depth", "barrier", "gen", "first")

    def __init__(self, kind: int, mark: int) -> None:
        self.kind = kind
        self.mark = mark


class _Compiled:
    """A clause prepared for fast renaming: variables replaced by slot indexes."""

    __slots__ = ("head", "body", "nvars", "names", "first_key")

    def __init__(self, clause: Clause) -> None:
        slots: dict[int, int] = {}
        names: list[str] = []

        def tmpl(t):
            if type(t) is Var:
                i = slots.get(t.id)
                if i is None:
                    i = slots[t.id] = len(names)
                    names.append(t.name)
                return i
            if isinstance(t, Compound) and not isinstance(t, LazyCompound):
                args = tuple(tmpl(a) for a in t.args)
                if all(a is b for a, b in zip(args, t.args)):
                    return t
                return (t.name, args)
            return t

        self.head = tmpl(clause.head)
        self.body = tmpl(clause.body_term()) if clause.body else None
        self.nvars = len(names)
        self.names = names
        self.first_key = None
        h = clause.head
        if isinstance(h, Compound):
            self.first_key = _atomic_key(h.args[0])


def _atomic_key(t: Term):
    if isinstance(t, Atom):
        return t
    if isinstance(t, (Int, Float, Str)):
        return t
    if isinstance(t, Compound):
        return (t.name, len(t.args))
    return None


def _build(t, fresh: list, names: list[str]):
    tt = type(t)
    if tt is int:
        v = fresh[t]
        if v is None:
            v = fresh[t] = Var(names[t])
        return v
    if tt is tuple:
        return Compound(t[0], tuple(_build(a, fresh, names) for a in t[1]))
    return t


def compiled(clause: Clause) -> _Compiled:
    c = clause.__dict__.get("_compiled")
    if c is None:
        c = _Compiled(clause)
        clause.__dict__["_compiled"] = c
    return c


class Solver:
    """One query execution context. Not shareable between threads mid-query."""

    def __init__(
        self,
        kb: KnowledgeBase,
        budget: SolveBudget | None = None,
        occurs_check: bool | None = None,
        out: TextIO | None = None,
        assert_provenance: str = "program",
    ) -> None:
        self.kb = kb
        self.budget = budget or SolveBudget()
        if occurs_check is None:
            occurs_check = bool(kb.flags.get("occurs_check", False))
        self.s = Substitution(occurs_check=occurs_check)
        self.steps = 0
        self.out = out if out is not None else sys.stdout
        self.assert_provenance = assert_provenance

    # -- public ----------------------------------------------------------------------
    def solve(self, goal: Term | str, varnames: dict[str, Var] | None = None) -> Iterator[dict[str, Term]]:
        """Yield one ``{name: value}`` mapping per solution, in SLD order."""
        if isinstance(goal, str):
            rt = read_term(goal, self.kb.ops)
            goal, varnames = rt.term, rt.varnames
        if varnames is None:
            varnames = {v.name: v for v in term_vars(goal) if not v.name.startswith("_")}
        named = [(n, v) for n, v in varnames.items() if not n.startswith("_")]
        for _ in self.run(goal):
            yield {n: self.s.resolve(v) for n, v in named}

    def run(self, goal: Term, depth: int = 0) -> Iterator[bool]:
        """Low-level driver: yields once per solution with bindings in ``self.s``."""
        s = self.s
        kb = self.kb
        max_depth = self.budget.max_depth
        max_steps = self.budget.max_steps
        from .builtins import BUILTINS, NONDET

        stack: list[_ChoicePoint] = []
        cont = (goal, 0, depth, None)
        while True:
            if cont is None:
                yield True
                cont = self._backtrack(stack)
                if cont is FAIL:
                    return
                continue
            goal, barrier, d, nxt = cont
            if type(goal) is _CutTo:
                del stack[goal.height:]
                cont = nxt
                continue
            self.steps += 1
            if self.steps > max_steps:
                raise BudgetExceeded("steps", max_steps)
            goal = s.deref(goal)
            if isinstance(goal, Compound):
                name, args = goal.name, goal.args
            elif isinstance(goal, Atom):
                name, args = goal.name, ()
            elif type(goal) is Var:
                raise InstantiationError("call/1", "goal is unbound")
            else:
                raise PrologTypeError("callable", format_term(goal))
            arity = len(args)

            # -- control constructs ------------------------------------------------------
            if name == "," and arity == 2:
                cont = (args[0], barrier, d, (args[1], barrier, d, nxt))
                continue
            if name == "true" and arity == 0:
                cont = nxt
                continue
            if name == "!" and arity == 0:
                del stack[barrier:]
                cont = nxt
                continue
            if (name == "fail" or name == "false") and arity == 0:
                cont = self._backtrack(stack)
                if cont is FAIL:
                    return
                continue
            if name == ";" and arity == 2:
                lhs = s.deref(args[0])
                mark = len(stack)
                cp = _ChoicePoint(_ALT, len(s.trail))
                cp.cont = (args[1], barrier, d, nxt)
                stack.append(cp)
                if isinstance(lhs, Compound) and lhs.name == "->" and len(lhs.args) == 2:
                    then = (lhs.args[1], barrier, d, nxt)
                    cont = (lhs.args[0], mark + 1, d + 1, (_CutTo(mark), 0, d, then))
                else:
                    cont = (lhs, barrier, d, nxt)
                continue
            if name == "->" and arity == 2:
                mark = len(stack)
                then = (args[1], barrier, d, nxt)
                cont = (args[0], mark, d + 1, (_CutTo(mark), 0, d, then))
                continue
            if (name == "\\+" or name == "not") and arity == 1:
                mark = len(stack)
                cp = _ChoicePoint(_ALT, len(s.trail))
                cp.cont = nxt
                stack.append(cp)
                cont = (args[0], mark + 1, d + 1, (_CutTo(mark), 0, d, (_FAIL_GOAL, 0, d, None)))
                continue
            if name == "call" and arity >= 1:
                target = s.deref(args[0])
                if arity > 1:
                    target = _add_args(target, args[1:])
                elif type(target) is Var:
                    raise InstantiationError("call/1", "goal is unbound")
                if not isinstance(target, (Atom, Compound)):
                    raise PrologTypeError("callable", format_term(target), "call/1")
                if d + 1 > max_depth:
                    raise BudgetExceeded("depth", max_depth)
                cont = (target, len(stack), d + 1, nxt)
                continue

            key = (name, arity)
            # -- builtins --------------------------------------------------------------
            fn = BUILTINS.get(key)
            if fn is not None:
                if key in NONDET:
                    cp = _ChoicePoint(_GEN, len(s.trail))
                    cp.gen = fn(self, args, d)
                    cp.cont = nxt
                    stack.append(cp)
                    cont = self._backtrack(stack)
                elif fn(self, args, d):
                    cont = nxt
                else:
                    cont = self._backtrack(stack)
                if cont is FAIL:
                    return
                continue

            # -- foreign tools ---------------------------------------------------------
            fp = kb.foreign.get(key)
            if fp is not None:
                if self._call_foreign(fp, args):
                    cont = nxt
                else:
                    cont = self._backtrack(stack)
                    if cont is FAIL:
                        return
                continue

            # -- user predicates -------------------------------------------------------
            clauses = kb._clauses.get(key)
            if clauses is None:
                if key in kb.dynamic:
                    cont = self._backtrack(stack)
                    if cont is FAIL:
                        return
                    continue
                raise ExistenceError(name, arity)
            if d + 1 > max_depth:
                raise BudgetExceeded("depth", max_depth)
            if kb.guarded:
                guard = kb.guarded.get(key)
                if guard is not None:
                    self._check_inputs(name, arity, guard, args)
            cp = _ChoicePoint(_CLAUSES, len(s.trail))
            cp.goal_args = args
            cp.clauses = clauses
            cp.idx = 0
            cp.n = len(clauses)
            cp.depth = d + 1
            cp.barrier = len(stack)
            cp.cont = nxt
            cp.first = _atomic_key(s.deref(args[0])) if args else None
            stack.append(cp)
            cont = self._resume_clauses(cp, stack)
            if cont is FAIL:
                cont = self._backtrack(stack)
                if cont is FAIL:
                    return

    # -- internals -------------------------------------------------------------------
    def _next_candidate(self, cp: _ChoicePoint, i: int) -> int:
        first = cp.first
        clauses = cp.clauses
        n = cp.n
        if first is None:
            return i if i < n else -1
        while i < n:
            fk = compiled(clauses[i]).first_key
            if fk is None or fk == first:
                return i
            i += 1
        return -1

    def _resume_clauses(self, cp: _ChoicePoint, stack: list[_ChoicePoint]):
        s = self.s
        i = self._next_candidate(cp, cp.idx)
        while i >= 0:
            j = self._next_candidate(cp, i + 1)
            if j < 0:
                stack.pop()  # last candidate: drop the choicepoint before trying it
            else:
                cp.idx = j
            c = compiled(cp.clauses[i])
            fresh = [None] * c.nvars
            head = _build(c.head, fresh, c.names)
            ok = True
            if isinstance(head, Compound):
                ga = cp.goal_args
                for x, y in zip(head.args, ga):
                    if not s.unify(x, y):
                        ok = False
                        break
            if ok:
                if c.body is None:
                    return cp.cont
                return (_build(c.body, fresh, c.names), cp.barrier, cp.depth, cp.cont)
            s.undo(cp.mark)
            if j < 0:
                return FAIL
            i = j
        stack.pop()
        return FAIL

    def _backtrack(self, stack: list[_ChoicePoint]):
        s = self.s
        while stack:
            cp = stack[-1]
            s.undo(cp.mark)
            kind = cp.kind
            if kind == _ALT:
                stack.pop()
                return cp.cont
            if kind == _CLAUSES:
                r = self._resume_clauses(cp, stack)
                if r is not FAIL:
                    return r
                continue
            try:
                ok = next(cp.gen)
            except StopIteration:
                stack.pop()
                continue
            if ok:
                return cp.cont
        return FAIL

    def _check_inputs(self, name: str, arity: int, positions, args) -> None:
        for i in positions:
            if not _is_ground(self.s.resolve(args[i])):
                raise InstantiationError(f"{name}/{arity}", f"input argument {i + 1} is not sufficiently instantiated")

    def _call_foreign(self, fp, args) -> bool:
        s = self.s
        vals = [s.resolve(a) for a in args]
        for i in fp.input_positions:
            if not _is_ground(vals[i]):
                raise InstantiationError(
                    f"{fp.name}/{fp.arity}", f"input argument {i + 1} is not sufficiently instantiated"
                )
        result = fp.fn(*vals)
        if result is None or result is False:
            return False
        if result is True:
            return True
        outs = fp.output_positions
        if len(result) != len(outs):
            raise RuntimeError(f"{fp.name}/{fp.arity} returned {len(result)} outputs, expected {len(outs)}")
        mark = len(s.trail)
        for pos, value in zip(outs, result):
            if not s.unify(args[pos], value):
                s.undo(mark)
                return False
        return True

    # -- helpers used by builtins ---------------------------------------------------------
    def sub_solutions(self, goal: Term, depth: int) -> Iterator[bool]:
        """Run ``goal`` as an opaque sub-query sharing this solver's bindings."""
        mark = len(self.s.trail)
        try:
            yield from self.run(goal, depth + 1)
        finally:
            self.s.undo(mark)


def _is_ground(t: Term) -> bool:
    stack = [t]
    while stack:
        x = stack.pop()
        if type(x) is Var:
            return False
        if isinstance(x, Compound) and not isinstance(x, LazyCompound):
            stack.extend(x.args)
    return True


def _add_args(goal: Term, extra) -> Term:
    if type(goal) is Var:
        raise InstantiationError("call/N", "goal is unbound")
    if isinstance(goal, Atom):
        return Compound(goal.name, tuple(extra))
    if isinstance(goal, Compound):
        return Compound(goal.name, goal.args + tuple(extra))
    raise PrologTypeError("callable", format_term(goal), "call/N")


def solve(
    kb: KnowledgeBase,
    goal: Term | str,
    budget: SolveBudget | None = None,
    **kwargs,
) -> Iterator[dict[str, Term]]:
    """Stream the solutions of ``goal`` against ``kb`` as ``{var name: term}`` mappings."""
    return Solver(kb, budget, **kwargs).solve(goal)
