"""Clauses, program parsing and the clause store."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from ..errors import PermissionError_, PrologError
from .ops import OperatorTable
from .reader import Parser, make_error
from .terms import Atom, Compound, Term, Var, term_vars
from .writer import Writer, letter_names

PROVENANCES = ("builtin", "program", "dataset", "llm")

# control constructs and builtins handled inside the solver; clauses may not redefine them
CONTROL = {
    (",", 2), (";", 2), ("->", 2), ("\\+", 1), ("!", 0), ("true", 0), ("fail", 0),
    ("false", 0), ("call", 1), ("call", 2), ("call", 3), ("call", 4), ("call", 5),
    ("call", 6), ("call", 7), ("call", 8), ("findall", 3), ("findall", 4), ("forall", 2),
    ("aggregate_all", 3), ("not", 1),
}


@dataclass(frozen=True)
class Clause:
    head: Term
    body: tuple[Term, ...] = ()
    provenance: str = "program"
    varnames: dict = field(default_factory=dict, compare=False, hash=False, repr=False)
    line: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.head, (Atom, Compound)):
            raise PrologError(f"clause head must be callable, got {type(self.head).__name__}")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def indicator(self) -> tuple[str, int]:
        h = self.head
        return (h.name, len(h.args)) if isinstance(h, Compound) else (h.name, 0)

    @property
    def is_fact(self) -> bool:
        return not self.body

    def body_term(self) -> Term:
        if not self.body:
            return Atom("true")
        out = self.body[-1]
        for g in reversed(self.body[:-1]):
            out = Compound(",", (g, out))
        return out

    def as_term(self) -> Term:
        if not self.body:
            return self.head
        return Compound(":-", (self.head, self.body_term()))

    def to_text(self, ops: OperatorTable | None = None) -> str:
        names = letter_names(term_vars(self.as_term()))
        w = Writer(ops=ops, var_names=names)
        head = w.write(self.head, 1199)
        if not self.body:
            return head + "."
        goals = [w.write(g, 999) for g in self.body]
        return head + " :-\n    " + ",\n    ".join(goals) + "."


@dataclass(frozen=True)
class Directive:
    goal: Term
    varnames: dict = field(default_factory=dict, compare=False, hash=False, repr=False)
    line: int = 0


def flatten_conjunction(t: Term) -> list[Term]:
    out = []
    stack = [t]
    while stack:
        g = stack.pop()
        if isinstance(g, Compound) and g.name == "," and len(g.args) == 2:
            stack.append(g.args[1])
            stack.append(g.args[0])
        else:
            out.append(g)
    return out


def clause_from_term(t: Term, provenance: str = "program", varnames=None, line: int = 0) -> Clause:
    if isinstance(t, Compound) and t.name == ":-" and len(t.args) == 2:
        head, body = t.args
        goals = flatten_conjunction(body)
        if len(goals) == 1 and goals[0] == Atom("true"):
            goals = []
        return Clause(head, tuple(goals), provenance, varnames or {}, line)
    return Clause(t, (), provenance, varnames or {}, line)


def parse_program(
    text: str,
    provenance: str = "program",
    ops: OperatorTable | None = None,
) -> list[Clause | Directive]:
    """Parse program text into clauses and directives, in source order.

    ``:- Goal.`` and ``?- Goal.`` become :class:`Directive` objects; everything
    else becomes a :class:`Clause` tagged with ``provenance``.
    """
    parser = Parser(text, ops)
    out: list[Clause | Directive] = []
    while True:
        start_tok = parser.tok
        rt = parser.read_term()
        if rt is None:
            return out
        t = rt.term
        if isinstance(t, Compound) and t.name in (":-", "?-") and len(t.args) == 1:
            out.append(Directive(t.args[0], rt.varnames, rt.line))
            continue
        head = t.args[0] if isinstance(t, Compound) and t.name == ":-" and len(t.args) == 2 else t
        if not isinstance(head, (Atom, Compound)):
            raise make_error(text, "clause head is not callable", start_tok.start)
        out.append(clause_from_term(t, provenance, rt.varnames, rt.line))


@dataclass
class ForeignPredicate:
    """A predicate implemented in Python.

    ``fn`` receives the dereferenced argument terms and returns ``None``/``False``
    for failure, ``True`` for success without output, or a sequence with one term
    per output (``+``) position.
    """

    name: str
    arity: int
    modes: str
    fn: Callable[..., object]
    doc: str = ""

    @property
    def input_positions(self) -> list[int]:
        return [i for i, m in enumerate(self.modes) if m == "-"]

    @property
    def output_positions(self) -> list[int]:
        return [i for i, m in enumerate(self.modes) if m == "+"]


class KnowledgeBase:
    """Ordered clause store indexed by (name, arity), plus operators and foreign predicates."""

    def __init__(self, ops: OperatorTable | None = None, prelude: bool = True) -> None:
        self.ops = ops or OperatorTable()
        self._clauses: dict[tuple[str, int], list[Clause]] = {}
        self._provenance: dict[tuple[str, int], str] = {}
        self.foreign: dict[tuple[str, int], ForeignPredicate] = {}
        self.dynamic: set[tuple[str, int]] = set()
        self.flags: dict[str, object] = {"occurs_check": False}
        # rule-defined tools whose listed argument positions must be ground on entry
        self.guarded: dict[tuple[str, int], tuple[int, ...]] = {}
        if prelude:
            from .library import load_prelude

            load_prelude(self)

    # -- queries ---------------------------------------------------------------------
    def clauses(self, key: tuple[str, int]) -> list[Clause] | None:
        return self._clauses.get(key)

    def is_defined(self, key: tuple[str, int]) -> bool:
        return key in self._clauses or key in self.dynamic

    def provenance(self, key: tuple[str, int]) -> str | None:
        return self._provenance.get(key)

    def predicates(self, include_builtin: bool = False) -> Iterator[tuple[str, int]]:
        for key in list(self._clauses):
            if include_builtin or self._provenance.get(key) != "builtin":
                yield key

    def __contains__(self, key: tuple[str, int]) -> bool:
        return key in self._clauses

    # -- updates ---------------------------------------------------------------------
    def _check_writable(self, key: tuple[str, int], provenance: str) -> None:
        from .builtins import BUILTINS

        if key in CONTROL or key in BUILTINS:
            raise PermissionError_(f"cannot modify builtin predicate {key[0]}/{key[1]}")
        if key in self.foreign:
            raise PermissionError_(f"cannot modify foreign predicate {key[0]}/{key[1]}")
        if provenance != "builtin" and self._provenance.get(key) == "builtin":
            raise PermissionError_(f"cannot modify library predicate {key[0]}/{key[1]}")

    def assert_clause(self, clause: Clause | Term, provenance: str | None = None, front: bool = False) -> Clause:
        """Append (or prepend with ``front``) a clause; returns the stored clause."""
        if not isinstance(clause, Clause):
            clause = clause_from_term(clause, provenance or "program")
        elif provenance is not None and provenance != clause.provenance:
            clause = Clause(clause.head, clause.body, provenance, clause.varnames, clause.line)
        key = clause.indicator
        self._check_writable(key, clause.provenance)
        existing = self._clauses.get(key)
        if existing is None:
            self._clauses[key] = [clause]
            self._provenance[key] = clause.provenance
        elif front:
            # copy-on-write keeps solver snapshots of the old list valid
            self._clauses[key] = [clause] + existing
        else:
            existing.append(clause)
        return clause

    def consult(self, text: str, provenance: str = "program") -> list[Directive]:
        """Add every clause of ``text``; directives are returned for the caller to run."""
        directives = []
        for item in parse_program(text, provenance, self.ops):
            if isinstance(item, Directive):
                directives.append(item)
            else:
                self.assert_clause(item)
        return directives

    def retract_where(self, key: tuple[str, int], pred: Callable[[Clause], bool], limit: int | None = None) -> int:
        existing = self._clauses.get(key)
        if not existing:
            return 0
        self._check_writable(key, "program")
        kept, removed = [], 0
        for c in existing:
            if (limit is None or removed < limit) and pred(c):
                removed += 1
            else:
                kept.append(c)
        self._clauses[key] = kept
        return removed

    def declare_dynamic(self, key: tuple[str, int]) -> None:
        self.dynamic.add(key)

    def guard_inputs(self, key: tuple[str, int], positions: Sequence[int]) -> None:
        self.guarded[key] = tuple(positions)

    def register_foreign(self, fp: ForeignPredicate, replace: bool = False) -> None:
        key = (fp.name, fp.arity)
        if len(fp.modes) != fp.arity:
            raise ValueError(f"{fp.name}/{fp.arity}: modes {fp.modes!r} do not match arity")
        if key in self._clauses:
            raise PermissionError_(f"{fp.name}/{fp.arity} is already defined by clauses")
        if key in self.foreign and not replace:
            raise PermissionError_(f"foreign predicate {fp.name}/{fp.arity} already registered")
        self.foreign[key] = fp

    def fork(self) -> "KnowledgeBase":
        """Copy whose clause lists can be extended without touching this one."""
        new = KnowledgeBase.__new__(KnowledgeBase)
        new.ops = self.ops.copy()
        new._clauses = {k: list(v) for k, v in self._clauses.items()}
        new._provenance = dict(self._provenance)
        new.foreign = dict(self.foreign)
        new.dynamic = set(self.dynamic)
        new.flags = dict(self.flags)
        new.guarded = dict(self.guarded)
        return new

    # -- listing ---------------------------------------------------------------------
    def listing(self, keys: Iterable[tuple[str, int]] | None = None, provenances: Sequence[str] | None = None) -> str:
        out = []
        for key in keys if keys is not None else self.predicates():
            if provenances is not None and self._provenance.get(key) not in provenances:
                continue
            for c in self._clauses.get(key, ()):
                out.append(c.to_text(self.ops))
            out.append("")
        return "\n".join(out)


def var_names_of(varnames: dict[str, Var]) -> dict[int, str]:
    return {v.id: n for n, v in varnames.items()}
