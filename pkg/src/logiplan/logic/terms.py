"""Term representation for the logic engine.

Terms are immutable except for variables, which carry no binding themselves:
bindings live in a substitution (``dict`` keyed by variable id) owned by the
solver or by the caller of :func:`unify`.
"""

from __future__ import annotations

import itertools
from typing import Any, Iterable, Iterator

_var_ids = itertools.count()


class Term:
    __slots__ = ()


class Atom(Term):
    __slots__ = ("name",)
    _interned: dict[str, "Atom"] = {}

    def __new__(cls, name: str) -> "Atom":
        atom = cls._interned.get(name)
        if atom is None:
            atom = object.__new__(cls)
            object.__setattr__(atom, "name", name)
            cls._interned[name] = atom
        return atom

    def __eq__(self, other: object) -> bool:
        return self is other

    def __hash__(self) -> int:
        return hash(("atom", self.name))

    def __repr__(self) -> str:
        return f"Atom({self.name!r})"

    def __reduce__(self):
        return (Atom, (self.name,))


class Var(Term):
    __slots__ = ("name", "id")

    def __init__(self, name: str = "_") -> None:
        self.name = name
        self.id = next(_var_ids)

    def __eq__(self, other: object) -> bool:
        return self is other

    def __hash__(self) -> int:
        return self.id

    def __repr__(self) -> str:
        return f"Var({self.name!r}#{self.id})"


class Int(Term):
    __slots__ = ("value",)

    def __init__(self, value: int) -> None:
        self.value = value

    def __eq__(self, other: object) -> bool:
        return type(other) is Int and other.value == self.value

    def __hash__(self) -> int:
        return hash(("int", self.value))

    def __repr__(self) -> str:
        return f"Int({self.value})"


class Float(Term):
    __slots__ = ("value",)

    def __init__(self, value: float) -> None:
        self.value = value

    def __eq__(self, other: object) -> bool:
        return type(other) is Float and other.value == self.value

    def __hash__(self) -> int:
        return hash(("float", self.value))

    def __repr__(self) -> str:
        return f"Float({self.value!r})"


class Str(Term):
    __slots__ = ("value",)

    def __init__(self, value: str) -> None:
        self.value = value

    def __eq__(self, other: object) -> bool:
        return type(other) is Str and other.value == self.value

    def __hash__(self) -> int:
        return hash(("str", self.value))

    def __repr__(self) -> str:
        return f"Str({self.value!r})"


class Compound(Term):
    __slots__ = ("name", "args")

    def __init__(self, name: str, args: Iterable[Term]) -> None:
        self.name = name
        self.args = tuple(args)
        if not self.args:
            raise ValueError("compound terms need at least one argument")

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def indicator(self) -> tuple[str, int]:
        return (self.name, len(self.args))

    def __eq__(self, other: object) -> bool:
        # iterative over list spines so long lists don't hit the recursion limit
        a, b = self, other
        while True:
            if a is b:
                return True
            if not isinstance(b, Compound) or a.name != b.name:
                return False
            aa, ba = a.args, b.args
            if len(aa) != len(ba):
                return False
            for x, y in zip(aa[:-1], ba[:-1]):
                if x != y:
                    return False
            a, b = aa[-1], ba[-1]
            if not isinstance(a, Compound):
                return a == b

    def __hash__(self) -> int:
        h = 0
        t: Term = self
        while isinstance(t, Compound):
            h = hash((h, t.name, len(t.args), tuple(hash(x) for x in t.args[:-1])))
            t = t.args[-1]
        return hash((h, t))

    def __repr__(self) -> str:
        from .writer import format_term

        return f"Compound<{format_term(self)}>"


class LazyCompound(Compound):
    """Marker base for ground compounds whose arguments are produced on demand.

    Subclasses provide an ``args`` property. Traversals that only care about
    variables (resolution, groundness, renaming) skip these terms entirely.
    """

    __slots__ = ()


class LazyList(LazyCompound):
    """A proper, ground list whose cells are converted from a Python sequence when visited."""

    __slots__ = ("_items", "_start", "_convert", "_cell")

    def __init__(self, items, start: int = 0, convert=None) -> None:
        self.name = "."
        self._items = items
        self._start = start
        self._convert = convert or to_term
        self._cell = None

    @property
    def args(self) -> tuple[Term, Term]:
        cell = self._cell
        if cell is None:
            nxt_i = self._start + 1
            tail = LazyList(self._items, nxt_i, self._convert) if nxt_i < len(self._items) else NIL
            cell = self._cell = (self._convert(self._items[self._start]), tail)
        return cell

    def python_items(self) -> list:
        return list(self._items[self._start:])


def lazy_list(items, convert=None) -> Term:
    return LazyList(items, 0, convert) if len(items) else NIL


NIL = Atom("[]")
TRUE = Atom("true")
FALSE = Atom("false")
EMPTY_ATOM = Atom("")


def mklist(items: Iterable[Term], tail: Term = NIL) -> Term:
    items = list(items)
    out = tail
    for item in reversed(items):
        out = Compound(".", (item, out))
    return out


def is_callable(t: Term) -> bool:
    return isinstance(t, (Atom, Compound))


def is_atomic(t: Term) -> bool:
    return isinstance(t, (Atom, Int, Float, Str))


def is_number(t: Term) -> bool:
    return isinstance(t, (Int, Float))


def iter_list(t: Term) -> Iterator[Term]:
    """Yield the elements of a proper list; raises ValueError on a partial or improper list."""
    while isinstance(t, Compound) and t.name == "." and len(t.args) == 2:
        yield t.args[0]
        t = t.args[1]
    if t is not NIL:
        raise ValueError("not a proper list")


def list_items(t: Term) -> list[Term] | None:
    try:
        return list(iter_list(t))
    except ValueError:
        return None


def term_vars(t: Term) -> list[Var]:
    """Distinct variables of a (resolved) term in depth-first, left-to-right order."""
    seen: dict[int, Var] = {}
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            seen.setdefault(x.id, x)
        elif isinstance(x, Compound) and not isinstance(x, LazyCompound):
            stack.extend(reversed(x.args))
    return list(seen.values())


def is_ground(t: Term) -> bool:
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            return False
        if isinstance(x, Compound) and not isinstance(x, LazyCompound):
            stack.extend(x.args)
    return True


def rename_vars(t: Term, mapping: dict[int, Var] | None = None) -> Term:
    """Copy of a resolved term with every variable replaced by a fresh one."""
    if mapping is None:
        mapping = {}

    def walk(x: Term) -> Term:
        if isinstance(x, Var):
            v = mapping.get(x.id)
            if v is None:
                v = mapping[x.id] = Var(x.name)
            return v
        if not isinstance(x, Compound) or isinstance(x, LazyCompound):
            return x
        if x.name == "." and len(x.args) == 2:
            items = []
            cur: Term = x
            while (
                isinstance(cur, Compound)
                and not isinstance(cur, LazyCompound)
                and cur.name == "."
                and len(cur.args) == 2
            ):
                items.append(walk(cur.args[0]))
                cur = cur.args[1]
            out = walk(cur)
            for item in reversed(items):
                out = Compound(".", (item, out))
            return out
        return Compound(x.name, tuple(walk(a) for a in x.args))

    return walk(t)


# -- conversion between Python values and terms ------------------------------------


def to_term(value: Any) -> Term:
    """Convert a plain Python value into a term.

    Strings become atoms (table cells and field names are atoms to plans),
    booleans become ``true``/``false``, ``None`` becomes ``null``, sequences
    become lists.
    """
    if isinstance(value, Term):
        return value
    if value is None:
        return Atom("null")
    if isinstance(value, bool):
        return TRUE if value else FALSE
    if isinstance(value, int):
        return Int(value)
    if isinstance(value, float):
        return Float(value)
    if isinstance(value, str):
        return Atom(value)
    if isinstance(value, (list, tuple)):
        return mklist([to_term(v) for v in value])
    try:
        from decimal import Decimal

        if isinstance(value, Decimal):
            return Float(float(value))
    except ImportError:  # pragma: no cover
        pass
    raise TypeError(f"cannot convert {type(value).__name__} to a term")


def from_term(t: Term) -> Any:
    """Inverse of :func:`to_term` for ground terms. Compounds other than lists are rejected."""
    if isinstance(t, Atom):
        if t is TRUE:
            return True
        if t is FALSE:
            return False
        if t.name == "null":
            return None
        if t is NIL:
            return []
        return t.name
    if isinstance(t, (Int, Float, Str)):
        return t.value
    if isinstance(t, LazyList):
        return list(t.python_items())
    if isinstance(t, Compound) and t.name == "." and len(t.args) == 2:
        items = list_items(t)
        if items is None:
            raise ValueError("partial list cannot be converted")
        return [from_term(x) for x in items]
    if isinstance(t, Var):
        raise ValueError("unbound variable")
    from .writer import format_term

    raise ValueError(f"cannot convert {format_term(t)} to a plain value")
