"""Substitutions, unification and standard order of terms."""

from __future__ import annotations

from .terms import Atom, Compound, Float, Int, LazyCompound, Str, Term, Var


class Substitution:
    """Mapping from variable id to term, with a trail so bindings can be undone."""

    __slots__ = ("binding", "trail", "occurs_check")

    def __init__(self, binding: dict[int, Term] | None = None, occurs_check: bool = False) -> None:
        self.binding: dict[int, Term] = dict(binding) if binding else {}
        self.trail: list[int] = []
        self.occurs_check = occurs_check

    def copy(self) -> "Substitution":
        return Substitution(self.binding, self.occurs_check)

    def __len__(self) -> int:
        return len(self.binding)

    def __contains__(self, var: Var) -> bool:
        return var.id in self.binding

    def deref(self, t: Term) -> Term:
        b = self.binding
        while type(t) is Var:
            nxt = b.get(t.id)
            if nxt is None:
                return t
            t = nxt
        return t

    def bind(self, var: Var, t: Term) -> None:
        self.binding[var.id] = t
        self.trail.append(var.id)

    def undo(self, mark: int) -> None:
        trail, b = self.trail, self.binding
        while len(trail) > mark:
            del b[trail.pop()]

    def occurs(self, var: Var, t: Term) -> bool:
        stack = [t]
        while stack:
            x = self.deref(stack.pop())
            if x is var:
                return True
            if isinstance(x, Compound):
                stack.extend(x.args)
        return False

    def unify(self, a: Term, b: Term) -> bool:
        """Unify in place. On failure, partial bindings stay on the trail; callers undo."""
        stack = [(a, b)]
        deref = self.deref
        while stack:
            x, y = stack.pop()
            x = deref(x)
            y = deref(y)
            if x is y:
                continue
            if type(x) is Var:
                if type(y) is not Var and self.occurs_check and self.occurs(x, y):
                    return False
                self.bind(x, y)
                continue
            if type(y) is Var:
                if self.occurs_check and self.occurs(y, x):
                    return False
                self.bind(y, x)
                continue
            if isinstance(x, Compound):
                if not isinstance(y, Compound) or x.name != y.name:
                    return False
                xa, ya = x.args, y.args
                if len(xa) != len(ya):
                    return False
                stack.extend(zip(reversed(xa), reversed(ya)))
                continue
            if x != y:
                return False
        return True

    def resolve(self, t: Term) -> Term:
        """Apply the substitution fully. Cyclic bindings are left as the variable."""
        return _resolve(self, t, set())

    apply = resolve


def _resolve(s: Substitution, t: Term, active: set[int]) -> Term:
    guard = None
    if type(t) is Var:
        d = s.deref(t)
        if type(d) is Var:
            return d
        if t.id in active:
            return t
        guard = t.id
        active.add(guard)
        t = d
    try:
        if not isinstance(t, Compound) or isinstance(t, LazyCompound):
            return t
        if t.name != "." or len(t.args) != 2:
            args = tuple(_resolve(s, a, active) for a in t.args)
            if all(a is b for a, b in zip(args, t.args)):
                return t
            return Compound(t.name, args)
        # list spine: iterate instead of recursing on the tail
        items = []
        guards = []
        cur: Term = t
        while (
            isinstance(cur, Compound)
            and not isinstance(cur, LazyCompound)
            and cur.name == "."
            and len(cur.args) == 2
        ):
            items.append(_resolve(s, cur.args[0], active))
            tail = cur.args[1]
            if type(tail) is Var:
                d = s.deref(tail)
                if type(d) is Var or tail.id in active:
                    cur = tail
                    break
                active.add(tail.id)
                guards.append(tail.id)
                cur = d
            else:
                cur = tail
        out = _resolve(s, cur, active)
        for g in guards:
            active.discard(g)
        for item in reversed(items):
            out = Compound(".", (item, out))
        return out
    finally:
        if guard is not None:
            active.discard(guard)


def unify(t1: Term, t2: Term, s: Substitution | None = None, occurs_check: bool = False) -> Substitution | None:
    """Return an extended copy of ``s`` unifying ``t1`` and ``t2``, or None."""
    out = s.copy() if s is not None else Substitution(occurs_check=occurs_check)
    if s is not None:
        out.occurs_check = occurs_check or s.occurs_check
    if out.unify(t1, t2):
        out.trail = []
        return out
    return None


# -- standard order ------------------------------------------------------------------

def _type_rank(t: Term) -> int:
    if type(t) is Var:
        return 0
    if isinstance(t, (Int, Float)):
        return 1
    if isinstance(t, Atom):
        return 3
    if isinstance(t, Str):
        return 4
    return 5


def compare_terms(a: Term, b: Term, s: Substitution | None = None) -> int:
    """Standard order: Var < Number < Atom < String < Compound."""
    deref = s.deref if s is not None else (lambda x: x)
    while True:
        a = deref(a)
        b = deref(b)
        if a is b:
            return 0
        ra, rb = _type_rank(a), _type_rank(b)
        if ra != rb:
            return -1 if ra < rb else 1
        if ra == 0:
            return -1 if a.id < b.id else (1 if a.id > b.id else 0)
        if ra == 1:
            if a.value != b.value:
                return -1 if a.value < b.value else 1
            # equal value: Float before Int
            if type(a) is type(b):
                return 0
            return -1 if type(a) is Float else 1
        if ra in (3, 4):
            x = a.name if ra == 3 else a.value
            y = b.name if ra == 3 else b.value
            return 0 if x == y else (-1 if x < y else 1)
        if len(a.args) != len(b.args):
            return -1 if len(a.args) < len(b.args) else 1
        if a.name != b.name:
            return -1 if a.name < b.name else 1
        for x, y in zip(a.args[:-1], b.args[:-1]):
            c = compare_terms(x, y, s)
            if c:
                return c
        a, b = a.args[-1], b.args[-1]


def variant(a: Term, b: Term) -> bool:
    """True when the two terms are equal up to consistent variable renaming."""
    m1: dict[int, int] = {}
    m2: dict[int, int] = {}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if type(x) is Var and type(y) is Var:
            if m1.setdefault(x.id, y.id) != y.id or m2.setdefault(y.id, x.id) != x.id:
                return False
            continue
        if isinstance(x, Compound) and isinstance(y, Compound):
            if x.name != y.name or len(x.args) != len(y.args):
                return False
            stack.extend(zip(x.args, y.args))
            continue
        if type(x) is Var or type(y) is Var or x != y:
            return False
    return True
