"""Builtin predicates implemented in Python.

Each builtin takes ``(solver, args, depth)``. Deterministic ones return a bool;
the ones listed in :data:`NONDET` are generators that perform their bindings
and yield ``True`` once per solution (the solver undoes bindings in between).
"""

from __future__ import annotations

from functools import cmp_to_key
from typing import Callable

from ..errors import InstantiationError, PrologError, PrologTypeError
from .arith import evaluate, number_term
from .kb import clause_from_term
from .terms import (
    NIL,
    Atom,
    Compound,
    Float,
    Int,
    LazyList,
    Str,
    Term,
    Var,
    is_ground,
    list_items,
    mklist,
    rename_vars,
    term_vars,
)
from .unify import compare_terms, variant
from .writer import format_float, format_term

BUILTINS: dict[tuple[str, int], Callable] = {}
NONDET: set[tuple[str, int]] = set()


def builtin(name: str, arity: int, nondet: bool = False):
    def deco(fn):
        BUILTINS[(name, arity)] = fn
        if nondet:
            NONDET.add((name, arity))
        return fn
    return deco


# -- helpers -----------------------------------------------------------------------------


def _deref(solver, t):
    return solver.s.deref(t)


def _unify(solver, a, b) -> bool:
    return solver.s.unify(a, b)


def _resolve(solver, t):
    return solver.s.resolve(t)


def _text(solver, t: Term, culprit: str) -> str:
    """Text of an atom, string, number or code/char list."""
    t = solver.s.deref(t)
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Str):
        return t.value
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, Float):
        return format_float(t.value)
    if type(t) is Var:
        raise InstantiationError(culprit)
    items = list_items(solver.s.resolve(t))
    if items is not None:
        out = []
        for x in items:
            if isinstance(x, Int):
                out.append(chr(x.value))
            elif isinstance(x, Atom) and len(x.name) == 1:
                out.append(x.name)
            else:
                raise PrologTypeError("text", format_term(t), culprit)
        return "".join(out)
    raise PrologTypeError("text", format_term(t), culprit)


def _int_arg(solver, t: Term, culprit: str) -> int:
    t = solver.s.deref(t)
    if type(t) is Var:
        raise InstantiationError(culprit)
    if not isinstance(t, Int):
        raise PrologTypeError("integer", format_term(t), culprit)
    return t.value


def _proper_list(solver, t: Term, culprit: str) -> list[Term]:
    t = solver.s.resolve(t)
    if isinstance(t, LazyList):
        return [t._convert(x) for x in t.python_items()]
    items = list_items(t)
    if items is None:
        if type(_list_tail(t)) is Var:
            raise InstantiationError(culprit, "partial list")
        raise PrologTypeError("list", format_term(t), culprit)
    return items


def _list_tail(t: Term) -> Term:
    while isinstance(t, Compound) and t.name == "." and len(t.args) == 2:
        t = t.args[1]
    return t


def _parse_number(text: str) -> Term | None:
    from .reader import read_term

    try:
        rt = read_term(text.strip())
    except PrologError:
        return None
    t = rt.term
    if isinstance(t, (Int, Float)):
        return t
    if isinstance(t, Compound) and t.name in ("-", "+") and len(t.args) == 1 and isinstance(t.args[0], (Int, Float)):
        v = t.args[0].value
        return number_term(-v if t.name == "-" else v)
    return None


# -- unification and comparison ------------------------------------------------------------


@builtin("=", 2)
def _eq(solver, args, depth):
    return _unify(solver, args[0], args[1])


@builtin("\\=", 2)
def _neq(solver, args, depth):
    s = solver.s
    mark = len(s.trail)
    ok = s.unify(args[0], args[1])
    s.undo(mark)
    return not ok


@builtin("unify_with_occurs_check", 2)
def _unify_oc(solver, args, depth):
    s = solver.s
    saved = s.occurs_check
    s.occurs_check = True
    try:
        return s.unify(args[0], args[1])
    finally:
        s.occurs_check = saved


def _cmp(solver, a, b) -> int:
    return compare_terms(solver.s.resolve(a), solver.s.resolve(b))


@builtin("==", 2)
def _ident(solver, args, depth):
    return _cmp(solver, args[0], args[1]) == 0


@builtin("\\==", 2)
def _not_ident(solver, args, depth):
    return _cmp(solver, args[0], args[1]) != 0


@builtin("@<", 2)
def _lt_std(solver, args, depth):
    return _cmp(solver, args[0], args[1]) < 0


@builtin("@>", 2)
def _gt_std(solver, args, depth):
    return _cmp(solver, args[0], args[1]) > 0


@builtin("@=<", 2)
def _le_std(solver, args, depth):
    return _cmp(solver, args[0], args[1]) <= 0


@builtin("@>=", 2)
def _ge_std(solver, args, depth):
    return _cmp(solver, args[0], args[1]) >= 0


@builtin("compare", 3)
def _compare(solver, args, depth):
    c = _cmp(solver, args[1], args[2])
    return _unify(solver, args[0], Atom("<" if c < 0 else (">" if c > 0 else "=")))


# -- arithmetic ------------------------------------------------------------------------------


@builtin("is", 2)
def _is(solver, args, depth):
    return _unify(solver, args[0], number_term(evaluate(args[1], solver.s.deref)))


def _arith_cmp(op):
    def fn(solver, args, depth):
        a = evaluate(args[0], solver.s.deref)
        b = evaluate(args[1], solver.s.deref)
        return op(a, b)
    return fn


for _name, _op in (
    ("=:=", lambda a, b: a == b),
    ("=\\=", lambda a, b: a != b),
    ("<", lambda a, b: a < b),
    (">", lambda a, b: a > b),
    ("=<", lambda a, b: a <= b),
    (">=", lambda a, b: a >= b),
):
    builtin(_name, 2)(_arith_cmp(_op))


@builtin("succ", 2)
def _succ(solver, args, depth):
    a = _deref(solver, args[0])
    if isinstance(a, Int):
        if a.value < 0:
            raise PrologTypeError("not_less_than_zero", str(a.value), "succ/2")
        return _unify(solver, args[1], Int(a.value + 1))
    b = _int_arg(solver, args[1], "succ/2")
    if b <= 0:
        return False
    return _unify(solver, args[0], Int(b - 1))


@builtin("plus", 3)
def _plus(solver, args, depth):
    a, b, c = (_deref(solver, x) for x in args)
    d = solver.s.deref
    if type(c) is Var:
        return _unify(solver, c, number_term(evaluate(a, d) + evaluate(b, d)))
    if type(b) is Var:
        return _unify(solver, b, number_term(evaluate(c, d) - evaluate(a, d)))
    return _unify(solver, a, number_term(evaluate(c, d) - evaluate(b, d)))


@builtin("between", 3, nondet=True)
def _between(solver, args, depth):
    lo = _int_arg(solver, args[0], "between/3")
    hi_t = _deref(solver, args[1])
    if isinstance(hi_t, Atom) and hi_t.name in ("inf", "infinite"):
        hi = None
    else:
        hi = _int_arg(solver, hi_t, "between/3")
    x = _deref(solver, args[2])
    if isinstance(x, Int):
        if x.value >= lo and (hi is None or x.value <= hi):
            yield True
        return
    if type(x) is not Var:
        raise PrologTypeError("integer", format_term(x), "between/3")
    i = lo
    while hi is None or i <= hi:
        if solver.s.unify(x, Int(i)):
            yield True
        i += 1


# -- type checks -------------------------------------------------------------------------------


def _type_check(name, pred):
    builtin(name, 1)(lambda solver, args, depth: pred(solver.s.deref(args[0])))


_type_check("var", lambda t: type(t) is Var)
_type_check("nonvar", lambda t: type(t) is not Var)
_type_check("atom", lambda t: isinstance(t, Atom))
_type_check("number", lambda t: isinstance(t, (Int, Float)))
_type_check("integer", lambda t: isinstance(t, Int))
_type_check("float", lambda t: isinstance(t, Float))
_type_check("atomic", lambda t: isinstance(t, (Atom, Int, Float, Str)))
_type_check("compound", lambda t: isinstance(t, Compound))
_type_check("callable", lambda t: isinstance(t, (Atom, Compound)))
_type_check("string", lambda t: isinstance(t, Str))


@builtin("is_list", 1)
def _is_list(solver, args, depth):
    t = solver.s.resolve(args[0])
    return t is NIL or isinstance(t, LazyList) or list_items(t) is not None


@builtin("ground", 1)
def _ground(solver, args, depth):
    return is_ground(solver.s.resolve(args[0]))


# -- term construction ----------------------------------------------------------------------------


@builtin("functor", 3)
def _functor(solver, args, depth):
    t = _deref(solver, args[0])
    if type(t) is Var:
        name = _deref(solver, args[1])
        n = _int_arg(solver, args[2], "functor/3")
        if n == 0:
            return _unify(solver, t, name)
        if not isinstance(name, Atom):
            raise PrologTypeError("atom", format_term(name), "functor/3")
        return _unify(solver, t, Compound(name.name, [Var("_") for _ in range(n)]))
    if isinstance(t, Compound):
        return _unify(solver, args[1], Atom(t.name)) and _unify(solver, args[2], Int(len(t.args)))
    return _unify(solver, args[1], t) and _unify(solver, args[2], Int(0))


@builtin("arg", 3, nondet=True)
def _arg(solver, args, depth):
    t = _deref(solver, args[1])
    if not isinstance(t, Compound):
        raise PrologTypeError("compound", format_term(t), "arg/3")
    n = _deref(solver, args[0])
    if isinstance(n, Int):
        if 1 <= n.value <= len(t.args) and solver.s.unify(args[2], t.args[n.value - 1]):
            yield True
        return
    for i, a in enumerate(t.args, 1):
        if solver.s.unify(n, Int(i)) and solver.s.unify(args[2], a):
            yield True
        else:
            continue


@builtin("=..", 2)
def _univ(solver, args, depth):
    t = _deref(solver, args[0])
    if type(t) is not Var:
        if isinstance(t, Compound):
            lst = mklist([Atom(t.name), *t.args])
        else:
            lst = mklist([t])
        return _unify(solver, args[1], lst)
    items = list_items(solver.s.resolve(args[1]))
    if items is None:
        raise InstantiationError("=../2", "both sides unbound or partial list")
    if not items:
        raise PrologError("domain error: non_empty_list in =../2")
    head = solver.s.deref(items[0])
    if len(items) == 1:
        return _unify(solver, t, head)
    if not isinstance(head, Atom):
        if type(head) is Var:
            raise InstantiationError("=../2")
        raise PrologTypeError("atom", format_term(head), "=../2")
    return _unify(solver, t, Compound(head.name, items[1:]))


@builtin("copy_term", 2)
def _copy_term(solver, args, depth):
    return _unify(solver, args[1], rename_vars(solver.s.resolve(args[0])))


@builtin("term_variables", 2)
def _term_variables(solver, args, depth):
    return _unify(solver, args[1], mklist(term_vars(solver.s.resolve(args[0]))))


# -- all-solutions ------------------------------------------------------------------------------


def _collect(solver, template, goal, depth) -> list[Term]:
    out = []
    for _ in solver.sub_solutions(goal, depth):
        out.append(rename_vars(solver.s.resolve(template)))
    return out


@builtin("findall", 3)
def _findall(solver, args, depth):
    return _unify(solver, args[2], mklist(_collect(solver, args[0], args[1], depth)))


@builtin("findall", 4)
def _findall4(solver, args, depth):
    return _unify(solver, args[2], mklist(_collect(solver, args[0], args[1], depth), args[3]))


@builtin("forall", 2)
def _forall(solver, args, depth):
    for _ in solver.sub_solutions(args[0], depth):
        found = False
        for _ in solver.sub_solutions(args[1], depth):
            found = True
            break
        if not found:
            return False
    return True


def _strip_carets(solver, goal):
    bound: list[Term] = []
    goal = solver.s.deref(goal)
    while isinstance(goal, Compound) and goal.name == "^" and len(goal.args) == 2:
        bound.append(goal.args[0])
        goal = solver.s.deref(goal.args[1])
    return goal, bound


def _bag_groups(solver, args, depth, sort_results: bool):
    template, goal = args[0], args[1]
    inner, bound = _strip_carets(solver, goal)
    exclude = {v.id for v in term_vars(solver.s.resolve(mklist([template, *bound])))}
    free = [v for v in term_vars(solver.s.resolve(inner)) if v.id not in exclude]
    witness = mklist(free)
    pairs = _collect(solver, Compound("-", (witness, template)), inner, depth)
    if not pairs:
        return
    if not free:
        items = [p.args[1] for p in pairs]
        if sort_results:
            items = _sorted_unique(items)
        if solver.s.unify(args[2], mklist(items)):
            yield True
        return
    groups: list[tuple[Term, list[Term]]] = []
    ordered = sorted(pairs, key=cmp_to_key(lambda a, b: compare_terms(a.args[0], b.args[0])))
    for p in ordered:
        w, item = p.args
        if groups and variant(groups[-1][0], w):
            groups[-1][1].append(item)
        else:
            groups.append((w, [item]))
    for w, items in groups:
        if sort_results:
            items = _sorted_unique(items)
        mark = len(solver.s.trail)
        if solver.s.unify(witness, w) and solver.s.unify(args[2], mklist(items)):
            yield True
        else:
            solver.s.undo(mark)


@builtin("bagof", 3, nondet=True)
def _bagof(solver, args, depth):
    yield from _bag_groups(solver, args, depth, sort_results=False)


@builtin("setof", 3, nondet=True)
def _setof(solver, args, depth):
    yield from _bag_groups(solver, args, depth, sort_results=True)


@builtin("aggregate_all", 3)
def _aggregate_all(solver, args, depth):
    spec = _deref(solver, args[0])
    goal = args[1]
    if isinstance(spec, Atom) and spec.name == "count":
        n = sum(1 for _ in solver.sub_solutions(goal, depth))
        return _unify(solver, args[2], Int(n))
    if not isinstance(spec, Compound):
        raise PrologError(f"domain error: aggregate spec {format_term(spec)}")
    kind = spec.name
    if kind == "count" and len(spec.args) == 1:
        n = sum(1 for _ in solver.sub_solutions(goal, depth))
        return _unify(solver, args[2], Int(n))
    if kind in ("bag", "set") and len(spec.args) == 1:
        items = _collect(solver, spec.args[0], goal, depth)
        if kind == "set":
            items = _sorted_unique(items)
        return _unify(solver, args[2], mklist(items))
    if kind in ("sum", "max", "min") and len(spec.args) == 1:
        values = []
        for _ in solver.sub_solutions(goal, depth):
            values.append(evaluate(spec.args[0], solver.s.deref))
        if kind == "sum":
            total = 0
            for v in values:
                total += v
            return _unify(solver, args[2], number_term(total))
        if not values:
            return False
        return _unify(solver, args[2], number_term(max(values) if kind == "max" else min(values)))
    if kind in ("max", "min") and len(spec.args) == 2:
        best = None
        for _ in solver.sub_solutions(goal, depth):
            v = evaluate(spec.args[0], solver.s.deref)
            if best is None or (v > best[0] if kind == "max" else v < best[0]):
                best = (v, rename_vars(solver.s.resolve(spec.args[1])))
        if best is None:
            return False
        return _unify(solver, args[2], Compound(kind, (number_term(best[0]), best[1])))
    raise PrologError(f"domain error: aggregate spec {format_term(spec)}")


# -- sorting -----------------------------------------------------------------------------------


def _sorted_unique(items: list[Term]) -> list[Term]:
    ordered = sorted(items, key=cmp_to_key(compare_terms))
    out: list[Term] = []
    for x in ordered:
        if not out or compare_terms(out[-1], x) != 0:
            out.append(x)
    return out


@builtin("sort", 2)
def _sort(solver, args, depth):
    items = _proper_list(solver, args[0], "sort/2")
    return _unify(solver, args[1], mklist(_sorted_unique(items)))


@builtin("msort", 2)
def _msort(solver, args, depth):
    items = _proper_list(solver, args[0], "msort/2")
    return _unify(solver, args[1], mklist(sorted(items, key=cmp_to_key(compare_terms))))


@builtin("sort", 4)
def _sort4(solver, args, depth):
    key = _int_arg(solver, args[0], "sort/4")
    order = _deref(solver, args[1])
    if not isinstance(order, Atom) or order.name not in ("@<", "@>", "@=<", "@>="):
        raise PrologError(f"domain error: order {format_term(order)}")
    items = _proper_list(solver, args[2], "sort/4")

    def k(t):
        if key == 0:
            return t
        if not isinstance(t, Compound) or len(t.args) < key:
            raise PrologTypeError("compound", format_term(t), "sort/4")
        return t.args[key - 1]

    reverse = order.name in ("@>", "@>=")
    ordered = sorted(items, key=cmp_to_key(lambda a, b: compare_terms(k(a), k(b))), reverse=reverse)
    if order.name in ("@<", "@>"):
        dedup: list[Term] = []
        for x in ordered:
            if not dedup or compare_terms(k(dedup[-1]), k(x)) != 0:
                dedup.append(x)
        ordered = dedup
    return _unify(solver, args[3], mklist(ordered))


@builtin("keysort", 2)
def _keysort(solver, args, depth):
    items = _proper_list(solver, args[0], "keysort/2")
    for t in items:
        if not (isinstance(t, Compound) and t.name == "-" and len(t.args) == 2):
            raise PrologTypeError("pair", format_term(t), "keysort/2")
    ordered = sorted(items, key=cmp_to_key(lambda a, b: compare_terms(a.args[0], b.args[0])))
    return _unify(solver, args[1], mklist(ordered))


# -- lists (Python-backed for speed) ----------------------------------------------------------


@builtin("length", 2, nondet=True)
def _length(solver, args, depth):
    t = solver.s.resolve(args[0])
    n = 0
    cur = t
    while isinstance(cur, Compound) and cur.name == "." and len(cur.args) == 2:
        if isinstance(cur, LazyList):
            n += len(cur.python_items())
            cur = NIL
            break
        n += 1
        cur = cur.args[1]
    if cur is NIL:
        if solver.s.unify(args[1], Int(n)):
            yield True
        return
    if type(cur) is not Var:
        return
    want = _deref(solver, args[1])
    if isinstance(want, Int):
        if want.value >= n and solver.s.unify(cur, mklist([Var("_") for _ in range(want.value - n)])):
            yield True
        return
    if type(want) is not Var:
        raise PrologTypeError("integer", format_term(want), "length/2")
    k = n
    while True:
        mark = len(solver.s.trail)
        if solver.s.unify(cur, mklist([Var("_") for _ in range(k - n)])) and solver.s.unify(want, Int(k)):
            yield True
        solver.s.undo(mark)
        k += 1


def _numbers(solver, lst, culprit):
    return [evaluate(x, solver.s.deref) for x in _proper_list(solver, lst, culprit)]


@builtin("sum_list", 2)
def _sum_list(solver, args, depth):
    total = 0
    for v in _numbers(solver, args[0], "sum_list/2"):
        total += v
    return _unify(solver, args[1], number_term(total))


BUILTINS[("sumlist", 2)] = _sum_list


@builtin("max_list", 2)
def _max_list(solver, args, depth):
    xs = _numbers(solver, args[0], "max_list/2")
    return bool(xs) and _unify(solver, args[1], number_term(max(xs)))


@builtin("min_list", 2)
def _min_list(solver, args, depth):
    xs = _numbers(solver, args[0], "min_list/2")
    return bool(xs) and _unify(solver, args[1], number_term(min(xs)))


@builtin("numlist", 3)
def _numlist(solver, args, depth):
    lo = _int_arg(solver, args[0], "numlist/3")
    hi = _int_arg(solver, args[1], "numlist/3")
    if hi < lo:
        return False
    return _unify(solver, args[2], mklist([Int(i) for i in range(lo, hi + 1)]))


@builtin("flatten", 2)
def _flatten(solver, args, depth):
    out: list[Term] = []

    def walk(t):
        t = solver.s.deref(t)
        if t is NIL:
            return
        if isinstance(t, Compound) and t.name == "." and len(t.args) == 2:
            walk(t.args[0])
            walk(t.args[1])
        else:
            out.append(t)

    walk(args[0])
    return _unify(solver, args[1], mklist(out))


# -- atoms and strings -------------------------------------------------------------------------


@builtin("atom_codes", 2)
def _atom_codes(solver, args, depth):
    a = _deref(solver, args[0])
    if type(a) is not Var:
        return _unify(solver, args[1], mklist([Int(ord(c)) for c in _text(solver, a, "atom_codes/2")]))
    return _unify(solver, a, Atom(_text(solver, args[1], "atom_codes/2")))


@builtin("atom_chars", 2)
def _atom_chars(solver, args, depth):
    a = _deref(solver, args[0])
    if type(a) is not Var:
        return _unify(solver, args[1], mklist([Atom(c) for c in _text(solver, a, "atom_chars/2")]))
    return _unify(solver, a, Atom(_text(solver, args[1], "atom_chars/2")))


@builtin("char_code", 2)
def _char_code(solver, args, depth):
    a = _deref(solver, args[0])
    if isinstance(a, Atom):
        return _unify(solver, args[1], Int(ord(a.name)))
    return _unify(solver, a, Atom(chr(_int_arg(solver, args[1], "char_code/2"))))


@builtin("atom_length", 2)
def _atom_length(solver, args, depth):
    return _unify(solver, args[1], Int(len(_text(solver, args[0], "atom_length/2"))))


BUILTINS[("string_length", 2)] = _atom_length


@builtin("atom_concat", 3, nondet=True)
def _atom_concat(solver, args, depth):
    a, b = _deref(solver, args[0]), _deref(solver, args[1])
    if type(a) is not Var and type(b) is not Var:
        if solver.s.unify(args[2], Atom(_text(solver, a, "atom_concat/3") + _text(solver, b, "atom_concat/3"))):
            yield True
        return
    whole = _text(solver, args[2], "atom_concat/3")
    for i in range(len(whole) + 1):
        mark = len(solver.s.trail)
        if solver.s.unify(a, Atom(whole[:i])) and solver.s.unify(b, Atom(whole[i:])):
            yield True
        solver.s.undo(mark)


@builtin("string_concat", 3)
def _string_concat(solver, args, depth):
    return _unify(solver, args[2], Str(_text(solver, args[0], "string_concat/3") + _text(solver, args[1], "string_concat/3")))


@builtin("upcase_atom", 2)
def _upcase_atom(solver, args, depth):
    return _unify(solver, args[1], Atom(_text(solver, args[0], "upcase_atom/2").upper()))


@builtin("downcase_atom", 2)
def _downcase_atom(solver, args, depth):
    return _unify(solver, args[1], Atom(_text(solver, args[0], "downcase_atom/2").lower()))


@builtin("string_upper", 2)
def _string_upper(solver, args, depth):
    return _unify(solver, args[1], Str(_text(solver, args[0], "string_upper/2").upper()))


@builtin("string_lower", 2)
def _string_lower(solver, args, depth):
    return _unify(solver, args[1], Str(_text(solver, args[0], "string_lower/2").lower()))


@builtin("atom_number", 2)
def _atom_number(solver, args, depth):
    a = _deref(solver, args[0])
    if type(a) is Var:
        n = _deref(solver, args[1])
        if type(n) is Var:
            raise InstantiationError("atom_number/2")
        return _unify(solver, a, Atom(_text(solver, n, "atom_number/2")))
    num = _parse_number(_text(solver, a, "atom_number/2"))
    return num is not None and _unify(solver, args[1], num)


@builtin("number_codes", 2)
def _number_codes(solver, args, depth):
    a = _deref(solver, args[0])
    if type(a) is not Var:
        return _unify(solver, args[1], mklist([Int(ord(c)) for c in _text(solver, a, "number_codes/2")]))
    num = _parse_number(_text(solver, args[1], "number_codes/2"))
    if num is None:
        raise PrologError("syntax error: illegal number")
    return _unify(solver, a, num)


@builtin("atom_string", 2)
def _atom_string(solver, args, depth):
    a = _deref(solver, args[0])
    if type(a) is not Var:
        return _unify(solver, args[1], Str(_text(solver, a, "atom_string/2")))
    return _unify(solver, a, Atom(_text(solver, args[1], "atom_string/2")))


@builtin("number_string", 2)
def _number_string(solver, args, depth):
    n = _deref(solver, args[0])
    if type(n) is not Var:
        return _unify(solver, args[1], Str(_text(solver, n, "number_string/2")))
    num = _parse_number(_text(solver, args[1], "number_string/2"))
    return num is not None and _unify(solver, n, num)


@builtin("string_to_atom", 2)
def _string_to_atom(solver, args, depth):
    s = _deref(solver, args[0])
    if type(s) is not Var:
        return _unify(solver, args[1], Atom(_text(solver, s, "string_to_atom/2")))
    return _unify(solver, s, Str(_text(solver, args[1], "string_to_atom/2")))


@builtin("string_chars", 2)
def _string_chars(solver, args, depth):
    s = _deref(solver, args[0])
    if type(s) is not Var:
        return _unify(solver, args[1], mklist([Atom(c) for c in _text(solver, s, "string_chars/2")]))
    return _unify(solver, s, Str(_text(solver, args[1], "string_chars/2")))


@builtin("string_codes", 2)
def _string_codes(solver, args, depth):
    s = _deref(solver, args[0])
    if type(s) is not Var:
        return _unify(solver, args[1], mklist([Int(ord(c)) for c in _text(solver, s, "string_codes/2")]))
    return _unify(solver, s, Str(_text(solver, args[1], "string_codes/2")))


@builtin("term_to_atom", 2)
def _term_to_atom(solver, args, depth):
    t = _deref(solver, args[0])
    if type(t) is not Var:
        return _unify(solver, args[1], Atom(format_term(solver.s.resolve(t))))
    from .reader import read_term

    return _unify(solver, t, read_term(_text(solver, args[1], "term_to_atom/2"), solver.kb.ops).term)


def _sub_text(solver, args, make):
    text = _text(solver, args[0], "sub_atom/5")
    n = len(text)
    sub = _deref(solver, args[4])
    if type(sub) is not Var:
        want = _text(solver, sub, "sub_atom/5")
        k = len(want)
        start = text.find(want)
        while start >= 0:
            mark = len(solver.s.trail)
            if (
                solver.s.unify(args[1], Int(start))
                and solver.s.unify(args[2], Int(k))
                and solver.s.unify(args[3], Int(n - start - k))
            ):
                yield True
            solver.s.undo(mark)
            start = text.find(want, start + 1)
        return
    for b in range(n + 1):
        for k in range(n - b + 1):
            mark = len(solver.s.trail)
            if (
                solver.s.unify(args[1], Int(b))
                and solver.s.unify(args[2], Int(k))
                and solver.s.unify(args[3], Int(n - b - k))
                and solver.s.unify(sub, make(text[b:b + k]))
            ):
                yield True
            solver.s.undo(mark)


@builtin("sub_atom", 5, nondet=True)
def _sub_atom(solver, args, depth):
    yield from _sub_text(solver, args, Atom)


@builtin("sub_string", 5, nondet=True)
def _sub_string(solver, args, depth):
    yield from _sub_text(solver, args, Str)


@builtin("atomic_list_concat", 2)
def _atomic_list_concat2(solver, args, depth):
    parts = [_text(solver, x, "atomic_list_concat/2") for x in _proper_list(solver, args[0], "atomic_list_concat/2")]
    return _unify(solver, args[1], Atom("".join(parts)))


@builtin("atomic_list_concat", 3)
def _atomic_list_concat3(solver, args, depth):
    sep = _text(solver, args[1], "atomic_list_concat/3")
    lst = solver.s.resolve(args[0])
    items = list_items(lst)
    if items is not None and all(type(x) is not Var for x in items):
        return _unify(solver, args[2], Atom(sep.join(_text(solver, x, "atomic_list_concat/3") for x in items)))
    if not sep:
        raise InstantiationError("atomic_list_concat/3", "empty separator in split mode")
    whole = _text(solver, args[2], "atomic_list_concat/3")
    return _unify(solver, lst, mklist([Atom(p) for p in whole.split(sep)]))


@builtin("split_string", 4)
def _split_string(solver, args, depth):
    text = _text(solver, args[0], "split_string/4")
    seps = _text(solver, args[1], "split_string/4")
    pad = _text(solver, args[2], "split_string/4")
    parts = []
    if seps:
        cur = []
        for ch in text:
            if ch in seps:
                parts.append("".join(cur))
                cur = []
            else:
                cur.append(ch)
        parts.append("".join(cur))
    else:
        parts = [text]
    return _unify(solver, args[3], mklist([Str(p.strip(pad) if pad else p) for p in parts]))


# -- database -----------------------------------------------------------------------------------


def _clause_term(solver, t: Term) -> Term:
    t = solver.s.resolve(t)
    if type(t) is Var:
        raise InstantiationError("assert/1")
    return rename_vars(t)


def _do_assert(solver, args, front: bool) -> bool:
    t = _clause_term(solver, args[0])
    head = t.args[0] if isinstance(t, Compound) and t.name == ":-" and len(t.args) == 2 else t
    if type(head) is Var:
        raise InstantiationError("assert/1", "clause head is unbound")
    if not isinstance(head, (Atom, Compound)):
        raise PrologTypeError("callable", format_term(head), "assert/1")
    solver.kb.assert_clause(clause_from_term(t, solver.assert_provenance), front=front)
    return True


@builtin("assert", 1)
def _assert(solver, args, depth):
    return _do_assert(solver, args, front=False)


BUILTINS[("assertz", 1)] = _assert


@builtin("asserta", 1)
def _asserta(solver, args, depth):
    return _do_assert(solver, args, front=True)


def _split_clause(t: Term):
    if isinstance(t, Compound) and t.name == ":-" and len(t.args) == 2:
        return t.args[0], t.args[1]
    return t, Atom("true")


def _indicator_of(t: Term):
    if isinstance(t, Compound):
        return (t.name, len(t.args))
    if isinstance(t, Atom):
        return (t.name, 0)
    if type(t) is Var:
        raise InstantiationError("retract/1")
    raise PrologTypeError("callable", format_term(t), "retract/1")


@builtin("retract", 1)
def _retract(solver, args, depth):
    target = solver.s.resolve(args[0])
    head, body = _split_clause(target)
    key = _indicator_of(solver.s.deref(head))
    for c in list(solver.kb.clauses(key) or ()):
        mark = len(solver.s.trail)
        renamed = rename_vars(c.as_term())
        h, b = _split_clause(renamed)
        if solver.s.unify(head, h) and solver.s.unify(body, b):
            solver.kb.retract_where(key, lambda x, c=c: x is c, limit=1)
            return True
        solver.s.undo(mark)
    return False


@builtin("retractall", 1)
def _retractall(solver, args, depth):
    head = solver.s.resolve(args[0])
    key = _indicator_of(head)
    from .unify import Substitution

    def matches(c):
        s = Substitution()
        return s.unify(head, rename_vars(c.head))

    solver.kb.retract_where(key, matches)
    solver.kb.declare_dynamic(key)
    return True


def _indicator_term(solver, t: Term) -> tuple[str, int]:
    t = solver.s.resolve(t)
    if isinstance(t, Compound) and t.name == "/" and len(t.args) == 2:
        n, a = t.args
        if isinstance(n, Atom) and isinstance(a, Int):
            return (n.name, a.value)
    raise PrologTypeError("predicate_indicator", format_term(t), "dynamic/1")


@builtin("dynamic", 1)
def _dynamic(solver, args, depth):
    t = solver.s.resolve(args[0])
    specs = []
    while isinstance(t, Compound) and t.name == "," and len(t.args) == 2:
        specs.append(t.args[0])
        t = t.args[1]
    specs.append(t)
    for spec in specs:
        items = list_items(spec)
        for one in items if items is not None else [spec]:
            solver.kb.declare_dynamic(_indicator_term(solver, one))
    return True


BUILTINS[("discontiguous", 1)] = lambda solver, args, depth: True


@builtin("current_op", 3, nondet=True)
def _current_op(solver, args, depth):
    for op in list(solver.kb.ops):
        mark = len(solver.s.trail)
        if (
            solver.s.unify(args[0], Int(op.priority))
            and solver.s.unify(args[1], Atom(op.type))
            and solver.s.unify(args[2], Atom(op.name))
        ):
            yield True
        solver.s.undo(mark)


@builtin("op", 3)
def _op(solver, args, depth):
    p = _int_arg(solver, args[0], "op/3")
    t = _deref(solver, args[1])
    names = _deref(solver, args[2])
    items = list_items(names)
    for n in items if items is not None else [names]:
        n = solver.s.deref(n)
        if not isinstance(t, Atom) or not isinstance(n, Atom):
            raise InstantiationError("op/3")
        solver.kb.ops.add(p, t.name, n.name)
    return True


@builtin("current_predicate", 1, nondet=True)
def _current_predicate(solver, args, depth):
    spec = _deref(solver, args[0])
    if type(spec) is not Var and not (isinstance(spec, Compound) and spec.name == "/" and len(spec.args) == 2):
        raise PrologTypeError("predicate_indicator", format_term(spec), "current_predicate/1")
    resolved = solver.s.resolve(spec)
    if is_ground(resolved):
        # a fully specified indicator also sees library predicates
        key = (resolved.args[0], resolved.args[1])
        if isinstance(key[0], Atom) and isinstance(key[1], Int):
            k = (key[0].name, key[1].value)
            if k in solver.kb or k in solver.kb.foreign:
                yield True
        return
    keys = list(solver.kb.predicates()) + [k for k in solver.kb.foreign if k not in solver.kb]
    for name, arity in keys:
        mark = len(solver.s.trail)
        if solver.s.unify(spec, Compound("/", (Atom(name), Int(arity)))):
            yield True
        solver.s.undo(mark)


# -- output ------------------------------------------------------------------------------------


def _write(solver, t, quoted=False):
    solver.out.write(format_term(solver.s.resolve(t), quoted=quoted, ops=solver.kb.ops))
    return True


builtin("write", 1)(lambda solver, args, depth: _write(solver, args[0]))
builtin("print", 1)(lambda solver, args, depth: _write(solver, args[0], quoted=True))
builtin("writeq", 1)(lambda solver, args, depth: _write(solver, args[0], quoted=True))
builtin("write_canonical", 1)(lambda solver, args, depth: _write(solver, args[0], quoted=True))


@builtin("writeln", 1)
def _writeln(solver, args, depth):
    _write(solver, args[0])
    solver.out.write("\n")
    return True


@builtin("nl", 0)
def _nl(solver, args, depth):
    solver.out.write("\n")
    return True


@builtin("tab", 1)
def _tab(solver, args, depth):
    solver.out.write(" " * int(evaluate(args[0], solver.s.deref)))
    return True


def format_directives(solver, fmt: str, fargs: list[Term]) -> str:
    out: list[str] = []
    it = iter(fargs)

    def take():
        try:
            return solver.s.resolve(next(it))
        except StopIteration:
            raise PrologError("format: not enough arguments") from None

    i, n = 0, len(fmt)
    while i < n:
        c = fmt[i]
        if c != "~":
            out.append(c)
            i += 1
            continue
        i += 1
        num = ""
        while i < n and fmt[i].isdigit():
            num += fmt[i]
            i += 1
        if i < n and fmt[i] == "*":
            num = str(evaluate(take(), solver.s.deref))
            i += 1
        if i >= n:
            raise PrologError("format: truncated directive")
        d = fmt[i]
        i += 1
        if d == "w":
            out.append(format_term(take(), quoted=False, ops=solver.kb.ops))
        elif d in ("p", "q"):
            out.append(format_term(take(), quoted=True, ops=solver.kb.ops))
        elif d == "a":
            out.append(_text(solver, take(), "format/2"))
        elif d in ("d", "D"):
            v = take()
            if not isinstance(v, Int):
                v = number_term(evaluate(v, solver.s.deref))
                if not isinstance(v, Int):
                    raise PrologTypeError("integer", format_term(v), "format/2")
            val = v.value
            digits = int(num) if num else 0
            s = str(abs(val))
            if digits:
                s = s.rjust(digits + 1, "0")
                s = s[:-digits] + "." + s[-digits:]
            if d == "D":
                head, _, tail = s.partition(".")
                head = f"{int(head):,}"
                s = head + ("." + tail if tail else "")
            out.append(("-" if val < 0 else "") + s)
        elif d in ("f", "e", "g"):
            v = evaluate(take(), solver.s.deref)
            digits = int(num) if num else 6
            out.append(f"{v:.{digits}{d}}")
        elif d == "s":
            out.append(_text(solver, take(), "format/2"))
        elif d == "n":
            out.append("\n" * (int(num) if num else 1))
        elif d == "c":
            code = evaluate(take(), solver.s.deref)
            out.append(chr(code) * (int(num) if num else 1))
        elif d == "~":
            out.append("~")
        elif d == "i":
            take()
        elif d == "r":
            v = int(evaluate(take(), solver.s.deref))
            base = int(num) if num else 8
            digs = "0123456789abcdefghijklmnopqrstuvwxyz"
            s, x = "", abs(v)
            while True:
                s = digs[x % base] + s
                x //= base
                if not x:
                    break
            out.append(("-" if v < 0 else "") + s)
        elif d in ("t", "|", "+"):
            pass  # column alignment is not supported; fill directives are dropped
        else:
            raise PrologError(f"format: unknown directive ~{d}")
    return "".join(out)


def _format_args(solver, t: Term) -> list[Term]:
    t = solver.s.resolve(t)
    items = list_items(t)
    return items if items is not None else [t]


@builtin("format", 1)
def _format1(solver, args, depth):
    solver.out.write(format_directives(solver, _text(solver, args[0], "format/1"), []))
    return True


@builtin("format", 2)
def _format2(solver, args, depth):
    solver.out.write(format_directives(solver, _text(solver, args[0], "format/2"), _format_args(solver, args[1])))
    return True


@builtin("format", 3)
def _format3(solver, args, depth):
    sink = _deref(solver, args[0])
    text = format_directives(solver, _text(solver, args[1], "format/3"), _format_args(solver, args[2]))
    if isinstance(sink, Compound) and len(sink.args) == 1:
        kind = sink.name
        if kind == "atom":
            return _unify(solver, sink.args[0], Atom(text))
        if kind == "string":
            return _unify(solver, sink.args[0], Str(text))
        if kind == "codes":
            return _unify(solver, sink.args[0], mklist([Int(ord(c)) for c in text]))
        if kind == "chars":
            return _unify(solver, sink.args[0], mklist([Atom(c) for c in text]))
    raise PrologError(f"domain error: format sink {format_term(sink)}")


@builtin("format_atom", 3)
def _format_atom(solver, args, depth):
    text = format_directives(solver, _text(solver, args[0], "format_atom/3"), _format_args(solver, args[1]))
    return _unify(solver, args[2], Atom(text))


@builtin("halt", 0)
def _halt(solver, args, depth):
    raise PrologError("halt/0 is not available inside queries")

