from __future__ import annotations

import io
import itertools
import random
from importlib import resources

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logiplan.errors import (
    BudgetExceeded,
    ExistenceError,
    InstantiationError,
    PermissionError_,
    PrologSyntaxError,
    PrologTypeError,
)
from logiplan.logic import (
    Atom,
    Compound,
    Float,
    Int,
    KnowledgeBase,
    SolveBudget,
    Solver,
    Str,
    Var,
    format_term,
    mklist,
    read_term,
    read_terms,
    solve,
    variant,
)

import oracles

TRANSCRIPT = ["gringotts", "dagoberts_vault", "dagoberts_geldpakhuis", "medici", "tellsons_bank"]


def acquirers_kb() -> KnowledgeBase:
    kb = KnowledgeBase()
    kb.consult(resources.files("logiplan.samples").joinpath("acquirers.pl").read_text())
    return kb


def answers(kb, goal, var="X", **kw):
    return [format_term(s[var]) for s in solve(kb, goal, **kw)]


# -- reader / writer -------------------------------------------------------------------


@pytest.mark.parametrize(
    "src, expected",
    [
        ("a:-b,c", "a :- b, c"),
        ("1 - -1", "1 - -1"),
        ("f(-1)", "f(-1)"),
        ("'hello world'", "'hello world'"),
        ('"str"', '"str"'),
        ("2-(3-4)", "2 - (3 - 4)"),
        ("f((a,b))", "f((a, b))"),
        ("[1,2|[3]]", "[1, 2, 3]"),
        ("{x}", "{x}"),
    ],
)
def test_writer_canonical_text(src, expected):
    assert format_term(read_term(src).term) == expected


def test_reader_reports_position():
    with pytest.raises(PrologSyntaxError) as ei:
        read_term("f(a")
    assert ei.value.line == 1 and ei.value.column == 5


def test_read_terms_splits_clauses():
    items = read_terms("a. b :- c.\n% comment\nd(X) :- X > 1.")
    assert [format_term(t.term, var_names={v.id: n for n, v in t.varnames.items()}) for t in items] == [
        "a", "b :- c", "d(X) :- X > 1"
    ]


def test_quoted_false_drops_quotes():
    assert format_term(Atom("A b"), quoted=False) == "A b"
    assert format_term(Atom("A b")) == "'A b'"


atoms = st.sampled_from(["a", "b", "[]", "hello world", "A", "=", "-", "don't"]).map(Atom)
numbers = st.one_of(st.integers(-50, 50).map(Int), st.sampled_from([0.5, -2.25, 1e20]).map(Float))
leaves = st.one_of(atoms, numbers, st.sampled_from(["s", ""]).map(Str), st.sampled_from([Var("X"), Var("Y")]))
terms = st.recursive(
    leaves,
    lambda kids: st.one_of(
        st.tuples(st.sampled_from(["f", "-", "+", "=", ",", ";", "g h"]), st.lists(kids, min_size=1, max_size=3)).map(
            lambda p: Compound(p[0], tuple(p[1]))
        ),
        st.lists(kids, max_size=3).map(mklist),
    ),
    max_leaves=12,
)


@settings(max_examples=300, deadline=None)
@given(terms)
def test_write_then_read_is_variant(t):
    text = format_term(t)
    assert variant(read_term(text).term, t), text


# -- transcript ------------------------------------------------------------------------


def test_transcript_order():
    kb = acquirers_kb()
    assert answers(kb, "not_in_same_country(lehman_brothers, Y)", "Y") == TRANSCRIPT


def test_same_country_pairs_are_symmetric():
    kb = acquirers_kb()
    pairs = {(format_term(s["X"]), format_term(s["Y"])) for s in solve(kb, "acquirers_in_same_country(X, Y)")}
    assert ("dagoberts_vault", "dagoberts_geldpakhuis") in pairs
    assert all((y, x) in pairs for x, y in pairs)


# -- control ---------------------------------------------------------------------------


def test_cut_commits_to_first_clause():
    kb = KnowledgeBase()
    kb.consult("p(1). p(2). p(3).\nfirst(X) :- p(X), !.\nq(X) :- first(X).\nq(9).")
    assert answers(kb, "first(X)") == ["1"]
    # the cut is local to first/1, q/1 still tries its second clause
    assert answers(kb, "q(X)") == ["1", "9"]


def test_cut_inside_call_is_local():
    kb = KnowledgeBase()
    kb.consult("p(1). p(2).\nr(X) :- call((p(X), !)).\nr(3).")
    assert answers(kb, "r(X)") == ["1", "3"]


def test_if_then_else_and_negation():
    kb = KnowledgeBase()
    kb.consult("p(1). p(2).\nsign(X, S) :- ( X > 0 -> S = pos ; X < 0 -> S = neg ; S = zero ).")
    assert answers(kb, "sign(-3, S)", "S") == ["neg"]
    assert answers(kb, "sign(0, S)", "S") == ["zero"]
    assert answers(kb, "p(X), \\+ X = 1") == ["2"]


def test_user_negate_matches_builtin():
    kb = KnowledgeBase()
    kb.consult("negate(P) :- call(P), !, fail.\nnegate(_).\nq(a).")
    assert list(solve(kb, "negate(q(b))")) and not list(solve(kb, "negate(q(a))"))


def test_findall_collects_in_order():
    kb = acquirers_kb()
    [s] = list(solve(kb, "findall(A, acquirer_country(A, us), L)"))
    assert format_term(s["L"]) == "[the_savings_and_loan_bank, gringbank_of_springfieldotts, lehman_brothers]"
    [s] = list(solve(kb, "findall(A, acquirer_country(A, xx), L)"))
    assert format_term(s["L"]) == "[]"


def test_infinite_generator_is_lazy():
    kb = KnowledgeBase()
    kb.consult("nat(0).\nnat(s(X)) :- nat(X).")
    assert len(list(itertools.islice(solve(kb, "nat(X)"), 5))) == 5


def test_budget_stops_runaway_recursion():
    kb = KnowledgeBase()
    kb.consult("loop :- loop.")
    with pytest.raises(BudgetExceeded):
        list(solve(kb, "loop", SolveBudget(max_steps=1000)))


def test_deep_recursion_does_not_overflow_python_stack():
    kb = KnowledgeBase()
    kb.consult("count(0) :- !.\ncount(N) :- M is N - 1, count(M).")
    assert list(solve(kb, "count(5000)"))


# -- errors ----------------------------------------------------------------------------


def test_unknown_procedure():
    with pytest.raises(ExistenceError):
        list(solve(KnowledgeBase(), "nope(1)"))


def test_is_needs_ground_right_side():
    with pytest.raises(InstantiationError):
        list(solve(KnowledgeBase(), "X is Y + 1"))


def test_is_type_error():
    with pytest.raises(PrologTypeError):
        list(solve(KnowledgeBase(), "X is a + 1"))


def test_builtins_are_protected():
    with pytest.raises(PermissionError_):
        KnowledgeBase().consult("atom(x).")


def test_dynamic_predicate_fails_quietly():
    kb = KnowledgeBase()
    kb.declare_dynamic(("seen", 1))
    assert list(solve(kb, "seen(_)")) == []


def test_write_goes_to_solver_output():
    buf = io.StringIO()
    s = Solver(KnowledgeBase(), out=buf)
    assert list(s.solve("write(hello), nl"))
    assert buf.getvalue() == "hello\n"


# -- datalog oracle ----------------------------------------------------------------------


def _model_by_solving(prog):
    kb = KnowledgeBase()
    for p in prog.preds:
        kb.declare_dynamic((p, prog.arity[p]))
    kb.consult(prog.text())
    out = {}
    for p in prog.preds:
        args = ", ".join("ABCD"[: prog.arity[p]])
        sols = solve(kb, f"{p}({args})")
        out[p] = {tuple(format_term(s[v]) for v in "ABCD"[: prog.arity[p]]) for s in sols}
    return out


@pytest.mark.parametrize("seed", range(50))
def test_solutions_match_bottom_up(seed):
    prog = oracles.random_program(random.Random(seed))
    assert _model_by_solving(prog) == oracles.bottom_up(prog)
