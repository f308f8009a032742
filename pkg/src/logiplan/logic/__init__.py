"""A small Prolog engine: terms, reader, writer, clause store and SLD solver."""

from __future__ import annotations

from .kb import Clause, Directive, ForeignPredicate, KnowledgeBase, parse_program
from .ops import OperatorTable
from .reader import read_term, read_terms
from .solver import SolveBudget, Solver, solve
from .terms import NIL, Atom, Compound, Float, Int, Str, Term, Var, from_term, mklist, to_term
from .unify import Substitution, compare_terms, unify, variant
from .writer import format_term

__all__ = [
    "Atom", "Clause", "Compound", "Directive", "Float", "ForeignPredicate", "Int",
    "KnowledgeBase", "NIL", "OperatorTable", "SolveBudget", "Solver", "Str",
    "Substitution", "Term", "Var", "compare_terms", "format_term", "from_term",
    "mklist", "parse_program", "read_term", "read_terms", "solve", "to_term",
    "unify", "variant",
]
