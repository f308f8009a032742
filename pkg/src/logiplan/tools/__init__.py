"""Tool predicates: relation algebra, dataset tools and the registry that exposes them to plans."""

from __future__ import annotations

from .core import ToolEnv
from .registry import ToolRegistry, ToolSpec
from .relation import (
    Relation,
    RelationError,
    RelationTerm,
    aggregate,
    anomaly,
    compile_filter,
    count,
    filter_rel,
    project,
    relation_from_term,
    sort_rel,
)

__all__ = [
    "Relation", "RelationError", "RelationTerm", "ToolEnv", "ToolRegistry", "ToolSpec", "aggregate",
    "anomaly", "compile_filter", "count", "filter_rel", "project", "relation_from_term", "sort_rel",
]
