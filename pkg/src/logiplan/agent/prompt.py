"""Rendering the planner prompt."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib.resources import files
from string import Template

from ..evaluator.rubric import DEFAULT_RUBRIC, RubricConfig
from ..logic.kb import KnowledgeBase

SECTIONS = (
    "query",
    "history",
    "assert",
    "foreign-functions",
    "database-schema-description",
    "examples",
    "response-format",
)


def _asset(name: str) -> str:
    return files("logiplan.assets").joinpath(name).read_text(encoding="utf-8")


def default_template() -> str:
    return _asset("prompt_template.txt")


def default_schema_doc() -> str:
    return _asset("schema.txt").rstrip("\n")


def default_examples() -> list[str]:
    return json.loads(_asset("cot_examples.json"))


@dataclass
class PromptContext:
    query: str
    history: list[tuple[str, str]] = field(default_factory=list)
    assert_listing: str = ""
    foreign_listing: str = ""
    schema_doc: str = ""
    examples: list[str] = field(default_factory=list)
    rubric: RubricConfig = DEFAULT_RUBRIC


def render_history(turns) -> str:
    return "\n".join(f"User: {q}\nAnswer: {a}" for q, a in turns)


def assert_listing(kb: KnowledgeBase, provenances=("program", "dataset")) -> str:
    """One line per database predicate: its indicator and first clause as a sample."""
    lines = []
    for key in kb.predicates():
        if kb.provenance(key) not in provenances:
            continue
        clauses = kb.clauses(key) or []
        sample = re.sub(r"\n\s*", " ", clauses[0].to_text(kb.ops)) if clauses else ""
        n = len(clauses)
        lines.append(f"{key[0]}/{key[1]}  % {n} clause{'s' if n != 1 else ''}, e.g. {sample}")
    return "\n".join(lines)


def build_prompt(ctx: PromptContext, template: str | None = None) -> str:
    """Fill the template. The result depends only on ``ctx`` and ``template``."""
    text = Template(template if template is not None else default_template())
    return text.substitute(
        query=ctx.query.strip(),
        history=render_history(ctx.history),
        assert_listing=ctx.assert_listing,
        foreign_listing=ctx.foreign_listing,
        schema_doc=ctx.schema_doc,
        examples="\n\n".join(e.strip() for e in ctx.examples),
        rubric="\n".join(f"- {line}" for line in ctx.rubric.lines()),
    )
