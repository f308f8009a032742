"""Shared fixed inputs for the prompt golden file and the agent tests."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from logiplan.agent import PromptContext, assert_listing
from logiplan.agent.prompt import default_examples, default_schema_doc
from logiplan.logic import KnowledgeBase
from logiplan.tools import ToolRegistry

GOLDEN = Path(__file__).parent / "golden" / "prompt.txt"


def golden_context() -> PromptContext:
    kb = KnowledgeBase()
    kb.consult(resources.files("logiplan.samples").joinpath("acquirers.pl").read_text())
    return PromptContext(
        query="Which acquirers share a country with gringotts?",
        history=[("How many acquirers are there?", "8"), ("Which country is medici in?", "it")],
        assert_listing=assert_listing(kb),
        foreign_listing=ToolRegistry.load().listing(),
        schema_doc=default_schema_doc(),
        examples=default_examples(),
    )
