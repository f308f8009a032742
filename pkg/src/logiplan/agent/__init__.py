"""Planner prompt, completion providers, session history and the task loop."""

from __future__ import annotations

from .history import SessionHistory, history_append
from .prompt import SECTIONS, PromptContext, assert_listing, build_prompt, default_template
from .providers import (
    CompletionProvider,
    GenerationParams,
    HttpProvider,
    PlanBookProvider,
    RejectingProvider,
    ReplayProvider,
    ScriptedProvider,
    prompt_key,
)
from .runtime import Agent, Policy, TaskResult, execute_plan, format_answer, format_relation, run_task

__all__ = [
    "Agent", "CompletionProvider", "GenerationParams", "HttpProvider", "PlanBookProvider", "Policy",
    "PromptContext", "RejectingProvider", "ReplayProvider", "SECTIONS", "ScriptedProvider",
    "SessionHistory", "TaskResult", "assert_listing", "build_prompt", "default_template",
    "execute_plan", "format_answer", "format_relation", "history_append", "prompt_key", "run_task",
]
