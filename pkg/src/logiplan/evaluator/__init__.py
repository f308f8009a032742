"""Plan envelopes, static plan analysis and rubric scoring."""

from __future__ import annotations

from .analysis import LLM_ASSERT, RELATION_MISUSE, UNINSTANTIATED, Analyzer, Finding, analyze_program
from .envelope import FIELDS, Plan, PlanEnvelope, build_plan, parse_plan_envelope
from .rubric import (
    DEFAULT_RUBRIC,
    RubricConfig,
    ScoreReport,
    Violation,
    evaluate_plan,
    plan_for,
    score,
    violations_from,
)

__all__ = [
    "Analyzer", "DEFAULT_RUBRIC", "FIELDS", "Finding", "LLM_ASSERT", "Plan", "PlanEnvelope",
    "RELATION_MISUSE", "RubricConfig", "ScoreReport", "UNINSTANTIATED", "Violation",
    "analyze_program", "build_plan", "evaluate_plan", "parse_plan_envelope", "plan_for",
    "score", "violations_from",
]
