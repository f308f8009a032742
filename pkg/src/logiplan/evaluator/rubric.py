"""Scoring a plan against the rubric."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..logic.kb import KnowledgeBase
from .analysis import LLM_ASSERT, RELATION_MISUSE, UNINSTANTIATED, Finding, analyze_program
from .envelope import Plan, PlanEnvelope, build_plan, parse_plan_envelope


@dataclass(frozen=True)
class RubricConfig:
    """Penalties per violation kind. A violation listed in ``fatal`` forces the score to 0."""

    penalties: dict = field(default_factory=lambda: {UNINSTANTIATED: 1.0, LLM_ASSERT: 0.2, RELATION_MISUSE: 0.4})
    fatal: frozenset = frozenset({UNINSTANTIATED})

    def lines(self) -> list[str]:
        """Human-readable rubric lines, as shown to the planner."""
        return [
            "Score starts at 1.0.",
            "Calling a foreign predicate with an input argument that is not ground scores 0.0.",
            f"Each predicate the plan asserts itself costs {self.penalties[LLM_ASSERT]:.1f}.",
            f"Applying sort/2, findall/3 or aggregate_all/3 to a relation costs {self.penalties[RELATION_MISUSE]:.1f} per use.",
            "Penalties add up and the score never drops below 0.0.",
        ]


DEFAULT_RUBRIC = RubricConfig()


@dataclass(frozen=True)
class Violation:
    kind: str
    location: str
    penalty: float

    def to_json(self) -> dict:
        return {"kind": self.kind, "location": self.location, "penalty": self.penalty}


def violations_from(findings: list[Finding], config: RubricConfig = DEFAULT_RUBRIC) -> list[Violation]:
    return [Violation(f.kind, f.location, config.penalties.get(f.kind, 0.0)) for f in findings]


def score(violations: list[Violation], config: RubricConfig = DEFAULT_RUBRIC) -> float:
    if any(v.kind in config.fatal for v in violations):
        return 0.0
    total = 1.0 - sum(v.penalty for v in violations)
    return max(0.0, round(total, 10))


@dataclass
class ScoreReport:
    score: float
    claimed: float | None
    violations: list[Violation]

    def to_json(self) -> dict:
        return {
            "score": self.score,
            "claimed": self.claimed,
            "violations": [v.to_json() for v in self.violations],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def feedback(self) -> str:
        """Short text suitable for appending to a retried query."""
        if not self.violations:
            return f"The previous plan scored {self.score:.1f}."
        parts = [f"{v.kind} at {v.location}" for v in self.violations]
        return f"The previous plan scored {self.score:.1f} because of: " + "; ".join(parts) + "."


def plan_for(env: PlanEnvelope, registry, kb: KnowledgeBase) -> Plan:
    from ..logic.builtins import BUILTINS
    from ..logic.kb import CONTROL

    def is_goal(key) -> bool:
        if key in CONTROL or key in BUILTINS or key in kb.foreign:
            return True
        if registry is not None and key in registry:
            return True
        return kb.provenance(key) in ("builtin", "dataset")

    return build_plan(env, is_goal)


def evaluate_plan(
    source: str | PlanEnvelope,
    registry,
    kb: KnowledgeBase | None = None,
    config: RubricConfig = DEFAULT_RUBRIC,
) -> ScoreReport:
    """Parse (if needed), analyse and score one plan. Raises PlanError for rejected plans."""
    env = parse_plan_envelope(source) if isinstance(source, str) else source
    kb = kb if kb is not None else KnowledgeBase()
    plan = plan_for(env, registry, kb)
    vs = violations_from(analyze_program(plan, registry, kb), config)
    return ScoreReport(score(vs, config), env.evaluation, vs)
