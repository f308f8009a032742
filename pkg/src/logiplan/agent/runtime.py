"""The agent loop: prompt, plan, score, retry, execute, answer."""

from __future__ import annotations

import io
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..errors import (
    DataError,
    ExecutionError,
    FeeError,
    PlanError,
    PlanRejected,
    PrologError,
    ToolError,
)
from ..evaluator import (
    DEFAULT_RUBRIC,
    Plan,
    PlanEnvelope,
    RubricConfig,
    ScoreReport,
    analyze_program,
    parse_plan_envelope,
    plan_for,
    score,
    violations_from,
)
from ..logic.kb import KnowledgeBase
from ..logic.solver import SolveBudget, Solver
from ..logic.terms import Atom, Compound, Term, from_term
from ..logic.writer import format_term
from ..tools import ToolEnv, ToolRegistry
from ..tools.relation import Relation, RelationError, relation_from_term
from .history import SessionHistory
from .prompt import PromptContext, assert_listing, build_prompt, default_examples, default_schema_doc
from .providers import CompletionProvider, GenerationParams, prompt_key


@dataclass(frozen=True)
class Policy:
    threshold: float = 0.8
    max_retries: int = 3
    params: GenerationParams = GenerationParams()
    budget: SolveBudget = SolveBudget()


@dataclass
class TaskResult:
    answer: str
    report: ScoreReport
    value: Any
    envelope: PlanEnvelope
    trace: list[dict] = field(default_factory=list)
    retries: int = 0


# -- answers --------------------------------------------------------------------------------


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".15g")
    if v is None:
        return "null"
    if isinstance(v, (list, tuple)):
        return ", ".join(_cell(x) for x in v)
    return str(v)


def format_relation(rel: Relation) -> str:
    if len(rel.header) == 1 and len(rel.rows) == 1:
        return _cell(rel.rows[0][0])
    table = [list(rel.header)] + [[_cell(v) for v in r] for r in rel.rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(rel.header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in table)


def _as_relation(t: Term) -> Relation | None:
    if not (isinstance(t, Compound) and t.name == "." and len(t.args) == 2):
        return None
    head = t.args[0]
    if not (isinstance(head, Compound) and head.name == "."):
        return None
    try:
        return relation_from_term(t)
    except (RelationError, ValueError):
        return None


def format_answer(t: Term | None) -> str:
    """Single cells print bare, relations as aligned tables, other values in plain text."""
    if t is None:
        return ""
    rel = _as_relation(t)
    if rel is not None:
        return format_relation(rel)
    try:
        return _cell(from_term(t))
    except ValueError:
        return format_term(t, quoted=False)


# -- execution --------------------------------------------------------------------------------


def execute_plan(plan: Plan, kb: KnowledgeBase, budget: SolveBudget | None = None) -> tuple[Term | None, str]:
    """Run the plan's goals once in a fork of ``kb``; returns (result value, printed output)."""
    work = kb.fork()
    for c in plan.clauses:
        work.assert_clause(c, provenance="llm")
    out = io.StringIO()
    solver = Solver(work, budget=budget, out=out, assert_provenance="llm")
    for _ in solver.run(plan.goal_term()):
        value = solver.s.resolve(plan.result_var) if plan.result_var is not None else Atom("true")
        return value, out.getvalue()
    raise ExecutionError("the plan has no solution")


class Agent:
    """One session: a dataset bound into a knowledge base, a tool registry, and a history."""

    def __init__(
        self,
        dataset=None,
        registry: ToolRegistry | None = None,
        history: SessionHistory | None = None,
        out_dir: str | Path = "out",
        kb: KnowledgeBase | None = None,
        rubric: RubricConfig = DEFAULT_RUBRIC,
        template: str | None = None,
        schema_doc: str | None = None,
        examples: list[str] | None = None,
    ) -> None:
        self.registry = registry or ToolRegistry.load()
        self.history = history if history is not None else SessionHistory()
        self.rubric = rubric
        self.template = template
        self.schema_doc = default_schema_doc() if schema_doc is None else schema_doc
        self.examples = default_examples() if examples is None else examples
        if kb is None:
            kb = KnowledgeBase()
            if dataset is not None:
                dataset.assert_facts(kb)
        env = ToolEnv.for_dataset(dataset, out_dir) if dataset is not None else ToolEnv(out_dir=Path(out_dir))
        self.registry.bind(kb, env)
        self.kb = kb
        self._assert_listing = assert_listing(kb)

    def context(self, query: str) -> PromptContext:
        return PromptContext(
            query=query,
            history=self.history.turns(),
            assert_listing=self._assert_listing,
            foreign_listing=self.registry.listing(),
            schema_doc=self.schema_doc,
            examples=self.examples,
            rubric=self.rubric,
        )

    def prompt(self, query: str) -> str:
        return build_prompt(self.context(query), self.template)

    def evaluate(self, text: str) -> tuple[PlanEnvelope, Plan, ScoreReport]:
        env = parse_plan_envelope(text)
        plan = plan_for(env, self.registry, self.kb)
        vs = violations_from(analyze_program(plan, self.registry, self.kb), self.rubric)
        return env, plan, ScoreReport(score(vs, self.rubric), env.evaluation, vs)

    def run(self, query: str, provider: CompletionProvider, policy: Policy = Policy()) -> TaskResult:
        trace: list[dict] = []
        feedback = ""
        for attempt in range(policy.max_retries + 1):
            asked = query if not feedback else f"{query}\n\n{feedback}"
            prompt = self.prompt(asked)
            step: dict = {"attempt": attempt, "prompt_sha256": prompt_key(prompt)}
            trace.append(step)
            text = provider.send(prompt, policy.params)
            step["response"] = text
            try:
                env, plan, report = self.evaluate(text)
            except PlanError as e:
                step["error"] = str(e)
                feedback = f"The previous reply was rejected: {e}. Reply with a corrected plan."
                continue
            step["report"] = report.to_json()
            if report.score < policy.threshold:
                feedback = report.feedback() + " Reply with a corrected plan."
                continue
            started = time.perf_counter()
            try:
                value, printed = execute_plan(plan, self.kb, policy.budget)
            except (PrologError, ToolError, DataError, FeeError) as e:
                step["error"] = f"{type(e).__name__}: {e}"
                raise ExecutionError(f"plan execution failed: {e}", trace) from e
            except ExecutionError as e:
                step["error"] = str(e)
                raise ExecutionError(str(e), trace) from e
            step["seconds"] = round(time.perf_counter() - started, 6)
            if printed:
                step["output"] = printed
            answer = format_answer(value)
            step["answer"] = answer
            self.history.append(query, answer)
            return TaskResult(answer, report, value, env, trace, retries=attempt)
        raise PlanRejected(
            f"no plan reached score {policy.threshold} after {policy.max_retries + 1} attempt(s)", trace
        )


def run_task(
    query: str,
    provider: CompletionProvider,
    dataset,
    registry: ToolRegistry | None = None,
    policy: Policy = Policy(),
    history: SessionHistory | None = None,
    out_dir: str | Path = "out",
) -> TaskResult:
    return Agent(dataset, registry, history, out_dir).run(query, provider, policy)
