"""Command-line entry point: ``logiplan <subcommand> ...``.

Exit codes: 0 success, 1 user error (bad flags, bad input, failed plan), 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path
from typing import Iterator, TextIO

from .errors import LogiplanError, PlanRejected, ExecutionError
from .logic import KnowledgeBase, Solver, read_term
from .logic.kb import var_names_of
from .logic.terms import Term, Var
from .logic.writer import format_term

DATA_ENV = "LOGIPLAN_DATA_DIR"


class UsageError(LogiplanError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


# -- solution printing --------------------------------------------------------------------


def _solution_text(bindings: dict[str, Term], names: dict[int, str]) -> str:
    shown = [(n, v) for n, v in bindings.items() if not (isinstance(v, Var) and names.get(v.id) == n)]
    if not shown:
        return "true"
    return ",\n".join(f"{n} = {format_term(v, var_names=names)}" for n, v in shown)


def iter_solutions(kb: KnowledgeBase, goal_text: str, out: TextIO) -> Iterator[str]:
    rt = read_term(goal_text, kb.ops)
    names = var_names_of(rt.varnames)
    solver = Solver(kb, out=out)
    for bindings in solver.solve(rt.term, rt.varnames):
        yield _solution_text(bindings, names)


def print_all(kb: KnowledgeBase, goal_text: str, out: TextIO) -> int:
    """Print every solution, ';' between them and '.' after the last; 'false.' when none."""
    pending = None
    count = 0
    for text in iter_solutions(kb, goal_text, out):
        if pending is not None:
            out.write(pending + " ;\n")
        pending = text
        count += 1
    out.write((pending + ".\n") if pending is not None else "false.\n")
    return count


def _goal_text(text: str) -> str:
    text = text.strip()
    if text.startswith("?-"):
        text = text[2:].strip()
    return text if text.endswith(".") else text + "."


# -- helpers ------------------------------------------------------------------------------


def _consult_files(kb: KnowledgeBase, files, out: TextIO) -> None:
    for f in files or ():
        text = Path(f).read_text(encoding="utf-8")
        for d in kb.consult(text, provenance="program"):
            try:
                for _ in Solver(kb, out=out).run(d.goal):
                    break
                else:
                    print(f"Warning: {f}:{d.line}: directive failed", file=sys.stderr)
            except LogiplanError as e:
                print(f"Warning: {f}:{d.line}: {e}", file=sys.stderr)


def _data_dir(args) -> str | None:
    return args.data or os.environ.get(DATA_ENV)


def _load(args, kb: KnowledgeBase | None = None):
    from .dabstep import load_dataset

    d = _data_dir(args)
    if not d:
        raise UsageError(f"no dataset: pass --data DIR or set {DATA_ENV}")
    return load_dataset(d, kb)


def _kb_with_tools(args, out_dir="out") -> KnowledgeBase:
    """A knowledge base with the dataset facts and tools bound when a dataset is available."""
    from .tools import ToolEnv, ToolRegistry

    kb = KnowledgeBase()
    if _data_dir(args):
        ds = _load(args)
        ds.assert_facts(kb)
        ToolRegistry.load().bind(kb, ToolEnv.for_dataset(ds, out_dir))
    return kb


def _emit(args, obj, text: str, out: TextIO) -> None:
    if getattr(args, "json", False):
        out.write(json.dumps(obj, indent=2, default=str) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


# -- subcommands --------------------------------------------------------------------------


def cmd_repl(args, out: TextIO) -> int:
    kb = _kb_with_tools(args)
    _consult_files(kb, args.consult, out)
    interactive = sys.stdin.isatty()
    while True:
        if interactive:
            out.write("?- ")
            out.flush()
        line = sys.stdin.readline()
        if not line:
            break
        if not line.strip():
            continue
        try:
            sols = iter_solutions(kb, _goal_text(line), out)
            text = next(sols, None)
            if text is None:
                out.write("false.\n")
                continue
            while True:
                nxt = next(sols, None)
                if nxt is None:
                    out.write(text + ".\n")
                    break
                if interactive:
                    out.write(text + " ")
                    out.flush()
                    answer = sys.stdin.readline().strip()
                    if answer != ";":
                        out.write(".\n")
                        break
                    out.write(";\n")
                else:
                    out.write(text + " ;\n")
                text = nxt
        except LogiplanError as e:
            out.write(f"ERROR: {e}\n")
    return 0


def cmd_consult(args, out: TextIO) -> int:
    kb = KnowledgeBase()
    _consult_files(kb, [args.file], out)
    n = sum(len(kb.clauses(k) or ()) for k in kb.predicates())
    if args.json:
        _emit(args, {"file": args.file, "clauses": n, "predicates": [f"{k[0]}/{k[1]}" for k in kb.predicates()]}, "", out)
    else:
        out.write(f"% {args.file}: {n} clauses\n")
        if args.listing:
            out.write(kb.listing(provenances=["program"]))
    return 0


def cmd_query(args, out: TextIO) -> int:
    kb = _kb_with_tools(args)
    _consult_files(kb, args.consult, out)
    goal = _goal_text(args.goal)
    if args.json:
        sols = []
        rt = read_term(goal, kb.ops)
        names = var_names_of(rt.varnames)
        for b in Solver(kb, out=sys.stderr).solve(rt.term, rt.varnames):
            sols.append({n: format_term(v, var_names=names) for n, v in b.items()})
        _emit(args, {"goal": goal, "solutions": sols}, "", out)
        return 0
    print_all(kb, goal, out)
    return 0


def cmd_ingest(args, out: TextIO) -> int:
    started = time.perf_counter()
    ds = _load(args)
    elapsed = time.perf_counter() - started
    counts = {name: len(rel.rows) for name, rel in ds.tables().items()}
    text = "\n".join(f"{k}: {v}" for k, v in counts.items()) + f"\n% loaded in {elapsed:.2f}s"
    _emit(args, {"tables": counts, "seconds": round(elapsed, 3)}, text, out)
    return 0


def _provider(args):
    from .agent import HttpProvider, PlanBookProvider, ReplayProvider

    if getattr(args, "replay", None):
        record = HttpProvider() if getattr(args, "record", False) else None
        return ReplayProvider(args.replay, record=record)
    if getattr(args, "plans", None):
        return PlanBookProvider.load(args.plans)
    return HttpProvider()


def _policy(args):
    from .agent import Policy

    return Policy(threshold=args.threshold, max_retries=args.max_retries)


def cmd_run_task(args, out: TextIO) -> int:
    from .agent import Agent

    agent = Agent(_load(args), out_dir=args.out)
    try:
        res = agent.run(args.query, _provider(args), _policy(args))
    except (PlanRejected, ExecutionError) as e:
        if args.json:
            _emit(args, {"error": str(e), "trace": e.trace}, "", out)
        raise
    obj = {"answer": res.answer, "report": res.report.to_json(), "retries": res.retries, "trace": res.trace}
    _emit(args, obj, res.answer, out)
    return 0


def cmd_eval_plan(args, out: TextIO) -> int:
    from .evaluator import evaluate_plan
    from .tools import ToolRegistry

    kb = KnowledgeBase()
    if _data_dir(args):
        _load(args).assert_facts(kb)
    for f in args.consult or ():
        kb.consult(Path(f).read_text(encoding="utf-8"))
    report = evaluate_plan(Path(args.file).read_text(encoding="utf-8"), ToolRegistry.load(), kb)
    lines = [f"score: {report.score}", f"claimed: {report.claimed}"]
    lines += [f"- {v.kind} ({v.penalty}) at {v.location}" for v in report.violations]
    _emit(args, report.to_json(), "\n".join(lines), out)
    return 0


def normalize_answer(text: str) -> str:
    return " ".join(str(text).split()).lower()


def cmd_bench(args, out: TextIO) -> int:
    from .agent import Agent, SessionHistory

    tasks = json.loads(Path(args.tasks).read_text(encoding="utf-8"))
    if not isinstance(tasks, list) or not all(isinstance(t, dict) and "question" in t and "answer" in t for t in tasks):
        raise UsageError(f"{args.tasks}: expected a JSON array of {{question, guidance, answer}} objects")
    agent = Agent(_load(args), out_dir=args.out)
    provider = _provider(args)
    policy = _policy(args)
    results = []
    for i, t in enumerate(tasks, 1):
        agent.history = SessionHistory()
        query = t["question"] + ("\n" + t["guidance"] if t.get("guidance") else "")
        started = time.perf_counter()
        try:
            answer = agent.run(query, provider, policy).answer
            error = None
        except LogiplanError as e:
            answer, error = None, str(e)
        elapsed = time.perf_counter() - started
        ok = answer is not None and normalize_answer(answer) == normalize_answer(t["answer"])
        results.append({"task": i, "expected": t["answer"], "answer": answer, "correct": ok,
                        "seconds": round(elapsed, 3), "error": error})
    correct = sum(r["correct"] for r in results)
    lines = [
        f"[{'ok' if r['correct'] else 'FAIL'}] task {r['task']}: got {r['answer'] if r['error'] is None else 'error: ' + r['error']!s}"
        f" expected {r['expected']} ({r['seconds']}s)"
        for r in results
    ]
    lines.append(f"accuracy: {correct}/{len(results)}" + (f" = {correct / len(results):.3f}" if results else ""))
    _emit(args, {"results": results, "correct": correct, "total": len(results)}, "\n".join(lines), out)
    return 0


def cmd_gen_fixture(args, out: TextIO) -> int:
    from .dabstep import write_fixture

    write_fixture(args.out, seed=args.seed, payments=args.payments, rules=args.rules)
    _emit(args, {"out": args.out, "seed": args.seed, "payments": args.payments},
          f"wrote fixture (seed {args.seed}, {args.payments} payments) to {args.out}", out)
    return 0


# -- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="logiplan", description="Logic-program planner over payment data.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_, data=False, agent=False):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--json", action="store_true", help="structured output")
        if data or agent:
            sp.add_argument("--data", help=f"dataset directory (default ${DATA_ENV})")
        if agent:
            sp.add_argument("--replay", help="replay directory of <sha256>.json responses")
            sp.add_argument("--record", action="store_true", help="with --replay: fetch misses over HTTP and save them")
            sp.add_argument("--plans", help="plan book JSON used instead of a live model")
            sp.add_argument("--threshold", type=float, default=0.8)
            sp.add_argument("--max-retries", type=int, default=3)
            sp.add_argument("--out", default="out", help="directory for view files")
        return sp

    sp = add("repl", cmd_repl, "interactive goal prompt", data=True)
    sp.add_argument("-c", "--consult", action="append", help="program file to load first")
    sp = add("consult", cmd_consult, "load a program and report it")
    sp.add_argument("file")
    sp.add_argument("--listing", action="store_true", help="print the loaded clauses")
    sp = add("query", cmd_query, "print all solutions of a goal", data=True)
    sp.add_argument("-g", "--goal", required=True)
    sp.add_argument("-c", "--consult", action="append", help="program file to load first")
    add("ingest", cmd_ingest, "load the dataset and print table sizes", data=True)
    sp = add("run-task", cmd_run_task, "answer a question with the planner loop", agent=True)
    sp.add_argument("-q", "--query", required=True)
    sp = add("eval-plan", cmd_eval_plan, "score a plan envelope", data=True)
    sp.add_argument("file")
    sp.add_argument("-c", "--consult", action="append", help="program file whose predicates the plan may use")
    sp = add("bench", cmd_bench, "run a task file and report exact-match accuracy", agent=True)
    sp.add_argument("--tasks", required=True)
    sp = add("gen-fixture", cmd_gen_fixture, "write the synthetic dataset")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--payments", type=int, default=1000)
    sp.add_argument("--rules", type=int, default=20)
    return p


def main(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args, out)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return 1
    except (LogiplanError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1
    except Exception as e:  # noqa: BLE001 - last-resort boundary
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
