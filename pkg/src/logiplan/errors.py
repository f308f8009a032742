"""Exception types shared across the package."""

from __future__ import annotations


class LogiplanError(Exception):
    """Base class for every error raised by this package."""


class PrologError(LogiplanError):
    """An error raised while reading or running a logic program."""


class PrologSyntaxError(PrologError):
    def __init__(self, message: str, line: int, column: int, offset: int) -> None:
        super().__init__(f"syntax error: {message} (line {line}, column {column})")
        self.reason = message
        self.line = line
        self.column = column
        self.offset = offset


class InstantiationError(PrologError):
    def __init__(self, culprit: str, detail: str = "") -> None:
        msg = f"instantiation error in {culprit}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.culprit = culprit


class PrologTypeError(PrologError):
    def __init__(self, expected: str, found: str, culprit: str = "") -> None:
        where = f" in {culprit}" if culprit else ""
        super().__init__(f"type error{where}: expected {expected}, found {found}")
        self.expected = expected
        self.found = found


class ExistenceError(PrologError):
    def __init__(self, name: str, arity: int) -> None:
        super().__init__(f"unknown procedure {name}/{arity}")
        self.name = name
        self.arity = arity


class PermissionError_(PrologError):
    """Attempt to modify a builtin or registered foreign predicate."""


class BudgetExceeded(PrologError):
    def __init__(self, which: str, limit: int) -> None:
        super().__init__(f"solve budget exceeded: {which} > {limit}")
        self.which = which
        self.limit = limit


class EvaluationError(PrologError):
    """Arithmetic failure such as division by zero."""


class ToolError(LogiplanError):
    """A foreign tool rejected its arguments (unknown table, unknown field, bad expression...)."""


class DataError(LogiplanError):
    """Dataset files are missing or do not match the expected schema."""


class FeeError(LogiplanError):
    pass


class PlanError(LogiplanError):
    """The planner's envelope could not be parsed or references unknown predicates."""


class ProviderError(LogiplanError):
    """The completion provider failed to return text."""


class PlanRejected(LogiplanError):
    """No plan reached the score threshold within the retry budget."""

    def __init__(self, message: str, trace: list | None = None) -> None:
        super().__init__(message)
        self.trace = trace or []


class ExecutionError(LogiplanError):
    def __init__(self, message: str, trace: list | None = None) -> None:
        super().__init__(message)
        self.trace = trace or []
