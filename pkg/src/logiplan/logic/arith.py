from __future__ import annotations

import math

from ..errors import EvaluationError, InstantiationError, PrologTypeError
from .terms import Atom, Compound, Float, Int, Term, Var
from .writer import format_term


def _int_div_check(b) -> None:
    if b == 0:
        raise EvaluationError("evaluation error: zero_divisor")


def _divide(a, b):
    _int_div_check(b)
    if isinstance(a, int) and isinstance(b, int):
        return a // b if a % b == 0 else a / b
    return a / b


def _trunc_div(a, b):
    _require_ints("//", a, b)
    _int_div_check(b)
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _rem(a, b):
    return a - b * _trunc_div(a, b)


def _mod(a, b):
    _require_ints("mod", a, b)
    _int_div_check(b)
    return a % b


def _require_ints(op, *xs):
    for x in xs:
        if not isinstance(x, int):
            raise PrologTypeError("integer", format_term(Float(x)), op)


def _power(a, b):
    if isinstance(a, int) and isinstance(b, int):
        if b < 0:
            if a in (1, -1):
                return a ** b if a == 1 or b % 2 == 0 else -1
            return a ** float(b)
        return a ** b
    return float(a) ** float(b)


def _int_power(a, b):
    if isinstance(a, int) and isinstance(b, int) and b < 0 and a not in (1, -1):
        raise PrologTypeError("float", str(a), "^")
    return _power(a, b)


def _to_int(f):
    def wrapped(x):
        if isinstance(x, int):
            return x
        if math.isinf(x) or math.isnan(x):
            raise EvaluationError("evaluation error: undefined")
        return int(f(x))
    return wrapped


def _round(x):
    if isinstance(x, int):
        return x
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def _sign(x):
    if isinstance(x, int):
        return (x > 0) - (x < 0)
    return math.copysign(1.0, x) if x != 0 else 0.0


def _sqrt(x):
    if x < 0:
        raise EvaluationError("evaluation error: undefined")
    return math.sqrt(x)


def _log(x):
    if x <= 0:
        raise EvaluationError("evaluation error: undefined")
    return math.log(x)


BINARY = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _divide,
    "//": _trunc_div,
    "mod": _mod,
    "rem": _rem,
    "min": lambda a, b: b if b < a else a,
    "max": lambda a, b: b if b > a else a,
    "**": _power,
    "^": _int_power,
    "atan2": lambda a, b: math.atan2(a, b),
    "atan": lambda a, b: math.atan2(a, b),
    "log": lambda a, b: _log(b) / _log(a),
    ">>": lambda a, b: a >> b,
    "<<": lambda a, b: a << b,
    "/\\": lambda a, b: a & b,
    "\\/": lambda a, b: a | b,
    "xor": lambda a, b: a ^ b,
}

UNARY = {
    "-": lambda a: -a,
    "+": lambda a: a,
    "abs": abs,
    "sign": _sign,
    "sqrt": _sqrt,
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "asin": math.asin,
    "acos": math.acos,
    "atan": math.atan,
    "exp": math.exp,
    "log": _log,
    "float": float,
    "integer": _round,
    "round": _round,
    "truncate": _to_int(math.trunc),
    "floor": _to_int(math.floor),
    "ceiling": _to_int(math.ceil),
    "float_integer_part": lambda x: float(math.trunc(x)),
    "float_fractional_part": lambda x: x - math.trunc(x),
    "\\": lambda a: ~a,
    "msb": lambda a: a.bit_length() - 1,
}

CONSTANTS = {"pi": math.pi, "e": math.e, "inf": math.inf, "infinite": math.inf, "nan": math.nan, "epsilon": 2.220446049250313e-16, "max_tagged_integer": (1 << 60) - 1}


def evaluate(t: Term, deref) -> int | float:
    """Evaluate an arithmetic expression; ``deref`` resolves variable bindings."""
    t = deref(t)
    if isinstance(t, Int):
        return t.value
    if isinstance(t, Float):
        return t.value
    if isinstance(t, Var):
        raise InstantiationError("is/2", "arithmetic expression is not sufficiently instantiated")
    if isinstance(t, Atom):
        if t.name in CONSTANTS:
            return CONSTANTS[t.name]
        raise PrologTypeError("evaluable", f"{t.name}/0")
    if isinstance(t, Compound):
        if len(t.args) == 2 and t.name in BINARY:
            a = evaluate(t.args[0], deref)
            b = evaluate(t.args[1], deref)
            return BINARY[t.name](a, b)
        if len(t.args) == 1 and t.name in UNARY:
            return UNARY[t.name](evaluate(t.args[0], deref))
        if t.name == "." and len(t.args) == 2 and deref(t.args[1]) == Atom("[]"):
            return evaluate(t.args[0], deref)
        raise PrologTypeError("evaluable", f"{t.name}/{len(t.args)}")
    raise PrologTypeError("evaluable", format_term(t))


def number_term(x: int | float) -> Term:
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, int):
        return Int(x)
    return Float(float(x))
