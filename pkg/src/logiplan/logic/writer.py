"""Render terms back to program text that the reader accepts."""

from __future__ import annotations

import math
import re

from .ops import OperatorTable
from .terms import NIL, Atom, Compound, Float, Int, Str, Term, Var

_DEFAULT_OPS = OperatorTable()
_PLAIN_ATOM = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")
_SYMBOL_ATOM = re.compile(r"[+\-*/\\^<>=~:.?@#&$]+\Z")
_SOLO = {"[]", "!", ";", "{}"}
_QUOTE_ESC = {"\\": "\\\\", "\n": "\\n", "\t": "\\t", "\r": "\\r", "\0": "\\0"}


def quote_atom(name: str) -> str:
    if _PLAIN_ATOM.match(name) or name in _SOLO:
        return name
    if _SYMBOL_ATOM.match(name) and name != "." and "%" not in name and not name.startswith("/*"):
        return name
    body = "".join(_QUOTE_ESC.get(c, c) for c in name).replace("'", "\\'")
    return f"'{body}'"


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = repr(x)
    if "e" in s and "." not in s.split("e")[0]:
        mant, exp = s.split("e")
        s = f"{mant}.0e{exp}"
    return s


def _str_literal(s: str) -> str:
    body = "".join(_QUOTE_ESC.get(c, c) for c in s).replace('"', '\\"')
    return f'"{body}"'


class Writer:
    def __init__(
        self,
        quoted: bool = True,
        ops: OperatorTable | None = None,
        var_names: dict[int, str] | None = None,
    ) -> None:
        self.quoted = quoted
        self.ops = ops or _DEFAULT_OPS
        self.var_names = var_names or {}

    def atom(self, name: str) -> str:
        return quote_atom(name) if self.quoted else name

    def write(self, t: Term, max_prec: int = 1200, operand: bool = False) -> str:
        if isinstance(t, Var):
            return self.var_names.get(t.id) or f"_G{t.id}"
        if isinstance(t, Int):
            return str(t.value)
        if isinstance(t, Float):
            return format_float(t.value)
        if isinstance(t, Str):
            return _str_literal(t.value) if self.quoted else t.value
        if isinstance(t, Atom):
            s = self.atom(t.name)
            if operand and self.ops.is_op(t.name):
                return f"({s})"
            return s
        assert isinstance(t, Compound)
        name, args = t.name, t.args
        if name == "." and len(args) == 2:
            return self._list(t)
        if name == "{}" and len(args) == 1:
            return "{" + self.write(args[0], 1200) + "}"
        if len(args) == 2 and name in self.ops.infix:
            op = self.ops.infix[name]
            p = op.priority
            lp = p if op.type == "yfx" else p - 1
            rp = p if op.type == "xfy" else p - 1
            left = self.write(args[0], lp, operand=True)
            right = self.write(args[1], rp, operand=True)
            if name == ",":
                s = f"{left}, {right}"
            else:
                s = f"{left} {self.atom(name)} {right}"
            return f"({s})" if p > max_prec else s
        # -(1) must stay canonical: "- 1" would read back as the integer -1
        numeric_minus = name in ("-", "+") and isinstance(args[0], (Int, Float))
        if len(args) == 1 and name in self.ops.prefix and not numeric_minus:
            op = self.ops.prefix[name]
            p = op.priority
            ap = p if op.type == "fy" else p - 1
            inner = self.write(args[0], ap, operand=True)
            s = f"{self.atom(name)} {inner}"
            return f"({s})" if p > max_prec else s
        inner = ", ".join(self.write(a, 999) for a in args)
        return f"{self.atom(name)}({inner})"

    def _list(self, t: Term) -> str:
        parts = []
        while isinstance(t, Compound) and t.name == "." and len(t.args) == 2:
            parts.append(self.write(t.args[0], 999))
            t = t.args[1]
        if t is NIL:
            return "[" + ", ".join(parts) + "]"
        return "[" + ", ".join(parts) + "|" + self.write(t, 999) + "]"


def format_term(
    t: Term,
    quoted: bool = True,
    var_names: dict[int, str] | None = None,
    ops: OperatorTable | None = None,
    max_prec: int = 1200,
) -> str:
    return Writer(quoted=quoted, ops=ops, var_names=var_names).write(t, max_prec)


def letter_names(vars_) -> dict[int, str]:
    """A, B, ..., Z, A1, B1, ... for pretty listings."""
    names = {}
    for i, v in enumerate(vars_):
        letter = chr(ord("A") + i % 26)
        names[v.id] = letter if i < 26 else f"{letter}{i // 26}"
    return names
