from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

PREFIX_TYPES = ("fy", "fx")
INFIX_TYPES = ("xfx", "xfy", "yfx")


@dataclass(frozen=True)
class OpDef:
    priority: int
    type: str
    name: str


_DEFAULT_OPS = [
    (1200, "xfx", ":-"),
    (1200, "fx", ":-"),
    (1200, "fx", "?-"),
    (1150, "fx", "dynamic"),
    (1150, "fx", "discontiguous"),
    (1100, "xfy", ";"),
    (1050, "xfy", "->"),
    (1000, "xfy", ","),
    (900, "fy", "\\+"),
    *((700, "xfx", n) for n in (
        "=", "\\=", "==", "\\==", "is", "<", ">", "=<", ">=", "=:=", "=\\=", "=..",
        "@<", "@>", "@=<", "@>=",
    )),
    (500, "yfx", "+"),
    (500, "yfx", "-"),
    (400, "yfx", "*"),
    (400, "yfx", "/"),
    (400, "yfx", "//"),
    (400, "yfx", "mod"),
    (200, "xfy", "^"),
    (200, "fy", "-"),
]


class OperatorTable:
    """Prefix and infix operator definitions keyed by name."""

    def __init__(self, entries=None) -> None:
        self.prefix: dict[str, OpDef] = {}
        self.infix: dict[str, OpDef] = {}
        for p, t, n in _DEFAULT_OPS if entries is None else entries:
            self.add(p, t, n)

    def add(self, priority: int, type_: str, name: str) -> None:
        if not 0 <= priority <= 1200:
            raise ValueError(f"operator priority out of range: {priority}")
        if type_ in PREFIX_TYPES:
            table = self.prefix
        elif type_ in INFIX_TYPES:
            table = self.infix
        else:
            raise ValueError(f"unsupported operator type {type_!r}")
        if priority == 0:
            table.pop(name, None)
        else:
            table[name] = OpDef(priority, type_, name)

    def copy(self) -> "OperatorTable":
        new = OperatorTable(entries=[])
        new.prefix = dict(self.prefix)
        new.infix = dict(self.infix)
        return new

    def is_op(self, name: str) -> bool:
        return name in self.prefix or name in self.infix

    def __iter__(self) -> Iterator[OpDef]:
        # stable order: descending priority, then name, prefix before infix
        entries = list(self.prefix.values()) + list(self.infix.values())
        return iter(sorted(entries, key=lambda d: (-d.priority, d.name, d.type)))
