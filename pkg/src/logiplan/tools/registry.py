"""The tool registry: mode-annotated tool specs loaded from a JSON manifest and bound into a knowledge base."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import Iterable, Iterator

from ..logic.kb import ForeignPredicate, KnowledgeBase
from ..logic.terms import Term
from .core import CORE, ToolEnv, view_stub
from .relation import Relation, python_value, relation_from_term

KINDS = ("data", "algorithm", "view")
IMPLEMENTATIONS = ("core", "composed", "view-stub")
ARG_TYPES = ("relation", "atom", "value")
REQUIRED = ("query_data", "filter", "project", "count", "anomaly", "aggregate", "sort_rel")


@dataclass(frozen=True)
class ToolSpec:
    name: str
    arity: int
    modes: str
    kind: str
    implementation: str
    types: tuple[str, ...] = ()
    signature: str = ""
    doc: str = ""
    definition: str = ""

    def __post_init__(self) -> None:
        if len(self.modes) != self.arity or set(self.modes) - {"-", "+"}:
            raise ValueError(f"{self.name}/{self.arity}: modes {self.modes!r} must be one '-' or '+' per argument")
        if self.kind not in KINDS:
            raise ValueError(f"{self.name}: unknown kind {self.kind!r}")
        if self.implementation not in IMPLEMENTATIONS:
            raise ValueError(f"{self.name}: unknown implementation {self.implementation!r}")
        types = self.types or ("value",) * self.arity
        if len(types) != self.arity or set(types) - set(ARG_TYPES):
            raise ValueError(f"{self.name}: types must list one of {ARG_TYPES} per argument")
        object.__setattr__(self, "types", tuple(types))
        if self.implementation == "composed" and not self.definition:
            raise ValueError(f"{self.name}: composed tools need a definition")
        if self.implementation == "core" and self.name not in CORE:
            raise ValueError(f"{self.name}: no core implementation")

    @property
    def key(self) -> tuple[str, int]:
        return (self.name, self.arity)

    @property
    def inputs(self) -> list[int]:
        return [i for i, m in enumerate(self.modes) if m == "-"]

    @property
    def outputs(self) -> list[int]:
        return [i for i, m in enumerate(self.modes) if m == "+"]

    def relation_outputs(self) -> list[int]:
        return [i for i in self.outputs if self.types[i] == "relation"]

    def listing(self) -> str:
        sig = self.signature or f"{self.name}/{self.arity}"
        return f"{sig}  % {self.doc}" if self.doc else sig

    @classmethod
    def from_json(cls, obj: dict) -> "ToolSpec":
        return cls(
            name=obj["name"],
            arity=int(obj["arity"]),
            modes=obj["modes"],
            kind=obj["kind"],
            implementation=obj["implementation"],
            types=tuple(obj.get("types", ())),
            signature=obj.get("signature", ""),
            doc=obj.get("doc", ""),
            definition=obj.get("definition", ""),
        )


class ToolRegistry:
    """Ordered, read-only collection of tool specs."""

    def __init__(self, specs: Iterable[ToolSpec]) -> None:
        self._specs: list[ToolSpec] = []
        self._by_key: dict[tuple[str, int], ToolSpec] = {}
        for s in specs:
            if s.key in self._by_key:
                raise ValueError(f"duplicate tool {s.name}/{s.arity}")
            self._specs.append(s)
            self._by_key[s.key] = s
        missing = [n for n in REQUIRED if not any(s.name == n for s in self._specs)]
        if missing:
            raise ValueError(f"registry lacks required tool(s): {', '.join(missing)}")

    @classmethod
    def load(cls, path: str | Path | None = None) -> "ToolRegistry":
        if path is None:
            text = files("logiplan.assets").joinpath("manifest.json").read_text(encoding="utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        data = json.loads(text)
        entries = data["tools"] if isinstance(data, dict) else data
        return cls(ToolSpec.from_json(e) for e in entries)

    def __iter__(self) -> Iterator[ToolSpec]:
        return iter(self._specs)

    def __len__(self) -> int:
        return len(self._specs)

    def __contains__(self, key) -> bool:
        return key in self._by_key

    def get(self, key: tuple[str, int]) -> ToolSpec | None:
        return self._by_key.get(key)

    def listing(self) -> str:
        return "\n".join(s.listing() for s in self._specs)

    def bind(self, kb: KnowledgeBase, env: ToolEnv) -> KnowledgeBase:
        """Make every tool callable from ``kb``: core and view tools as foreign predicates,
        composed tools as library rules whose inputs are checked on entry."""
        for spec in self._specs:
            if spec.implementation == "composed":
                kb.consult(spec.definition, provenance="builtin")
                kb.guard_inputs(spec.key, spec.inputs)
                continue
            impl = CORE[spec.name] if spec.implementation == "core" else view_stub(spec.name)
            kb.register_foreign(
                ForeignPredicate(spec.name, spec.arity, spec.modes, _adapter(spec, impl, env), spec.doc),
                replace=True,
            )
        return kb


def _adapter(spec: ToolSpec, impl, env: ToolEnv):
    inputs = spec.inputs
    outputs = spec.outputs
    types = spec.types

    def call(*args: Term):
        vals = []
        for i in inputs:
            if types[i] == "relation":
                vals.append(relation_from_term(args[i]))
            else:
                vals.append(python_value(args[i]))
        result = impl(env, *vals)
        if not outputs:
            return True
        out = []
        for i, v in zip(outputs, result):
            out.append(v.to_term() if isinstance(v, Relation) else v)
        return out

    call.__name__ = f"tool_{spec.name}"
    return call
