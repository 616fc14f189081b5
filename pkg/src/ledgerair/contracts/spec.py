"""Declarative contract specifications loaded from JSON.

A spec names its trigger, an input schema for binding user data, optional
derived bindings pulled from the world view, an ordered condition list, and
an ordered action list. Parameters reference bindings with "$name" and
world-view lookups with "@object.field"; everything else is a literal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import ScenarioParseError, UnknownSpec

_TYPE_NAMES = {"str": str, "int": int, "bool": bool}

SHIPPED_SPECS = ("booking_policy.json", "cancellation_policy.json", "review_policy.json")


@dataclass(frozen=True, slots=True)
class ConditionSpec:
    kind: str
    params: dict


@dataclass(frozen=True, slots=True)
class ActionSpec:
    kind: str
    params: dict


@dataclass(frozen=True, slots=True)
class ContractSpec:
    name: str
    trigger: str
    input_schema: dict[str, type]
    derive: dict[str, str]
    policy: dict
    conditions: tuple[ConditionSpec, ...]
    actions: tuple[ActionSpec, ...]


def parse_spec(doc: dict) -> ContractSpec:
    try:
        schema = {}
        for name, type_name in doc.get("input_schema", {}).items():
            if type_name not in _TYPE_NAMES:
                raise ScenarioParseError(f"unknown schema type {type_name!r} for {name!r}")
            schema[name] = _TYPE_NAMES[type_name]
        conditions = tuple(
            ConditionSpec(kind=c["kind"], params={k: v for k, v in c.items() if k != "kind"})
            for c in doc.get("conditions", [])
        )
        actions = tuple(
            ActionSpec(kind=a["kind"], params={k: v for k, v in a.items() if k != "kind"})
            for a in doc.get("actions", [])
        )
        return ContractSpec(
            name=doc["name"],
            trigger=doc.get("trigger", ""),
            input_schema=schema,
            derive=dict(doc.get("derive", {})),
            policy=dict(doc.get("policy", {})),
            conditions=conditions,
            actions=actions,
        )
    except KeyError as exc:
        raise ScenarioParseError(f"contract spec missing field {exc}") from exc


class ContractRegistry:
    def __init__(self) -> None:
        self._specs: dict[str, ContractSpec] = {}

    def register(self, spec: ContractSpec) -> None:
        self._specs[spec.name] = spec

    def register_doc(self, doc: dict) -> ContractSpec:
        spec = parse_spec(doc)
        self.register(spec)
        return spec

    def load_file(self, path: str | Path) -> ContractSpec:
        return self.register_doc(json.loads(Path(path).read_text(encoding="utf-8")))

    def get(self, name: str) -> ContractSpec:
        if name not in self._specs:
            raise UnknownSpec(name)
        return self._specs[name]

    def names(self) -> list[str]:
        return sorted(self._specs)


def default_registry() -> ContractRegistry:
    """Registry preloaded with the shipped policy specs."""
    registry = ContractRegistry()
    package = resources.files(__package__) / "specs"
    for filename in SHIPPED_SPECS:
        registry.register_doc(json.loads((package / filename).read_text(encoding="utf-8")))
    return registry
