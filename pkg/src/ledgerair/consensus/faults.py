"""Scripted faults: crashes, restarts, message drops, partitions.

Crash and restart are point events applied when the clock reaches their
tick. Drops and partitions are standing rules consulted at delivery time,
so in-flight messages crossing an active partition window are lost.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ScenarioParseError


@dataclass(frozen=True, slots=True)
class CrashNode:
    node: str
    tick: int


@dataclass(frozen=True, slots=True)
class RestartNode:
    node: str
    tick: int


@dataclass(slots=True)
class DropMessage:
    """Drop the next `count` deliveries matching every provided field."""

    count: int = 1
    kind: str | None = None
    sender: str | None = None
    recipient: str | None = None
    height: int | None = None

    def matches(self, recipient: str, message) -> bool:
        if self.count <= 0:
            return False
        if self.kind is not None and message.kind != self.kind:
            return False
        if self.sender is not None and message.sender != self.sender:
            return False
        if self.recipient is not None and recipient != self.recipient:
            return False
        if self.height is not None and message.height != self.height:
            return False
        return True


@dataclass(frozen=True, slots=True)
class Partition:
    nodes: frozenset[str]
    from_tick: int
    to_tick: int

    def active(self, clock: int) -> bool:
        return self.from_tick <= clock < self.to_tick

    def separates(self, a: str, b: str, clock: int) -> bool:
        return self.active(clock) and ((a in self.nodes) != (b in self.nodes))


Fault = CrashNode | RestartNode | DropMessage | Partition

MESSAGE_KINDS = ("Propose", "Vote", "Commit")


def _message_kind(raw: str | None) -> str | None:
    if raw is None:
        return None
    kind = raw.capitalize()
    if kind not in MESSAGE_KINDS:
        raise ScenarioParseError(f"unknown message kind {raw!r}; expected one of {MESSAGE_KINDS}")
    return kind


def parse_fault_plan(entries: list[dict]) -> list[Fault]:
    faults: list[Fault] = []
    for entry in entries:
        kind = entry.get("kind")
        try:
            if kind == "crash":
                faults.append(CrashNode(node=entry["node"], tick=int(entry["tick"])))
            elif kind == "restart":
                faults.append(RestartNode(node=entry["node"], tick=int(entry["tick"])))
            elif kind == "drop":
                faults.append(
                    DropMessage(
                        count=int(entry.get("count", 1)),
                        kind=_message_kind(entry.get("message_kind")),
                        sender=entry.get("sender"),
                        recipient=entry.get("recipient"),
                        height=entry.get("height"),
                    )
                )
            elif kind == "partition":
                faults.append(
                    Partition(
                        nodes=frozenset(entry["nodes"]),
                        from_tick=int(entry["from_tick"]),
                        to_tick=int(entry["to_tick"]),
                    )
                )
            else:
                raise ScenarioParseError(f"unknown fault kind {kind!r}")
        except KeyError as exc:
            raise ScenarioParseError(f"fault {entry} missing field {exc}") from exc
    return faults
