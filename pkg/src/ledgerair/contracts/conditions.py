"""Condition evaluation against a read-only world view.

Every condition is a pure predicate; failure yields a stable reason string
that flows into rejection notifications and API error bodies.
"""

from __future__ import annotations

from typing import Protocol

from ..errors import ScenarioParseError
from .spec import ConditionSpec


class WorldView(Protocol):
    """Read-only snapshot the conditions and actions may query."""

    def free_seat_count(self, flight: str) -> int: ...

    def first_free_seat(self, flight: str) -> str | None: ...

    def payment_confirmed(self, pnr: str) -> bool: ...

    def booking_field(self, pnr: str, name: str): ...

    def flight_field(self, flight: str, name: str): ...

    def has_ticket(self, pnr: str) -> bool: ...

    def clock(self) -> int: ...


def resolve(value, bindings: dict, view: WorldView):
    """Resolve "$name" bindings and "@object.field" view lookups."""
    if isinstance(value, str) and value.startswith("$"):
        return bindings.get(value[1:])
    if isinstance(value, str) and value.startswith("@"):
        obj, _, name = value[1:].partition(".")
        if obj == "booking":
            return view.booking_field(bindings.get("pnr", ""), name)
        if obj == "flight":
            return view.flight_field(bindings.get("flight", ""), name)
        if obj == "clock":
            return view.clock()
        if obj == "review" and name == "verified":
            return view.has_ticket(bindings.get("pnr", ""))
        raise ScenarioParseError(f"unknown view lookup {value!r}")
    if isinstance(value, dict):
        return {k: resolve(v, bindings, view) for k, v in value.items()}
    if isinstance(value, list):
        return [resolve(v, bindings, view) for v in value]
    return value


# Named rules for PolicyPredicate conditions: name -> (predicate, fail reason).
POLICY_RULES: dict[str, tuple] = {}


def policy_rule(name: str, fail_reason: str):
    def wrap(fn):
        POLICY_RULES[name] = (fn, fail_reason)
        return fn

    return wrap


@policy_rule("booking_confirmed", "NotConfirmed")
def _booking_confirmed(view: WorldView, params: dict) -> bool:
    return view.booking_field(params.get("pnr", ""), "status") == "Confirmed"


@policy_rule("booking_exists", "UnknownPnr")
def _booking_exists(view: WorldView, params: dict) -> bool:
    return view.booking_field(params.get("pnr", ""), "status") is not None


@policy_rule("rating_in_range", "RatingOutOfRange")
def _rating_in_range(view: WorldView, params: dict) -> bool:
    rating = params.get("rating")
    return isinstance(rating, int) and 1 <= rating <= 5


def evaluate_condition(cond: ConditionSpec, bindings: dict, view: WorldView) -> tuple[bool, str]:
    """Returns (holds, reason-if-failed)."""
    params = {name: resolve(value, bindings, view) for name, value in cond.params.items()}
    if cond.kind == "SeatAvailable":
        count = params.get("count", 1)
        if view.free_seat_count(params.get("flight") or "") >= count:
            return True, ""
        return False, "SeatUnavailable"
    if cond.kind == "PaymentConfirmed":
        if view.payment_confirmed(params.get("pnr") or ""):
            return True, ""
        return False, "PaymentFailed"
    if cond.kind == "WithinWindow":
        reference = params.get("reference")
        at = params.get("at")
        deadline = params.get("deadline_hours", 0)
        if reference is None or at is None:
            return False, "OutsideWindow"
        if reference - at >= deadline:
            return True, ""
        return False, "OutsideWindow"
    if cond.kind == "PolicyPredicate":
        rule = params.get("rule")
        if rule not in POLICY_RULES:
            raise ScenarioParseError(f"unknown policy rule {rule!r}")
        predicate, fail_reason = POLICY_RULES[rule]
        if predicate(view, params):
            return True, ""
        return False, fail_reason
    raise ScenarioParseError(f"unknown condition kind {cond.kind!r}")
