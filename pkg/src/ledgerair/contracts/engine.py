"""Contract lifecycle: create, validate, execute, settle.

Creation binds user data against the policy's input schema. Validation is a
pure read of the world view. Execution turns the policy's action templates
into concrete actions, still without side effects. Settlement is the only
mutation point: it re-validates under the ledger's single-writer
serialization (the seat-race arbiter), appends the state-changing actions
as transactions, and dispatches notifications after commit. A rejection at
any stage emits exactly one user notification and writes nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

from ..errors import CommitAborted, NotValidated, SchemaViolation
from .conditions import WorldView, evaluate_condition, resolve
from .refunds import evaluate_refund
from .spec import ContractSpec

CREATED = "Created"
VALIDATED = "Validated"
EXECUTED = "Executed"
REJECTED = "Rejected"

REJECTED_MESSAGE = "Conditions not met for contract execution"

STATE_CHANGING = {"AppendTransaction", "IssueRefund"}


@dataclass(frozen=True, slots=True)
class Action:
    kind: str
    params: dict


@dataclass(slots=True)
class ContractInstance:
    instance_id: str
    spec: ContractSpec
    bindings: dict
    status: str = CREATED
    failed: list[tuple[str, str]] = field(default_factory=list)
    actions: list[Action] = field(default_factory=list)


class LedgerHandle(Protocol):
    """Settlement's gate to the ledger; implementations serialize writers."""

    def view(self) -> WorldView: ...

    def append_all(self, records: list[tuple[str, dict]]) -> list[tuple[str, str, int]]: ...

    def hold_seat(self, flight: str, seat: str) -> None: ...

    def release_hold(self, flight: str, seat: str) -> None: ...


class Notifier(Protocol):
    def notify_user(self, pnr: str, message: str, detail: str = "") -> dict: ...

    def notify_parties(self, parties: list[str], event: str) -> dict: ...


@dataclass(slots=True)
class SettlementReport:
    instance_id: str
    status: str
    tx_refs: list[tuple[str, str, int]] = field(default_factory=list)
    notifications: list[dict] = field(default_factory=list)
    seat_ops: list[dict] = field(default_factory=list)
    failed: list[tuple[str, str]] = field(default_factory=list)


def create_smart_contract(user_data: dict, spec: ContractSpec, instance_id: str) -> ContractInstance:
    bindings: dict = {}
    for name, typ in spec.input_schema.items():
        if name not in user_data:
            raise SchemaViolation(name, "missing")
        value = user_data[name]
        if type(value) is not typ:
            raise SchemaViolation(name, f"expected {typ.__name__}, got {type(value).__name__}")
        bindings[name] = value
    return ContractInstance(instance_id=instance_id, spec=spec, bindings=bindings)


def _apply_derivations(instance: ContractInstance, view: WorldView) -> None:
    for name, expr in instance.spec.derive.items():
        instance.bindings[name] = resolve(expr, instance.bindings, view)


def validate_conditions(instance: ContractInstance, view: WorldView) -> dict:
    """Pure check of every condition; marks the instance Validated on success."""
    _apply_derivations(instance, view)
    failed = []
    for cond in instance.spec.conditions:
        holds, reason = evaluate_condition(cond, instance.bindings, view)
        if not holds:
            failed.append((cond.kind, reason))
    if failed:
        instance.failed = failed
        return {"ok": False, "failed": failed}
    if instance.status == CREATED:
        instance.status = VALIDATED
    return {"ok": True, "failed": []}


def execute_contract(instance: ContractInstance, view: WorldView) -> tuple[ContractInstance, list[Action]]:
    """Resolve action templates into concrete actions; no side effects."""
    if instance.status != VALIDATED:
        raise NotValidated(f"instance {instance.instance_id} is {instance.status}")
    actions: list[Action] = []
    for template in instance.spec.actions:
        params = {k: resolve(v, instance.bindings, view) for k, v in template.params.items()}
        if template.kind == "ReserveSeat":
            seat = view.first_free_seat(params.get("flight") or "")
            params["seat"] = seat if seat is not None else ""
            instance.bindings["seat"] = params["seat"]
        elif template.kind == "AppendTransaction":
            # Later templates may use bindings set by earlier actions (seat).
            params["payload"] = resolve(template.params.get("payload", {}), instance.bindings, view)
        elif template.kind == "IssueRefund":
            amount = evaluate_refund(
                fare=params.get("fare") or 0,
                policy=instance.spec.policy,
                cancel_time=params.get("cancel_time") or 0,
                departure_time=params.get("departure_time") or 0,
            )
            instance.bindings["refund_amount"] = amount
            if amount == 0:
                continue
            params["amount"] = amount
        actions.append(Action(kind=template.kind, params=params))
    instance.status = EXECUTED
    instance.actions = actions
    return instance, actions


def reject(instance: ContractInstance, notifier: Notifier) -> SettlementReport:
    """Terminal rejection: one user notification, zero ledger writes."""
    instance.status = REJECTED
    detail = ", ".join(reason for _, reason in instance.failed)
    receipt = notifier.notify_user(instance.bindings.get("pnr", ""), REJECTED_MESSAGE, detail)
    return SettlementReport(
        instance_id=instance.instance_id,
        status=REJECTED,
        notifications=[receipt],
        failed=list(instance.failed),
    )


def _records_from(actions: list[Action]) -> list[tuple[str, dict]]:
    records = []
    for action in actions:
        if action.kind == "AppendTransaction":
            records.append((action.params["record"], action.params["payload"]))
        elif action.kind == "IssueRefund":
            records.append(
                (
                    "RefundIssued",
                    {
                        "refund_id": action.params.get("refund_id", ""),
                        "pnr": action.params.get("pnr", ""),
                        "amount": action.params["amount"],
                        "reason": action.params.get("reason", ""),
                    },
                )
            )
    return records


def settle(
    instance: ContractInstance,
    actions: list[Action],
    handle: LedgerHandle,
    notifier: Notifier,
) -> SettlementReport:
    """Commit the executed actions; the single mutation point.

    Conditions are re-checked against the handle's live view so two
    instances racing for the last seat resolve by settlement order: the
    loser turns into a rejection here, after its optimistic validation.
    """
    if instance.status != EXECUTED:
        raise NotValidated(f"instance {instance.instance_id} is {instance.status}")
    recheck_failed = []
    for cond in instance.spec.conditions:
        holds, reason = evaluate_condition(cond, instance.bindings, handle.view())
        if not holds:
            recheck_failed.append((cond.kind, reason))
    if recheck_failed:
        instance.failed = recheck_failed
        return reject(instance, notifier)

    held: list[tuple[str, str]] = []
    seat_ops: list[dict] = []
    for action in actions:
        if action.kind == "ReserveSeat" and action.params.get("seat"):
            handle.hold_seat(action.params["flight"], action.params["seat"])
            held.append((action.params["flight"], action.params["seat"]))
            seat_ops.append({"action": "ReserveSeat", "flight": action.params["flight"], "seat": action.params["seat"]})
        elif action.kind == "ReleaseSeat" and action.params.get("seat"):
            seat_ops.append({"action": "ReleaseSeat", "flight": action.params.get("flight", ""), "seat": action.params["seat"]})

    records = _records_from(actions)
    tx_refs: list[tuple[str, str, int]] = []
    try:
        try:
            tx_refs = handle.append_all(records)
        except CommitAborted:
            tx_refs = handle.append_all(records)
    except CommitAborted:
        for flight, seat in held:
            handle.release_hold(flight, seat)
        instance.status = REJECTED
        receipt = notifier.notify_user(
            instance.bindings.get("pnr", ""),
            "Contract execution aborted; no changes were committed",
            "CommitAborted",
        )
        return SettlementReport(
            instance_id=instance.instance_id,
            status=REJECTED,
            notifications=[receipt],
            seat_ops=[{"action": "Compensate", "note": "no-op; nothing committed"}],
            failed=[("Commit", "Aborted")],
        )
    for flight, seat in held:
        handle.release_hold(flight, seat)

    notifications: list[dict] = []
    for action in actions:
        if action.kind == "NotifyParties":
            notifications.append(notifier.notify_parties(action.params.get("parties", []), instance.spec.trigger))
        elif action.kind == "NotifyUser":
            notifications.append(
                notifier.notify_user(instance.bindings.get("pnr", ""), action.params.get("message", ""))
            )
    return SettlementReport(
        instance_id=instance.instance_id,
        status=EXECUTED,
        tx_refs=tx_refs,
        notifications=notifications,
        seat_ops=seat_ops,
    )
