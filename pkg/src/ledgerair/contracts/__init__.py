"""Declarative contract specs and their deterministic executor."""

from .conditions import POLICY_RULES, WorldView, evaluate_condition, resolve
from .engine import (
    CREATED,
    EXECUTED,
    REJECTED,
    REJECTED_MESSAGE,
    VALIDATED,
    Action,
    ContractInstance,
    LedgerHandle,
    Notifier,
    SettlementReport,
    create_smart_contract,
    execute_contract,
    reject,
    settle,
    validate_conditions,
)
from .refunds import evaluate_refund
from .spec import ActionSpec, ConditionSpec, ContractRegistry, ContractSpec, default_registry, parse_spec

__all__ = [
    "POLICY_RULES",
    "WorldView",
    "evaluate_condition",
    "resolve",
    "CREATED",
    "EXECUTED",
    "REJECTED",
    "REJECTED_MESSAGE",
    "VALIDATED",
    "Action",
    "ContractInstance",
    "LedgerHandle",
    "Notifier",
    "SettlementReport",
    "create_smart_contract",
    "execute_contract",
    "reject",
    "settle",
    "validate_conditions",
    "evaluate_refund",
    "ActionSpec",
    "ConditionSpec",
    "ContractRegistry",
    "ContractSpec",
    "default_registry",
    "parse_spec",
]
