"""Scenario files: reproducible end-to-end simulation descriptions.

A scenario pins everything a run depends on: the cluster shape, the RNG
seed, the seeded flights, a generated workload, the scripted payment
outcomes, the fault plan, and (for comparison runs) the baseline's loss
parameters. Two runs of the same scenario produce byte-identical reports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..consensus.config import QuorumConfig
from ..consensus.faults import Fault, parse_fault_plan
from ..errors import ScenarioParseError
from ..services.payments import OUTCOMES

MODES = ("ledger", "compare")

PAYMENT_METHODS = ("Credit Card", "bKash", "Visa")

SHIPPED_SCENARIOS = ("smoke", "faults", "compare", "overbook")

FLIGHT_FIELDS = ("flight", "route", "departure_time", "capacity", "fare")

SCENARIO_KEYS = (
    "name",
    "seed",
    "mode",
    "cluster",
    "flights",
    "workload",
    "payment_script",
    "fault_plan",
    "baseline",
)


@dataclass(frozen=True, slots=True)
class WorkloadSpec:
    bookings: int
    customers: int = 8
    cancel_every: int = 0
    review_every: int = 0

    def __post_init__(self) -> None:
        if self.bookings < 1 or self.customers < 1:
            raise ScenarioParseError("workload.bookings/customers out of range")
        if self.cancel_every < 0 or self.review_every < 0:
            raise ScenarioParseError("workload cadence fields must be >= 0")


@dataclass(frozen=True, slots=True)
class BaselineSpec:
    drop_rate: float = 0.1
    manual_delay_ticks: int = 48

    def __post_init__(self) -> None:
        if not 0.0 <= self.drop_rate < 1.0:
            raise ScenarioParseError(f"baseline.drop_rate out of range: {self.drop_rate}")
        if self.manual_delay_ticks < 0:
            raise ScenarioParseError("baseline.manual_delay_ticks must be >= 0")


@dataclass(frozen=True, slots=True)
class Scenario:
    name: str
    seed: str
    mode: str
    cluster: QuorumConfig
    flights: tuple[dict, ...]
    workload: WorkloadSpec
    payment_script: tuple[str, ...] = ()
    fault_plan: tuple[Fault, ...] = ()
    baseline: BaselineSpec = field(default_factory=BaselineSpec)


def _require(doc: dict, key: str):
    if key not in doc:
        raise ScenarioParseError(f"scenario is missing {key!r}")
    return doc[key]


def _check_flight(entry: dict) -> dict:
    if not isinstance(entry, dict):
        raise ScenarioParseError("flights entries must be objects")
    missing = [f for f in FLIGHT_FIELDS if f not in entry]
    if missing:
        raise ScenarioParseError(f"flight entry is missing {', '.join(missing)}")
    return {f: entry[f] for f in FLIGHT_FIELDS}


def parse_scenario(doc: dict) -> Scenario:
    unknown = sorted(set(doc) - set(SCENARIO_KEYS))
    if unknown:
        raise ScenarioParseError(f"unexpected scenario keys: {', '.join(unknown)}")
    name = _require(doc, "name")
    seed = _require(doc, "seed")
    mode = doc.get("mode", "ledger")
    if mode not in MODES:
        raise ScenarioParseError(f"unknown mode {mode!r}; expected one of {MODES}")
    cluster_doc = dict(_require(doc, "cluster"))
    try:
        cluster = QuorumConfig(**cluster_doc)
    except (TypeError, ValueError) as exc:
        raise ScenarioParseError(f"bad cluster config: {exc}") from exc
    flights = tuple(_check_flight(f) for f in _require(doc, "flights"))
    if not flights:
        raise ScenarioParseError("flights must not be empty")
    try:
        workload = WorkloadSpec(**_require(doc, "workload"))
        baseline = BaselineSpec(**doc.get("baseline", {}))
    except TypeError as exc:
        raise ScenarioParseError(f"bad workload or baseline config: {exc}") from exc
    script = tuple(doc.get("payment_script") or ("ok",))
    bad_outcomes = sorted(set(script) - set(OUTCOMES))
    if bad_outcomes:
        raise ScenarioParseError(f"unknown payment outcomes: {', '.join(bad_outcomes)}")
    fault_plan = tuple(parse_fault_plan(doc.get("fault_plan", [])))
    return Scenario(
        name=name,
        seed=seed,
        mode=mode,
        cluster=cluster,
        flights=flights,
        workload=workload,
        payment_script=script,
        fault_plan=fault_plan,
        baseline=baseline,
    )


def load_scenario(source: str | Path) -> Scenario:
    """Load a scenario from a JSON file path or a shipped scenario name."""
    name = str(source)
    if name in SHIPPED_SCENARIOS:
        text = (resources.files(__package__) / "scenarios" / f"{name}.json").read_text("utf-8")
    else:
        path = Path(source)
        if not path.exists():
            raise ScenarioParseError(f"no such scenario file or shipped name: {name}")
        text = path.read_text("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"invalid scenario JSON: {exc}") from exc
    return parse_scenario(doc)
