"""Wiring a scenario into live systems and replaying its workload."""

from __future__ import annotations

from ..consensus.world import ClusterWorld
from ..errors import GatewayTimeout, NotCancellable
from ..services.baseline import BaselineSystem
from ..services.reservations import SERVICE_IDENTITIES, ReservationSystem
from .scenario import PAYMENT_METHODS, Scenario


def build_system(scenario: Scenario) -> ReservationSystem:
    world = ClusterWorld(
        scenario.cluster,
        scenario.seed,
        extra_identities=SERVICE_IDENTITIES,
        fault_plan=list(scenario.fault_plan),
    )
    system = ReservationSystem(world, payment_script=list(scenario.payment_script))
    system.seed_flights([dict(f) for f in scenario.flights])
    return system


def run_workload(system: ReservationSystem, scenario: Scenario) -> dict:
    """Deterministic replay of the generated workload.

    Bookings rotate over flights, customers, and payment methods; every
    cancel_every-th confirmed booking is cancelled right away and every
    review_every-th confirmed booking gets a review. A gateway timeout is
    retried once, matching a customer pressing pay again.
    """
    w = scenario.workload
    outcomes: list[dict] = []
    confirmed: list[str] = []
    counters = {"confirmed": 0, "rejected": 0, "pending": 0, "cancelled": 0, "refunded": 0, "reviews": 0}
    for i in range(w.bookings):
        customer = f"Customer {i % w.customers:02d}"
        flight = scenario.flights[i % len(scenario.flights)]["flight"]
        method = PAYMENT_METHODS[i % len(PAYMENT_METHODS)]
        try:
            result = system.initiate_booking(customer, flight, method)
        except GatewayTimeout as exc:
            try:
                result = system.complete_payment(exc.pnr)
            except GatewayTimeout:
                result = {"pnr": exc.pnr, "status": "Pending", "reasons": [("Payment", "Timeout")]}
        outcomes.append(result)
        status = result["status"]
        if status == "Confirmed":
            confirmed.append(result["pnr"])
            counters["confirmed"] += 1
            serial = len(confirmed)
            if w.cancel_every and serial % w.cancel_every == 0:
                try:
                    cancel = system.cancel_booking(result["pnr"], "plans changed")
                except NotCancellable:
                    cancel = {}
                else:
                    counters["cancelled"] += 1
                if cancel.get("refund_amount", 0) > 0:
                    counters["refunded"] += 1
            elif w.review_every and serial % w.review_every == 0:
                rating = (i % 5) + 1
                review = system.submit_review(result["pnr"], rating, f"trip feedback {serial}")
                if review["status"] == "Recorded":
                    counters["reviews"] += 1
        elif status == "Rejected":
            counters["rejected"] += 1
        else:
            counters["pending"] += 1
    return {"outcomes": outcomes, "counters": counters, "confirmed_pnrs": confirmed}


def build_baseline(scenario: Scenario) -> BaselineSystem:
    baseline = BaselineSystem(
        seed=scenario.seed,
        drop_rate=scenario.baseline.drop_rate,
        manual_delay_ticks=scenario.baseline.manual_delay_ticks,
        payment_script=list(scenario.payment_script),
    )
    baseline.seed_flights([dict(f) for f in scenario.flights])
    return baseline


def run_baseline_workload(baseline: BaselineSystem, scenario: Scenario) -> dict:
    """The same booking/cancel stream the ledger system sees (no reviews)."""
    w = scenario.workload
    confirmed = 0
    for i in range(w.bookings):
        customer = f"Customer {i % w.customers:02d}"
        flight = scenario.flights[i % len(scenario.flights)]["flight"]
        method = PAYMENT_METHODS[i % len(PAYMENT_METHODS)]
        result = baseline.book(customer, flight, method)
        if result["status"] == "Confirmed":
            confirmed += 1
            if w.cancel_every and confirmed % w.cancel_every == 0:
                try:
                    baseline.cancel(result["pnr"], "plans changed")
                except NotCancellable:
                    pass
    return baseline.report()
