"""Point-to-point baseline mode and record-divergence measurement.

The baseline models the pre-ledger integration style: the booking desk
keeps the authoritative record, then pushes updates to the inventory and
payment systems over a lossy channel. Each push is independently dropped
with a seeded probability, and every booking waits on a fixed manual
approval delay. Running the same workload through the baseline and the
ledger-backed system makes record divergence and cycle time directly
comparable.
"""

from __future__ import annotations

import random

from ..contracts.refunds import evaluate_refund
from ..errors import GatewayTimeout, NotCancellable, UnknownFlight, UnknownPnr
from .payments import PaymentGateway

DEFAULT_POLICY = {"window_hours": 24, "fee_fraction": 0.2}

SHARED_FIELDS = {"inventory": ("seat",), "payment": ("paid", "refunded")}


def divergence_report(views: dict[str, dict[str, dict]]) -> dict:
    """Field-level mismatches of each service view against the booking desk.

    Every view must cover the same pnr universe; extraction helpers fill
    service defaults for records a service never received.
    """
    reference = views["booking"]
    mismatches = 0
    affected: set[str] = set()
    details: list[dict] = []
    for service, fields in SHARED_FIELDS.items():
        table = views[service]
        for pnr in sorted(reference):
            for field_name in fields:
                expected = reference[pnr].get(field_name)
                actual = table.get(pnr, {}).get(field_name)
                if expected != actual:
                    mismatches += 1
                    affected.add(pnr)
                    details.append(
                        {
                            "service": service,
                            "pnr": pnr,
                            "field": field_name,
                            "expected": expected,
                            "actual": actual,
                        }
                    )
    return {"mismatches": mismatches, "affected_pnrs": sorted(affected), "details": details}


def ledger_views(system) -> dict[str, dict[str, dict]]:
    """Per-service answer tables derived from the ledger projections."""
    bookings = system.bookings.bookings
    pnrs = list(bookings)
    booking_table = {
        pnr: {
            "status": rec["status"],
            "seat": rec["seat"],
            "paid": rec["paid"],
            "refunded": rec["refunded"],
        }
        for pnr, rec in bookings.items()
    }
    assignments = system.inventory.assignments
    inventory_table = {pnr: {"seat": assignments.get(pnr, ("", ""))[1]} for pnr in pnrs}
    captured = system.payments_view.captured_by_pnr
    refunded = system.payments_view.refunded_by_pnr
    payment_table = {
        pnr: {"paid": captured.get(pnr, 0) > 0, "refunded": refunded.get(pnr, 0)}
        for pnr in pnrs
    }
    return {"booking": booking_table, "inventory": inventory_table, "payment": payment_table}


class BaselineSystem:
    def __init__(
        self,
        seed: str,
        drop_rate: float = 0.1,
        manual_delay_ticks: int = 48,
        payment_script: list[str] | None = None,
        policy: dict | None = None,
    ) -> None:
        if not 0.0 <= drop_rate < 1.0:
            raise ValueError(f"drop_rate out of range: {drop_rate}")
        self.rng = random.Random(f"baseline:{seed}")
        self.drop_rate = drop_rate
        self.manual_delay = manual_delay_ticks
        self.policy = dict(policy or DEFAULT_POLICY)
        self.gateway = PaymentGateway(payment_script)
        self.clock = 0
        self.flights: dict[str, dict] = {}
        self.booking_store: dict[str, dict] = {}
        self.inventory_store: dict[str, dict] = {}
        self.payment_store: dict[str, dict] = {}
        self.cycle_ticks: list[int] = []
        self.dropped_messages = 0
        self._pnr_seq = 0

    # -- messaging ----------------------------------------------------------

    def _push(self, store: dict[str, dict], pnr: str, update: dict) -> None:
        if self.rng.random() < self.drop_rate:
            self.dropped_messages += 1
            return
        store.setdefault(pnr, {}).update(update)

    # -- operations -----------------------------------------------------------

    def seed_flights(self, flights: list[dict]) -> None:
        for f in flights:
            self.flights[f["flight"]] = {
                "route": f["route"],
                "departure_time": f["departure_time"],
                "fare": f["fare"],
                "capacity": f["capacity"],
                "sold": {},
            }

    def _first_free_seat(self, flight: dict) -> str | None:
        for row in range(1, flight["capacity"] + 1):
            label = f"{row:02d}A"
            if label not in flight["sold"]:
                return label
        return None

    def book(self, customer: str, flight_id: str, payment_method: str) -> dict:
        flight = self.flights.get(flight_id)
        if flight is None:
            raise UnknownFlight(f"no such flight: {flight_id}")
        self._pnr_seq += 1
        pnr = f"B{self._pnr_seq:05d}"
        self.clock += 1
        seat = self._first_free_seat(flight)
        captured = False
        if seat is not None:
            try:
                receipt = self.gateway.capture(
                    f"bpay-{pnr.lower()}", pnr, flight["fare"], payment_method
                )
                captured = receipt["captured"]
            except GatewayTimeout:
                # The manual process has no retry queue; give up.
                captured = False
        if seat is None or not captured:
            self.booking_store[pnr] = {
                "pnr": pnr,
                "flight": flight_id,
                "status": "Rejected",
                "seat": "",
                "paid": False,
                "refunded": 0,
            }
            return {"pnr": pnr, "status": "Rejected"}
        flight["sold"][seat] = pnr
        self.booking_store[pnr] = {
            "pnr": pnr,
            "flight": flight_id,
            "status": "Confirmed",
            "seat": seat,
            "paid": True,
            "refunded": 0,
        }
        self._push(self.inventory_store, pnr, {"seat": seat})
        self._push(self.payment_store, pnr, {"paid": True, "refunded": 0})
        self.clock += self.manual_delay
        self.cycle_ticks.append(self.manual_delay)
        return {"pnr": pnr, "status": "Confirmed", "seat": seat}

    def cancel(self, pnr: str, reason: str, cancel_time: int | None = None) -> dict:
        record = self.booking_store.get(pnr)
        if record is None:
            raise UnknownPnr(f"no such booking: {pnr}")
        if record["status"] != "Confirmed":
            raise NotCancellable(record["status"])
        flight = self.flights[record["flight"]]
        at = (self.clock + 1) if cancel_time is None else cancel_time
        if at >= flight["departure_time"]:
            raise NotCancellable("Departed")
        self.clock += 1
        refund = evaluate_refund(flight["fare"], self.policy, at, flight["departure_time"])
        flight["sold"].pop(record["seat"], None)
        record["status"] = "Refunded" if refund > 0 else "Cancelled"
        record["seat"] = ""
        record["refunded"] = refund
        self._push(self.inventory_store, pnr, {"seat": ""})
        self._push(self.payment_store, pnr, {"paid": True, "refunded": refund})
        self.clock += self.manual_delay
        return {"pnr": pnr, "status": record["status"], "refund_amount": refund}

    # -- reporting --------------------------------------------------------------

    def views(self) -> dict[str, dict[str, dict]]:
        pnrs = list(self.booking_store)
        booking_table = {
            pnr: {
                "status": rec["status"],
                "seat": rec["seat"],
                "paid": rec["paid"],
                "refunded": rec["refunded"],
            }
            for pnr, rec in self.booking_store.items()
        }
        inventory_table = {
            pnr: {"seat": self.inventory_store.get(pnr, {}).get("seat", "")} for pnr in pnrs
        }
        payment_table = {
            pnr: {
                "paid": self.payment_store.get(pnr, {}).get("paid", False),
                "refunded": self.payment_store.get(pnr, {}).get("refunded", 0),
            }
            for pnr in pnrs
        }
        return {"booking": booking_table, "inventory": inventory_table, "payment": payment_table}

    def report(self) -> dict:
        divergence = divergence_report(self.views())
        confirmed = sum(1 for r in self.booking_store.values() if r["status"] == "Confirmed")
        mean_cycle = (
            sum(self.cycle_ticks) / len(self.cycle_ticks) if self.cycle_ticks else 0.0
        )
        return {
            "bookings": len(self.booking_store),
            "confirmed": confirmed,
            "mismatches": divergence["mismatches"],
            "affected_pnrs": len(divergence["affected_pnrs"]),
            "dropped_messages": self.dropped_messages,
            "mean_cycle_ticks": mean_cycle,
        }
