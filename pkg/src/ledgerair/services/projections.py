"""Event-sourced service projections.

Every projection is a deterministic fold over the committed chain: apply
consumes transactions in strict (height, index) order and rebuilds must
produce the same state. Projections never share mutable structures; each
service owns its own view derived from the same ledger.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from ..errors import InvariantViolation, OutOfOrder
from ..ledger.chain import Chain
from ..ledger.records import TransactionRecord, transaction_body

GENESIS_POSITION = (0, -1)


@dataclass(slots=True)
class Projection:
    name: str
    position: tuple[int, int] = GENESIS_POSITION

    def _advance(self, height: int, index: int) -> None:
        last_height, last_index = self.position
        if height == last_height:
            expected = (height, last_index + 1)
        else:
            expected = (last_height + 1, 0)
        if (height, index) != expected:
            raise OutOfOrder(expected, (height, index))
        self.position = (height, index)

    def apply(self, tx: TransactionRecord, height: int, index: int, block_hash: str) -> None:
        self._advance(height, index)
        # Checksum gate: never fold content whose id does not match its bytes.
        if hashlib.sha256(transaction_body(tx)).hexdigest() != tx.tx_id:
            raise InvariantViolation("tx-checksum", f"{tx.tx_id} at height {height}")
        handler = getattr(self, f"on_{tx.kind}", None)
        if handler is not None:
            handler(tx, height, block_hash)

    def state(self) -> dict:
        raise NotImplementedError


LEGAL_TRANSITIONS = {
    (None, "Confirmed"),
    ("Confirmed", "Cancelled"),
    ("Cancelled", "Refunded"),
}


class BookingProjection(Projection):
    def __init__(self) -> None:
        super().__init__(name="booking")
        self.bookings: dict[str, dict] = {}
        self.compensations: dict[str, int] = {}
        self._prepaid: set[str] = set()

    def _transition(self, pnr: str, new_status: str) -> None:
        current = self.bookings.get(pnr, {}).get("status")
        if (current, new_status) not in LEGAL_TRANSITIONS:
            raise InvariantViolation("booking-status-machine", f"{pnr}: {current} -> {new_status}")

    def on_TicketIssued(self, tx: TransactionRecord, height: int, block_hash: str) -> None:
        p = tx.payload
        self._transition(p["pnr"], "Confirmed")
        self.bookings[p["pnr"]] = {
            "pnr": p["pnr"],
            "customer": p["customer"],
            "flight": p["flight"],
            "departure_time": p["departure_time"],
            "seat": p["seat"],
            "fare": p["fare"],
            "payment": p["payment"],
            "status": "Confirmed",
            "paid": p["pnr"] in self._prepaid,
            "refunded": 0,
            "ticket_height": height,
        }

    def on_PaymentCaptured(self, tx: TransactionRecord, height: int, block_hash: str) -> None:
        pnr = tx.payload["pnr"]
        if pnr in self.bookings:
            self.bookings[pnr]["paid"] = True
        else:
            # Payment lands before the ticket in the booking saga; remember
            # it so the later TicketIssued sees the funds.
            self._prepaid.add(pnr)

    def on_BookingCancelled(self, tx: TransactionRecord, height: int, block_hash: str) -> None:
        pnr = tx.payload["pnr"]
        self._transition(pnr, "Cancelled")
        booking = self.bookings[pnr]
        booking["status"] = "Cancelled"
        booking["seat"] = ""
        booking["cancel_time"] = tx.payload["cancel_time"]

    def on_RefundIssued(self, tx: TransactionRecord, height: int, block_hash: str) -> None:
        pnr = tx.payload["pnr"]
        booking = self.bookings.get(pnr)
        if booking is None:
            # Compensating refund for a booking that never reached a ticket.
            if pnr not in self._prepaid:
                raise InvariantViolation("refund-without-capture", pnr)
            self.compensations[pnr] = self.compensations.get(pnr, 0) + tx.payload["amount"]
            return
        if not booking["paid"]:
            raise InvariantViolation("refund-without-capture", pnr)
        self._transition(pnr, "Refunded")
        booking["status"] = "Refunded"
        booking["refunded"] += tx.payload["amount"]

    def state(self) -> dict:
        return {
            "position": self.position,
            "bookings": self.bookings,
            "compensations": self.compensations,
        }


class InventoryProjection(Projection):
    def __init__(self) -> None:
        super().__init__(name="inventory")
        self.flights: dict[str, dict] = {}
        self.assignments: dict[str, tuple[str, str]] = {}

    def on_InventoryAdjusted(self, tx: TransactionRecord, height: int, block_hash: str) -> None:
        p = tx.payload
        flight = self.flights.setdefault(
            p["flight"],
            {
                "flight": p["flight"],
                "route": p["route"],
                "departure_time": p["departure_time"],
                "fare": p["fare"],
                "capacity": 0,
                "sold": {},
            },
        )
        flight["capacity"] += p["delta"]
        if flight["capacity"] < len(flight["sold"]):
            raise InvariantViolation("capacity-below-sold", p["flight"])

    def on_TicketIssued(self, tx: TransactionRecord, height: int, block_hash: str) -> None:
        p = tx.payload
        flight = self.flights.get(p["flight"])
        if flight is None:
            raise InvariantViolation("ticket-for-unknown-flight", p["flight"])
        if p["seat"] in flight["sold"]:
            raise InvariantViolation("seat-double-sold", f"{p['flight']} {p['seat']}")
        flight["sold"][p["seat"]] = p["pnr"]
        self.assignments[p["pnr"]] = (p["flight"], p["seat"])
        if len(flight["sold"]) > flight["capacity"]:
            raise InvariantViolation("overbooking", p["flight"])

    def on_BookingCancelled(self, tx: TransactionRecord, height: int, block_hash: str) -> None:
        pnr = tx.payload["pnr"]
        assignment = self.assignments.pop(pnr, None)
        if assignment is None:
            return
        flight_id, seat = assignment
        self.flights[flight_id]["sold"].pop(seat, None)

    def free_count(self, flight_id: str) -> int:
        flight = self.flights.get(flight_id)
        if flight is None:
            return 0
        return flight["capacity"] - len(flight["sold"])

    def seat_labels(self, flight_id: str) -> list[str]:
        flight = self.flights.get(flight_id)
        if flight is None:
            return []
        return [f"{row:02d}A" for row in range(1, flight["capacity"] + 1)]

    def state(self) -> dict:
        return {"position": self.position, "flights": self.flights, "assignments": self.assignments}


class PaymentProjection(Projection):
    def __init__(self) -> None:
        super().__init__(name="payment")
        self.payments: dict[str, dict] = {}
        self.captured_by_pnr: dict[str, int] = {}
        self.refunded_by_pnr: dict[str, int] = {}

    def on_PaymentCaptured(self, tx: TransactionRecord, height: int, block_hash: str) -> None:
        p = tx.payload
        self.payments[p["payment_id"]] = {
            "payment_id": p["payment_id"],
            "pnr": p["pnr"],
            "amount": p["amount"],
            "method": p["method"],
            "status": "Captured",
        }
        self.captured_by_pnr[p["pnr"]] = self.captured_by_pnr.get(p["pnr"], 0) + p["amount"]

    def on_RefundIssued(self, tx: TransactionRecord, height: int, block_hash: str) -> None:
        p = tx.payload
        refunded = self.refunded_by_pnr.get(p["pnr"], 0) + p["amount"]
        if refunded > self.captured_by_pnr.get(p["pnr"], 0):
            raise InvariantViolation("refund-exceeds-capture", p["pnr"])
        self.refunded_by_pnr[p["pnr"]] = refunded
        for record in self.payments.values():
            if record["pnr"] == p["pnr"] and record["status"] == "Captured":
                record["status"] = "Refunded"
                break

    def conserved(self) -> bool:
        per_pnr = all(
            self.refunded_by_pnr.get(pnr, 0) <= captured
            for pnr, captured in self.captured_by_pnr.items()
        )
        return per_pnr and sum(self.refunded_by_pnr.values()) <= sum(self.captured_by_pnr.values())

    def state(self) -> dict:
        return {
            "position": self.position,
            "payments": self.payments,
            "captured_by_pnr": self.captured_by_pnr,
            "refunded_by_pnr": self.refunded_by_pnr,
        }


class ReviewProjection(Projection):
    def __init__(self) -> None:
        super().__init__(name="review")
        self.reviews: dict[str, dict] = {}

    def on_ReviewSubmitted(self, tx: TransactionRecord, height: int, block_hash: str) -> None:
        p = tx.payload
        self.reviews[p["review_id"]] = {
            "review_id": p["review_id"],
            "pnr": p["pnr"],
            "rating": p["rating"],
            "text": p["text"],
            "verified": p["verified"],
        }

    def state(self) -> dict:
        return {"position": self.position, "reviews": self.reviews}


class AuditProjection(Projection):
    """Complete per-pnr event history with block references."""

    def __init__(self) -> None:
        super().__init__(name="audit")
        self.events: list[dict] = []
        self.by_pnr: dict[str, list[dict]] = {}

    def apply(self, tx: TransactionRecord, height: int, index: int, block_hash: str) -> None:
        self._advance(height, index)
        event = {
            "kind": tx.kind,
            "tx_id": tx.tx_id,
            "height": height,
            "index": index,
            "block_hash": block_hash,
            "author": tx.author,
            "logical_time": tx.logical_time,
            "payload": dict(tx.payload),
        }
        self.events.append(event)
        pnr = tx.payload.get("pnr")
        if isinstance(pnr, str) and pnr:
            self.by_pnr.setdefault(pnr, []).append(event)

    def lookup(self, pnr: str) -> list[dict]:
        return list(self.by_pnr.get(pnr, []))

    def state(self) -> dict:
        return {"position": self.position, "events": self.events}


class CustomerProfileProjection(Projection):
    def __init__(self) -> None:
        super().__init__(name="customer-profile")
        self.profiles: dict[str, dict] = {}

    def on_TicketIssued(self, tx: TransactionRecord, height: int, block_hash: str) -> None:
        p = tx.payload
        profile = self.profiles.setdefault(
            p["customer"], {"customer": p["customer"], "pnrs": [], "total_spend": 0, "reviews": 0}
        )
        profile["pnrs"].append(p["pnr"])
        profile["total_spend"] += p["fare"]

    def on_ReviewSubmitted(self, tx: TransactionRecord, height: int, block_hash: str) -> None:
        for profile in self.profiles.values():
            if tx.payload["pnr"] in profile["pnrs"]:
                profile["reviews"] += 1
                break

    def state(self) -> dict:
        return {"position": self.position, "profiles": self.profiles}


PROJECTION_FACTORIES = {
    "booking": BookingProjection,
    "inventory": InventoryProjection,
    "payment": PaymentProjection,
    "review": ReviewProjection,
    "audit": AuditProjection,
    "customer-profile": CustomerProfileProjection,
}


def apply_block(projection: Projection, block) -> None:
    for index, tx in enumerate(block.transactions):
        projection.apply(tx, block.height, index, block.block_hash)


def rebuild_projection(chain: Chain, factory) -> Projection:
    """Genesis replay; the correctness oracle for incremental application."""
    projection = factory()
    for block in chain.blocks:
        apply_block(projection, block)
    return projection
