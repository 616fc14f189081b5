"""Booking orchestration over the replicated ledger.

ReservationSystem is the single writer: it owns the consensus world, the
service projections, seat holds, and the payment gateway, and it exposes
the business operations (book, pay, cancel, review) that the API and the
scenario harness call. Ordering rules:

* Payment is captured before any ticket is written. A booking that fails
  after capture is compensated with a full refund, so money is conserved
  on-chain no matter where the saga stops.
* Every state change flows through committed transactions; projections
  are folds over the driver ledger and never updated out of band.
* A commit that cannot happen (quorum lost) withdraws its transactions
  from the backlog, so an operation reported as failed can never surface
  on-chain after the cluster heals.
"""

from __future__ import annotations

from ..consensus.world import ClusterWorld
from ..contracts.engine import (
    EXECUTED,
    SettlementReport,
    create_smart_contract,
    execute_contract,
    reject,
    settle,
    validate_conditions,
)
from ..contracts.spec import ContractRegistry, default_registry
from ..errors import (
    CommitAborted,
    DuplicateTransaction,
    NotCancellable,
    UnknownFlight,
    UnknownPnr,
)
from ..ledger.chain import Verdict, verify_chain
from ..ledger.records import make_transaction
from .notifications import NotificationLog
from .payments import PaymentGateway
from .projections import PROJECTION_FACTORIES

AUTHORS = {
    "TicketIssued": "booking-service",
    "BookingCancelled": "booking-service",
    "PaymentCaptured": "payment-service",
    "RefundIssued": "payment-service",
    "ReviewSubmitted": "review-service",
    "InventoryAdjusted": "inventory-service",
}

SERVICE_IDENTITIES = tuple(sorted(set(AUTHORS.values()) | {"review-service"}))

BASE36 = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def base36(value: int, width: int = 5) -> str:
    digits = []
    while value:
        value, rem = divmod(value, 36)
        digits.append(BASE36[rem])
    return "".join(reversed(digits)).rjust(width, "0")


class SystemView:
    """Read-only world view backed by the live projections."""

    def __init__(self, system: ReservationSystem) -> None:
        self._s = system

    def free_seat_count(self, flight: str) -> int:
        inventory = self._s.inventory
        held = len(self._s.holds.get(flight, ()))
        return inventory.free_count(flight) - held

    def first_free_seat(self, flight: str) -> str | None:
        inventory = self._s.inventory
        meta = inventory.flights.get(flight)
        if meta is None:
            return None
        taken = set(meta["sold"]) | self._s.holds.get(flight, set())
        for label in inventory.seat_labels(flight):
            if label not in taken:
                return label
        return None

    def payment_confirmed(self, pnr: str) -> bool:
        return self._s.payments_view.captured_by_pnr.get(pnr, 0) > 0

    def booking_field(self, pnr: str, name: str):
        return self._s.bookings.bookings.get(pnr, {}).get(name)

    def flight_field(self, flight: str, name: str):
        return self._s.inventory.flights.get(flight, {}).get(name)

    def has_ticket(self, pnr: str) -> bool:
        return pnr in self._s.bookings.bookings

    def clock(self) -> int:
        return self._s.world.clock


class ReservationSystem:
    def __init__(
        self,
        world: ClusterWorld,
        registry: ContractRegistry | None = None,
        notifier: NotificationLog | None = None,
        payment_script: list[str] | None = None,
        drive_budget: int = 50_000,
    ) -> None:
        for identity in SERVICE_IDENTITIES:
            if identity not in world.signers:
                raise KeyError(f"world is missing the {identity} signing identity")
        self.world = world
        self.registry = registry or default_registry()
        self.notifier = notifier or NotificationLog()
        self.gateway = PaymentGateway(payment_script)
        self.drive_budget = drive_budget
        self.projections = {name: factory() for name, factory in PROJECTION_FACTORIES.items()}
        self.holds: dict[str, set[str]] = {}
        self.pending: dict[str, dict] = {}
        self.rejections: list[dict] = []
        self.cycle_ticks: list[int] = []
        self._synced_blocks = 0
        self._tx_heights: dict[str, int] = {}
        self._retry_txs: tuple | None = None
        self._pnr_seq = 0
        self._pnr_offset = (sum(world.rng_seed.encode()) % 997) * 36**3
        self._review_seq = 0
        self._instance_seq = 0

    # -- projection access --------------------------------------------------

    @property
    def bookings(self):
        return self.projections["booking"]

    @property
    def inventory(self):
        return self.projections["inventory"]

    @property
    def payments_view(self):
        return self.projections["payment"]

    @property
    def reviews(self):
        return self.projections["review"]

    @property
    def audit(self):
        return self.projections["audit"]

    @property
    def profiles(self):
        return self.projections["customer-profile"]

    def sync(self) -> None:
        """Fold newly committed blocks into every projection."""
        blocks = self.world.ledger.blocks
        for block in blocks[self._synced_blocks :]:
            for index, tx in enumerate(block.transactions):
                self._tx_heights[tx.tx_id] = block.height
                for projection in self.projections.values():
                    projection.apply(tx, block.height, index, block.block_hash)
        self._synced_blocks = len(blocks)

    # -- ledger handle (contract engine protocol) ----------------------------

    def view(self) -> SystemView:
        return SystemView(self)

    def hold_seat(self, flight: str, seat: str) -> None:
        self.holds.setdefault(flight, set()).add(seat)

    def release_hold(self, flight: str, seat: str) -> None:
        self.holds.get(flight, set()).discard(seat)

    def append_all(self, records: list[tuple[str, dict]]) -> list[tuple[str, str, int]]:
        if not records:
            return []
        key = tuple((kind, tuple(sorted(payload.items()))) for kind, payload in records)
        if self._retry_txs is not None and self._retry_txs[0] == key:
            # Retry of the immediately preceding failed append: reuse the
            # original transactions so partially committed ones deduplicate.
            txs = self._retry_txs[1]
        else:
            now = self.world.clock
            txs = [
                make_transaction(kind, payload, self.world.signers[AUTHORS[kind]], logical_time=now)
                for kind, payload in records
            ]
        self._retry_txs = None
        for tx in txs:
            if tx.tx_id in self._tx_heights:
                continue
            try:
                self.world.submit(tx)
            except DuplicateTransaction:
                pass
        self._drive([tx.tx_id for tx in txs])
        self.sync()
        refs: list[tuple[str, str, int]] = []
        missing: list[str] = []
        for tx in txs:
            height = self._tx_heights.get(tx.tx_id)
            if height is None:
                missing.append(tx.kind)
            else:
                refs.append((tx.kind, tx.tx_id, height))
        if missing:
            for tx in txs:
                if tx.tx_id not in self._tx_heights:
                    self.world.withdraw(tx.tx_id)
            self._retry_txs = (key, txs)
            raise CommitAborted(self.world.ledger.height + 1, f"uncommitted: {', '.join(missing)}")
        return refs

    def _drive(self, tx_ids: list[str]) -> None:
        start = self.world.clock
        while True:
            if all(self.world.ledger.has_committed(tx_id) for tx_id in tx_ids):
                return
            if self.world.quiescent():
                return
            if self.world.clock - start >= self.drive_budget:
                raise RuntimeError(f"no commit decision within {self.drive_budget} ticks")
            self.world.step()

    # -- identifiers ----------------------------------------------------------

    def _next_pnr(self) -> str:
        self._pnr_seq += 1
        return "P" + base36(self._pnr_offset + self._pnr_seq)

    def _next_instance(self, trigger: str) -> str:
        self._instance_seq += 1
        return f"{trigger}-{self._instance_seq:04d}"

    # -- seeding ----------------------------------------------------------------

    def seed_flights(self, flights: list[dict]) -> list[tuple[str, str, int]]:
        records = [
            (
                "InventoryAdjusted",
                {
                    "flight": f["flight"],
                    "route": f["route"],
                    "departure_time": f["departure_time"],
                    "delta": f["capacity"],
                    "fare": f["fare"],
                    "reason": "initial capacity",
                },
            )
            for f in flights
        ]
        return self.append_all(records)

    # -- booking saga -------------------------------------------------------------

    def initiate_booking(self, customer: str, flight: str, payment_method: str) -> dict:
        if flight not in self.inventory.flights:
            raise UnknownFlight(f"no such flight: {flight}")
        pnr = self._next_pnr()
        fare = self.inventory.flights[flight]["fare"]
        self.pending[pnr] = {
            "pnr": pnr,
            "customer": customer,
            "flight": flight,
            "fare": fare,
            "payment_method": payment_method,
            "payment_id": f"pay-{pnr.lower()}",
            "status": "Pending",
            "created": self.world.clock,
        }
        return self._resume(pnr)

    def complete_payment(self, pnr: str, payment_method: str | None = None) -> dict:
        """Retry entry point after a gateway timeout or a stalled commit."""
        if pnr in self.pending:
            if payment_method:
                self.pending[pnr]["payment_method"] = payment_method
            return self._resume(pnr)
        booking = self.bookings.bookings.get(pnr)
        if booking is None:
            raise UnknownPnr(f"no such booking: {pnr}")
        return self.get_booking(pnr)

    def _resume(self, pnr: str) -> dict:
        try:
            return self._continue_booking(pnr)
        except CommitAborted as exc:
            # Uncommitted intents were withdrawn; any step that did commit
            # is found again on resume, so the saga can continue later.
            return {
                "pnr": pnr,
                "status": "Pending",
                "retryable": True,
                "reasons": [("Commit", "Aborted")],
                "detail": str(exc),
                "tx_refs": [],
            }

    def _continue_booking(self, pnr: str) -> dict:
        p = self.pending[pnr]
        payment_refs: list[tuple[str, str, int]] = []
        captured = self.view().payment_confirmed(pnr)
        if not captured:
            receipt = self.gateway.capture(
                p["payment_id"], pnr, p["fare"], p["payment_method"]
            )
            if receipt["captured"]:
                payment_refs = self.append_all(
                    [
                        (
                            "PaymentCaptured",
                            {
                                "payment_id": p["payment_id"],
                                "pnr": pnr,
                                "amount": p["fare"],
                                "method": p["payment_method"],
                            },
                        )
                    ]
                )
                captured = True
        instance = create_smart_contract(
            {
                "pnr": pnr,
                "customer": p["customer"],
                "flight": p["flight"],
                "fare": p["fare"],
                "payment_method": p["payment_method"],
                "payment_id": p["payment_id"],
            },
            self.registry.get("BookingPolicy"),
            self._next_instance("booking"),
        )
        check = validate_conditions(instance, self.view())
        if not check["ok"]:
            report = reject(instance, self.notifier)
            return self._booking_rejected(pnr, report, captured)
        instance, actions = execute_contract(instance, self.view())
        report = settle(instance, actions, self, self.notifier)
        if report.status == EXECUTED:
            record = self.pending.pop(pnr)
            self.cycle_ticks.append(self.world.clock - record["created"])
            return {
                "pnr": pnr,
                "status": "Confirmed",
                "seat": instance.bindings.get("seat", ""),
                "fare": p["fare"],
                "tx_refs": payment_refs + report.tx_refs,
                "notifications": report.notifications,
            }
        if report.failed == [("Commit", "Aborted")]:
            # Cluster cannot commit right now; the booking stays Pending and
            # complete_payment may resume it after the cluster heals.
            return {
                "pnr": pnr,
                "status": "Pending",
                "retryable": True,
                "reasons": report.failed,
                "tx_refs": [],
            }
        return self._booking_rejected(pnr, report, captured)

    def _booking_rejected(self, pnr: str, report: SettlementReport, captured: bool) -> dict:
        refund_refs: list[tuple[str, str, int]] = []
        refund_amount = 0
        if captured:
            refund_amount, refund_refs = self._compensate(pnr)
        record = self.pending.pop(pnr)
        self.rejections.append({"pnr": pnr, "reasons": report.failed})
        return {
            "pnr": pnr,
            "status": "Rejected",
            "reasons": report.failed,
            "fare": record["fare"],
            "refund_amount": refund_amount,
            "tx_refs": refund_refs,
            "notifications": report.notifications,
        }

    def _compensate(self, pnr: str) -> tuple[int, list[tuple[str, str, int]]]:
        """Full refund of any captured-but-unticketed payment; idempotent."""
        captured = self.payments_view.captured_by_pnr.get(pnr, 0)
        refunded = self.payments_view.refunded_by_pnr.get(pnr, 0)
        amount = captured - refunded
        if amount <= 0:
            return 0, []
        refs = self.append_all(
            [
                (
                    "RefundIssued",
                    {
                        "refund_id": f"ref-{pnr.lower()}-comp",
                        "pnr": pnr,
                        "amount": amount,
                        "reason": "payment reversal after rejected booking",
                    },
                )
            ]
        )
        return amount, refs

    # -- cancellation ---------------------------------------------------------------

    def cancel_booking(self, pnr: str, reason: str, cancel_time: int | None = None) -> dict:
        booking = self.bookings.bookings.get(pnr)
        if booking is None:
            if pnr in self.pending:
                raise NotCancellable("Pending")
            raise UnknownPnr(f"no such booking: {pnr}")
        if booking["status"] != "Confirmed":
            raise NotCancellable(booking["status"])
        at = self.world.clock if cancel_time is None else cancel_time
        departure = self.inventory.flights[booking["flight"]]["departure_time"]
        if at >= departure:
            raise NotCancellable("Departed")
        instance = create_smart_contract(
            {
                "pnr": pnr,
                "cancel_time": at,
                "reason": reason,
                "refund_id": f"ref-{pnr.lower()}-1",
            },
            self.registry.get("CancellationPolicy"),
            self._next_instance("cancel"),
        )
        check = validate_conditions(instance, self.view())
        if not check["ok"]:
            report = reject(instance, self.notifier)
            return {"pnr": pnr, "status": booking["status"], "reasons": report.failed, "tx_refs": []}
        instance, actions = execute_contract(instance, self.view())
        report = settle(instance, actions, self, self.notifier)
        if report.status != EXECUTED:
            return {"pnr": pnr, "status": booking["status"], "reasons": report.failed, "tx_refs": []}
        return {
            "pnr": pnr,
            "status": self.bookings.bookings[pnr]["status"],
            "refund_amount": instance.bindings.get("refund_amount", 0),
            "tx_refs": report.tx_refs,
            "notifications": report.notifications,
        }

    # -- reviews -----------------------------------------------------------------------

    def submit_review(self, pnr: str, rating: int, text: str) -> dict:
        if pnr not in self.bookings.bookings:
            raise UnknownPnr(f"no such booking: {pnr}")
        self._review_seq += 1
        review_id = f"rv-{self._review_seq:04d}"
        instance = create_smart_contract(
            {"review_id": review_id, "pnr": pnr, "rating": rating, "text": text},
            self.registry.get("ReviewPolicy"),
            self._next_instance("review"),
        )
        check = validate_conditions(instance, self.view())
        if not check["ok"]:
            report = reject(instance, self.notifier)
            return {"pnr": pnr, "status": "Rejected", "reasons": report.failed, "tx_refs": []}
        instance, actions = execute_contract(instance, self.view())
        report = settle(instance, actions, self, self.notifier)
        if report.status != EXECUTED:
            return {"pnr": pnr, "status": "Rejected", "reasons": report.failed, "tx_refs": []}
        return {
            "pnr": pnr,
            "review_id": review_id,
            "status": "Recorded",
            "verified": instance.bindings.get("verified", False),
            "tx_refs": report.tx_refs,
        }

    # -- queries ------------------------------------------------------------------------

    def get_booking(self, pnr: str) -> dict | None:
        if pnr in self.pending:
            record = dict(self.pending[pnr])
            record["paid"] = self.view().payment_confirmed(pnr)
            return record
        booking = self.bookings.bookings.get(pnr)
        if booking is None:
            return None
        record = dict(booking)
        record["captured"] = self.payments_view.captured_by_pnr.get(pnr, 0)
        record["refunded_total"] = self.payments_view.refunded_by_pnr.get(pnr, 0)
        return record

    def booking_history(self, pnr: str) -> list[dict]:
        return self.audit.lookup(pnr)

    def list_flights(
        self, route: str | None = None, departure_time: int | None = None
    ) -> list[dict]:
        """Live seat counts; unknown route or time filters yield an empty list."""
        out = []
        for flight_id in sorted(self.inventory.flights):
            meta = self.inventory.flights[flight_id]
            if route is not None and meta["route"] != route:
                continue
            if departure_time is not None and meta["departure_time"] != departure_time:
                continue
            out.append(
                {
                    "flight": flight_id,
                    "route": meta["route"],
                    "departure_time": meta["departure_time"],
                    "fare": meta["fare"],
                    "capacity": meta["capacity"],
                    "sold": len(meta["sold"]),
                    "free": meta["capacity"] - len(meta["sold"]),
                }
            )
        return out

    def verify(self) -> Verdict:
        return verify_chain(self.world.ledger, self.world.keyring, self.world.config.quorum)

    def settle_cluster(self, max_ticks: int = 100_000) -> int:
        """Flush all in-flight work (replica sync, pending faults)."""
        from ..consensus.world import run_until_quiescent

        ticks = run_until_quiescent(self.world, max_ticks)
        self.sync()
        return ticks
