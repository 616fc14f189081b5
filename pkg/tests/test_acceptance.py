"""System-level guarantees the package ships under.

Each test pins one externally visible property: tamper evidence on the
stored chain, consensus safety and liveness under randomized fault
plans, availability and divergence bounds on the frozen scenarios,
contract rejection purity, projection rebuild equivalence, byte-stable
reports, and the end-to-end HTTP flow with resolvable transaction refs.
"""

from __future__ import annotations

import itertools
import random
import re
import time

import pytest
from fastapi.testclient import TestClient

from ledgerair.consensus import (
    ClusterWorld,
    CrashNode,
    DropMessage,
    Partition,
    QuorumConfig,
    RestartNode,
    run_until_quiescent,
)
from ledgerair.contracts.engine import REJECTED_MESSAGE
from ledgerair.errors import GatewayTimeout, NotCancellable
from ledgerair.gateway import create_app
from ledgerair.harness import canonical_json, run_scenario
from ledgerair.ledger import load_chain, persist_chain, verify_chain
from ledgerair.services import PROJECTION_FACTORIES, rebuild_projection

from helpers import committed_chain, make_system, ticket_tx

FAR_FLIGHT = {
    "flight": "BG-901",
    "route": "DAC-ZYL",
    "departure_time": 100_000,
    "capacity": 3,
    "fare": 10000,
}

METHODS = ("Credit Card", "bKash", "Visa")


@pytest.fixture(scope="module")
def smoke_runs():
    return run_scenario("smoke"), run_scenario("smoke")


@pytest.fixture(scope="module")
def faults_runs():
    return run_scenario("faults"), run_scenario("faults")


@pytest.fixture(scope="module")
def compare_runs():
    return run_scenario("compare"), run_scenario("compare")


@pytest.fixture(scope="module")
def overbook_runs():
    return run_scenario("overbook"), run_scenario("overbook")


# -- tamper evidence -----------------------------------------------------------


def _frame_spans(data: bytes) -> list[tuple[int, int]]:
    """(start, size) of every block frame body; header is magic + version."""
    spans = []
    pos = 5
    while pos < len(data):
        size = int.from_bytes(data[pos : pos + 4], "big")
        pos += 4
        spans.append((pos, size))
        pos += size
    return spans


def test_tamper_evidence_over_1000_random_mutations(tmp_path):
    rng = random.Random("acceptance:tamper")
    fixtures = []
    for seed, blocks, txs, nodes, quorum in (
        ("tamper-a", 4, 2, 4, 3),
        ("tamper-b", 6, 1, 3, 2),
        ("tamper-c", 5, 3, 5, 3),
    ):
        chain, keyring, q = committed_chain(seed, blocks, txs, nodes, quorum)
        path = tmp_path / f"{seed}.log"
        persist_chain(chain, path)
        base = path.read_bytes()
        fixtures.append((path, base, _frame_spans(base), keyring, q))

    start = time.monotonic()
    detected = 0
    for i in range(1000):
        path, base, spans, keyring, quorum = fixtures[i % len(fixtures)]
        height = rng.randrange(len(spans)) + 1
        frame_start, frame_size = spans[height - 1]
        offset = rng.randrange(frame_size)
        mutated = bytearray(base)
        mutated[frame_start + offset] ^= rng.randrange(1, 256)
        path.write_bytes(bytes(mutated))

        verdict = verify_chain(load_chain(path), keyring, quorum)
        assert not verdict.ok, (i, height, offset)
        assert verdict.height <= height, (i, height, offset, verdict)
        detected += 1

    assert detected == 1000
    assert time.monotonic() - start < 30.0


# -- consensus safety and liveness ----------------------------------------------


def _random_fault_plan(n: int, rng: random.Random, quorum: int) -> tuple[list, bool]:
    """A fault plan plus whether it stays inside the liveness envelope."""
    nodes = [f"node-{i}" for i in range(n)]
    faults: list = []
    within_liveness = rng.random() < 0.5
    if within_liveness:
        # strictly fewer than n - quorum + 1 unrecovered crashes, no loss
        for node in rng.sample(nodes, rng.randint(0, n - quorum)):
            tick = rng.randint(3, 80)
            faults.append(CrashNode(node, tick))
            if rng.random() < 0.5:
                faults.append(RestartNode(node, tick + rng.randint(10, 120)))
        return faults, True
    for node in rng.sample(nodes, rng.randint(0, n - 1)):
        tick = rng.randint(3, 120)
        faults.append(CrashNode(node, tick))
        if rng.random() < 0.6:
            faults.append(RestartNode(node, tick + rng.randint(10, 150)))
    for _ in range(rng.randint(0, 3)):
        faults.append(
            DropMessage(
                count=rng.randint(1, 5),
                kind=rng.choice([None, "Propose", "Vote", "Commit"]),
                sender=rng.choice([None] + nodes),
                recipient=rng.choice([None] + nodes),
            )
        )
    if rng.random() < 0.4:
        side = rng.sample(nodes, rng.randint(1, n - 1))
        start = rng.randint(5, 100)
        faults.append(Partition(frozenset(side), start, start + rng.randint(10, 120)))
    return faults, False


def test_consensus_safety_and_liveness_over_100_fault_plans():
    plans = 0
    liveness_checked = 0
    for n in (3, 4, 5, 7):
        for i in range(26):
            rng = random.Random(f"acceptance:safety:{n}:{i}")
            config = QuorumConfig(n_nodes=n)
            faults, within_liveness = _random_fault_plan(n, rng, config.quorum)
            world = ClusterWorld(
                config,
                f"safety:{n}:{i}",
                extra_identities=("booking-service",),
                fault_plan=faults,
            )
            signer = world.signers["booking-service"]
            txs = [ticket_tx(signer, f"S{n}X{i}N{j}", j + 1) for j in range(10)]
            for tx in txs:
                world.submit(tx)
            run_until_quiescent(world, max_ticks=30_000)
            plans += 1

            # safety: no two replicas ever disagree at a committed height
            assert world.safety_violations == []
            chains = [node.chain for node in world.nodes.values()]
            for a, b in itertools.combinations(chains, 2):
                for h in range(min(a.height, b.height)):
                    assert a.blocks[h].block_hash == b.blocks[h].block_hash, (n, i, h)
            assert verify_chain(world.ledger, world.keyring, config.quorum).ok

            if within_liveness:
                liveness_checked += 1
                assert world.committed_count == world.submitted_count == len(txs), (n, i)
                for tx in txs:
                    assert world.ledger.has_committed(tx.tx_id)

    assert plans >= 100
    assert liveness_checked >= 25


# -- availability bound ----------------------------------------------------------


def test_faults_scenario_meets_availability_bound(faults_runs):
    (report, system), _ = faults_runs
    availability = report["availability"]
    assert availability["submitted_txs"] >= 1000
    assert availability["committed_fraction"] >= 0.999
    assert report["chain"]["verified"] is True
    assert report["safety_violations"] == 0
    assert report["divergence"] == {"mismatches": 0, "affected_pnrs": 0}
    assert system.payments_view.conserved()


# -- overbooking safety -----------------------------------------------------------


def test_overbooking_stress_confirms_exactly_capacity(overbook_runs):
    (report, system), _ = overbook_runs
    capacity = system.inventory.flights["BG-777"]["capacity"]
    assert report["workload"]["attempted"] == 3 * capacity
    assert report["workload"]["confirmed"] == capacity
    assert report["workload"]["rejected"] == 2 * capacity

    for flight, meta in system.inventory.flights.items():
        assert len(meta["sold"]) <= meta["capacity"], flight
    assert len(system.inventory.flights["BG-777"]["sold"]) == capacity

    tickets = [
        event
        for event in system.audit.events
        if event["kind"] == "TicketIssued" and event["payload"]["flight"] == "BG-777"
    ]
    assert len(tickets) == capacity

    # replay from genesis raises on any capacity violation; equality proves none
    for name, factory in PROJECTION_FACTORIES.items():
        rebuilt = rebuild_projection(system.world.ledger, factory)
        assert rebuilt.state() == system.projections[name].state(), name


# -- divergence dominance ---------------------------------------------------------


def test_ledger_mode_dominates_lossy_baseline(compare_runs):
    (report, _), _ = compare_runs
    assert report["divergence"]["mismatches"] == 0
    assert report["baseline"]["mismatches"] > 0
    assert report["comparison"]["mismatch_reduction"] >= 0.30
    assert report["comparison"]["cycle_reduction"] >= 0.30


# -- rejection purity --------------------------------------------------------------


def test_rejected_contracts_notify_once_and_write_nothing():
    total_rejections = 0
    for i in range(30):
        rng = random.Random(f"acceptance:purity:{i}")
        bookings = rng.randint(5, 12)
        script = [rng.choice(["ok", "decline"]) for _ in range(bookings)]
        flight = {**FAR_FLIGHT, "capacity": rng.randint(2, 4)}
        system = make_system(
            seed=f"purity-{i}", payment_script=script, flights=[flight]
        )
        results = [
            system.initiate_booking(f"Customer {j % 5:02d}", "BG-901", METHODS[j % 3])
            for j in range(bookings)
        ]
        system.settle_cluster()

        committed = [
            tx for block in system.world.ledger.blocks for tx in block.transactions
        ]
        for result in results:
            if result["status"] != "Rejected":
                continue
            total_rejections += 1
            pnr = result["pnr"]
            receipts = [r for r in system.notifier.receipts if r.get("pnr") == pnr]
            assert len(receipts) == 1, pnr
            assert receipts[0]["message"] == REJECTED_MESSAGE
            kinds = {tx.kind for tx in committed if tx.payload.get("pnr") == pnr}
            assert "TicketIssued" not in kinds, pnr
            if result["refund_amount"] == 0:
                assert kinds == set(), pnr
            else:
                assert kinds == {"PaymentCaptured", "RefundIssued"}, pnr
        assert system.payments_view.conserved()

    assert total_rejections >= 40


# -- oracle equivalence -------------------------------------------------------------


def _book_with_retries(system, customer, flight, method, retries=3):
    try:
        return system.initiate_booking(customer, flight, method)
    except GatewayTimeout as exc:
        pnr = exc.pnr
    for _ in range(retries):
        try:
            return system.complete_payment(pnr)
        except GatewayTimeout:
            continue
    return {"status": "Pending", "pnr": pnr}


def test_incremental_projections_equal_rebuilds_over_100_seeds():
    for i in range(100):
        rng = random.Random(f"acceptance:oracle:{i}")
        bookings = rng.randint(3, 8)
        script = [
            rng.choice(["ok", "ok", "decline", "timeout"]) for _ in range(bookings + 4)
        ]
        flight = {**FAR_FLIGHT, "capacity": rng.randint(2, 5), "departure_time": 10_000}
        system = make_system(seed=f"oracle-{i}", payment_script=script, flights=[flight])
        confirmed = []
        for j in range(bookings):
            result = _book_with_retries(system, f"C{j % 4}", "BG-901", METHODS[j % 3])
            if result["status"] == "Confirmed":
                confirmed.append(result["pnr"])
        if confirmed and rng.random() < 0.7:
            try:
                system.cancel_booking(
                    confirmed[0], "plans changed", cancel_time=rng.randint(1, 4000)
                )
            except NotCancellable:
                pass
        if confirmed and rng.random() < 0.5:
            system.submit_review(confirmed[-1], rng.randint(1, 5), "fine")
        system.settle_cluster()

        for name, factory in PROJECTION_FACTORIES.items():
            rebuilt = rebuild_projection(system.world.ledger, factory)
            assert rebuilt.state() == system.projections[name].state(), (i, name)


# -- determinism ---------------------------------------------------------------------


def test_scenario_reruns_are_byte_identical(smoke_runs, faults_runs, compare_runs, overbook_runs):
    for (first, _), (second, _) in (smoke_runs, faults_runs, compare_runs, overbook_runs):
        assert canonical_json(first) == canonical_json(second)
        assert first["chain"]["tip_hash"] == second["chain"]["tip_hash"]


# -- end-to-end API --------------------------------------------------------------------


CUSTOMER = {"Authorization": "Bearer customer-dev-token"}


def _resolve_refs(client, system, refs):
    """Every (tx_id, height) pair must exist on-chain and in the API history."""
    assert refs
    for ref in refs:
        block = system.world.ledger.blocks[ref["height"] - 1]
        assert block.height == ref["height"]
        assert any(tx.tx_id == ref["tx_id"] for tx in block.transactions), ref


def test_end_to_end_api_booking_payment_cancel_refund():
    system = make_system(
        seed="api-accept", payment_script=["timeout", "ok"], flights=[dict(FAR_FLIGHT)]
    )
    client = TestClient(create_app(system))

    r = client.post(
        "/v1/bookings",
        headers=CUSTOMER,
        json={"customer": "Anika Chowdhury", "flight": "BG-901", "payment_method": "bKash"},
    )
    assert r.status_code == 503
    match = re.search(r"booking (\S+) remains Pending", r.json()["error"]["message"])
    assert match
    pnr = match.group(1)

    r = client.post("/v1/payments", headers=CUSTOMER, json={"pnr": pnr})
    assert r.status_code == 200
    payment_step = r.json()["data"]
    assert payment_step["status"] == "Confirmed"
    assert [ref["kind"] for ref in payment_step["tx_refs"]] == [
        "PaymentCaptured",
        "TicketIssued",
    ]
    _resolve_refs(client, system, payment_step["tx_refs"])

    r = client.post(
        f"/v1/bookings/{pnr}/cancel",
        headers=CUSTOMER,
        json={"reason": "schedule change", "cancel_time": 40},
    )
    assert r.status_code == 200
    cancel_step = r.json()["data"]
    assert cancel_step["status"] == "Refunded"
    assert cancel_step["refund_amount"] > 0
    assert [ref["kind"] for ref in cancel_step["tx_refs"]] == [
        "BookingCancelled",
        "RefundIssued",
    ]
    _resolve_refs(client, system, cancel_step["tx_refs"])

    r = client.get(f"/v1/bookings/{pnr}/history", headers=CUSTOMER)
    events = r.json()["data"]["events"]
    assert [e["kind"] for e in events] == [
        "PaymentCaptured",
        "TicketIssued",
        "BookingCancelled",
        "RefundIssued",
    ]
    positions = [(e["height"], e["index"]) for e in events]
    assert positions == sorted(positions) and len(set(positions)) == len(positions)

    by_id = {e["tx_id"]: e["height"] for e in events}
    for ref in payment_step["tx_refs"] + cancel_step["tx_refs"]:
        assert by_id[ref["tx_id"]] == ref["height"]

    r = client.get("/v1/chain/verify", headers=CUSTOMER)
    assert r.json()["data"]["valid"] is True


def test_single_call_booking_returns_both_saga_refs():
    system = make_system(seed="api-one", payment_script=["ok"], flights=[dict(FAR_FLIGHT)])
    client = TestClient(create_app(system))
    r = client.post(
        "/v1/bookings",
        headers=CUSTOMER,
        json={"customer": "Omar Faruk", "flight": "BG-901", "payment_method": "Visa"},
    )
    assert r.status_code == 201
    refs = r.json()["data"]["tx_refs"]
    assert [ref["kind"] for ref in refs] == ["PaymentCaptured", "TicketIssued"]
    _resolve_refs(client, system, refs)
