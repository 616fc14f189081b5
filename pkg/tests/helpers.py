"""Shared fixture builders for the test suite."""

from __future__ import annotations

from ledgerair.consensus import ClusterWorld, QuorumConfig
from ledgerair.keys import KeyRing, Signer, bootstrap_keyring
from ledgerair.ledger import Chain, make_block, make_vote, with_votes
from ledgerair.ledger.records import TransactionRecord, make_transaction
from ledgerair.services import ReservationSystem

SERVICE_IDS = ["booking-service", "payment-service", "inventory-service", "review-service"]

DEFAULT_FLIGHT = {
    "flight": "BG-147",
    "route": "DAC-CGP",
    "departure_time": 100,
    "capacity": 3,
    "fare": 10000,
}


def make_system(
    seed: str = "svc",
    n_nodes: int = 4,
    payment_script: list[str] | None = None,
    fault_plan: list | None = None,
    flights: list[dict] | None = None,
    seed_flights: bool = True,
    **config_kw,
) -> ReservationSystem:
    config = QuorumConfig(n_nodes=n_nodes, **config_kw)
    world = ClusterWorld(config, seed, extra_identities=tuple(SERVICE_IDS), fault_plan=fault_plan)
    system = ReservationSystem(world, payment_script=payment_script)
    if seed_flights:
        system.seed_flights(flights if flights is not None else [dict(DEFAULT_FLIGHT)])
    return system


def cluster_keys(seed: str, n_nodes: int) -> tuple[KeyRing, dict[str, Signer]]:
    identities = [f"node-{i}" for i in range(n_nodes)] + SERVICE_IDS
    return bootstrap_keyring(seed, identities)


def ticket_tx(signer: Signer, pnr: str, logical_time: int, flight: str = "DAC to CGP") -> TransactionRecord:
    return make_transaction(
        "TicketIssued",
        {
            "pnr": pnr,
            "customer": "Biman Barua",
            "flight": flight,
            "departure_time": 48,
            "seat": "1A",
            "fare": 10000,
            "payment": "Credit Card",
        },
        signer,
        logical_time,
    )


def payment_tx(signer: Signer, pnr: str, logical_time: int, amount: int = 10000) -> TransactionRecord:
    return make_transaction(
        "PaymentCaptured",
        {"payment_id": f"pay-{pnr}", "pnr": pnr, "amount": amount, "method": "Credit Card"},
        signer,
        logical_time,
    )


def refund_tx(signer: Signer, pnr: str, logical_time: int, amount: int = 8000) -> TransactionRecord:
    return make_transaction(
        "RefundIssued",
        {"refund_id": f"ref-{pnr}", "pnr": pnr, "amount": amount, "reason": "cancelled in window"},
        signer,
        logical_time,
    )


def committed_chain(
    seed: str = "fixture",
    n_blocks: int = 3,
    txs_per_block: int = 2,
    n_nodes: int = 4,
    quorum: int = 3,
) -> tuple[Chain, KeyRing, int]:
    """Build a fully voted committed chain for verification tests."""
    keyring, signers = cluster_keys(seed, n_nodes)
    chain = Chain()
    tick = 0
    serial = 0
    for height in range(1, n_blocks + 1):
        txs = []
        for _ in range(txs_per_block):
            serial += 1
            tick += 1
            txs.append(ticket_tx(signers["booking-service"], f"PNR{serial:03d}", tick))
        tick += 1
        proposer = f"node-{(height - 1) % n_nodes}"
        block = make_block(height, chain.tip_hash, tuple(txs), proposer, tick)
        votes = tuple(
            make_vote(signers[f"node-{i}"], block.height, block.block_hash, True) for i in range(n_nodes)
        )
        chain.append_block(with_votes(block, votes))
    return chain, keyring, quorum
