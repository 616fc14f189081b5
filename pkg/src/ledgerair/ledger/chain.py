"""The chain: committed blocks plus the pending transaction pool.

Committed blocks are append-only. verify_chain re-derives every hash,
signature, and vote from scratch and reports the lowest failing height with
a machine-readable reason, which is the whole tamper-evidence story: any
byte of committed state that changes makes some recomputation disagree.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from ..errors import BadSignature, DuplicateTransaction, EmptyPool, InvalidHash, UnknownNode
from ..keys import KeyRing
from .blocks import (
    GENESIS_HASH,
    Block,
    compute_block_hash,
    compute_tx_digest,
    make_block,
    vote_message,
)
from .records import TransactionRecord, transaction_body


class REASONS:
    DECODE_ERROR = "DecodeError"
    HEIGHT_MISMATCH = "HeightMismatch"
    LINK_MISMATCH = "LinkMismatch"
    HASH_MISMATCH = "HashMismatch"
    BAD_SIGNATURE = "BadSignature"
    BAD_VOTE_SIGNATURE = "BadVoteSignature"
    DUPLICATE_VOTER = "DuplicateVoter"
    UNKNOWN_VOTER = "UnknownVoter"
    INSUFFICIENT_VOTES = "InsufficientVotes"
    DUPLICATE_TRANSACTION = "DuplicateTransaction"


@dataclass(frozen=True, slots=True)
class Verdict:
    ok: bool
    height: int | None = None
    reason: str | None = None
    detail: str = ""

    @staticmethod
    def valid() -> "Verdict":
        return Verdict(ok=True)

    @staticmethod
    def invalid(height: int, reason: str, detail: str = "") -> "Verdict":
        return Verdict(ok=False, height=height, reason=reason, detail=detail)


@dataclass
class Chain:
    blocks: list[Block] = field(default_factory=list)
    pending: list[TransactionRecord] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._committed_ids = {tx.tx_id for block in self.blocks for tx in block.transactions}
        self._pending_ids = {tx.tx_id for tx in self.pending}

    @property
    def height(self) -> int:
        return len(self.blocks)

    @property
    def tip_hash(self) -> str:
        return self.blocks[-1].block_hash if self.blocks else GENESIS_HASH

    def knows_tx(self, tx_id: str) -> bool:
        return tx_id in self._committed_ids or tx_id in self._pending_ids

    def has_committed(self, tx_id: str) -> bool:
        return tx_id in self._committed_ids

    def add_transaction(self, tx: TransactionRecord, keyring: KeyRing) -> None:
        if self.knows_tx(tx.tx_id):
            raise DuplicateTransaction(tx.tx_id)
        body = transaction_body(tx)
        if hashlib.sha256(body).hexdigest() != tx.tx_id:
            raise InvalidHash(f"tx_id does not match content for {tx.tx_id[:12]}")
        keyring.verify(tx.author, body, tx.signature)
        self.pending.append(tx)
        self._pending_ids.add(tx.tx_id)

    def seal_block(self, proposer: str, logical_time: int) -> Block:
        """Drain pending into a candidate block; commitment is consensus's job."""
        if not self.pending:
            raise EmptyPool("no pending transactions to seal")
        block = make_block(
            height=self.height + 1,
            prev_hash=self.tip_hash,
            transactions=tuple(self.pending),
            proposer=proposer,
            logical_time=logical_time,
        )
        self.pending.clear()
        self._pending_ids.clear()
        return block

    def append_block(self, block: Block) -> None:
        """Append a consensus-committed block; caller guarantees validity."""
        self.blocks.append(block)
        for tx in block.transactions:
            self._committed_ids.add(tx.tx_id)
            self._pending_ids.discard(tx.tx_id)
        self.pending = [tx for tx in self.pending if tx.tx_id not in self._committed_ids]


def _verify_votes(block: Block, keyring: KeyRing, quorum: int) -> Verdict | None:
    seen: set[str] = set()
    accepting = 0
    for vote in block.votes:
        if vote.node in seen:
            return Verdict.invalid(block.height, REASONS.DUPLICATE_VOTER, vote.node)
        seen.add(vote.node)
        if not keyring.knows(vote.node):
            return Verdict.invalid(block.height, REASONS.UNKNOWN_VOTER, vote.node)
        message = vote_message(block.height, block.block_hash, vote.accept, vote.node)
        try:
            keyring.verify(vote.node, message, vote.signature)
        except (BadSignature, UnknownNode):
            return Verdict.invalid(block.height, REASONS.BAD_VOTE_SIGNATURE, vote.node)
        if vote.accept:
            accepting += 1
    if accepting < quorum:
        return Verdict.invalid(
            block.height, REASONS.INSUFFICIENT_VOTES, f"{accepting} accepting < quorum {quorum}"
        )
    return None


def verify_chain(chain: Chain, keyring: KeyRing, quorum: int) -> Verdict:
    prev_hash = GENESIS_HASH
    seen_tx: set[str] = set()
    for index, block in enumerate(chain.blocks, start=1):
        if block.decode_error is not None:
            return Verdict.invalid(index, REASONS.DECODE_ERROR, block.decode_error)
        if block.height != index:
            return Verdict.invalid(index, REASONS.HEIGHT_MISMATCH, f"stored height {block.height}")
        if block.prev_hash != prev_hash:
            return Verdict.invalid(index, REASONS.LINK_MISMATCH, "prev_hash does not match tip")
        for tx in block.transactions:
            body = transaction_body(tx)
            if hashlib.sha256(body).hexdigest() != tx.tx_id:
                return Verdict.invalid(index, REASONS.HASH_MISMATCH, f"tx_id {tx.tx_id[:12]}")
        if compute_tx_digest(block.transactions) != block.tx_digest:
            return Verdict.invalid(index, REASONS.HASH_MISMATCH, "tx_digest")
        try:
            recomputed = compute_block_hash(
                block.height, block.prev_hash, block.tx_digest, block.proposer, block.logical_time
            )
        except InvalidHash:
            return Verdict.invalid(index, REASONS.HASH_MISMATCH, "malformed prev_hash")
        if recomputed != block.block_hash:
            return Verdict.invalid(index, REASONS.HASH_MISMATCH, "block_hash")
        for tx in block.transactions:
            if not keyring.check(tx.author, transaction_body(tx), tx.signature):
                return Verdict.invalid(index, REASONS.BAD_SIGNATURE, f"tx {tx.tx_id[:12]}")
        vote_verdict = _verify_votes(block, keyring, quorum)
        if vote_verdict is not None:
            return vote_verdict
        for tx in block.transactions:
            if tx.tx_id in seen_tx:
                return Verdict.invalid(index, REASONS.DUPLICATE_TRANSACTION, tx.tx_id[:12])
            seen_tx.add(tx.tx_id)
        prev_hash = block.block_hash
    return Verdict.valid()


def query_history(
    chain: Chain,
    pnr: str | None = None,
    customer: str | None = None,
    flight: str | None = None,
    kind: str | None = None,
    time_range: tuple[int, int] | None = None,
) -> list[TransactionRecord]:
    """Committed transactions matching every provided filter, in chain order."""
    out: list[TransactionRecord] = []
    for block in chain.blocks:
        for tx in block.transactions:
            if pnr is not None and tx.payload.get("pnr") != pnr:
                continue
            if customer is not None and tx.payload.get("customer") != customer:
                continue
            if flight is not None and tx.payload.get("flight") != flight:
                continue
            if kind is not None and tx.kind != kind:
                continue
            if time_range is not None and not (time_range[0] <= tx.logical_time <= time_range[1]):
                continue
            out.append(tx)
    return out
