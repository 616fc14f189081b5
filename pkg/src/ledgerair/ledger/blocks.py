"""Blocks: height-indexed transaction batches linked by predecessor hash.

The block hash covers the full header (height, prev_hash, tx_digest,
proposer, logical_time) where tx_digest commits to the ordered tx_ids, so a
change to any committed byte surfaces as a hash or signature mismatch.
Votes are recorded alongside the block; each vote signs a message binding
(height, block_hash, accept, voter) so votes cannot be replayed or edited.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import NamedTuple

from ..codec import Reader, enc_bytes, enc_str, enc_u8, enc_u64
from ..errors import DecodeError, InvalidHash
from ..keys import Signer
from .records import TransactionRecord, decode_transaction, encode_transaction

GENESIS_HASH = "0"

_HASH_RE = re.compile(r"^[0-9a-f]{64}$")


class Vote(NamedTuple):
    node: str
    accept: bool
    signature: bytes


@dataclass(frozen=True, slots=True)
class Block:
    height: int
    prev_hash: str
    transactions: tuple[TransactionRecord, ...]
    tx_digest: str
    block_hash: str
    proposer: str
    logical_time: int
    votes: tuple[Vote, ...] = ()
    # Set by the loader when a persisted record fails to parse; such a block
    # is a poison marker so verification stays total over corrupted logs.
    decode_error: str | None = None


def _check_hash_field(value: str) -> None:
    if value != GENESIS_HASH and not _HASH_RE.match(value):
        raise InvalidHash(f"malformed hash {value!r}")


def compute_tx_digest(transactions: tuple[TransactionRecord, ...]) -> str:
    joined = b"".join(enc_str(tx.tx_id) for tx in transactions)
    return hashlib.sha256(joined).hexdigest()


def header_bytes(height: int, prev_hash: str, tx_digest: str, proposer: str, logical_time: int) -> bytes:
    return (
        enc_u64(height)
        + enc_str(prev_hash)
        + enc_str(tx_digest)
        + enc_str(proposer)
        + enc_u64(logical_time)
    )


def compute_block_hash(height: int, prev_hash: str, tx_digest: str, proposer: str, logical_time: int) -> str:
    _check_hash_field(prev_hash)
    return hashlib.sha256(header_bytes(height, prev_hash, tx_digest, proposer, logical_time)).hexdigest()


def make_block(
    height: int,
    prev_hash: str,
    transactions: tuple[TransactionRecord, ...],
    proposer: str,
    logical_time: int,
    votes: tuple[Vote, ...] = (),
) -> Block:
    tx_digest = compute_tx_digest(transactions)
    return Block(
        height=height,
        prev_hash=prev_hash,
        transactions=transactions,
        tx_digest=tx_digest,
        block_hash=compute_block_hash(height, prev_hash, tx_digest, proposer, logical_time),
        proposer=proposer,
        logical_time=logical_time,
        votes=votes,
    )


def with_votes(block: Block, votes: tuple[Vote, ...]) -> Block:
    from dataclasses import replace

    return replace(block, votes=votes)


def vote_message(height: int, block_hash: str, accept: bool, node: str) -> bytes:
    return enc_str("vote") + enc_u64(height) + enc_str(block_hash) + enc_u8(1 if accept else 0) + enc_str(node)


def make_vote(signer: Signer, height: int, block_hash: str, accept: bool) -> Vote:
    message = vote_message(height, block_hash, accept, signer.identity)
    return Vote(node=signer.identity, accept=accept, signature=signer.sign(message))


def encode_block(block: Block) -> bytes:
    out = [
        enc_u64(block.height),
        enc_str(block.prev_hash),
        enc_str(block.tx_digest),
        enc_str(block.block_hash),
        enc_str(block.proposer),
        enc_u64(block.logical_time),
        enc_u64(len(block.transactions)),
    ]
    for tx in block.transactions:
        out.append(encode_transaction(tx))
    out.append(enc_u64(len(block.votes)))
    for vote in block.votes:
        out.append(enc_str(vote.node))
        out.append(enc_u8(1 if vote.accept else 0))
        out.append(enc_bytes(vote.signature))
    return b"".join(out)


def decode_block(data: bytes) -> Block:
    reader = Reader(data)
    height = reader.u64()
    prev_hash = reader.str_()
    tx_digest = reader.str_()
    block_hash = reader.str_()
    proposer = reader.str_()
    logical_time = reader.u64()
    tx_count = reader.u64()
    if tx_count > len(data):
        raise DecodeError(f"implausible transaction count {tx_count}")
    transactions = tuple(decode_transaction(reader) for _ in range(tx_count))
    vote_count = reader.u64()
    if vote_count > len(data):
        raise DecodeError(f"implausible vote count {vote_count}")
    votes = []
    for _ in range(vote_count):
        node = reader.str_()
        flag = reader.u8()
        if flag not in (0, 1):
            raise DecodeError(f"bad vote accept byte {flag:#x}")
        signature = reader.bytes_()
        votes.append(Vote(node=node, accept=flag == 1, signature=signature))
    reader.expect_end()
    return Block(
        height=height,
        prev_hash=prev_hash,
        transactions=transactions,
        tx_digest=tx_digest,
        block_hash=block_hash,
        proposer=proposer,
        logical_time=logical_time,
        votes=tuple(votes),
    )
