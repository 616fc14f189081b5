"""Append-only hash-chained block store with canonical encoding."""

from .records import (
    KINDS,
    SCHEMAS,
    TransactionRecord,
    canonical_encode,
    decode_transaction,
    encode_transaction,
    make_transaction,
    transaction_body,
)
from .blocks import (
    GENESIS_HASH,
    Block,
    Vote,
    compute_block_hash,
    compute_tx_digest,
    decode_block,
    encode_block,
    make_block,
    make_vote,
    vote_message,
    with_votes,
)
from .chain import (
    REASONS,
    Chain,
    Verdict,
    query_history,
    verify_chain,
)
from .store import load_chain, load_keys, persist_chain, save_keys

__all__ = [
    "KINDS",
    "SCHEMAS",
    "TransactionRecord",
    "canonical_encode",
    "decode_transaction",
    "encode_transaction",
    "make_transaction",
    "transaction_body",
    "GENESIS_HASH",
    "Block",
    "Vote",
    "compute_block_hash",
    "compute_tx_digest",
    "decode_block",
    "encode_block",
    "make_block",
    "make_vote",
    "vote_message",
    "with_votes",
    "REASONS",
    "Chain",
    "Verdict",
    "query_history",
    "verify_chain",
    "load_chain",
    "load_keys",
    "persist_chain",
    "save_keys",
]
