"""Transaction records and their canonical encoding.

A transaction is a tagged union over six kinds. Each kind carries a flat
payload whose field names, order, and scalar types are fixed by SCHEMAS, so
the canonical encoding of a record is unique and reproducible. The tx_id is
the SHA-256 of the canonical body (kind, payload, author, logical_time) and
the signature covers those same bytes.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from ..codec import Reader, Scalar, enc_bytes, enc_fields, enc_str, enc_u64
from ..errors import DecodeError, SchemaViolation
from ..keys import Signer

SCHEMAS: dict[str, tuple[tuple[str, type], ...]] = {
    "TicketIssued": (
        ("pnr", str),
        ("customer", str),
        ("flight", str),
        ("departure_time", int),
        ("seat", str),
        ("fare", int),
        ("payment", str),
    ),
    "PaymentCaptured": (
        ("payment_id", str),
        ("pnr", str),
        ("amount", int),
        ("method", str),
    ),
    "RefundIssued": (
        ("refund_id", str),
        ("pnr", str),
        ("amount", int),
        ("reason", str),
    ),
    "BookingCancelled": (
        ("pnr", str),
        ("reason", str),
        ("cancel_time", int),
    ),
    "ReviewSubmitted": (
        ("review_id", str),
        ("pnr", str),
        ("rating", int),
        ("text", str),
        ("verified", bool),
    ),
    "InventoryAdjusted": (
        ("flight", str),
        ("route", str),
        ("departure_time", int),
        ("delta", int),
        ("fare", int),
        ("reason", str),
    ),
}

KINDS = tuple(SCHEMAS)


@dataclass(frozen=True, slots=True)
class TransactionRecord:
    tx_id: str
    kind: str
    payload: dict[str, Scalar]
    author: str
    signature: bytes
    logical_time: int


def _check_payload(kind: str, payload: dict[str, Scalar]) -> None:
    schema = SCHEMAS.get(kind)
    if schema is None:
        raise SchemaViolation("kind", f"unknown transaction kind {kind!r}")
    for name, typ in schema:
        if name not in payload:
            raise SchemaViolation(name, "missing")
        value = payload[name]
        # bool passes isinstance(int) checks; require the exact scalar type.
        if type(value) is not typ:
            raise SchemaViolation(name, f"expected {typ.__name__}, got {type(value).__name__}")
    extra = set(payload) - {name for name, _ in schema}
    if extra:
        raise SchemaViolation(sorted(extra)[0], "unexpected field")


def canonical_encode(kind: str, payload: dict[str, Scalar], author: str, logical_time: int) -> bytes:
    """Encode the signed/hashed body of a transaction."""
    _check_payload(kind, payload)
    ordered = [(name, payload[name]) for name, _ in SCHEMAS[kind]]
    return enc_str(kind) + enc_fields(ordered) + enc_str(author) + enc_u64(logical_time)


def transaction_body(tx: TransactionRecord) -> bytes:
    return canonical_encode(tx.kind, tx.payload, tx.author, tx.logical_time)


def make_transaction(
    kind: str,
    payload: dict[str, Scalar],
    signer: Signer,
    logical_time: int,
) -> TransactionRecord:
    body = canonical_encode(kind, payload, signer.identity, logical_time)
    return TransactionRecord(
        tx_id=hashlib.sha256(body).hexdigest(),
        kind=kind,
        payload=dict(payload),
        author=signer.identity,
        signature=signer.sign(body),
        logical_time=logical_time,
    )


def encode_transaction(tx: TransactionRecord) -> bytes:
    return enc_str(tx.tx_id) + transaction_body(tx) + enc_bytes(tx.signature)


def decode_transaction(reader: Reader) -> TransactionRecord:
    tx_id = reader.str_()
    kind = reader.str_()
    schema = SCHEMAS.get(kind)
    if schema is None:
        raise DecodeError(f"unknown transaction kind {kind!r}")
    fields = reader.fields()
    if len(fields) != len(schema):
        raise DecodeError(f"{kind}: expected {len(schema)} payload fields, got {len(fields)}")
    payload: dict[str, Scalar] = {}
    for (name, value), (want_name, want_type) in zip(fields, schema):
        if name != want_name or type(value) is not want_type:
            raise DecodeError(f"{kind}: payload field mismatch at {want_name!r}")
        payload[name] = value
    author = reader.str_()
    logical_time = reader.u64()
    signature = reader.bytes_()
    return TransactionRecord(
        tx_id=tx_id,
        kind=kind,
        payload=payload,
        author=author,
        signature=signature,
        logical_time=logical_time,
    )
