"""Canonical encoding: golden vectors, strict decoding, round-trip laws.

Golden values below were generated once by tests/oracles/encode_oracle.py,
an independent encoder implementation, and are frozen here.
"""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ledgerair.codec import (
    Reader,
    enc_bytes,
    enc_fields,
    enc_str,
    enc_u8,
    enc_u32,
    enc_u64,
    enc_value,
)
from ledgerair.errors import DecodeError, SchemaViolation
from ledgerair.keys import derive_signer
from ledgerair.ledger.records import canonical_encode, make_transaction

GOLDEN_BODY_HEX = (
    "0000000c5469636b65744973737565640000000700000003706e72530000000647304c4430"
    "3100000008637573746f6d6572530000000b42696d616e2042617275610000000666"
    "6c69676874530000000a44414320746f204347500000000e6465706172747572655f74696d"
    "654900000000000000300000000473656174530000000231410000000466617265490000"
    "000000002710000000077061796d656e74530000000b43726564697420436172640000000f"
    "626f6f6b696e672d736572766963650000000000000007"
)
GOLDEN_TX_ID = "2c1a71929347ca57806ce4d90137817d691fd4f973159a07b09ff243b45ba0c5"
GOLDEN_SIGNATURE_HEX = (
    "921df415d1b7bc2253f5f00f046c1c4b179004195ba587f295c752f4b3ccbdd8"
    "450aa616c81c6e163cbccbea8a75666a82f42359cf4ccf0ec25372b4387b1909"
)

GOLDEN_PAYLOAD = {
    "pnr": "G0LD01",
    "customer": "Biman Barua",
    "flight": "DAC to CGP",
    "departure_time": 48,
    "seat": "1A",
    "fare": 10000,
    "payment": "Credit Card",
}


def test_golden_body_bytes():
    body = canonical_encode("TicketIssued", GOLDEN_PAYLOAD, "booking-service", 7)
    assert body == bytes.fromhex(GOLDEN_BODY_HEX)


def test_golden_tx_id_and_signature():
    signer = derive_signer("golden", "booking-service")
    tx = make_transaction("TicketIssued", GOLDEN_PAYLOAD, signer, 7)
    assert tx.tx_id == GOLDEN_TX_ID
    assert tx.signature == bytes.fromhex(GOLDEN_SIGNATURE_HEX)


def test_encoding_deterministic():
    a = canonical_encode("TicketIssued", GOLDEN_PAYLOAD, "booking-service", 7)
    b = canonical_encode("TicketIssued", dict(GOLDEN_PAYLOAD), "booking-service", 7)
    assert a == b


def test_encoding_differs_on_payload():
    other = dict(GOLDEN_PAYLOAD, seat="1B")
    a = canonical_encode("TicketIssued", GOLDEN_PAYLOAD, "booking-service", 7)
    b = canonical_encode("TicketIssued", other, "booking-service", 7)
    assert a != b


def test_payload_schema_enforced():
    missing = dict(GOLDEN_PAYLOAD)
    del missing["payment"]
    with pytest.raises(SchemaViolation) as err:
        canonical_encode("TicketIssued", missing, "booking-service", 7)
    assert err.value.field == "payment"

    wrong_type = dict(GOLDEN_PAYLOAD, fare="10000")
    with pytest.raises(SchemaViolation):
        canonical_encode("TicketIssued", wrong_type, "booking-service", 7)

    extra = dict(GOLDEN_PAYLOAD, bogus=1)
    with pytest.raises(SchemaViolation):
        canonical_encode("TicketIssued", extra, "booking-service", 7)

    with pytest.raises(SchemaViolation):
        canonical_encode("NoSuchKind", {}, "booking-service", 7)


def test_bool_and_int_encode_differently():
    assert enc_value(True) != enc_value(1)
    assert enc_value(False) != enc_value(0)


def test_i64_range_rejected():
    with pytest.raises(ValueError):
        enc_value(2**63)


def test_reader_primitives():
    data = enc_u8(7) + enc_u32(80) + enc_u64(900) + enc_bytes(b"xy") + enc_str("hi")
    r = Reader(data)
    assert r.u8() == 7
    assert r.u32() == 80
    assert r.u64() == 900
    assert r.bytes_() == b"xy"
    assert r.str_() == "hi"
    r.expect_end()


def test_reader_rejects_trailing_bytes():
    r = Reader(enc_u8(1) + b"\x00")
    r.u8()
    with pytest.raises(DecodeError):
        r.expect_end()


def test_reader_rejects_truncation():
    r = Reader(enc_u32(10) + b"abc")
    with pytest.raises(DecodeError):
        r.bytes_()


def test_reader_rejects_bad_bool():
    r = Reader(b"B\x02")
    with pytest.raises(DecodeError):
        r.value()


def test_reader_rejects_unknown_tag():
    r = Reader(b"Z\x00")
    with pytest.raises(DecodeError):
        r.value()


def test_reader_rejects_bad_utf8():
    r = Reader(enc_bytes(b"\xff\xfe"))
    with pytest.raises(DecodeError):
        r.str_()


scalars = st.one_of(
    st.booleans(),
    st.integers(min_value=-(2**63), max_value=2**63 - 1),
    st.text(max_size=40),
)
field_lists = st.lists(st.tuples(st.text(max_size=20), scalars), max_size=8)


@given(field_lists)
def test_fields_round_trip(fields):
    encoded = enc_fields(fields)
    r = Reader(encoded)
    assert r.fields() == fields
    r.expect_end()


@given(field_lists, field_lists)
def test_fields_injective(a, b):
    if a != b:
        assert enc_fields(a) != enc_fields(b)
    else:
        assert enc_fields(a) == enc_fields(b)
