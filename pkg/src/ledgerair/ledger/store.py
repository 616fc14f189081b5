"""Flat-file persistence for committed chains.

Format: magic "ALRB", one version byte 0x01, then repeated
[u32 big-endian length][canonical block bytes]. Framing damage (bad magic,
bad version, truncated length or body) raises CorruptLog with the byte
offset. A record that frames correctly but fails to parse is loaded as a
poisoned Block carrying decode_error, so verify_chain can still return a
verdict for the whole file instead of crashing.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

from ..codec import enc_u32
from ..errors import CorruptLog, DecodeError
from ..keys import KeyRing
from .blocks import Block, decode_block, encode_block
from .chain import Chain

MAGIC = b"ALRB"
VERSION = 0x01


def persist_chain(chain: Chain, path: str | Path) -> None:
    out = [MAGIC, bytes([VERSION])]
    for block in chain.blocks:
        encoded = encode_block(block)
        out.append(enc_u32(len(encoded)))
        out.append(encoded)
    Path(path).write_bytes(b"".join(out))


def _poisoned(position: int, error: str) -> Block:
    return Block(
        height=position,
        prev_hash="",
        transactions=(),
        tx_digest="",
        block_hash="",
        proposer="",
        logical_time=0,
        votes=(),
        decode_error=error,
    )


def load_chain(path: str | Path) -> Chain:
    data = Path(path).read_bytes()
    if len(data) < 5:
        raise CorruptLog(0, "file shorter than header")
    if data[:4] != MAGIC:
        raise CorruptLog(0, "bad magic")
    if data[4] != VERSION:
        raise CorruptLog(4, f"unsupported version {data[4]:#x}")
    blocks: list[Block] = []
    offset = 5
    position = 0
    while offset < len(data):
        if offset + 4 > len(data):
            raise CorruptLog(offset, "truncated length prefix")
        (length,) = struct.unpack(">I", data[offset : offset + 4])
        body_start = offset + 4
        if body_start + length > len(data):
            raise CorruptLog(offset, f"record length {length} overruns file")
        position += 1
        body = data[body_start : body_start + length]
        try:
            blocks.append(decode_block(body))
        except DecodeError as exc:
            blocks.append(_poisoned(position, str(exc)))
        offset = body_start + length
    return Chain(blocks=blocks)


def save_keys(path: str | Path, keyring: KeyRing, quorum: int) -> None:
    """Sidecar with the public keys and quorum needed to verify a log."""
    doc = {
        "quorum": quorum,
        "keys": {identity: keyring.public_bytes(identity).hex() for identity in keyring.identities()},
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_keys(path: str | Path) -> tuple[KeyRing, int]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    ring = KeyRing()
    for identity, hex_key in doc["keys"].items():
        ring.register(identity, bytes.fromhex(hex_key))
    return ring, int(doc["quorum"])


def keys_sidecar(log_path: str | Path) -> Path:
    return Path(str(log_path) + ".keys.json")
