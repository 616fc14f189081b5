"""Targeted corruption of persisted chain logs.

Flips one byte (XOR 0xFF) inside a chosen block's stored bytes so a
subsequent verification pass can demonstrate detection. The framing
itself is left intact; the mutation lands in the block body.
"""

from __future__ import annotations

import struct
from pathlib import Path

from ..errors import CorruptLog, OffsetOutOfRange
from ..ledger.store import MAGIC, VERSION


def _frames(data: bytes) -> list[tuple[int, int]]:
    """(start, length) of every stored block body, in height order."""
    if data[:4] != MAGIC:
        raise CorruptLog(0, "bad magic")
    if len(data) < 5 or data[4] != VERSION:
        raise CorruptLog(4, "bad version")
    frames = []
    cursor = 5
    while cursor < len(data):
        if cursor + 4 > len(data):
            raise CorruptLog(cursor, "truncated frame length")
        (length,) = struct.unpack(">I", data[cursor : cursor + 4])
        cursor += 4
        if cursor + length > len(data):
            raise CorruptLog(cursor, "truncated frame body")
        frames.append((cursor, length))
        cursor += length
    return frames


def tamper_log(
    path: str | Path, height: int, offset: int, out_path: str | Path | None = None
) -> dict:
    """XOR 0xFF one byte at `offset` within block `height`'s stored bytes."""
    path = Path(path)
    data = path.read_bytes()
    frames = _frames(data)
    if not 1 <= height <= len(frames):
        raise OffsetOutOfRange(f"height {height} outside 1..{len(frames)}")
    start, length = frames[height - 1]
    if not 0 <= offset < length:
        raise OffsetOutOfRange(f"offset {offset} outside block of {length} bytes")
    position = start + offset
    mutated = bytearray(data)
    mutated[position] ^= 0xFF
    target = Path(out_path) if out_path is not None else path
    target.write_bytes(bytes(mutated))
    return {
        "path": str(target),
        "height": height,
        "offset": offset,
        "file_position": position,
        "original": data[position],
        "mutated": mutated[position],
    }


def block_sizes(path: str | Path) -> list[int]:
    """Stored byte length of each block; useful for choosing offsets."""
    return [length for _, length in _frames(Path(path).read_bytes())]
