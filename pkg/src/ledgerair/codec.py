"""Canonical binary encoding used for hashing, signing, and the block log.

All integers are big-endian. Byte strings carry a u32 length prefix. Scalar
values are tagged with a single ASCII byte so the stream is self-describing
enough to decode strictly: ``S`` for utf-8 strings, ``I`` for signed 64-bit
integers, ``B`` for booleans. Two encodings are equal iff the encoded values
are equal, which is what makes the scheme safe to hash and sign.
"""

from __future__ import annotations

import struct

from .errors import DecodeError

TAG_STR = b"S"
TAG_INT = b"I"
TAG_BOOL = b"B"

Scalar = str | int | bool


def enc_u8(value: int) -> bytes:
    return struct.pack(">B", value)


def enc_u32(value: int) -> bytes:
    return struct.pack(">I", value)


def enc_u64(value: int) -> bytes:
    return struct.pack(">Q", value)


def enc_i64(value: int) -> bytes:
    return struct.pack(">q", value)


def enc_bytes(value: bytes) -> bytes:
    return enc_u32(len(value)) + value


def enc_str(value: str) -> bytes:
    return enc_bytes(value.encode("utf-8"))


def enc_value(value: Scalar) -> bytes:
    # bool is a subclass of int; test it first.
    if isinstance(value, bool):
        return TAG_BOOL + enc_u8(1 if value else 0)
    if isinstance(value, str):
        return TAG_STR + enc_str(value)
    if isinstance(value, int):
        if not (-(2**63) <= value < 2**63):
            raise ValueError(f"integer out of i64 range: {value}")
        return TAG_INT + enc_i64(value)
    raise TypeError(f"unsupported scalar type: {type(value).__name__}")


def enc_fields(fields: list[tuple[str, Scalar]]) -> bytes:
    """Encode named fields in the given order, names included."""
    out = [enc_u32(len(fields))]
    for name, value in fields:
        out.append(enc_str(name))
        out.append(enc_value(value))
    return b"".join(out)


class Reader:
    """Strict sequential decoder over a bytes buffer.

    Every read must stay in bounds and `expect_end` must find zero leftover
    bytes, so any mutation of a well-formed buffer that changes structure is
    caught as a DecodeError rather than silently tolerated.
    """

    def __init__(self, data: bytes) -> None:
        self._data = data
        self._pos = 0

    @property
    def pos(self) -> int:
        return self._pos

    def remaining(self) -> int:
        return len(self._data) - self._pos

    def take(self, n: int) -> bytes:
        if n < 0 or self._pos + n > len(self._data):
            raise DecodeError(f"unexpected end of data at byte {self._pos}")
        chunk = self._data[self._pos : self._pos + n]
        self._pos += n
        return chunk

    def u8(self) -> int:
        return self.take(1)[0]

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack(">Q", self.take(8))[0]

    def i64(self) -> int:
        return struct.unpack(">q", self.take(8))[0]

    def bytes_(self) -> bytes:
        return self.take(self.u32())

    def str_(self) -> str:
        raw = self.bytes_()
        try:
            return raw.decode("utf-8", errors="strict")
        except UnicodeDecodeError as exc:
            raise DecodeError(f"invalid utf-8 at byte {self._pos}: {exc}") from exc

    def value(self) -> Scalar:
        tag = self.take(1)
        if tag == TAG_STR:
            return self.str_()
        if tag == TAG_INT:
            return self.i64()
        if tag == TAG_BOOL:
            flag = self.u8()
            if flag not in (0, 1):
                raise DecodeError(f"bad bool byte {flag:#x}")
            return flag == 1
        raise DecodeError(f"unknown value tag {tag!r}")

    def fields(self) -> list[tuple[str, Scalar]]:
        count = self.u32()
        out = []
        for _ in range(count):
            name = self.str_()
            out.append((name, self.value()))
        return out

    def expect_end(self) -> None:
        if self.remaining() != 0:
            raise DecodeError(f"{self.remaining()} trailing bytes after record")
