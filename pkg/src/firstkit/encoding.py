"""Canonical, length-prefixed byte encoding.

Each field is written as a 4-byte big-endian length followed by its payload.
Integers are unsigned big-endian with no leading zero bytes (zero encodes as a
single ``0x00``), strings are UTF-8. Field order is fixed by the caller, so no
type tags are written; decoding returns raw payloads and the caller converts.
"""

from __future__ import annotations

from typing import Iterable, Union

Field = Union[bytes, str, int]

_LEN = 4


def int_to_bytes(value: int) -> bytes:
    if value < 0:
        raise ValueError("only non-negative integers are encodable")
    if value == 0:
        return b"\x00"
    return value.to_bytes((value.bit_length() + 7) // 8, "big")


def bytes_to_int(data: bytes) -> int:
    return int.from_bytes(data, "big")


def _payload(field: Field) -> bytes:
    if isinstance(field, bool):
        raise TypeError("booleans are not encodable; use an int")
    if isinstance(field, int):
        return int_to_bytes(field)
    if isinstance(field, str):
        return field.encode("utf-8")
    if isinstance(field, (bytes, bytearray, memoryview)):
        return bytes(field)
    raise TypeError(f"cannot encode {type(field).__name__}")


def encode(*fields: Field) -> bytes:
    out = bytearray()
    for f in fields:
        p = _payload(f)
        out += len(p).to_bytes(_LEN, "big")
        out += p
    return bytes(out)


def encode_seq(items: Iterable[Field]) -> bytes:
    """Encode a variable-length sequence as a count followed by its fields."""
    items = list(items)
    return encode(len(items), *items)


def decode(data: bytes) -> list[bytes]:
    """Split an encoding back into raw field payloads.

    Raises ``ValueError`` on truncated or trailing data.
    """
    fields = []
    i = 0
    n = len(data)
    while i < n:
        if i + _LEN > n:
            raise ValueError("truncated length prefix")
        size = int.from_bytes(data[i:i + _LEN], "big")
        i += _LEN
        if i + size > n:
            raise ValueError("truncated field")
        fields.append(bytes(data[i:i + size]))
        i += size
    return fields


def decode_seq(data: bytes) -> list[bytes]:
    fields = decode(data)
    if not fields:
        raise ValueError("empty sequence encoding")
    count = bytes_to_int(fields[0])
    if count != len(fields) - 1:
        raise ValueError("sequence count does not match payload")
    return fields[1:]
