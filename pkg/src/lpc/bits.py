"""Bit strings as uint8 numpy arrays of 0/1, most significant bit first."""
from __future__ import annotations

import numpy as np

from .errors import CorruptDataError


def int_to_bits(value: int, width: int) -> np.ndarray:
    if value < 0 or value >> width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def bits_to_int(bits) -> int:
    out = 0
    for b in np.asarray(bits).tolist():
        out = (out << 1) | int(b)
    return out


def bytes_to_bits(data: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))


def bits_to_bytes(bits) -> bytes:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % 8:
        raise ValueError(f"bit count {bits.size} is not a multiple of 8")
    return np.packbits(bits).tobytes()


def as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8).ravel()
    if arr.size and arr.max() > 1:
        raise ValueError("bit arrays may only hold 0 and 1")
    return arr


class BitWriter:
    def __init__(self):
        self._chunks: list[np.ndarray] = []
        self._length = 0

    def __len__(self):
        return self._length

    def write(self, value: int, width: int) -> None:
        if width:
            self.extend(int_to_bits(value, width))

    def extend(self, bits) -> None:
        bits = as_bits(bits)
        self._chunks.append(bits)
        self._length += bits.size

    def getvalue(self) -> np.ndarray:
        if not self._chunks:
            return np.zeros(0, dtype=np.uint8)
        return np.concatenate(self._chunks)


class BitReader:
    """Sequential reader; running past the end raises CorruptDataError."""

    def __init__(self, bits):
        self._bits = as_bits(bits)
        self.pos = 0

    @property
    def remaining(self) -> int:
        return self._bits.size - self.pos

    def read_bits(self, n: int) -> np.ndarray:
        if n > self.remaining:
            raise CorruptDataError(f"bit stream truncated: need {n}, have {self.remaining}")
        out = self._bits[self.pos:self.pos + n]
        self.pos += n
        return out

    def read(self, width: int) -> int:
        return bits_to_int(self.read_bits(width)) if width else 0
