"""Bit-exact serialization of the auxiliary information.

Layouts (all fields big-endian, written MSB first):

* used-block record: ``flag:1 | regions:w | seeds:lam each |
  [merged:w | (row:d1/2, col:d1/2, value:lam) each]`` where ``w`` is
  `count_width(tau)` and the bracketed part is present iff ``flag``;
* unused-block record: ``row:d0/2 | col:d0/2`` (0-based block indices);
* recovery information: all unused records, then all used records, each
  group in block raster order;
* type-alpha: ``tau:16 | lam:4 | theta:32 | rec_offset:32 | rec_length:32``;
* type-beta: ``lam-3:4 | payload_start:28``.
"""
from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass, field

import numpy as np

from .bits import BitReader, BitWriter, int_to_bits
from .coloring import ConversionResult, MergedPixelRecord
from .errors import CorruptDataError

TYPE_ALPHA_BITS = 16 + 4 + 32 + 32 + 32
TYPE_BETA_BITS = 32
MARK_BITS = 32
HEADER_BITS = MARK_BITS + TYPE_ALPHA_BITS + MARK_BITS + TYPE_BETA_BITS


def ceil_log2(x: int) -> int:
    """Smallest k with 2**k >= x; 0 for x <= 1."""
    return 0 if x <= 1 else (int(x) - 1).bit_length()


def count_width(tau: int) -> int:
    return ceil_log2(tau * tau + 1)


@dataclass(frozen=True)
class FieldWidths:
    d0: int
    d1: int
    d2: int
    d3: int
    d4: int
    w_count: int


def widths(m: int, n: int, tau: int, lam: int, theta: int = 0) -> FieldWidths:
    """Field lengths of the auxiliary information.

    d0 and d1 are the widths of a block coordinate pair and an in-block
    coordinate pair, d2 a merged-pixel record. d3 and d4 are the reference
    type-alpha and type-beta lengths; the stored headers use the fixed
    TYPE_ALPHA_BITS and TYPE_BETA_BITS instead.
    """
    d0 = 2 * ceil_log2(max(m // tau, n // tau))
    d1 = 2 * ceil_log2(tau)
    d2 = d1 + lam
    d3 = 3 * ceil_log2(max(tau, theta, lam)) + 4 * ceil_log2(max(m, n))
    d4 = 2 * ceil_log2(max(m, n))
    return FieldWidths(d0, d1, d2, d3, d4, count_width(tau))


@dataclass
class BlockAuxRecord:
    seeds: list[int]
    merged: list[MergedPixelRecord] = field(default_factory=list)

    @classmethod
    def from_result(cls, result: ConversionResult) -> BlockAuxRecord:
        return cls(seeds=list(result.seeds), merged=list(result.merged))

    def bit_length(self, lam: int, tau: int) -> int:
        w = count_width(tau)
        n = 1 + w + len(self.seeds) * lam
        if self.merged:
            n += w + len(self.merged) * (2 * ceil_log2(tau) + lam)
        return n


def encode_block_record(record, lam: int, tau: int) -> np.ndarray:
    if isinstance(record, ConversionResult):
        record = BlockAuxRecord.from_result(record)
    w = count_width(tau)
    half = ceil_log2(tau)
    if not 1 <= len(record.seeds) <= tau * tau:
        raise ValueError(f"region count {len(record.seeds)} outside [1, {tau * tau}]")
    if len(record.merged) > tau * tau:
        raise ValueError(f"merged count {len(record.merged)} exceeds {tau * tau}")
    out = BitWriter()
    out.write(1 if record.merged else 0, 1)
    out.write(len(record.seeds), w)
    for seed in record.seeds:
        out.write(int(seed), lam)
    if record.merged:
        out.write(len(record.merged), w)
        for value, (r, c) in record.merged:
            out.write(r, half)
            out.write(c, half)
            out.write(int(value), lam)
    return out.getvalue()


def decode_block_record(reader: BitReader, lam: int, tau: int) -> BlockAuxRecord:
    w = count_width(tau)
    half = ceil_log2(tau)
    flag = reader.read(1)
    count = reader.read(w)
    if not 1 <= count <= tau * tau:
        raise CorruptDataError(f"region count {count} outside [1, {tau * tau}]")
    seeds = [reader.read(lam) for _ in range(count)]
    merged = []
    if flag:
        n_merged = reader.read(w)
        if not 1 <= n_merged <= tau * tau:
            raise CorruptDataError(f"merged count {n_merged} outside [1, {tau * tau}]")
        for _ in range(n_merged):
            r = reader.read(half)
            c = reader.read(half)
            if r >= tau or c >= tau:
                raise CorruptDataError(f"merged pixel ({r}, {c}) outside the block")
            merged.append(MergedPixelRecord(reader.read(lam), (r, c)))
    return BlockAuxRecord(seeds, merged)


def encode_recovery_info(unused_blocks, used_records, m: int, n: int,
                         tau: int, lam: int) -> np.ndarray:
    """Serialize unused block coordinates followed by used-block records."""
    half = widths(m, n, tau, lam).d0 // 2
    out = BitWriter()
    for i, j in unused_blocks:
        out.write(i, half)
        out.write(j, half)
    for record in used_records:
        out.extend(encode_block_record(record, lam, tau))
    return out.getvalue()


def decode_recovery_info(bits, m: int, n: int, tau: int, lam: int, theta: int):
    """Inverse of `encode_recovery_info`; the stream must be consumed exactly."""
    bi, bj = m // tau, n // tau
    if not 0 <= theta <= bi * bj:
        raise CorruptDataError(f"unused block count {theta} exceeds {bi * bj}")
    half = widths(m, n, tau, lam).d0 // 2
    reader = BitReader(bits)
    unused = []
    for _ in range(theta):
        i, j = reader.read(half), reader.read(half)
        if i >= bi or j >= bj:
            raise CorruptDataError(f"unused block ({i}, {j}) outside the {bi}x{bj} grid")
        unused.append((i, j))
    records = [decode_block_record(reader, lam, tau) for _ in range(bi * bj - theta)]
    if reader.remaining:
        raise CorruptDataError(f"{reader.remaining} trailing bits after recovery information")
    return unused, records


@dataclass(frozen=True)
class TypeAlpha:
    tau: int
    lam: int
    theta: int
    recovery_offset: int
    recovery_length: int


def encode_type_alpha(alpha: TypeAlpha) -> np.ndarray:
    out = BitWriter()
    out.write(alpha.tau, 16)
    out.write(alpha.lam, 4)
    out.write(alpha.theta, 32)
    out.write(alpha.recovery_offset, 32)
    out.write(alpha.recovery_length, 32)
    return out.getvalue()


def decode_type_alpha(bits) -> TypeAlpha:
    reader = BitReader(bits)
    alpha = TypeAlpha(reader.read(16), reader.read(4), reader.read(32),
                      reader.read(32), reader.read(32))
    if alpha.tau < 2 or not 3 <= alpha.lam <= 8:
        raise CorruptDataError(f"corrupt type-alpha parameters tau={alpha.tau} lam={alpha.lam}")
    return alpha


@dataclass(frozen=True)
class TypeBeta:
    """Where the payload area begins, addressed without knowledge of tau.

    `payload_start` indexes the room-bit sequence of the whole image (pixel
    raster order, bits ``lam-3`` down to 0 of each pixel, header bits
    skipped); `lam` is needed to walk that sequence.
    """

    payload_start: int
    lam: int = 3


def encode_type_beta(beta: TypeBeta) -> np.ndarray:
    out = BitWriter()
    out.write(beta.lam - 3, 4)
    out.write(beta.payload_start, 28)
    return out.getvalue()


def decode_type_beta(bits) -> TypeBeta:
    reader = BitReader(bits)
    lam = reader.read(4) + 3
    start = reader.read(28)
    if lam > 8:
        raise CorruptDataError(f"corrupt type-beta parameter lam={lam}")
    return TypeBeta(start, lam)


def derive_mark(key: bytes, label: str) -> int:
    """32-bit mark: HMAC-SHA-256(key, label) truncated to its first 4 bytes."""
    digest = hmac.new(bytes(key), label.encode("ascii"), hashlib.sha256).digest()
    return int.from_bytes(digest[:4], "big")


def mark_bits(key: bytes, label: str) -> np.ndarray:
    return int_to_bits(derive_mark(key, label), MARK_BITS)

