"""Room reservation, encryption, embedding, extraction and recovery.

Layout of the reserved image (``H = 212`` header bits)::

    low plane : block slots, unused blocks first (original values), then
                converted used blocks, each group in block raster order
    CR        : room bits (bits lam-3..0) of every pixel in a used slot,
                pixel raster order, with the header bits moved to the end
    CR[0, L)  : recovery information
    CR' tail  : payload area, up to the header
    header    : bit 0 of the last H pixels in raster order:
                start mark | type-alpha | end mark | type-beta

The header location depends only on the image size, and the payload area
is a suffix of the room-bit sequence that contains no unused-block
pixels. A receiver who holds only the data-hiding key can therefore reach
the payload through type-beta without knowing tau or theta.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import auxcodec
from .auxcodec import HEADER_BITS, MARK_BITS, TYPE_ALPHA_BITS, TYPE_BETA_BITS, TypeAlpha, TypeBeta
from .bitprep import PrepConfig, assemble_blocks, invert_image, partition_blocks, split_planes
from .bits import as_bits, bits_to_int
from .cipher import encrypt_bits, encrypt_image_selective, full_mask, keystream
from .coloring import DEFAULT_BUDGET, convert_block
from .errors import CapacityError, CorruptDataError, FormatError, ImageUnsupportedError, KeyMismatchError
from .imageio import check_image
from .regions import label_regions

START_LABEL = "start"
END_LABEL = "end"
PAYLOAD_END_LABEL = "end-payload"
PAD_LABEL = "pad"
TYPE_BETA_LABEL = "type-beta"

_ALPHA_AT = MARK_BITS
_END_AT = _ALPHA_AT + TYPE_ALPHA_BITS
_BETA_AT = _END_AT + MARK_BITS


@dataclass
class CapacityReport:
    phi: int
    eta: float
    room_total: int
    aux_total: int
    unused_info_bits: int
    used_info_bits: int
    header_bits: int
    theta: int
    gamma: int
    phi_ref: int
    seed_counts: list[int] = field(default_factory=list)
    merged_counts: list[int] = field(default_factory=list)
    waste: int = 0

    @property
    def max_payload(self) -> int:
        """Largest payload `embed` accepts: the end mark takes 32 bits of phi."""
        return max(self.phi - MARK_BITS, 0)


@dataclass
class ReservedLayout:
    shape: tuple[int, int]
    tau: int
    lam: int
    theta: int
    unused_blocks: list[tuple[int, int]]
    used_blocks: list[tuple[int, int]]
    cr_length: int
    recovery_length: int
    payload_start: int
    payload_start_phys: int
    header_bits: int = HEADER_BITS

    @property
    def slot_order(self) -> list[tuple[int, int]]:
        """Original block coordinates held by slot 0, 1, 2, ..."""
        return self.unused_blocks + self.used_blocks

    @property
    def payload_span(self) -> tuple[int, int]:
        return self.payload_start, self.cr_length - self.header_bits

    @property
    def header_span(self) -> tuple[int, int]:
        return self.cr_length - self.header_bits, self.cr_length


# room-bit geometry ---------------------------------------------------------

def _room_sequence(npix: int, lam: int, used=None):
    """Pixel indices and bit positions of room bits outside the header."""
    per = lam - 2
    pix = np.repeat(np.arange(npix, dtype=np.int64), per)
    bit = np.tile(np.arange(per - 1, -1, -1, dtype=np.int64), npix)
    keep = ~((pix >= npix - HEADER_BITS) & (bit == 0))
    if used is not None:
        keep &= np.asarray(used).ravel()[pix]
    return pix[keep], bit[keep]


def _header_positions(npix: int):
    pix = np.arange(npix - HEADER_BITS, npix, dtype=np.int64)
    return pix, np.zeros(HEADER_BITS, dtype=np.int64)


def _cr_positions(shape, tau: int, lam: int, theta: int):
    used = _used_pixel_mask(shape, tau, theta)
    npix = shape[0] * shape[1]
    pix, bit = _room_sequence(npix, lam, used)
    hpix, hbit = _header_positions(npix)
    return np.concatenate([pix, hpix]), np.concatenate([bit, hbit])


def _used_pixel_mask(shape, tau: int, theta: int) -> np.ndarray:
    m, n = shape
    bj = n // tau
    rows = np.arange(m) // tau
    cols = np.arange(n) // tau
    slot = rows[:, None] * bj + cols[None, :]
    return slot >= theta


def _read_bits(flat: np.ndarray, pix, bit) -> np.ndarray:
    return ((flat[pix] >> bit.astype(np.uint8)) & 1).astype(np.uint8)


def _write_bits(flat: np.ndarray, pix, bit, values) -> None:
    values = as_bits(values)
    for k in np.unique(bit):
        sel = bit == k
        p = pix[sel]
        flat[p] = (flat[p] & np.uint8(0xFF ^ (1 << int(k)))) | (values[sel] << np.uint8(k))


def _header_bits(flat: np.ndarray) -> np.ndarray:
    return (flat[flat.size - HEADER_BITS:] & 1).astype(np.uint8)


def _write_header_field(flat: np.ndarray, offset: int, bits) -> None:
    bits = as_bits(bits)
    start = flat.size - HEADER_BITS + offset
    seg = flat[start:start + bits.size]
    flat[start:start + bits.size] = (seg & np.uint8(0xFE)) | bits


# capacity -----------------------------------------------------------------

def reference_capacity(m: int, n: int, tau: int, lam: int, theta: int,
                  seed_counts, merged_counts) -> int:
    """Net capacity under the compact accounting: no flag or count fields, d3 + d4 header bits."""
    w = auxcodec.widths(m, n, tau, lam, theta)
    gamma = (m // tau) * (n // tau) - theta
    aux = sum(d * lam + e * w.d2 for d, e in zip(seed_counts, merged_counts))
    return gamma * tau * tau * (lam - 2) - theta * w.d0 - aux - w.d3 - w.d4


def capacity(img, cfg: PrepConfig = PrepConfig()) -> CapacityReport:
    return reserve(img, cfg)[2]


# content owner --------------------------------------------------------------

def classify_blocks(records, m, n, tau, lam):
    """Split block coordinates into (unused, used) by net room contribution."""
    d0 = auxcodec.widths(m, n, tau, lam).d0
    room = tau * tau * (lam - 2)
    unused, used = [], []
    for (i, j), record in records.items():
        if record.bit_length(lam, tau) + d0 >= room:
            unused.append((i, j))
        else:
            used.append((i, j))
    return unused, used


def reserve(img, cfg: PrepConfig = PrepConfig(), budget: int = DEFAULT_BUDGET):
    """Reserve room in `img`.

    Returns ``(reserved, layout, report)``. The header marks are left zero
    here; `protect` writes them under the encryption key.
    """
    img = check_image(img)
    cfg.check_shape(img.shape)
    m, n = img.shape
    tau, lam = cfg.tau, cfg.lam
    npix = m * n

    low, high = split_planes(invert_image(img), lam)
    tiles = partition_blocks(low, tau)
    bi, bj = tiles.shape[:2]
    results = {(i, j): convert_block(tiles[i, j], lam, budget) for i in range(bi) for j in range(bj)}
    records = {key: auxcodec.BlockAuxRecord.from_result(res) for key, res in results.items()}
    unused, used = classify_blocks(records, m, n, tau, lam)
    theta = len(unused)

    slots = np.empty_like(tiles)
    for k, (i, j) in enumerate(unused + used):
        slots[k // bj, k % bj] = tiles[i, j] if k < theta else results[i, j].converted
    reserved = (high + assemble_blocks(slots)).astype(np.uint8)

    recovery = auxcodec.encode_recovery_info(unused, [records[b] for b in used], m, n, tau, lam)
    l_rec = recovery.size
    cr_pix, cr_bit = _cr_positions(img.shape, tau, lam, theta)
    cr_length = cr_pix.size
    used_mask = _used_pixel_mask(img.shape, tau, theta)
    if npix < HEADER_BITS or not used_mask.ravel()[npix - HEADER_BITS:].all():
        raise ImageUnsupportedError(
            f"control header does not fit: the last {HEADER_BITS} pixels are not all in used blocks "
            f"(theta={theta} of {bi * bj} blocks unused)", capacity=0)
    if l_rec + HEADER_BITS > cr_length:
        raise ImageUnsupportedError(
            f"recovery information ({l_rec} bits) and header ({HEADER_BITS} bits) exceed the "
            f"reserved room ({cr_length} bits)", capacity=0)

    per = lam - 2
    unused_room = theta * tau * tau * per
    total_phys = npix * per - HEADER_BITS
    last_unused = int(np.flatnonzero(~used_mask.ravel())[-1]) if theta else -1
    if l_rec < cr_length - HEADER_BITS:
        p0, k0 = int(cr_pix[l_rec]), int(cr_bit[l_rec])
        start_phys = p0 * per + (per - 1 - k0) - max(0, p0 - (npix - HEADER_BITS))
        if p0 <= last_unused:
            start_phys = (last_unused + 1) * per
    else:
        start_phys = total_phys
    if start_phys >= 1 << 28:
        raise ImageUnsupportedError("image too large for the type-beta address field")
    payload_start = start_phys - unused_room

    flat = reserved.ravel()
    _write_bits(flat, cr_pix[:l_rec], cr_bit[:l_rec], recovery)
    alpha = TypeAlpha(tau=tau, lam=lam, theta=theta, recovery_offset=0, recovery_length=l_rec)
    _write_header_field(flat, _ALPHA_AT, auxcodec.encode_type_alpha(alpha))
    _write_header_field(flat, _BETA_AT, auxcodec.encode_type_beta(TypeBeta(start_phys, lam)))

    layout = ReservedLayout(
        shape=(m, n), tau=tau, lam=lam, theta=theta, unused_blocks=unused, used_blocks=used,
        cr_length=cr_length, recovery_length=l_rec, payload_start=payload_start,
        payload_start_phys=start_phys,
    )
    seed_counts = [len(records[b].seeds) for b in used]
    merged_counts = [len(records[b].merged) for b in used]
    d0 = auxcodec.widths(m, n, tau, lam).d0
    phi = cr_length - HEADER_BITS - payload_start
    report = CapacityReport(
        phi=phi,
        eta=phi / npix,
        room_total=cr_length,
        aux_total=l_rec + HEADER_BITS,
        unused_info_bits=theta * d0,
        used_info_bits=l_rec - theta * d0,
        header_bits=HEADER_BITS,
        theta=theta,
        gamma=len(used),
        phi_ref=reference_capacity(m, n, tau, lam, theta, seed_counts, merged_counts),
        seed_counts=seed_counts,
        merged_counts=merged_counts,
        waste=payload_start - l_rec,
    )
    return reserved, layout, report


def payload_mask(layout: ReservedLayout) -> np.ndarray:
    """Encryption mask: every bit except the payload area and type-beta."""
    m, n = layout.shape
    mask = full_mask(layout.shape)
    flat = mask.reshape(m * n, 8)
    pix, bit = _cr_positions(layout.shape, layout.tau, layout.lam, layout.theta)
    lo, hi = layout.payload_span
    flat[pix[lo:hi], 7 - bit[lo:hi]] = False
    flat[m * n - TYPE_BETA_BITS:, 7] = False
    return mask


def protect_with_report(img, cfg: PrepConfig, enc_key: bytes, budget: int = DEFAULT_BUDGET):
    """`protect`, also returning the layout and capacity report."""
    reserved, layout, report = reserve(img, cfg, budget)
    flat = reserved.ravel()
    _write_header_field(flat, 0, auxcodec.mark_bits(enc_key, START_LABEL))
    _write_header_field(flat, _END_AT, auxcodec.mark_bits(enc_key, END_LABEL))
    pix, bit = _cr_positions(layout.shape, layout.tau, layout.lam, layout.theta)
    lo, hi = layout.payload_span
    _write_bits(flat, pix[lo:hi], bit[lo:hi], keystream(enc_key, PAD_LABEL, hi - lo))
    encrypted = encrypt_image_selective(reserved, payload_mask(layout), enc_key)
    return encrypted, layout, report


def protect(img, cfg: PrepConfig, enc_key: bytes) -> np.ndarray:
    """Reserve room and encrypt with `enc_key`.

    The unencrypted payload area is filled with key-derived padding so the
    ciphertext stays statistically uniform before any data is embedded.
    """
    return protect_with_report(img, cfg, enc_key)[0]


# data hider ---------------------------------------------------------------

def _payload_area(img: np.ndarray, beta: TypeBeta):
    npix = img.size
    pix, bit = _room_sequence(npix, beta.lam)
    if beta.payload_start > pix.size:
        raise CorruptDataError("payload start lies beyond the image")
    return pix[beta.payload_start:], bit[beta.payload_start:]


def _read_type_beta(flat: np.ndarray) -> np.ndarray:
    return _header_bits(flat)[_BETA_AT:]


def embed(enc_img, payload, hide_key: bytes) -> np.ndarray:
    """Hide `payload` (a bit array) in an image produced by `protect`."""
    out = check_image(enc_img).copy()
    flat = out.ravel()
    if flat.size < HEADER_BITS:
        raise FormatError("image too small to carry a control header")
    payload = as_bits(payload)
    beta = auxcodec.decode_type_beta(_read_type_beta(flat))
    pix, bit = _payload_area(out, beta)
    phi = pix.size
    if payload.size + MARK_BITS > phi:
        raise CapacityError(
            f"payload of {payload.size} bits exceeds capacity: phi = {phi} bits "
            f"({max(phi - MARK_BITS, 0)} bits after the {MARK_BITS}-bit end mark)", capacity=phi)
    data = np.concatenate([encrypt_bits(payload, hide_key),
                           auxcodec.mark_bits(hide_key, PAYLOAD_END_LABEL)])
    _write_bits(flat, pix[:data.size], bit[:data.size], data)
    beta_bits = _read_type_beta(flat) ^ keystream(hide_key, TYPE_BETA_LABEL, TYPE_BETA_BITS)
    _write_header_field(flat, _BETA_AT, beta_bits)
    return out


def _find_mark(bits: np.ndarray, mark: int) -> int:
    if bits.size < MARK_BITS:
        return -1
    windows = np.lib.stride_tricks.sliding_window_view(bits.astype(np.int64), MARK_BITS)
    weights = np.int64(1) << np.arange(MARK_BITS - 1, -1, -1, dtype=np.int64)
    hits = np.flatnonzero(windows @ weights == mark)
    return int(hits[0]) if hits.size else -1


def extract(marked, hide_key: bytes) -> np.ndarray:
    """Case 1: recover the payload bits with the data-hiding key only."""
    img = check_image(marked)
    flat = img.ravel()
    if flat.size < HEADER_BITS:
        raise FormatError("image too small to carry a control header")
    beta_bits = _read_type_beta(flat) ^ keystream(hide_key, TYPE_BETA_LABEL, TYPE_BETA_BITS)
    try:
        beta = auxcodec.decode_type_beta(beta_bits)
        pix, bit = _payload_area(img, beta)
    except CorruptDataError:
        raise KeyMismatchError("type-beta did not decode: wrong data-hiding key or no payload") from None
    stored = _read_bits(flat, pix, bit)
    end = _find_mark(stored, auxcodec.derive_mark(hide_key, PAYLOAD_END_LABEL))
    if end < 0:
        raise KeyMismatchError("payload end mark not found: wrong data-hiding key or corrupt carrier")
    return encrypt_bits(stored[:end], hide_key)


# receiver with the encryption key ---------------------------------------------

def decode_block(tile, record: auxcodec.BlockAuxRecord, lam: int):
    """Rebuild the original lam-bit tile of a used block.

    Returns the tile and the label map found by flood-filling the
    conversion values.
    """
    label, seeds = label_regions(np.asarray(tile) >> (lam - 2))
    if len(seeds) != len(record.seeds):
        raise CorruptDataError(
            f"block has {len(seeds)} regions but recovery information lists {len(record.seeds)}")
    out = np.asarray(record.seeds, dtype=np.uint8)[label]
    for value, (r, c) in record.merged:
        out[r, c] = value
    return out, label


def read_header(decrypted, enc_key: bytes) -> TypeAlpha:
    header = _header_bits(check_image(decrypted).ravel())
    if bits_to_int(header[:MARK_BITS]) != auxcodec.derive_mark(enc_key, START_LABEL):
        raise KeyMismatchError("start mark mismatch: wrong encryption key or not a protected image")
    alpha = auxcodec.decode_type_alpha(header[_ALPHA_AT:_END_AT])
    if bits_to_int(header[_END_AT:_BETA_AT]) != auxcodec.derive_mark(enc_key, END_LABEL):
        raise KeyMismatchError("end mark mismatch: corrupt control header")
    return alpha


def recover_image(marked, enc_key: bytes) -> np.ndarray:
    """Case 2: decrypt and rebuild the image with the encryption key only."""
    img = check_image(marked)
    m, n = img.shape
    if img.size < HEADER_BITS:
        raise FormatError("image too small to carry a control header")
    dec = encrypt_image_selective(img, full_mask(img.shape), enc_key)
    alpha = read_header(dec, enc_key)
    tau, lam, theta = alpha.tau, alpha.lam, alpha.theta
    if m % tau or n % tau:
        raise CorruptDataError(f"block size {tau} does not divide image size {m}x{n}")
    bi, bj = m // tau, n // tau
    if theta > bi * bj:
        raise CorruptDataError(f"unused block count {theta} exceeds {bi * bj}")
    pix, bit = _cr_positions(img.shape, tau, lam, theta)
    lo = alpha.recovery_offset
    hi = lo + alpha.recovery_length
    if hi > pix.size - HEADER_BITS:
        raise CorruptDataError("recovery information overruns the reserved room")
    flat = dec.ravel()
    recovery = _read_bits(flat, pix[lo:hi], bit[lo:hi])
    unused, records = auxcodec.decode_recovery_info(recovery, m, n, tau, lam, theta)
    if len(set(unused)) != theta:
        raise CorruptDataError("duplicate unused block coordinates")

    low, high = split_planes(dec, lam)
    slots = partition_blocks(low, tau)
    blocks = np.empty_like(slots)
    unused_set = set(unused)
    used = [(i, j) for i in range(bi) for j in range(bj) if (i, j) not in unused_set]
    for k, (i, j) in enumerate(unused + used):
        tile = slots[k // bj, k % bj]
        blocks[i, j] = tile if k < theta else decode_block(tile, records[k - theta], lam)[0]
    return invert_image((high + assemble_blocks(blocks)).astype(np.uint8))


def recover_full(marked, enc_key: bytes, hide_key: bytes):
    """Case 3: payload and bit-exact original image."""
    payload = extract(marked, hide_key)
    return recover_image(marked, enc_key), payload
