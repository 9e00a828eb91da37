"""Keyed keystreams and XOR encryption of images and bit strings.

The keystream for ``(key, label)`` is the concatenation of
``HMAC-SHA-256(key, label || counter)`` for counter = 0, 1, 2, ... encoded
as 8-byte big-endian integers, read MSB first and truncated to the
requested length. For an image, bit ``8*p + (7 - k)`` of the "image"
stream encrypts bit k of the pixel at raster index p.
"""
from __future__ import annotations

import hashlib
import hmac
import secrets
from dataclasses import dataclass

import numpy as np

from .bits import as_bits
from .errors import ConfigError
from .imageio import check_image

KEY_BYTES = 32
IMAGE_LABEL = "image"
PAYLOAD_LABEL = "payload"


def parse_key(text: str) -> bytes:
    """Decode a 64-hex-character key."""
    text = text.strip()
    if len(text) != 2 * KEY_BYTES:
        raise ConfigError(f"key must be {2 * KEY_BYTES} hex characters, got {len(text)}")
    try:
        return bytes.fromhex(text)
    except ValueError:
        raise ConfigError("key is not valid hexadecimal") from None


@dataclass(frozen=True, repr=False)
class KeyMaterial:
    enc_key: bytes
    hide_key: bytes

    def __post_init__(self):
        for name in ("enc_key", "hide_key"):
            if len(getattr(self, name)) != KEY_BYTES:
                raise ConfigError(f"{name} must be {KEY_BYTES} bytes")

    def __repr__(self):
        return "KeyMaterial(<redacted>)"

    @classmethod
    def generate(cls) -> KeyMaterial:
        return cls(secrets.token_bytes(KEY_BYTES), secrets.token_bytes(KEY_BYTES))

    @classmethod
    def from_hex(cls, enc_hex: str, hide_hex: str) -> KeyMaterial:
        return cls(parse_key(enc_hex), parse_key(hide_hex))


def keystream_bytes(key: bytes, label: str, n_bytes: int) -> bytes:
    prefix = label.encode("ascii")
    base = hmac.new(bytes(key), digestmod=hashlib.sha256)
    out = bytearray()
    counter = 0
    while len(out) < n_bytes:
        h = base.copy()
        h.update(prefix + counter.to_bytes(8, "big"))
        out += h.digest()
        counter += 1
    return bytes(out[:n_bytes])


def keystream(key: bytes, label: str, n_bits: int) -> np.ndarray:
    raw = keystream_bytes(key, label, (n_bits + 7) // 8)
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[:n_bits]


def extract_bit(value: int, k: int) -> int:
    if not 0 <= k <= 7:
        raise ValueError(f"bit index {k} outside [0, 7]")
    return (value >> k) & 1


def full_mask(shape) -> np.ndarray:
    return np.ones((*shape, 8), dtype=bool)


def encrypt_image_selective(img, mask, key: bytes) -> np.ndarray:
    """XOR the bits selected by `mask` with the image keystream.

    `mask` has shape ``(M, N, 8)``; ``mask[a, o, 7 - k]`` selects bit k of
    pixel ``(a, o)``, so the last axis runs MSB to LSB like the keystream.
    Applying the function twice with the same mask and key is the identity.
    """
    img = check_image(img)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (*img.shape, 8):
        raise ConfigError(f"mask shape {mask.shape} does not match image {img.shape}")
    stream = np.frombuffer(keystream_bytes(key, IMAGE_LABEL, img.size), dtype=np.uint8)
    stream = stream.reshape(img.shape) & np.packbits(mask, axis=-1)[..., 0]
    return img ^ stream


def encrypt_bits(bits, key: bytes, label: str = PAYLOAD_LABEL) -> np.ndarray:
    bits = as_bits(bits)
    return bits ^ keystream(key, label, bits.size)
