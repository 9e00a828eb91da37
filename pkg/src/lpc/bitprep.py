"""Image pre-processing: bit-order inversion, plane split, block tiling.

All grids are numpy arrays. Block indices are 0-based here, so tile
``(i, j)`` covers rows ``i*tau:(i+1)*tau`` and columns ``j*tau:(j+1)*tau``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError
from .imageio import check_image


@dataclass(frozen=True)
class PrepConfig:
    """Low-plane bit count `lam` and block side `tau`."""

    lam: int = 3
    tau: int = 32

    def __post_init__(self):
        if not 3 <= self.lam <= 8:
            raise ConfigError(f"lambda must be in [3, 8], got {self.lam}")
        if self.tau < 2:
            raise ConfigError(f"tau must be >= 2, got {self.tau}")

    def check_shape(self, shape) -> None:
        m, n = shape
        if m % self.tau or n % self.tau:
            raise ConfigError(f"block size {self.tau} does not divide image size {m}x{n}")

    @property
    def room_bits(self) -> int:
        """Free bits per converted pixel."""
        return self.lam - 2


class PlaneSplit(NamedTuple):
    low: np.ndarray
    high: np.ndarray


def _reverse_byte(x: int) -> int:
    return sum(((x >> k) & 1) << (7 - k) for k in range(8))


_REVERSED = np.array([_reverse_byte(x) for x in range(256)], dtype=np.uint8)


def invert_pixel_bits(x: int) -> int:
    """Reverse the bit order of an 8-bit value (bit k moves to bit 7-k)."""
    if not 0 <= x <= 255:
        raise ValueError(f"pixel value out of range: {x}")
    return int(_REVERSED[x])


def invert_image(img) -> np.ndarray:
    return _REVERSED[check_image(img)]


def _check_lam(lam: int) -> None:
    if not 3 <= lam <= 8:
        raise ConfigError(f"lambda must be in [3, 8], got {lam}")


def split_planes(img, lam: int) -> PlaneSplit:
    """Split into the `lam` low-order bits and the remaining high part."""
    _check_lam(lam)
    arr = check_image(img)
    low = arr & np.uint8((1 << lam) - 1)
    return PlaneSplit(low=low, high=arr - low)


def partition_blocks(grid, tau: int) -> np.ndarray:
    """View `grid` as an array of tiles with shape ``(M/tau, N/tau, tau, tau)``.

    The result is a copy, so tiles can be modified independently.
    """
    grid = np.asarray(grid)
    m, n = grid.shape
    if tau < 1 or m % tau or n % tau:
        raise ConfigError(f"block size {tau} does not divide grid size {m}x{n}")
    return grid.reshape(m // tau, tau, n // tau, tau).swapaxes(1, 2).copy()


def assemble_blocks(blocks) -> np.ndarray:
    """Inverse of `partition_blocks`."""
    blocks = np.asarray(blocks)
    bi, bj, tau, _ = blocks.shape
    return blocks.swapaxes(1, 2).reshape(bi * tau, bj * tau)


def compose_reserved(high, low) -> np.ndarray:
    high = np.asarray(high)
    low = np.asarray(low)
    if high.shape != low.shape:
        raise ConfigError(f"plane shapes differ: {high.shape} vs {low.shape}")
    out = high.astype(np.int32) + low.astype(np.int32)
    if out.max(initial=0) > 255:
        raise ConfigError("high and low planes overlap")
    return out.astype(np.uint8)


def inverse_preprocess(img) -> np.ndarray:
    """Undo the bit inversion applied during pre-processing."""
    return invert_image(img)
