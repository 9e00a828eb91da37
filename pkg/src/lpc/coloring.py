"""Lossless pixel conversion of one block.

Every region receives a conversion value in {0, 1, 2, 3} so that adjacent
regions differ. The value is stored in the two high-order bits of the
``lam``-bit pixel and the other ``lam - 2`` bits are zeroed, which is the
room freed for data. Coloring is greedy in region-id order with ascending
values, then chronological backtracking under a visit budget. When that
budget runs out, a small region is merged into a neighbour and the block is
divided and colored again from scratch.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .regions import RegionPartition, divide_regions, label_regions

DEFAULT_BUDGET = 10_000
N_COLORS = 4

# lowest clear bit of a 4-bit forbidden-color mask (4 when all are taken)
_FIRST_FREE = [next((c for c in range(N_COLORS) if not m >> c & 1), N_COLORS)
               for m in range(1 << N_COLORS)]
_BELOW = [(1 << k) - 1 for k in range(N_COLORS + 1)]


class MergedPixelRecord(NamedTuple):
    value: int
    position: tuple[int, int]


class Coloring(NamedTuple):
    colors: list[int] | None
    stuck_region: int | None
    visits: int

    @property
    def ok(self) -> bool:
        return self.colors is not None


@dataclass
class ConversionResult:
    colors: list[int]
    merged: list[MergedPixelRecord]
    partition: RegionPartition
    converted: np.ndarray

    @property
    def seeds(self) -> list[int]:
        return self.partition.seeds


def color_regions(partition: RegionPartition, budget: int = DEFAULT_BUDGET) -> Coloring:
    """Four-color the region graph.

    Regions are visited in id order and each takes the smallest value not
    used by an already-colored neighbour. On a dead end the search backs up
    to the previous region and tries its next value. `budget` caps the
    number of color assignments made after the first dead end; 0 means
    greedy only.

    On failure, ``colors`` is None and ``stuck_region`` is the region where
    the first dead end occurred.
    """
    adjacency = partition.adjacency
    n = len(adjacency)
    earlier = [[j for j in adj if j < i] for i, adj in enumerate(adjacency)]
    colors = [-1] * n
    next_try = [0] * n
    visits = 0
    stuck = None
    i = 0
    first_free = _FIRST_FREE
    below = _BELOW
    while i < n:
        forbid = below[next_try[i]]
        for j in earlier[i]:
            forbid |= 1 << colors[j]
        c = first_free[forbid]
        if c < N_COLORS:
            if stuck is not None:
                if visits >= budget:
                    return Coloring(None, stuck, visits)
                visits += 1
            colors[i] = c
            next_try[i] = c + 1
            i += 1
            if i < n:
                next_try[i] = 0
        else:
            if stuck is None:
                stuck = i
            i -= 1
            if i < 0:
                return Coloring(None, stuck, visits)
    return Coloring(colors, stuck, visits)


def choose_merge_pair(partition: RegionPartition, failing: int,
                      colored=None) -> tuple[int, int]:
    """Pick (B', B''): the region to absorb and the region absorbing it.

    B' is the smallest region among `failing` and its neighbours. B'' is
    the largest neighbour of B' with a different seed, taken from
    `colored` (default: regions with id below `failing`) when possible.
    Ties go to the smaller id.
    """
    sizes = partition.sizes()
    adjacency = partition.adjacency
    seeds = partition.seeds
    candidates = [failing, *adjacency[failing]]
    b1 = min(candidates, key=lambda r: (sizes[r], r))
    pool = [q for q in adjacency[b1] if seeds[q] != seeds[b1]]
    if not pool:
        raise RuntimeError(f"region {b1} has no neighbour with a different seed")
    if colored is None:
        colored = range(failing)
    colored = set(colored)
    preferred = [q for q in pool if q in colored]
    b2 = min(preferred or pool, key=lambda r: (-sizes[r], r))
    return b1, b2


def apply_merge(tile, partition: RegionPartition, b1: int, b2: int,
                recorded=None) -> tuple[np.ndarray, list[MergedPixelRecord]]:
    """Overwrite region `b1` with the seed of adjacent region `b2`.

    Returns the modified tile and one record per pixel of `b1`, in raster
    order, holding the value it had in `tile`. Positions already in
    `recorded` (merged earlier, so no longer original) are skipped.
    """
    if b2 not in partition.adjacency[b1]:
        raise ValueError(f"regions {b1} and {b2} are not adjacent")
    recorded = recorded or ()
    tile = np.asarray(tile)
    out = tile.copy()
    records = []
    for r, c in partition.regions[b1].pixels:
        if (r, c) not in recorded:
            records.append(MergedPixelRecord(int(tile[r, c]), (r, c)))
        out[r, c] = partition.regions[b2].seed
    return out, records


def converted_tile(partition: RegionPartition, colors, lam: int) -> np.ndarray:
    lut = np.asarray(colors, dtype=np.uint8) << (lam - 2)
    return lut[partition.label]


def convert_block(tile, lam: int, budget: int = DEFAULT_BUDGET) -> ConversionResult:
    current = np.asarray(tile)
    merged: list[MergedPixelRecord] = []
    recorded: set[tuple[int, int]] = set()
    while True:
        partition = divide_regions(current)
        coloring = color_regions(partition, budget)
        if coloring.ok:
            return ConversionResult(
                colors=coloring.colors,
                merged=merged,
                partition=partition,
                converted=converted_tile(partition, coloring.colors, lam),
            )
        b1, b2 = choose_merge_pair(partition, coloring.stuck_region)
        current, records = apply_merge(current, partition, b1, b2, recorded)
        merged.extend(records)
        recorded.update(rec.position for rec in records)


def verify_coloring(converted, lam: int, partition: RegionPartition | None = None) -> bool:
    """Check a converted tile.

    Values must have the form ``c * 2**(lam-2)`` with c < 4. When
    `partition` is given, flood-filling the conversion values must
    reproduce it exactly, ids included. That equality is what lets a
    decoder find the regions again.
    """
    converted = np.asarray(converted)
    shift = lam - 2
    if converted.size and int(converted.max()) >= (1 << lam):
        return False
    if np.any(converted & ((1 << shift) - 1)):
        return False
    label, _ = label_regions(converted >> shift)
    if partition is None:
        return True
    return label.shape == partition.label.shape and bool(np.array_equal(label, partition.label))
