"""Region division of a block into 4-connected equal-value regions.

Coordinates are 0-based ``(row, col)`` inside the block. Region ids follow
the raster position of each region's first pixel, which is the order the
seed scan discovers them in.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Region:
    id: int
    seed: int
    pixels: list[tuple[int, int]]
    boundary: list[tuple[int, int]] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.pixels)


@dataclass
class RegionPartition:
    regions: list[Region]
    adjacency: list[list[int]]
    label: np.ndarray

    def __len__(self):
        return len(self.regions)

    @property
    def seeds(self) -> list[int]:
        return [r.seed for r in self.regions]

    def sizes(self) -> list[int]:
        return [len(r.pixels) for r in self.regions]


def label_regions(block) -> tuple[np.ndarray, list[int]]:
    """Flood-fill labelling of `block`.

    Returns the label map (int32, same shape as the block) and the seed value
    of each region in id order.
    """
    block = np.asarray(block)
    h, w = block.shape
    values = block.ravel().tolist()
    label = [-1] * (h * w)
    seeds = []
    next_id = 0
    for start in range(h * w):
        if label[start] != -1:
            continue
        seed = values[start]
        label[start] = next_id
        stack = [start]
        while stack:
            p = stack.pop()
            r, c = divmod(p, w)
            if c + 1 < w and label[p + 1] == -1 and values[p + 1] == seed:
                label[p + 1] = next_id
                stack.append(p + 1)
            if c > 0 and label[p - 1] == -1 and values[p - 1] == seed:
                label[p - 1] = next_id
                stack.append(p - 1)
            if r + 1 < h and label[p + w] == -1 and values[p + w] == seed:
                label[p + w] = next_id
                stack.append(p + w)
            if r > 0 and label[p - w] == -1 and values[p - w] == seed:
                label[p - w] = next_id
                stack.append(p - w)
        seeds.append(seed)
        next_id += 1
    return np.array(label, dtype=np.int32).reshape(h, w), seeds


def _adjacency_from_labels(label: np.ndarray, count: int) -> list[list[int]]:
    a = np.concatenate([label[:, :-1].ravel(), label[:-1, :].ravel()]).astype(np.int64)
    b = np.concatenate([label[:, 1:].ravel(), label[1:, :].ravel()]).astype(np.int64)
    diff = a != b
    a, b = a[diff], b[diff]
    codes = np.unique(np.concatenate([a * count + b, b * count + a]))
    adjacency = [[] for _ in range(count)]
    for src, dst in zip(*divmod(codes, count)):
        adjacency[src].append(int(dst))
    return adjacency


def _boundary_mask(label: np.ndarray) -> np.ndarray:
    mask = np.zeros(label.shape, dtype=bool)
    horiz = label[:, :-1] != label[:, 1:]
    mask[:, :-1] |= horiz
    mask[:, 1:] |= horiz
    vert = label[:-1, :] != label[1:, :]
    mask[:-1, :] |= vert
    mask[1:, :] |= vert
    return mask


def divide_regions(block) -> RegionPartition:
    """Divide a tile into regions and compute their adjacency."""
    label, seeds = label_regions(block)
    h, w = label.shape
    flat = label.ravel()
    order = np.argsort(flat, kind="stable")
    cuts = np.cumsum(np.bincount(flat, minlength=len(seeds)))[:-1]
    rows, cols = np.divmod(order, w)
    coords = list(zip(rows.tolist(), cols.tolist()))
    on_edge = _boundary_mask(label).ravel()[order].tolist()
    regions = []
    start = 0
    for rid, end in enumerate([*cuts.tolist(), flat.size]):
        pixels = coords[start:end]
        boundary = [px for px, e in zip(pixels, on_edge[start:end]) if e]
        regions.append(Region(id=rid, seed=seeds[rid], pixels=pixels, boundary=boundary))
        start = end
    partition = RegionPartition(regions=regions, adjacency=[], label=label)
    partition.adjacency = detect_adjacency(partition)
    return partition


def detect_adjacency(partition: RegionPartition) -> list[list[int]]:
    """Sorted adjacency lists: P ~ Q iff some boundary pixel of P has a 4-neighbour in Q.

    Only boundary pixels can have a foreign neighbour, so scanning all
    neighbouring label pairs is equivalent and cheaper.
    """
    return _adjacency_from_labels(partition.label, len(partition.regions))
