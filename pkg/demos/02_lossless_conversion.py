"""How one block frees room: regions, four colors, and the merge fallback.

    python demos/02_lossless_conversion.py
"""
import numpy as np

from lpc.auxcodec import BlockAuxRecord
from lpc.coloring import choose_merge_pair, color_regions, convert_block, verify_coloring
from lpc.regions import divide_regions

# A small block of 3-bit values: neighbouring pixels with equal values form regions.
tile = np.array([
    [5, 5, 5, 2, 2, 2, 7, 7],
    [5, 5, 1, 1, 2, 2, 7, 7],
    [5, 5, 1, 1, 1, 2, 7, 0],
    [3, 3, 1, 1, 4, 4, 0, 0],
    [3, 3, 3, 4, 4, 4, 0, 0],
    [3, 6, 6, 6, 4, 4, 0, 0],
    [3, 6, 6, 2, 2, 2, 0, 0],
    [3, 3, 2, 2, 2, 2, 0, 0],
], dtype=np.uint8)
lam = 3

partition = divide_regions(tile)
print(f"{len(partition)} regions, seeds {partition.seeds}")
for region in partition.regions:
    print(f"  r{region.id}: {region.size} px, touches {partition.adjacency[region.id]}")

# Each region gets a 2-bit color so that touching regions differ. The color lives in
# the top two of the lam bits; the remaining lam - 2 bits of every pixel become free.
result = convert_block(tile, lam)
print("colors:", result.colors)
print("converted block:\n", result.converted)
print("flood fill of the colors gives back the regions:",
      verify_coloring(result.converted, lam, result.partition))
cost = BlockAuxRecord.from_result(result).bit_length(lam, tau=8)
print(f"room freed: {tile.size * (lam - 2)} bits, of which {cost} hold this block's recovery record")

# Without backtracking some tiles have no greedy coloring. The smallest region near
# the dead end is then absorbed by a neighbour and its original values are recorded.
stuck = np.array([
    [20, 40, 60, 40, 40, 20],
    [60, 40, 60, 40, 60, 60],
    [40, 40, 20, 20, 20, 60],
    [40, 95, 60, 40, 20, 60],
    [60, 40, 40, 40, 40, 60],
    [60, 60, 60, 40, 20, 60],
], dtype=np.uint8)
p = divide_regions(stuck)
greedy = color_regions(p, budget=0)
print("\ngreedy coloring stuck at region", greedy.stuck_region)
print("merge pair (absorbed, absorber):", choose_merge_pair(p, greedy.stuck_region))
print("merged records:", convert_block(stuck, 8, budget=0).merged)
