"""Capacity of a few standard images at three block sizes, as CSV.

    python demos/03_capacity_table.py > capacity.csv
"""
import sys

from skimage import color, data

from lpc.analysis import capacity_table, write_csv


def gray(rgb):
    return (color.rgb2gray(rgb) * 255).round().astype("uint8")


corpus = {
    "camera": data.camera(),
    "moon": data.moon(),
    "astronaut": gray(data.astronaut()),
    "brick": data.brick(),
    "gravel": data.gravel(),
    "grass": data.grass(),  # near-noise texture: tau = 8 is refused, see the error column
}
write_csv(capacity_table(corpus, taus=(32, 16, 8)), sys.stdout)
