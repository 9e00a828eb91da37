import io
import math

import numpy as np
import pytest

from lpc.analysis import (CAPACITY_FIELDS, capacity_table, diff_maps, entropy, histogram_text,
                          psnr, uniformity_report, write_csv)
from lpc.cipher import keystream_bytes
from lpc.errors import ConfigError
from conftest import smooth_image
from oracles import diff_maps_brute


def test_psnr_identical_is_infinite(rng):
    img = rng.integers(0, 256, (8, 8), dtype=np.uint8)
    assert psnr(img, img) == math.inf


def test_psnr_single_pixel_offset():
    a = np.zeros((512, 512), np.uint8)
    b = a.copy()
    b[100, 200] = 16
    expected = 10 * math.log10(255 ** 2 * 262144 / 256)
    assert psnr(a, b) == pytest.approx(expected)
    assert round(psnr(a, b), 2) == 78.23
    assert psnr(b, a) == psnr(a, b)


def test_psnr_shape_mismatch():
    with pytest.raises(ConfigError):
        psnr(np.zeros((2, 2), np.uint8), np.zeros((2, 3), np.uint8))


def test_diff_maps_example():
    d = diff_maps(np.array([[10, 12], [7, 7]], np.uint8))
    assert d.horizontal.tolist() == [[-2], [0]]
    assert d.vertical.tolist() == [[3, 5]]


def test_diff_maps_shapes_and_constant():
    d = diff_maps(np.full((512, 512), 9, np.uint8))
    assert d.horizontal.shape == (512, 511) and d.vertical.shape == (511, 512)
    assert not d.horizontal.any() and not d.vertical.any()
    with pytest.raises(ConfigError):
        diff_maps(np.zeros((1, 1), np.uint8))


def test_diff_maps_extremes():
    d = diff_maps(np.array([[0, 255], [255, 0]], np.uint8))
    assert d.horizontal.min() == -255 and d.horizontal.max() == 255


def test_diff_maps_match_brute_force(rng):
    for _ in range(100):
        img = rng.integers(0, 256, tuple(rng.integers(1, 7, size=2)), dtype=np.uint8)
        if img.shape == (1, 1):
            continue
        h, v = diff_maps_brute(img)
        d = diff_maps(img)
        assert d.horizontal.tolist() == (h if img.shape[1] > 1 else [[] for _ in img])
        assert d.vertical.tolist() == v


def test_entropy():
    assert entropy([]) == 0.0
    assert entropy([5, 5, 5]) == 0.0
    assert entropy([0, 1, 2, 3]) == pytest.approx(2.0)


def test_keystream_image_is_uniform():
    img = np.frombuffer(keystream_bytes(bytes(32), "test", 256 * 256), np.uint8).reshape(256, 256)
    rep = uniformity_report(img)
    assert rep.uniform and rep.p_value > 0.01
    assert all(0.49 <= f <= 0.51 for f in rep.plane_ones)
    assert rep.histogram.sum() == 256 * 256


def test_constant_image_is_not_uniform():
    rep = uniformity_report(np.full((64, 64), 3, np.uint8))
    assert not rep.uniform
    assert rep.entropy_h == 0.0 and rep.entropy_v == 0.0


def test_natural_image_differences_are_peaked():
    from skimage import data
    natural = uniformity_report(data.camera())
    noise = np.frombuffer(keystream_bytes(bytes(32), "n", 512 * 512), np.uint8).reshape(512, 512)
    assert natural.entropy_h < uniformity_report(noise).entropy_h - 2


def test_histogram_text():
    text = histogram_text(np.array([[0, 0, 255]], np.uint8))
    lines = text.splitlines()
    assert len(lines) == 256 and lines[0] == "0,2" and lines[255] == "255,1" and lines[1] == "1,0"


def test_capacity_table_rows_and_errors():
    smooth = smooth_image(64, 64)
    rows = capacity_table({"smooth": smooth, "odd": np.zeros((40, 40), np.uint8)}, taus=(32, 16))
    assert [(r["image"], r["tau"]) for r in rows] == [
        ("smooth", 32), ("smooth", 16), ("odd", 32), ("odd", 16)]
    assert rows[0]["error"] == "" and rows[0]["room_bpp"] == "1.0000"
    assert rows[2]["error"].startswith("ConfigError")
    text = write_csv(rows)
    assert text.splitlines()[0] == ",".join(CAPACITY_FIELDS)
    assert len(text.splitlines()) == 5
    buf = io.StringIO()
    assert write_csv(rows, buf) is None and buf.getvalue() == text


def test_texture_costs_more_auxiliary_bits():
    from corpus import load
    rows = capacity_table({"moon": load("moon"), "gravel": load("gravel")}, taus=(32,))
    assert rows[0]["error"] == rows[1]["error"] == ""
    assert rows[0]["aux_total"] < rows[1]["aux_total"]
