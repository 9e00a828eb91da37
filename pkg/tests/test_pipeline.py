import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lpc import auxcodec
from lpc.bitprep import PrepConfig, invert_image
from lpc.coloring import MergedPixelRecord
from lpc.errors import CapacityError, FormatError, ImageUnsupportedError, KeyMismatchError
from lpc.pipeline import (capacity, embed, reference_capacity, extract, payload_mask, protect,
                          protect_with_report, recover_full, recover_image, reserve)
from conftest import smooth_image
from tiles import MERGE_TILE, MERGE_PIXEL

CFG = PrepConfig(lam=3, tau=32)


def bits(rng, n):
    return rng.integers(0, 2, n, dtype=np.uint8)


def test_constant_image_accounting():
    img = np.full((64, 64), 77, np.uint8)
    _, layout, rep = reserve(img, CFG)
    assert rep.theta == 0 and rep.seed_counts == [1, 1, 1, 1]
    assert layout.recovery_length == 4 * 15
    assert rep.aux_total == 60 + 212
    assert rep.room_total == 4096
    assert rep.phi == 4096 - 60 - 212
    assert rep.eta == pytest.approx(3824 / 4096)
    assert round(rep.eta, 2) == 0.93


def test_fully_textured_image_is_refused():
    checker = (np.indices((64, 64)).sum(axis=0) % 2).astype(np.uint8)
    img = invert_image(checker)  # low plane alternates 0/1: every pixel is its own region
    with pytest.raises(ImageUnsupportedError):
        reserve(img, CFG)


def test_room_accounting_smooth_512():
    rep = capacity(smooth_image(512, 512), CFG)
    assert rep.theta == 0
    assert rep.room_total == 262144 and rep.gamma == 256


def test_reference_capacity_gap_is_exactly_the_format_overhead(rng):
    for tau in (8, 16, 32):
        img = smooth_image(128, 128, seed=tau)
        img[:32, :32] = rng.integers(0, 256, (32, 32))
        rep = capacity(img, PrepConfig(tau=tau))
        w = auxcodec.widths(128, 128, tau, 3, rep.theta)
        overhead = sum(1 + w.w_count + (w.w_count if e else 0) for e in rep.merged_counts)
        assert rep.phi_ref - rep.phi == 212 - w.d3 - w.d4 + overhead + rep.waste
        assert rep.phi_ref == reference_capacity(128, 128, tau, 3, rep.theta,
                                            rep.seed_counts, rep.merged_counts)


def test_protect_then_recover_without_payload(keys):
    img = smooth_image(64, 64)
    enc = protect(img, CFG, keys.enc_key)
    np.testing.assert_array_equal(recover_image(enc, keys.enc_key), img)
    assert extract(embed(enc, [], keys.hide_key), keys.hide_key).size == 0


def test_mask_leaves_payload_area_and_type_beta_clear(keys):
    img = smooth_image(64, 64)
    _, layout, rep = reserve(img, CFG)
    clear = (~payload_mask(layout)).sum()
    assert clear == rep.phi + 32


@pytest.mark.parametrize("tau", [8, 16, 32])
def test_capacity_boundary(keys, rng, tau):
    img = smooth_image(64, 64, seed=1)
    enc, _, rep = protect_with_report(img, PrepConfig(tau=tau), keys.enc_key)
    payload = bits(rng, rep.phi - 32)
    marked = embed(enc, payload, keys.hide_key)
    got_img, got = recover_full(marked, keys.enc_key, keys.hide_key)
    np.testing.assert_array_equal(got, payload)
    np.testing.assert_array_equal(got_img, img)
    with pytest.raises(CapacityError, match=f"phi = {rep.phi} bits") as info:
        embed(enc, bits(rng, rep.phi - 31), keys.hide_key)
    assert info.value.capacity == rep.phi


def test_wrong_keys(keys, rng):
    img = smooth_image(64, 64)
    marked = embed(protect(img, CFG, keys.enc_key), bits(rng, 500), keys.hide_key)
    with pytest.raises(KeyMismatchError):
        extract(marked, bytes(32))
    with pytest.raises(KeyMismatchError):
        recover_image(marked, bytes(32))
    with pytest.raises(KeyMismatchError):
        recover_full(marked, keys.hide_key, keys.enc_key)
    with pytest.raises(KeyMismatchError):
        recover_image(marked, keys.hide_key)


def test_corrupted_header_is_detected(keys):
    img = smooth_image(64, 64)
    enc = protect(img, CFG, keys.enc_key)
    bad = enc.copy()
    bad.ravel()[-212 + 40] ^= 1  # inside type-alpha
    with pytest.raises((KeyMismatchError, FormatError)):
        recover_image(bad, keys.enc_key)


def test_too_small_images(keys):
    with pytest.raises(FormatError):
        extract(np.zeros((8, 8), np.uint8), keys.hide_key)
    with pytest.raises(FormatError):
        recover_image(np.zeros((8, 8), np.uint8), keys.enc_key)
    with pytest.raises(ImageUnsupportedError):
        reserve(np.zeros((8, 8), np.uint8), PrepConfig(tau=8))


def test_deterministic(keys):
    img = smooth_image(64, 64)
    a = embed(protect(img, CFG, keys.enc_key), [1, 0, 1], keys.hide_key)
    b = embed(protect(img, CFG, keys.enc_key), [1, 0, 1], keys.hide_key)
    np.testing.assert_array_equal(a, b)


def test_unused_blocks_take_front_slots(keys, rng):
    img = smooth_image(128, 128, seed=3)
    noisy = [(1, 2), (3, 0)]
    for i, j in noisy:
        img[i * 16:(i + 1) * 16, j * 16:(j + 1) * 16] = rng.integers(0, 256, (16, 16))
    reserved, layout, rep = reserve(img, PrepConfig(tau=16))
    assert layout.unused_blocks == noisy and rep.theta == 2
    inv = invert_image(img)
    for k, (i, j) in enumerate(noisy):
        slot = reserved[0:16, k * 16:(k + 1) * 16] & 7
        np.testing.assert_array_equal(slot, inv[i * 16:(i + 1) * 16, j * 16:(j + 1) * 16] & 7)
    enc = protect(img, PrepConfig(tau=16), keys.enc_key)
    np.testing.assert_array_equal(recover_image(enc, keys.enc_key), img)


def test_merge_tile_block_through_the_pipeline(keys):
    low = np.tile(MERGE_TILE, (6, 6))                 # 36x36 image of 6x6 blocks
    img = invert_image(low)                     # lam = 8: the low plane is the whole value
    cfg = PrepConfig(lam=8, tau=6)
    reserved, layout, rep = reserve(img, cfg, budget=0)
    assert rep.merged_counts[0] == 1
    enc, _, _ = protect_with_report(img, cfg, keys.enc_key, budget=0)
    decrypted = recover_image(enc, keys.enc_key)
    np.testing.assert_array_equal(decrypted, img)
    assert invert_image(decrypted)[MERGE_PIXEL] == 95


def test_merge_tile_record_in_recovery_stream():
    from lpc.coloring import convert_block
    rec = auxcodec.BlockAuxRecord.from_result(convert_block(MERGE_TILE, 8, budget=0))
    assert rec.merged == [MergedPixelRecord(95, MERGE_PIXEL)]


@settings(max_examples=15)
@given(st.sampled_from([8, 16, 32]), st.integers(3, 5), st.floats(0, 1), st.integers(0, 2 ** 32 - 1))
def test_round_trip_property(tau, lam, fraction, seed):
    from lpc.cipher import KeyMaterial
    rng = np.random.default_rng(seed)
    keys = KeyMaterial(rng.bytes(32), rng.bytes(32))
    img = smooth_image(64, 64, seed=seed % 1000)
    enc, _, rep = protect_with_report(img, PrepConfig(lam=lam, tau=tau), keys.enc_key)
    payload = bits(rng, int(fraction * rep.max_payload))
    marked = embed(enc, payload, keys.hide_key)
    np.testing.assert_array_equal(extract(marked, keys.hide_key), payload)
    got_img, got = recover_full(marked, keys.enc_key, keys.hide_key)
    np.testing.assert_array_equal(got_img, img)
    np.testing.assert_array_equal(got, payload)


@pytest.mark.slow
def test_near_noise_texture(keys, rng):
    from corpus import load
    img = load("grass")
    with pytest.raises(ImageUnsupportedError):
        reserve(img, PrepConfig(tau=8))
    enc, _, rep = protect_with_report(img, PrepConfig(tau=16), keys.enc_key)
    payload = bits(rng, rep.max_payload)
    got_img, got = recover_full(embed(enc, payload, keys.hide_key), keys.enc_key, keys.hide_key)
    np.testing.assert_array_equal(got_img, img)
    np.testing.assert_array_equal(got, payload)
