import numpy as np
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from lpc.regions import detect_adjacency, divide_regions, label_regions
from oracles import adjacency_brute, regions_union_find
from tiles import EXAMPLE, EXAMPLE_ADJACENCY, EXAMPLE_IDS, EXAMPLE_SEEDS


def test_example_regions_and_seeds():
    p = divide_regions(EXAMPLE)
    assert len(p) == 14
    assert p.seeds == EXAMPLE_SEEDS
    np.testing.assert_array_equal(p.label, EXAMPLE_IDS)


def test_example_adjacency_table():
    p = divide_regions(EXAMPLE)
    assert p.adjacency == EXAMPLE_ADJACENCY
    assert p.adjacency[0] == [1]
    assert p.adjacency[2] == [1, 3, 4, 7, 8, 9, 10, 12]


def test_constant_tile():
    p = divide_regions(np.full((4, 4), 3))
    assert len(p) == 1 and p.adjacency == [[]]
    assert p.regions[0].boundary == []


def test_checkerboard_has_no_diagonal_links():
    p = divide_regions(np.array([[0, 1], [1, 0]]))
    assert len(p) == 4
    assert p.adjacency == [[1, 2], [0, 3], [0, 3], [1, 2]]


def test_one_by_two():
    p = divide_regions(np.array([[3, 5]]))
    assert p.adjacency == [[1], [0]]


def test_ring_around_hole():
    tile = np.array([[1, 1, 1], [1, 7, 1], [1, 1, 1]])
    p = divide_regions(tile)
    assert p.seeds == [1, 7]
    assert p.regions[0].size == 8
    assert p.adjacency == [[1], [0]]


def check_partition(block):
    p = divide_regions(block)
    label, seeds = regions_union_find(block)
    np.testing.assert_array_equal(p.label, label)
    assert p.seeds == seeds
    assert p.adjacency == adjacency_brute(label)
    assert detect_adjacency(p) == p.adjacency
    covered = np.zeros(block.shape, dtype=int)
    for region in p.regions:
        for r, c in region.pixels:
            covered[r, c] += 1
            assert block[r, c] == region.seed
        assert region.pixels == sorted(region.pixels)
        expected_boundary = [
            (r, c) for r, c in region.pixels
            if any(0 <= rr < block.shape[0] and 0 <= cc < block.shape[1]
                   and label[rr, cc] != region.id
                   for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)))]
        assert region.boundary == expected_boundary
    assert (covered == 1).all()
    for i, adj in enumerate(p.adjacency):
        assert i not in adj
        for j in adj:
            assert i in p.adjacency[j]


@given(arrays(np.uint8, st.tuples(st.integers(1, 7), st.integers(1, 7)),
              elements=st.integers(0, 3)))
def test_matches_union_find(block):
    check_partition(block)


def test_matches_union_find_random_batch(rng):
    for _ in range(300):
        shape = tuple(rng.integers(1, 9, size=2))
        check_partition(rng.integers(0, rng.integers(1, 6), size=shape))


def test_label_regions_dtype():
    label, seeds = label_regions(np.zeros((2, 3), np.uint8))
    assert label.dtype == np.int32 and seeds == [0]
