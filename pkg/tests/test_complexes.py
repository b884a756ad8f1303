from __future__ import annotations

import math

import numpy as np
import pytest

from gen import bfs_components, random_metric, random_semimetric

from dynatda import (
    SimplicialComplexSlice,
    TimeGrid,
    betti,
    boundary_matrix,
    connected_components,
    make_example,
    rank_of_inclusion,
    rips_slice,
)
from dynatda.complexes import ComplexError
from dynatda.dms_core import IntervalMinIndex

TRIANGLE = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=float)


def test_two_points_below_scale() -> None:
    c = rips_slice(np.array([[0, 1.0], [1.0, 0]]), 0.5)
    assert c.simplices[0] == ((0,), (1,))
    assert c.simplices[1] == ()


def test_negative_scale_is_empty() -> None:
    c = rips_slice(TRIANGLE, -1)
    assert all(len(level) == 0 for level in c.simplices)
    assert betti(c, 0) == 0


def test_full_simplex_at_max_distance() -> None:
    d = random_metric(np.random.default_rng(0), 4)
    c = rips_slice(d, d.max(), max_dim=2)
    assert [len(level) for level in c.simplices] == [4, 6, 4, 1]


def test_tie_at_scale_is_included() -> None:
    assert len(rips_slice(TRIANGLE, 1.0).simplices[1]) == 3


def test_asymmetric_input_rejected() -> None:
    with pytest.raises(ComplexError):
        rips_slice(np.array([[0, 1.0], [2.0, 0]]), 1.0)


def test_figure1_window_betti0() -> None:
    grid = TimeGrid.spanning(-2 * math.pi, 2 * math.pi, 257)
    w = (grid.index_of(math.pi / 2), grid.index_of(3 * math.pi / 2))
    for family, expect in (("figure1_X", 1), ("figure1_Y", 2)):
        m = IntervalMinIndex(make_example(family, grid)).matrix(*w)
        assert betti(rips_slice(m, 0.0), 0) == expect


def test_hollow_and_filled_triangle() -> None:
    filled = rips_slice(TRIANGLE, 1.0, max_dim=1)
    hollow = SimplicialComplexSlice(3, (filled.simplices[0], filled.simplices[1], ()), 1.0, 1)
    assert betti(hollow, 1) == 1
    assert betti(filled, 1) == 0
    assert rank_of_inclusion(hollow, filled, 1) == 0
    assert rank_of_inclusion(hollow, hollow, 1) == 1


def test_betti_beyond_cap() -> None:
    with pytest.raises(ComplexError):
        betti(rips_slice(TRIANGLE, 1.0, max_dim=1), 2)


def test_boundary_squares_to_zero() -> None:
    d = random_metric(np.random.default_rng(1), 6)
    c = rips_slice(d, np.median(d), max_dim=2)
    for k in (1, 2, 3):
        a = boundary_matrix(c, k).dense().astype(int)
        b = boundary_matrix(c, k + 1).dense().astype(int)
        if a.size and b.size:
            assert not np.any((a @ b) % 2)


def test_rank_identity_is_betti() -> None:
    rng = np.random.default_rng(2)
    for _ in range(20):
        d = random_metric(rng, 6)
        c = rips_slice(d, rng.uniform(0, d.max()), max_dim=1)
        for k in (0, 1):
            assert rank_of_inclusion(c, c, k) == betti(c, k)


def test_rank_of_merging_components() -> None:
    d = np.array([[0, 1, 3], [1, 0, 3], [3, 3, 0]], dtype=float)
    sub, sup = rips_slice(d, 0.5), rips_slice(d, 1.0)
    assert betti(sub, 0) == 3 and betti(sup, 0) == 2
    assert rank_of_inclusion(sub, sup, 0) == 2
    assert rank_of_inclusion(sup, rips_slice(d, 3.0), 0) == 1


def test_rank_requires_inclusion() -> None:
    with pytest.raises(ComplexError, match=r"\(0, 1\)"):
        rank_of_inclusion(rips_slice(TRIANGLE, 1.0), rips_slice(TRIANGLE, 0.5), 0)


def test_rank_functoriality_and_monotonicity() -> None:
    rng = np.random.default_rng(3)
    for _ in range(40):
        d = random_metric(rng, 6)
        s = np.sort(rng.uniform(0, d.max(), size=4))
        c = [rips_slice(d, x, max_dim=1) for x in s]
        for k in (0, 1):
            r02 = rank_of_inclusion(c[0], c[2], k)
            assert r02 <= min(rank_of_inclusion(c[0], c[1], k), rank_of_inclusion(c[1], c[2], k))
            # shrinking the source or growing the target never raises the rank
            assert rank_of_inclusion(c[0], c[3], k) <= r02
            assert rank_of_inclusion(c[0], c[2], k) <= rank_of_inclusion(c[1], c[2], k)


def test_components_match_bfs_and_betti0() -> None:
    rng = np.random.default_rng(4)
    for _ in range(200):
        n = int(rng.integers(1, 8))
        d = random_semimetric(rng, n)
        delta = float(rng.integers(0, 5))
        blocks = connected_components(d, delta)
        assert blocks == bfs_components(d, delta)
        assert betti(rips_slice(d, delta, max_dim=0), 0) == len(blocks)


def test_components_discrete_partition() -> None:
    assert connected_components(np.array([[0, 2.0], [2.0, 0]]), 1.0) == [[0], [1]]


def test_figure1_window_single_block() -> None:
    grid = TimeGrid.spanning(-2 * math.pi, 2 * math.pi, 257)
    w = (grid.index_of(math.pi / 2), grid.index_of(3 * math.pi / 2))
    m = IntervalMinIndex(make_example("figure1_X", grid)).matrix(*w)
    assert connected_components(m, 0.0) == [[0, 1, 2]]


def test_text_dump() -> None:
    text = rips_slice(TRIANGLE, 1.0, max_dim=1).to_text()
    assert text.splitlines() == ["0", "1", "2", "0 1", "0 2", "1 2", "0 1 2"]
