from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from gen import bfs_components, lattice_dms, random_metric, square_dms

from dynatda import (
    INF,
    Axis,
    ConfigError,
    GridFunction,
    RankInvariantGrid,
    SpatioTemporalDendrogram,
    TimeGrid,
    betti,
    betti0_grid,
    classify_r6,
    crocker,
    make_example,
    rips_slice,
    slhc,
    static_betti0,
    static_rank,
)
from dynatda.dms_core import IntervalMinIndex
from dynatda.invariants import (
    ADMISSIBLE,
    OTHER_NON_ADMISSIBLE,
    TRIVIALLY_NON_ADMISSIBLE,
    default_scale_axis,
    mst_weights,
)

FIG_GRID = TimeGrid.spanning(-2 * math.pi, 2 * math.pi, 257)


def test_mst_keeps_zero_edges() -> None:
    d = np.array([[[0, 0, 2], [0, 0, 3], [2, 3, 0]]], dtype=float)
    assert mst_weights(d).tolist() == [[0.0, 2.0]]


def test_betti0_separating_cell() -> None:
    k1, k2 = FIG_GRID.index_of(math.pi / 2), FIG_GRID.index_of(3 * math.pi / 2)
    bx = betti0_grid(make_example("figure1_X", FIG_GRID))
    by = betti0_grid(make_example("figure1_Y", FIG_GRID))
    assert bx.values[k1, k2, 0] == 1
    assert by.values[k1, k2, 0] == 2


def test_betti0_is_one_above_all_distances() -> None:
    x = make_example("figure1_X", FIG_GRID)
    g = betti0_grid(x)
    deltas = g.axes[2].values()
    valid = np.triu(np.ones((FIG_GRID.count, FIG_GRID.count), dtype=bool))
    assert np.all(g.values[valid][:, deltas >= 2.0] == 1)


def test_betti0_constant_independent_of_interval() -> None:
    c = make_example("constant", TimeGrid(0, 0.25, 12), metric=random_metric(np.random.default_rng(0), 4))
    g = betti0_grid(c)
    valid = np.triu(np.ones((12, 12), dtype=bool))
    rows = g.values[valid]
    assert np.all(rows == rows[0])


def test_betti0_step_mismatch_rejected() -> None:
    c = make_example("constant", TimeGrid(0, 0.25, 5), metric=1.0)
    with pytest.raises(ConfigError):
        betti0_grid(c, Axis("delta", 0, 0.3, 5, False, "scale"))


def test_betti0_three_way_agreement() -> None:
    rng = np.random.default_rng(1)
    dms = lattice_dms(rng, 5, 6, walk=False)
    g = betti0_grid(dms)
    idx = IntervalMinIndex(dms)
    tree = SpatioTemporalDendrogram(dms)
    deltas = g.axes[2].values()
    for k1 in range(6):
        for k2 in range(k1, 6):
            m = idx.matrix(k1, k2)
            for j, delta in enumerate(deltas):
                blocks = tree.partition(k1, k2, delta)
                assert blocks == bfs_components(m, delta)
                assert g.values[k1, k2, j] == len(blocks) == betti(rips_slice(m, delta, 0), 0)


def test_betti0_invalid_cells_and_order() -> None:
    g = betti0_grid(lattice_dms(np.random.default_rng(2), 3, 7))
    assert g.values[3, 1, 0] == INF
    assert g.is_order_reversing()


def test_dendrogram_is_monotone() -> None:
    dms = lattice_dms(np.random.default_rng(3), 4, 6)
    tree = SpatioTemporalDendrogram(dms)

    def refines(p, q):
        return all(any(set(b) <= set(c) for c in q) for b in p)

    for k1, k2, d in [(2, 3, 0.0), (1, 4, 1.0), (0, 5, 2.0)]:
        assert refines(tree.partition(k1, k2, d), tree.partition(max(k1 - 1, 0), k2, d + 1.0))
    assert len(tree.formigram(1.0)) == 6


def test_crocker_is_front_diagonal() -> None:
    dms = lattice_dms(np.random.default_rng(4), 4, 8)
    c = crocker(dms, 0)
    g = betti0_grid(dms)
    for t in range(8):
        assert np.array_equal(c.values[t], g.values[t, t])


def test_crocker_figure1_identical() -> None:
    cx = crocker(make_example("figure1_X", FIG_GRID), 0)
    cy = crocker(make_example("figure1_Y", FIG_GRID), 0)
    assert np.array_equal(cx.values, cy.values)


def test_crocker_constant_columns() -> None:
    metric = np.array([[0, 1, 1, 1.4], [1, 0, 1.4, 1], [1, 1.4, 0, 1], [1.4, 1, 1, 0]])
    c = make_example("constant", TimeGrid(0, 0.1, 5), metric=metric)
    scale = Axis("delta", 0, 0.2, 8, False, "scale")
    for k in (0, 1):
        v = crocker(c, k, scale).values
        assert np.all(v == v[0])
    assert crocker(c, 1, scale).values[0].tolist() == [0, 0, 0, 0, 0, 1, 1, 0]


def test_slhc_two_points() -> None:
    assert slhc(np.array([[0, 1.0], [1.0, 0]])).diagram.to_list() == [[0.0, 1.0], [0.0, "inf"]]
    assert slhc(np.array([[0, 2.5], [2.5, 0]])).diagram.to_list() == [[0.0, 2.5], [0.0, "inf"]]


def test_slhc_ultrametric_properties() -> None:
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(2, 7))
        d = random_metric(rng, n)
        u = slhc(d).ultrametric
        assert np.array_equal(u, u.T) and np.all(np.diag(u) == 0)
        assert np.all(u <= d)
        assert np.all(u[:, :, None] <= np.maximum(u[:, None, :], u.T[None, :, :]).transpose(0, 2, 1) + 0)
        for i, j, k in itertools.product(range(n), repeat=3):
            assert u[i, j] <= max(u[i, k], u[k, j])


def test_slhc_fixes_ultrametrics() -> None:
    rng = np.random.default_rng(6)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        u = slhc(random_metric(rng, n)).ultrametric
        assert np.array_equal(slhc(u).ultrametric, u)


def test_slhc_matches_components() -> None:
    rng = np.random.default_rng(7)
    d = random_metric(rng, 6)
    u = slhc(d).ultrametric
    for delta in np.unique(d):
        assert bfs_components(u, delta) == bfs_components(d, delta)


def test_static_betti0_two_points() -> None:
    g = static_betti0(np.array([[0, 1.0], [1.0, 0]]), (0.0, 0.25, 8))
    assert g.values.tolist() == [2, 2, 2, 2, 1, 1, 1, 1]
    assert static_betti0(np.zeros((1, 1)), (0.0, 1.0, 3)).values.tolist() == [1, 1, 1]


def test_static_betti0_bfs_oracle() -> None:
    rng = np.random.default_rng(8)
    d = random_metric(rng, 6)
    axis = (0.0, d.max() / 10, 11)
    g = static_betti0(d, axis)
    for j, delta in enumerate(Axis("s", *axis).values()):
        assert g.values[j] == len(bfs_components(d, delta))


def test_static_rank_two_points() -> None:
    g = static_rank(np.array([[0, 1.0], [1.0, 0]]), 0, (0.0, 0.5, 4))
    # both axes cover -0.5, 0, 0.5, 1, 1.5
    v = g.values
    assert v[0].tolist() == [0, 0, 0, 0, 0]
    assert v[1].tolist() == [INF, 2, 2, 1, 1]
    assert v[3].tolist() == [INF, INF, INF, 1, 1]
    assert g.is_order_reversing()


def test_static_rank_diagonal_is_betti() -> None:
    rng = np.random.default_rng(9)
    d = random_metric(rng, 5)
    axis = (0.0, d.max() / 6, 7)
    for k in (0, 1):
        g = static_rank(d, k, axis)
        deltas = g.axes[0].values()
        for i in range(1, len(deltas)):
            assert g.values[i, i] == betti(rips_slice(d, deltas[i], 1), k)


def test_static_rank_component_counting() -> None:
    rng = np.random.default_rng(10)
    for _ in range(10):
        d = random_metric(rng, 5)
        axis = (0.0, d.max() / 8, 9)
        g = static_rank(d, 0, axis)
        deltas = g.axes[0].values()
        for i in range(1, len(deltas)):
            for j in range(i, len(deltas)):
                small = bfs_components(d, deltas[i])
                big = bfs_components(d, deltas[j])
                hit = {next(b for b, blk in enumerate(big) if s[0] in blk) for s in small}
                assert g.values[i, j] == len(hit)


@pytest.mark.parametrize(
    "a, expect",
    [
        ((0, 1, 0.5, -1, 2, 1), ADMISSIBLE),
        ((0, 1, 2, -1, 2, 1), TRIVIALLY_NON_ADMISSIBLE),
        ((1, 0, 0.5, 0, 2, 1), OTHER_NON_ADMISSIBLE),
        ((0, 1, -1, 0, 1, 0), OTHER_NON_ADMISSIBLE),
        ((0, 1, 0.5, 1, 0.5, 1), TRIVIALLY_NON_ADMISSIBLE),
    ],
)
def test_classify_examples(a, expect) -> None:
    assert classify_r6(a) == expect


def _brute_classes(points: np.ndarray, lo: int = -3, hi: int = 3) -> list[str]:
    cand = np.array(list(itertools.product(range(lo, hi + 1), repeat=6)))
    c1, c2, c3, c4, c5, c6 = cand.T
    adm = cand[(c1 <= c2) & (c3 >= 0) & (c4 <= c1) & (c2 <= c5) & (c3 <= c6)]
    out = []
    for a in points:
        below = (
            (adm[:, 0] <= a[0]) & (adm[:, 1] >= a[1]) & (adm[:, 2] >= a[2])
            & (adm[:, 3] >= a[3]) & (adm[:, 4] <= a[4]) & (adm[:, 5] <= a[5])
        )
        if a[0] <= a[1] and a[2] >= 0 and a[3] <= a[0] and a[1] <= a[4] and a[2] <= a[5]:
            out.append(ADMISSIBLE)
        else:
            out.append(OTHER_NON_ADMISSIBLE if below.any() else TRIVIALLY_NON_ADMISSIBLE)
    return out


def test_classify_matches_bruteforce_sample() -> None:
    pts = np.random.default_rng(11).integers(-2, 3, size=(400, 6))
    assert [classify_r6(a) for a in pts] == _brute_classes(pts)


def test_admissible_set_is_convex() -> None:
    rng = np.random.default_rng(12)
    sign = np.array([1, -1, -1, -1, 1, 1])
    checked = 0
    while checked < 300:
        a = rng.integers(-2, 3, size=6)
        b = a + sign * rng.integers(0, 3, size=6)
        if classify_r6(a) != ADMISSIBLE or classify_r6(b) != ADMISSIBLE:
            continue
        c = a + sign * np.array([rng.integers(0, abs(x) + 1) for x in (b - a)])
        assert classify_r6(c) == ADMISSIBLE
        checked += 1


def test_rank_grid_repeated_pair_is_betti0() -> None:
    dms = lattice_dms(np.random.default_rng(13), 3, 5)
    rk = RankInvariantGrid(dms, 0)
    b0 = betti0_grid(dms)
    for t in range(5):
        for m in range(rk.scale.count):
            assert rk.value((t, t, m, t, t, m)) == b0.values[t, t, m]


def test_rank_grid_classes_and_identity() -> None:
    dms = square_dms(np.random.default_rng(14), 4)
    rk = RankInvariantGrid(dms, 1)
    assert rk.value((0, 1, 2, 0, 1, -1)) == INF
    assert rk.value((2, 1, 0, 0, 3, 2)) == 0
    idx = IntervalMinIndex(dms)
    for m in range(rk.scale.count):
        cx = rips_slice(idx.matrix(1, 2), rk.deltas[m], 1)
        assert rk.value((1, 2, m, 1, 2, m)) == betti(cx, 1)


def test_rank_grid_order_reversing_sampled() -> None:
    rng = np.random.default_rng(15)
    sign = np.array([1, -1, -1, -1, 1, 1])
    for k, dms in ((0, lattice_dms(rng, 3, 5)), (1, square_dms(rng, 4))):
        rk = RankInvariantGrid(dms, k)
        shape = np.array(rk.shape)
        for _ in range(1500):
            a = rng.integers(0, shape)
            b = np.clip(a + sign * rng.integers(0, 3, size=6), 0, shape - 1)
            if np.any((b - a) * sign < 0):
                continue
            assert rk.value(a) >= rk.value(b)


def test_rank_grid_needs_zero_origin() -> None:
    dms = lattice_dms(np.random.default_rng(16), 2, 3)
    with pytest.raises(ConfigError):
        RankInvariantGrid(dms, 0, Axis("delta", 1.0, 1.0, 3, False, "scale"))


def test_rank_cell_ids_match_direct() -> None:
    dms = square_dms(np.random.default_rng(17), 5)
    rk = RankInvariantGrid(dms, 1)
    ids = rk.cell_ids()
    for i1 in range(5):
        for i2 in range(i1, 5):
            for m in range(rk.scale.count):
                assert ids[i1, i2, m] == rk.cell_id(i1, i2, m)


def test_dense_rank_grid_matches_lazy() -> None:
    dms = lattice_dms(np.random.default_rng(18), 2, 3)
    rk = RankInvariantGrid(dms, 0)
    dense = rk.to_dense()
    for a in np.ndindex(*rk.shape):
        assert dense.values[a] == rk.value(a)


def test_gridfunction_json_round_trip(tmp_path) -> None:
    g = betti0_grid(lattice_dms(np.random.default_rng(19), 3, 5))
    path = tmp_path / "g.json"
    g.save(path)
    h = GridFunction.load(path)
    assert h == g and h.to_json() == g.to_json()
    assert '"inf"' in path.read_text()


def test_slice_csv_shape() -> None:
    g = betti0_grid(lattice_dms(np.random.default_rng(20), 3, 4))
    lines = g.slice_csv((0, 1), {2: 0}).splitlines()
    assert len(lines) == 5 and lines[1].count(",") == 4
    assert "inf" in lines[-1]


def test_default_scale_reaches_max() -> None:
    dms = lattice_dms(np.random.default_rng(21), 3, 4)
    ax = default_scale_axis([dms])
    assert ax.values()[-1] >= dms.max_distance()
    assert ax.step == pytest.approx(2 * dms.grid.step)
