"""Interleaving, erosion and bottleneck distances between invariants."""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .diagrams import PersistenceDiagram
from .dms_core import SampledDMS, estimate_lipschitz
from .invariants import (
    INF,
    ConfigError,
    GridFunction,
    RankInvariantGrid,
    betti0_grid,
    default_scale_axis,
    shift_r6,
)

__all__ = [
    "PersistenceDiagram",
    "InterleavingResult",
    "ComparisonReport",
    "shifted",
    "k_test",
    "interleaving",
    "rank_k_test",
    "rank_k_test_bruteforce",
    "rank_interleaving",
    "erosion",
    "bottleneck",
    "compare_betti0",
    "compare_rank",
]


@dataclass(frozen=True)
class InterleavingResult:
    grid_units: int
    physical: float
    step: float


# ---------------------------------------------------------------------------
# dense grids


def shifted(values: np.ndarray, k: int, extension: str = "clamp") -> np.ndarray:
    """``out[a] = values[a + k]`` on every axis, extended past the last cell.

    ``clamp`` repeats the last cell, ``zero`` reads 0 outside the grid.
    """
    if k < 0:
        raise ValueError("shift must be nonnegative")
    if k == 0:
        return values
    if extension not in ("clamp", "zero"):
        raise ValueError(f"unknown extension {extension!r}")
    out = values
    for ax, n in enumerate(values.shape):
        out = out.take(np.minimum(np.arange(n) + k, n - 1), axis=ax)
    if extension == "zero":
        for ax, n in enumerate(values.shape):
            idx = [slice(None)] * values.ndim
            idx[ax] = slice(max(n - k, 0), None)
            out[tuple(idx)] = 0
    return out


def _extension(F: GridFunction, G: GridFunction, extension: str | None) -> str:
    if extension is not None:
        return extension
    if F.clamp_extension != G.clamp_extension:
        raise ConfigError("both functions must use the same boundary extension")
    return "clamp" if F.clamp_extension else "zero"


def _check_pair(F: GridFunction, G: GridFunction) -> None:
    if not F.same_axes(G):
        raise ConfigError("grid functions do not share axes")


def _axis_blocks(n: int, off: int, lo: int = 0) -> list[tuple[slice, slice, bool]]:
    """Cover ``a -> clip(a + off, 0, n - 1)`` for ``a`` in ``[lo, n)`` by slice pairs.

    The flag marks blocks whose target was clipped.
    """
    out = []
    if off >= 0:
        mid = max(n - off, lo)
        if mid > lo:
            out.append((slice(lo, mid), slice(lo + off, mid + off), False))
        if n > mid:
            out.append((slice(mid, n), slice(n - 1, n), True))
    else:
        mid = min(max(-off, lo), n)
        if mid > lo:
            out.append((slice(lo, mid), slice(0, 1), True))
        if n > mid:
            out.append((slice(mid, n), slice(mid + off, n + off), False))
    return out


def _blockwise_dominates(
    f: np.ndarray,
    g: np.ndarray,
    offsets: tuple[int, ...],
    lows: tuple[int, ...] | None = None,
    zero_outside: bool = False,
    skip: np.ndarray | None = None,
) -> bool:
    """f(a) >= g(clip(a + offsets)) over the box starting at ``lows``, on views only.

    ``skip`` is broadcastable to f and marks cells exempt from the test.
    """
    lows = lows or (0,) * f.ndim
    per_axis = [_axis_blocks(n, o, lo) for n, o, lo in zip(f.shape, offsets, lows)]
    for combo in itertools.product(*per_axis):
        fs = tuple(c[0] for c in combo)
        fv = f[fs]
        if zero_outside and any(c[2] for c in combo):
            ok = fv >= 0
        else:
            ok = fv >= g[tuple(c[1] for c in combo)]
        if skip is not None:
            ok |= skip[tuple(sl if m > 1 else slice(None) for sl, m in zip(fs, skip.shape))]
        if not ok.all():
            return False
    return True


def _dominates(f: np.ndarray, g: np.ndarray, k: int, extension: str) -> bool:
    if extension not in ("clamp", "zero"):
        raise ValueError(f"unknown extension {extension!r}")
    return _blockwise_dominates(f, g, (k,) * f.ndim, zero_outside=extension == "zero")


def k_test(F: GridFunction, G: GridFunction, k: int, extension: str | None = None) -> bool:
    """True iff F(a) >= G(a + k) and G(a) >= F(a + k) on every cell."""
    _check_pair(F, G)
    ext = _extension(F, G, extension)
    f, g = F.normalized(), G.normalized()
    return _dominates(f, g, k, ext) and _dominates(g, f, k, ext)


def _search(test: Callable[[int], bool], top: int, method: str) -> int:
    if method == "linear":
        for k in range(top + 1):
            if test(k):
                return k
        raise ConfigError(f"the {top}-test fails; extend the grids or use clamp extension")
    if method != "binary":
        raise ValueError(f"unknown search method {method!r}")
    if not test(top):
        raise ConfigError(f"the {top}-test fails; extend the grids or use clamp extension")
    lo, hi = 0, top  # invariant: test(hi) holds
    while lo < hi:
        mid = (lo + hi) // 2
        if test(mid):
            hi = mid
        else:
            lo = mid + 1
    return hi


def interleaving(
    F: GridFunction,
    G: GridFunction,
    method: str = "binary",
    extension: str | None = None,
) -> InterleavingResult:
    """Smallest uniform shift passing the k-test, in cells and physical units."""
    _check_pair(F, G)
    ext = _extension(F, G, extension)
    f, g = F.normalized(), G.normalized()
    top = max(F.shape) - 1 if ext == "clamp" else max(F.shape)
    k = _search(lambda s: _dominates(f, g, s, ext) and _dominates(g, f, s, ext), top, method)
    step = F.shift_step
    return InterleavingResult(k, k * step, step)


def erosion(Y1: GridFunction, Y2: GridFunction, method: str = "binary") -> float:
    """Erosion distance of two 2-D rank functions (first axis decreasing)."""
    for Y in (Y1, Y2):
        if Y.d != 2 or not Y.axes[0].decreasing or Y.axes[1].decreasing:
            raise ConfigError("erosion needs 2-D functions on the (decreasing, increasing) half-plane")
    return interleaving(Y1, Y2, method).physical


# ---------------------------------------------------------------------------
# lazy six-parameter rank grids


def _check_rank_pair(F: RankInvariantGrid, G: RankInvariantGrid) -> None:
    if not F.same_axes(G):
        raise ConfigError("rank grids do not share axes")


_PAIR_CACHE: dict[tuple[int, int], tuple[np.ndarray, ...]] = {}


def _nested_pairs(t: int, s: int) -> tuple[np.ndarray, ...]:
    """All (sub, super) cell pairs with nested intervals and ordered scales."""
    key = (t, s)
    if key not in _PAIR_CACHE:
        iv = np.array(
            [
                (i1, i2, i4, i5)
                for i4 in range(t)
                for i1 in range(i4, t)
                for i2 in range(i1, t)
                for i5 in range(i2, t)
            ],
            dtype=np.int64,
        ).reshape(-1, 4)
        sc = np.array([(m3, m6) for m3 in range(s) for m6 in range(m3, s)], dtype=np.int64).reshape(-1, 2)
        a = np.repeat(iv, len(sc), axis=0)
        b = np.tile(sc, (len(iv), 1))
        _PAIR_CACHE[key] = (a[:, 0], a[:, 1], b[:, 0], a[:, 2], a[:, 3], b[:, 1])
    return _PAIR_CACHE[key]


def _rank_lookup(R: RankInvariantGrid, sub: np.ndarray, sup: np.ndarray) -> np.ndarray:
    pairs = np.stack([sub, sup], axis=1)
    uniq, inv = np.unique(pairs, axis=0, return_inverse=True)
    table = np.array([R.rank_by_ids(int(a), int(b)) for a, b in uniq], dtype=np.int64)
    return table[inv.ravel()]


def _rank_dominates(F: RankInvariantGrid, G: RankInvariantGrid, s: int) -> bool:
    t, S = F.dms.count, F.scale.count
    if F.k == 0:
        # rank of H0 under an inclusion with every vertex present is b0 of the target
        fb, gb = F.betti0_cells(), G.betti0_cells()
        if s >= S:
            return True
        ax = np.arange(t)
        skip = (ax[None, :] - ax[:, None] < 2 * s)[:, :, None]
        return _blockwise_dominates(fb, gb, (-s, s, s), (0, 0, s), skip=skip)
    fid, gid = F.cell_ids(), G.cell_ids()
    i1, i2, m3, i4, i5, m6 = _nested_pairs(t, S)
    keep = (i2 - i1 >= 2 * s) & (m3 >= s)
    i1, i2, m3, i4, i5, m6 = (x[keep] for x in (i1, i2, m3, i4, i5, m6))
    lhs = _rank_lookup(F, fid[i1, i2, m3], fid[i4, i5, m6])
    rhs = _rank_lookup(
        G,
        gid[i1 + s, i2 - s, m3 - s],
        gid[np.maximum(i4 - s, 0), np.minimum(i5 + s, t - 1), np.minimum(m6 + s, S - 1)],
    )
    return bool(np.all(lhs >= rhs))


def rank_k_test(F: RankInvariantGrid, G: RankInvariantGrid, k: int) -> bool:
    """k-test for rank grids over every source cell in the stored box.

    Only admissible sources whose shift stays admissible can fail: other
    sources hold INF or map to cells holding 0.
    """
    _check_rank_pair(F, G)
    if k < 0:
        raise ValueError("shift must be nonnegative")
    return _rank_dominates(F, G, k) and _rank_dominates(G, F, k)


def rank_k_test_bruteforce(F: RankInvariantGrid, G: RankInvariantGrid, k: int) -> bool:
    """Cell-by-cell reference for :func:`rank_k_test`, for tiny grids."""
    _check_rank_pair(F, G)
    for a in np.ndindex(*F.shape):
        b = shift_r6(a, k)
        for P, Q in ((F, G), (G, F)):
            v = P.value(a)
            if v != INF and v < Q.value(b):
                return False
    return True


def rank_interleaving(F: RankInvariantGrid, G: RankInvariantGrid, method: str = "binary") -> InterleavingResult:
    _check_rank_pair(F, G)
    # past this shift no source cell keeps an admissible image, so the test passes
    top = min((F.dms.count - 1) // 2 + 1, F.scale.count)
    k = _search(lambda s: rank_k_test(F, G, s), top, method)
    step = F.shift_step
    return InterleavingResult(k, k * step, step)


# ---------------------------------------------------------------------------
# bottleneck


def _linf(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=-1)


def _feasible(a: np.ndarray, b: np.ndarray, cost: np.ndarray, ha: np.ndarray, hb: np.ndarray, eps: float) -> bool:
    m, p = len(a), len(b)
    size = m + p
    # rows: points of a, then diagonal images of b; columns: points of b, then diagonal images of a
    rows, cols = [], []
    ia, jb = np.nonzero(cost <= eps)
    rows.append(ia)
    cols.append(jb)
    da = np.flatnonzero(ha <= eps)
    rows.append(da)
    cols.append(p + da)
    db = np.flatnonzero(hb <= eps)
    rows.append(m + db)
    cols.append(db)
    rr, cc = np.meshgrid(m + np.arange(p), p + np.arange(m), indexing="ij")
    rows.append(rr.ravel())
    cols.append(cc.ravel())
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    graph = csr_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck(D1: PersistenceDiagram, D2: PersistenceDiagram) -> float:
    """Exact bottleneck distance; infinite if the essential counts differ."""
    e1, e2 = np.sort(D1.essential()), np.sort(D2.essential())
    if len(e1) != len(e2):
        return float("inf")
    # on the line, sorted order is an optimal matching for the essential births
    ess = float(np.max(np.abs(e1 - e2))) if len(e1) else 0.0
    a, b = D1.finite(), D2.finite()
    if len(a) == 0 and len(b) == 0:
        return ess
    cost = _linf(a, b) if len(a) and len(b) else np.zeros((len(a), len(b)))
    ha = (a[:, 1] - a[:, 0]) / 2 if len(a) else np.zeros(0)
    hb = (b[:, 1] - b[:, 0]) / 2 if len(b) else np.zeros(0)
    cand = np.unique(np.concatenate([[0.0], cost.ravel(), ha, hb]))
    cand = cand[cand >= ess] if np.any(cand >= ess) else np.array([ess])
    lo, hi = 0, len(cand) - 1  # the largest candidate always admits a matching
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(a, b, cost, ha, hb, float(cand[mid])):
            hi = mid
        else:
            lo = mid + 1
    return max(ess, float(cand[hi]))


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class ComparisonReport:
    d_I_grid_units: int
    d_I_physical: float
    step: float
    unit_ratio: float
    lipschitz: float
    alpha: float
    d_dyn_lower_bound: float
    invariant: str
    k: int | None

    def to_dict(self) -> dict:
        return asdict(self)


def _common_setup(A: SampledDMS, B: SampledDMS, scale, unit_ratio: float):
    if not A.grid.aligned_with(B.grid):
        raise ConfigError("the two DMSs must share one time grid; resample first")
    if A.n < 1 or B.n < 1:
        raise ConfigError("empty DMS")
    sc = default_scale_axis([A, B], unit_ratio) if scale is None else scale
    lip = max(estimate_lipschitz(A), estimate_lipschitz(B)) if A.count >= 2 else 0.0
    return sc, lip


def _report(res: InterleavingResult, unit_ratio: float, lip: float, alpha: float, invariant: str, k) -> ComparisonReport:
    bound = max(0.0, (res.physical - 4.0 * lip * alpha) / 2.0)
    return ComparisonReport(res.grid_units, res.physical, res.step, unit_ratio, lip, alpha, bound, invariant, k)


def compare_betti0(
    A: SampledDMS,
    B: SampledDMS,
    scale=None,
    unit_ratio: float = 2.0,
    threads: int | None = None,
    method: str = "binary",
) -> ComparisonReport:
    sc, lip = _common_setup(A, B, scale, unit_ratio)
    F = betti0_grid(A, sc, unit_ratio, threads)
    G = betti0_grid(B, sc, unit_ratio, threads)
    return _report(interleaving(F, G, method), unit_ratio, lip, A.grid.step, "betti0", None)


def compare_rank(
    A: SampledDMS,
    B: SampledDMS,
    k: int = 0,
    scale=None,
    unit_ratio: float = 2.0,
    method: str = "binary",
) -> ComparisonReport:
    sc, lip = _common_setup(A, B, scale, unit_ratio)
    F = RankInvariantGrid(A, k, sc, unit_ratio)
    G = RankInvariantGrid(B, k, sc, unit_ratio)
    return _report(rank_interleaving(F, G, method), unit_ratio, lip, A.grid.step, f"rank_{k}", k)
