"""Grid-valued invariants of sampled dynamic metric spaces.

Every grid function stores extended nonnegative integers in ``int64`` with
``INF`` as a saturating sentinel. Axes carry an orientation; after flipping the
decreasing ones, the stored invariants are order-reversing.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .complexes import (
    DEFAULT_MAX_DIM,
    SimplicialComplexSlice,
    betti,
    connected_components,
    rank_of_inclusion,
    rips_slice,
)
from .diagrams import PersistenceDiagram
from .dms_core import IntervalMinIndex, SampledDMS

__all__ = [
    "INF",
    "ConfigError",
    "Axis",
    "GridFunction",
    "SpatioTemporalDendrogram",
    "RankInvariantGrid",
    "SLHCResult",
    "ADMISSIBLE",
    "TRIVIALLY_NON_ADMISSIBLE",
    "OTHER_NON_ADMISSIBLE",
    "classify_r6",
    "mst_weights",
    "default_scale_axis",
    "betti0_grid",
    "rank_invariant_grid",
    "crocker",
    "slhc",
    "static_betti0",
    "static_rank",
]

INF = int(np.iinfo(np.int64).max)


class ConfigError(ValueError):
    """Inconsistent grid configuration."""


@dataclass(frozen=True)
class Axis:
    name: str
    origin: float
    step: float
    count: int
    decreasing: bool = False
    kind: str = "index"  # "time", "scale" or "index"

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ConfigError(f"axis {self.name!r} needs at least one cell")
        if not self.step > 0:
            raise ConfigError(f"axis {self.name!r} needs a positive step")
        if self.kind not in ("time", "scale", "index"):
            raise ConfigError(f"unknown axis kind {self.kind!r}")

    def values(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.count)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "origin": self.origin,
            "step": self.step,
            "count": self.count,
            "orientation": "decreasing" if self.decreasing else "increasing",
            "kind": self.kind,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Axis":
        return cls(
            str(d["name"]),
            float(d["origin"]),
            float(d["step"]),
            int(d["count"]),
            d.get("orientation", "increasing") == "decreasing",
            str(d.get("kind", "index")),
        )


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-9 * max(abs(a), abs(b))


@dataclass(frozen=True, eq=False)
class GridFunction:
    axes: tuple[Axis, ...]
    values: np.ndarray
    clamp_extension: bool = True
    order_reversing: bool = True
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.values, dtype=np.int64)
        axes = tuple(self.axes)
        if v.shape != tuple(a.count for a in axes):
            raise ConfigError(f"values shape {v.shape} does not match axes {[a.count for a in axes]}")
        if np.any(v < 0):
            raise ConfigError("grid values must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "axes", axes)

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def normalized(self) -> np.ndarray:
        """Values with every decreasing axis reflected."""
        flips = tuple(i for i, a in enumerate(self.axes) if a.decreasing)
        return np.flip(self.values, axis=flips) if flips else self.values

    @property
    def shift_step(self) -> float:
        """Physical size of a one-cell shift on every axis at once.

        Scale axes define it when present; otherwise all axes must agree.
        """
        scale = [a.step for a in self.axes if a.kind == "scale"]
        pool = scale or [a.step for a in self.axes]
        if any(not _close(s, pool[0]) for s in pool):
            raise ConfigError("axes do not share a common normalized step")
        return pool[0]

    def same_axes(self, other: "GridFunction") -> bool:
        if self.d != other.d:
            return False
        for a, b in zip(self.axes, other.axes):
            if a.count != b.count or a.decreasing != b.decreasing or a.kind != b.kind:
                return False
            if not (_close(a.step, b.step) and (_close(a.origin, b.origin) or abs(a.origin - b.origin) <= 1e-12)):
                return False
        return True

    def is_order_reversing(self) -> bool:
        v = self.normalized()
        for ax in range(self.d):
            if v.shape[ax] > 1 and np.any(np.diff(v, axis=ax) > 0):
                return False
        return True

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GridFunction)
            and self.axes == other.axes
            and self.clamp_extension == other.clamp_extension
            and np.array_equal(self.values, other.values)
        )

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        flat = self.values.ravel().tolist()
        return {
            "format": "dynatda.gridfunction/1",
            "axes": [a.to_dict() for a in self.axes],
            "clamp_extension": self.clamp_extension,
            "order_reversing": self.order_reversing,
            "meta": self.meta,
            "values": ["inf" if x == INF else x for x in flat],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GridFunction":
        axes = tuple(Axis.from_dict(a) for a in d["axes"])
        flat = [INF if x == "inf" else int(x) for x in d["values"]]
        vals = np.array(flat, dtype=np.int64).reshape(tuple(a.count for a in axes))
        return cls(axes, vals, bool(d.get("clamp_extension", True)), bool(d.get("order_reversing", True)), dict(d.get("meta", {})))

    @classmethod
    def from_json(cls, text: str) -> "GridFunction":
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "GridFunction":
        return cls.from_json(Path(path).read_text())

    def slice2d(self, keep: tuple[int, int], fixed: dict[int, int] | None = None) -> np.ndarray:
        """2-D slice over axes ``keep``; other axes pinned by ``fixed`` (default 0)."""
        fixed = dict(fixed or {})
        idx: list[Any] = []
        for ax in range(self.d):
            idx.append(slice(None) if ax in keep else fixed.get(ax, 0))
        out = self.values[tuple(idx)]
        return out if keep[0] < keep[1] else out.T

    def slice_csv(self, keep: tuple[int, int], fixed: dict[int, int] | None = None) -> str:
        arr = self.slice2d(keep, fixed)
        a0, a1 = self.axes[keep[0]], self.axes[keep[1]]
        lines = [",".join([f"{a0.name}\\{a1.name}"] + [repr(float(x)) for x in a1.values()])]
        for i, row in enumerate(arr):
            cells = ["inf" if x == INF else str(int(x)) for x in row]
            lines.append(",".join([repr(float(a0.values()[i]))] + cells))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# minimum spanning trees


def mst_weights(d: np.ndarray) -> np.ndarray:
    """Sorted MST edge weights of a batch of complete graphs.

    ``d`` has shape ``(B, n, n)``; returns ``(B, n - 1)``. Zero-weight edges are
    kept (a sparse-graph MST would drop them).
    """
    d = np.asarray(d, dtype=np.float64)
    b, n, _ = d.shape
    out = np.empty((b, max(n - 1, 0)))
    if n <= 1 or b == 0:
        return out
    rows = np.arange(b)
    key = d[:, 0, :].copy()
    used = np.zeros((b, n), dtype=bool)
    used[:, 0] = True
    for i in range(n - 1):
        masked = np.where(used, np.inf, key)
        j = masked.argmin(axis=1)
        out[:, i] = masked[rows, j]
        used[rows, j] = True
        np.minimum(key, d[rows, j, :], out=key)
    out.sort(axis=1)
    return out


def _components_from_weights(weights: np.ndarray, deltas: np.ndarray, n: int) -> np.ndarray:
    """n - #(MST edges <= delta), for every row of weights and every delta."""
    if weights.shape[-1] == 0:
        return np.full(weights.shape[:-1] + (len(deltas),), n, dtype=np.int64)
    merged = (weights[..., :, None] <= deltas).sum(axis=-2)
    return n - merged.astype(np.int64)


# ---------------------------------------------------------------------------
# axes and configuration


def _time_axis(dms: SampledDMS, name: str, decreasing: bool) -> Axis:
    return Axis(name, dms.grid.t0, dms.grid.step, dms.count, decreasing, "time")


def default_scale_axis(dms_list: Sequence[SampledDMS], unit_ratio: float = 2.0) -> Axis:
    """Scale axis from 0 with step ``unit_ratio`` x time step, reaching the largest distance."""
    step = unit_ratio * dms_list[0].grid.step
    top = max(d.max_distance() for d in dms_list)
    count = int(math.ceil(top / step - 1e-12)) + 1
    return Axis("delta", 0.0, step, max(count, 1), False, "scale")


def _scale_axis(scale, name: str = "delta", decreasing: bool = False) -> Axis:
    if isinstance(scale, Axis):
        return Axis(name, scale.origin, scale.step, scale.count, decreasing, "scale")
    origin, step, count = scale
    return Axis(name, float(origin), float(step), int(count), decreasing, "scale")


def _check_ratio(dms: SampledDMS, scale: Axis, unit_ratio: float) -> None:
    if not unit_ratio > 0:
        raise ConfigError("unit ratio must be positive")
    if not _close(scale.step, unit_ratio * dms.grid.step):
        raise ConfigError(
            f"scale step {scale.step} must equal unit ratio {unit_ratio} x time step {dms.grid.step}"
        )


def _workers(threads: int | None) -> int:
    return max(1, threads if threads else (os.cpu_count() or 1))


# ---------------------------------------------------------------------------
# Betti-0 on intervals x scales


def betti0_grid(
    dms: SampledDMS,
    scale=None,
    unit_ratio: float = 2.0,
    threads: int | None = None,
) -> GridFunction:
    """Number of components at every (k1, k2, scale) cell.

    Cells with ``k1 > k2`` hold ``INF``; after reflecting the k1 axis they form
    a down-set, so order-reversal and the clamped k-test are unaffected.
    """
    sc = default_scale_axis([dms], unit_ratio) if scale is None else _scale_axis(scale)
    _check_ratio(dms, sc, unit_ratio)
    if sc.origin < 0:
        raise ConfigError("scale axis must start at a nonnegative value")
    t, n = dms.count, dms.n
    deltas = sc.values()
    out = np.full((t, t, sc.count), INF, dtype=np.int64)

    def row(k1: int) -> None:
        cm = np.minimum.accumulate(dms.dist[k1:], axis=0)
        out[k1, k1:, :] = _components_from_weights(mst_weights(cm), deltas, n)

    with ThreadPoolExecutor(_workers(threads)) as pool:
        list(pool.map(row, range(t)))
    axes = (_time_axis(dms, "k1", True), _time_axis(dms, "k2", False), sc)
    meta = {
        "invariant": "betti0",
        "unit_ratio": unit_ratio,
        "stabilized": bool(deltas[-1] >= dms.max_distance()),
    }
    return GridFunction(axes, out, True, True, meta)


class SpatioTemporalDendrogram:
    """Partitions of the points at (interval, scale) cells, computed on demand."""

    def __init__(self, dms: SampledDMS) -> None:
        self.dms = dms
        self._index = IntervalMinIndex(dms)

    def partition(self, k1: int, k2: int, delta: float) -> list[list[int]]:
        return connected_components(self._index.matrix(k1, k2), delta)

    def formigram(self, delta: float) -> list[list[list[int]]]:
        """Fixed-scale slice over single-sample intervals."""
        return [self.partition(k, k, delta) for k in range(self.dms.count)]


# ---------------------------------------------------------------------------
# CROCKER plots


def crocker(
    dms: SampledDMS,
    k: int,
    scale=None,
    unit_ratio: float = 2.0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> GridFunction:
    """``dim H_k`` of the single-time Rips complex over time x scale."""
    sc = default_scale_axis([dms], unit_ratio) if scale is None else _scale_axis(scale)
    deltas = sc.values()
    if k == 0:
        vals = _components_from_weights(mst_weights(dms.dist), deltas, dms.n)
        vals = np.where(deltas[None, :] < 0, 0, vals)
    else:
        vals = np.zeros((dms.count, sc.count), dtype=np.int64)
        for ti in range(dms.count):
            for m, delta in enumerate(deltas):
                vals[ti, m] = betti(rips_slice(dms.dist[ti], delta, max(max_dim, k)), k)
    axes = (_time_axis(dms, "t", False), sc)
    return GridFunction(axes, vals, True, False, {"invariant": f"crocker_{k}"})


# ---------------------------------------------------------------------------
# static invariants


@dataclass(frozen=True, eq=False)
class SLHCResult:
    ultrametric: np.ndarray
    merges: tuple[tuple[float, tuple[int, ...], tuple[int, ...]], ...]
    diagram: PersistenceDiagram


def slhc(metric) -> SLHCResult:
    """Single-linkage clustering via Prim's tree, merged in increasing order."""
    d = np.asarray(metric, dtype=np.float64)
    n = d.shape[0]
    if d.shape != (n, n) or not np.array_equal(d, d.T) or np.any(np.diag(d) != 0):
        raise ConfigError("slhc needs a symmetric zero-diagonal matrix")
    edges = []
    if n > 1:
        key = d[0].copy()
        parent = np.zeros(n, dtype=int)
        used = np.zeros(n, dtype=bool)
        used[0] = True
        for _ in range(n - 1):
            masked = np.where(used, np.inf, key)
            j = int(masked.argmin())
            edges.append((float(masked[j]), int(parent[j]), j))
            used[j] = True
            better = d[j] < key
            key = np.where(better, d[j], key)
            parent = np.where(better, j, parent)
    edges.sort()
    u = np.zeros((n, n))
    block = {i: (i,) for i in range(n)}
    merges = []
    for w, a, b in edges:
        ba, bb = block[a], block[b]
        ia, ib = np.array(ba), np.array(bb)
        u[np.ix_(ia, ib)] = w
        u[np.ix_(ib, ia)] = w
        merged = tuple(sorted(ba + bb))
        for v in merged:
            block[v] = merged
        merges.append((w, ba, bb))
    dgm = PersistenceDiagram.from_pairs([(0.0, math.inf)] + [(0.0, w) for w, _, _ in merges])
    u.setflags(write=False)
    return SLHCResult(u, tuple(merges), dgm)


def static_betti0(metric, scale) -> GridFunction:
    d = np.asarray(metric, dtype=np.float64)
    sc = _scale_axis(scale)
    vals = _components_from_weights(mst_weights(d[None]), sc.values(), d.shape[0])[0]
    vals = np.where(sc.values() < 0, 0, vals)
    return GridFunction((sc,), vals, True, True, {"invariant": "static_betti0"})


def static_rank(metric, k: int, scale, max_dim: int = DEFAULT_MAX_DIM) -> GridFunction:
    """Rank of ``H_k(R_delta) -> H_k(R_delta')`` on a square scale grid.

    Both axes start one step below ``scale.origin`` so that a grid whose origin
    is 0 carries one row of negative scales; clamping beyond it is then exact.
    The first axis is decreasing. Cells with delta > delta' hold ``INF``.
    """
    d = np.asarray(metric, dtype=np.float64)
    sc = _scale_axis(scale)
    base = Axis("delta", sc.origin - sc.step, sc.step, sc.count + 1, True, "scale")
    top = Axis("delta_prime", base.origin, base.step, base.count, False, "scale")
    deltas = base.values()
    s = len(deltas)
    vals = np.zeros((s, s), dtype=np.int64)
    complexes: dict[int, SimplicialComplexSlice] = {}

    def cx(i: int) -> SimplicialComplexSlice:
        if i not in complexes:
            complexes[i] = rips_slice(d, deltas[i], max(max_dim, k))
        return complexes[i]

    b0 = _components_from_weights(mst_weights(d[None]), deltas, d.shape[0])[0]
    for i in range(s):
        for j in range(s):
            if i > j:
                vals[i, j] = INF
            elif deltas[i] < 0:
                vals[i, j] = 0
            elif k == 0:
                vals[i, j] = b0[j]
            else:
                vals[i, j] = rank_of_inclusion(cx(i), cx(j), k)
    return GridFunction((base, top), vals, True, True, {"invariant": f"static_rank_{k}"})


# ---------------------------------------------------------------------------
# rank invariant on six parameters

ADMISSIBLE = "admissible"
TRIVIALLY_NON_ADMISSIBLE = "trivially_non_admissible"
OTHER_NON_ADMISSIBLE = "other_non_admissible"


def classify_r6(a: Sequence[float]) -> str:
    """Classify a = (t1, t2, delta, t1', t2', delta') of the product poset.

    The trivial class uses a closed form: some admissible b <= a exists iff
    t1' <= t1, t2 <= t2', t1' <= t2' and max(delta, 0) <= delta'.
    """
    a1, a2, a3, a4, a5, a6 = a
    if a1 <= a2 and a3 >= 0 and a4 <= a1 and a2 <= a5 and a3 <= a6:
        return ADMISSIBLE
    if a4 <= a1 and a2 <= a5 and a4 <= a5 and max(a3, 0) <= a6:
        return OTHER_NON_ADMISSIBLE
    return TRIVIALLY_NON_ADMISSIBLE


def shift_r6(a: Sequence[int], k: int) -> tuple[int, ...]:
    """Raw coordinates of a + k after moving k cells up every normalized axis."""
    a1, a2, a3, a4, a5, a6 = a
    return (a1 + k, a2 - k, a3 - k, a4 - k, a5 + k, a6 + k)


class RankInvariantGrid:
    """Lazily evaluated rank invariant on integer grid coordinates.

    Coordinates are cell indices (t1, t2, m, t1', t2', m'). Admissibility is
    decided on the raw indices. To evaluate, time indices are clipped to the
    sampled range and the super-scale is clipped to the top of the scale axis.
    Evaluation therefore works at any integer point, not only inside the box.
    """

    def __init__(
        self,
        dms: SampledDMS,
        k: int,
        scale=None,
        unit_ratio: float = 2.0,
        max_dim: int = DEFAULT_MAX_DIM,
    ) -> None:
        sc = default_scale_axis([dms], unit_ratio) if scale is None else _scale_axis(scale)
        _check_ratio(dms, sc, unit_ratio)
        if sc.origin != 0:
            raise ConfigError("rank invariant grids need a scale axis starting at 0")
        if k < 0:
            raise ConfigError("homology dimension must be nonnegative")
        self.dms = dms
        self.k = k
        self.max_dim = max(max_dim, k)
        self.unit_ratio = unit_ratio
        self.scale = sc
        self.deltas = sc.values()
        self.axes = (
            _time_axis(dms, "t1", False),
            _time_axis(dms, "t2", True),
            _scale_axis(sc, "delta", True),
            _time_axis(dms, "t1_prime", True),
            _time_axis(dms, "t2_prime", False),
            _scale_axis(sc, "delta_prime", False),
        )
        self._imin = IntervalMinIndex(dms)
        self._iu = np.triu_indices(dms.n, 1)
        self._ids: dict[bytes, int] = {}
        self._masks: list[np.ndarray] = []
        self._cx: dict[int, SimplicialComplexSlice] = {}
        self._rank: dict[tuple[int, int], int] = {}
        self._cell_ids: np.ndarray | None = None
        self._b0: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.count for a in self.axes)

    @property
    def shift_step(self) -> float:
        return self.scale.step

    @property
    def meta(self) -> dict[str, Any]:
        # super-scales past the axis read the top cell; exact only once the axis
        # reaches every distance
        return {
            "invariant": f"rank_{self.k}",
            "unit_ratio": self.unit_ratio,
            "stabilized": bool(self.deltas[-1] >= self.dms.max_distance()),
            "scale_clipped_at_top": True,
        }

    def same_axes(self, other: "RankInvariantGrid") -> bool:
        return (
            self.k == other.k
            and self.dms.grid.aligned_with(other.dms.grid)
            and self.scale.count == other.scale.count
            and _close(self.scale.step, other.scale.step)
        )

    # -- complexes -----------------------------------------------------------

    def _intern(self, mask: np.ndarray) -> int:
        key = np.packbits(mask).tobytes()
        cid = self._ids.get(key)
        if cid is None:
            cid = len(self._masks)
            self._ids[key] = cid
            self._masks.append(mask.copy())
        return cid

    def _clip_t(self, i: int) -> int:
        return min(max(i, 0), self.dms.count - 1)

    def cell_id(self, i1: int, i2: int, m: int) -> int:
        """Id of the Rips complex at the clipped cell (interval [i1, i2], scale m)."""
        a, b = self._clip_t(i1), self._clip_t(i2)
        m = min(m, self.scale.count - 1)
        mat = self._imin.matrix(a, b)
        return self._intern(mat[self._iu] <= self.deltas[m])

    def cell_ids(self) -> np.ndarray:
        """Complex ids for every stored cell ``(t1, t2, m)``; -1 where t1 > t2."""
        if self._cell_ids is not None:
            return self._cell_ids
        t, s = self.dms.count, self.scale.count
        ids = np.full((t, t, s), -1, dtype=np.int64)
        iu = self._iu
        if len(iu[0]) == 0:
            # a single point: every cell holds the same complex
            ids[np.triu_indices(t)] = self._intern(np.zeros(0, dtype=bool))
            ids.setflags(write=False)
            self._cell_ids = ids
            return ids
        for k1 in range(t):
            cm = np.minimum.accumulate(self.dms.dist[k1:], axis=0)[:, iu[0], iu[1]]
            masks = cm[:, None, :] <= self.deltas[None, :, None]
            flat = masks.reshape(-1, masks.shape[-1])
            _, first, inv = np.unique(
                np.packbits(flat, axis=1), axis=0, return_index=True, return_inverse=True
            )
            local = np.array([self._intern(flat[f]) for f in first], dtype=np.int64)
            ids[k1, k1:, :] = local[inv.ravel()].reshape(t - k1, s)
        ids.setflags(write=False)
        self._cell_ids = ids
        return ids

    def betti0_cells(self) -> np.ndarray:
        """Betti-0 at every stored cell ``(t1, t2, m)``; INF where t1 > t2."""
        if self._b0 is None:
            self._b0 = betti0_grid(self.dms, self.scale, self.unit_ratio).values
        return self._b0

    def complex_of(self, cid: int) -> SimplicialComplexSlice:
        cx = self._cx.get(cid)
        if cx is None:
            mat = _mask_matrix(self._masks[cid], self.dms.n, self._iu)
            cx = rips_slice(mat, 0.5, self.max_dim)
            self._cx[cid] = cx
        return cx

    def rank_by_ids(self, sub: int, sup: int) -> int:
        key = (sub, sup)
        r = self._rank.get(key)
        if r is None:
            if self.k == 0:
                r = len(connected_components(_mask_matrix(self._masks[sup], self.dms.n, self._iu), 0.5))
            else:
                r = rank_of_inclusion(self.complex_of(sub), self.complex_of(sup), self.k)
            self._rank[key] = r
        return r

    # -- evaluation ------------------------------------------------------------

    def value(self, a: Sequence[int]) -> int:
        a = tuple(int(x) for x in a)
        cls = classify_r6(a)
        if cls == TRIVIALLY_NON_ADMISSIBLE:
            return INF
        if cls == OTHER_NON_ADMISSIBLE:
            return 0
        a1, a2, a3, a4, a5, a6 = a
        return self.rank_by_ids(self.cell_id(a1, a2, a3), self.cell_id(a4, a5, a6))

    def to_dense(self, max_cells: int = 2_000_000) -> GridFunction:
        """Evaluate the whole box. Only meant for tiny grids."""
        shape = self.shape
        if math.prod(shape) > max_cells:
            raise ConfigError(f"dense rank grid with {math.prod(shape)} cells exceeds {max_cells}")
        vals = np.empty(shape, dtype=np.int64)
        for a in np.ndindex(*shape):
            vals[a] = self.value(a)
        return GridFunction(self.axes, vals, False, True, self.meta)


def _mask_matrix(mask: np.ndarray, n: int, iu) -> np.ndarray:
    mat = np.ones((n, n))
    np.fill_diagonal(mat, 0.0)
    mat[iu[0][mask], iu[1][mask]] = 0.0
    mat[iu[1][mask], iu[0][mask]] = 0.0
    return mat


def rank_invariant_grid(
    dms: SampledDMS,
    k: int,
    scale=None,
    unit_ratio: float = 2.0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RankInvariantGrid:
    return RankInvariantGrid(dms, k, scale, unit_ratio, max_dim)
