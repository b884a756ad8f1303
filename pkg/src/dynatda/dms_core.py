"""Sampled dynamic metric spaces, interval-minimum queries and discretization."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.ndimage import minimum_filter1d

__all__ = [
    "DMSError",
    "TimeGrid",
    "SampledDMS",
    "IntervalMinIndex",
    "load_dms",
    "load_trajectory_csv",
    "load_tensor_json",
    "save_tensor_json",
    "interval_min",
    "discretize",
    "estimate_lipschitz",
    "make_example",
]


class DMSError(ValueError):
    """Raised for malformed dynamic metric space input."""


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    step: float
    count: int

    def __post_init__(self) -> None:
        if not (self.step > 0 and math.isfinite(self.step)):
            raise DMSError(f"time step must be positive, got {self.step}")
        if self.count < 1:
            raise DMSError(f"time grid needs at least one sample, got {self.count}")

    @classmethod
    def spanning(cls, t0: float, t1: float, count: int) -> "TimeGrid":
        """Grid with ``count`` samples from ``t0`` to ``t1`` inclusive."""
        if count < 2:
            raise DMSError("a spanning grid needs at least two samples")
        return cls(float(t0), (float(t1) - float(t0)) / (count - 1), int(count))

    def times(self) -> np.ndarray:
        return self.t0 + self.step * np.arange(self.count)

    def index_of(self, t: float) -> int:
        """Nearest sample index to time ``t`` (raises if off the grid range)."""
        k = int(round((t - self.t0) / self.step))
        if not 0 <= k < self.count:
            raise IndexError(f"time {t} lies outside the grid")
        return k

    def aligned_with(self, other: "TimeGrid") -> bool:
        tol = 1e-9 * self.step
        return (
            self.count == other.count
            and abs(self.step - other.step) <= tol
            and abs(self.t0 - other.t0) <= tol
        )


@dataclass(frozen=True, eq=False)
class SampledDMS:
    """A finite point set with one symmetric distance matrix per time sample.

    ``dist`` has shape ``(count, n, n)``. Instances are treated as immutable;
    the array is marked read-only on construction.
    """

    points: tuple[str, ...]
    grid: TimeGrid
    dist: np.ndarray
    lipschitz_hint: float | None = None
    triangle_violations: tuple[int, ...] = field(default=(), compare=False)
    metric_warning: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        d = np.ascontiguousarray(self.dist, dtype=np.float64)
        n = len(self.points)
        if n < 1:
            raise DMSError("a DMS needs at least one point")
        if d.shape != (self.grid.count, n, n):
            raise DMSError(
                f"distance tensor has shape {d.shape}, expected {(self.grid.count, n, n)}"
            )
        if not np.all(np.isfinite(d)):
            raise DMSError("distance tensor contains non-finite entries")
        if np.any(d < 0):
            k, i, j = np.argwhere(d < 0)[0]
            raise DMSError(
                f"negative distance at time index {k} between {self.points[i]!r} and {self.points[j]!r}"
            )
        if not np.array_equal(d, d.transpose(0, 2, 1)):
            raise DMSError("distance slices must be symmetric")
        if np.any(np.diagonal(d, axis1=1, axis2=2) != 0):
            raise DMSError("distance slices must have zero diagonal")
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "points", tuple(str(p) for p in self.points))
        object.__setattr__(self, "triangle_violations", _triangle_violations(d))
        object.__setattr__(self, "metric_warning", not _has_metric_slice(d))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def count(self) -> int:
        return self.grid.count

    def max_distance(self) -> float:
        return float(self.dist.max()) if self.dist.size else 0.0

    def slice_at(self, k: int) -> np.ndarray:
        return self.dist[k]

    def window(self, k1: int, k2: int) -> "SampledDMS":
        """Restriction to the samples ``k1..k2`` inclusive."""
        if not 0 <= k1 <= k2 < self.count:
            raise IndexError(f"window [{k1}, {k2}] outside 0..{self.count - 1}")
        grid = TimeGrid(self.grid.t0 + k1 * self.grid.step, self.grid.step, k2 - k1 + 1)
        return SampledDMS(self.points, grid, self.dist[k1 : k2 + 1], self.lipschitz_hint)


def _triangle_violations(d: np.ndarray, tol: float = 1e-12) -> tuple[int, ...]:
    n = d.shape[1]
    if n < 3:
        return ()
    bad = []
    for k in range(d.shape[0]):
        s = d[k]
        # min over z of s[x, z] + s[z, y]
        via = np.min(s[:, :, None] + s[None, :, :], axis=1)
        if np.any(s > via + tol * max(1.0, float(s.max()))):
            bad.append(k)
    return tuple(bad)


def _has_metric_slice(d: np.ndarray) -> bool:
    n = d.shape[1]
    if n == 1:
        return True
    off = ~np.eye(n, dtype=bool)
    return bool(np.any(np.all(d[:, off] > 0, axis=1)))


# ---------------------------------------------------------------------------
# loading

_AMBIENT = {
    "euclidean": lambda diff: np.sqrt(np.sum(diff * diff, axis=-1)),
    "manhattan": lambda diff: np.sum(np.abs(diff), axis=-1),
    "chebyshev": lambda diff: np.max(np.abs(diff), axis=-1),
}


def _pairwise(positions: np.ndarray, ambient: str) -> np.ndarray:
    """positions: (count, n, dim) -> (count, n, n)."""
    try:
        norm = _AMBIENT[ambient]
    except KeyError:
        raise DMSError(f"unknown ambient metric {ambient!r}; choose from {sorted(_AMBIENT)}") from None
    d = norm(positions[:, :, None, :] - positions[:, None, :, :])
    d = 0.5 * (d + d.transpose(0, 2, 1))
    idx = np.arange(positions.shape[1])
    d[:, idx, idx] = 0.0
    return d


def trajectories_to_dms(
    points: Sequence[str],
    grid: TimeGrid,
    positions: np.ndarray,
    ambient: str = "euclidean",
    lipschitz_hint: float | None = None,
) -> SampledDMS:
    pos = np.asarray(positions, dtype=np.float64)
    if pos.ndim == 2:
        pos = pos[:, :, None]
    return SampledDMS(tuple(points), grid, _pairwise(pos, ambient), lipschitz_hint)


def load_trajectory_csv(path: str | Path, ambient: str = "euclidean") -> SampledDMS:
    """Read a ``id,t,x1[,x2[,x3]]`` table. Rows may be in any order."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        coords = header[2:]
        if header[:2] != ["id", "t"] or not 1 <= len(coords) <= 3 or any(
            c != f"x{i + 1}" for i, c in enumerate(coords)
        ):
            raise DMSError(f"{path}: header must be id,t,x1[,x2[,x3]], got {','.join(header)}")
        rows: list[tuple[str, float, tuple[float, ...]]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DMSError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                rows.append((row[0].strip(), float(row[1]), tuple(float(c) for c in row[2:])))
            except ValueError as exc:
                raise DMSError(f"{path}:{lineno}: {exc}") from None
    return _rows_to_dms(rows, len(coords), ambient, str(path))


def _rows_to_dms(rows, dim: int, ambient: str, where: str) -> SampledDMS:
    if not rows:
        raise DMSError(f"{where}: no trajectory rows")
    ids = sorted({r[0] for r in rows})
    times = np.array(sorted({r[1] for r in rows}))
    if len(times) == 1:
        grid = TimeGrid(float(times[0]), 1.0, 1)
    else:
        gaps = np.diff(times)
        step = float(gaps.min())
        k = np.rint((times - times[0]) / step)
        if np.any(np.abs(times - times[0] - k * step) > 1e-9 * step + 1e-12 * abs(times).max()) or not np.array_equal(k, np.arange(len(times))):
            raise DMSError(f"{where}: sample times do not form a uniform grid")
        grid = TimeGrid(float(times[0]), (float(times[-1]) - float(times[0])) / (len(times) - 1), len(times))
    pos = np.full((grid.count, len(ids), dim), np.nan)
    col = {p: i for i, p in enumerate(ids)}
    for pid, t, x in rows:
        k = int(round((t - grid.t0) / grid.step))
        if not np.all(np.isnan(pos[k, col[pid]])):
            raise DMSError(f"{where}: duplicate row for id {pid!r} at t={t}")
        pos[k, col[pid]] = x
    missing = np.argwhere(np.isnan(pos[:, :, 0]))
    if missing.size:
        k, i = missing[0]
        raise DMSError(f"{where}: ragged trajectories: id {ids[i]!r} missing at t={grid.t0 + k * grid.step:g}")
    return trajectories_to_dms(ids, grid, pos, ambient)


def load_tensor_json(path: str | Path) -> SampledDMS:
    with open(path) as fh:
        obj = json.load(fh)
    return tensor_from_dict(obj, str(path))


def tensor_from_dict(obj: Mapping, where: str = "<tensor>") -> SampledDMS:
    try:
        slices = np.asarray(obj["slices"], dtype=np.float64)
        points = [str(p) for p in obj["points"]]
        grid = TimeGrid(float(obj.get("t0", 0.0)), float(obj.get("step", 1.0)), len(slices))
    except (KeyError, TypeError, ValueError) as exc:
        raise DMSError(f"{where}: malformed distance tensor ({exc})") from None
    if slices.ndim != 3:
        raise DMSError(f"{where}: slices must be a 3-D array")
    hint = obj.get("lipschitz_hint")
    return SampledDMS(tuple(points), grid, slices, None if hint is None else float(hint))


def tensor_to_dict(dms: SampledDMS) -> dict:
    out = {
        "points": list(dms.points),
        "t0": dms.grid.t0,
        "step": dms.grid.step,
        "slices": dms.dist.tolist(),
    }
    if dms.lipschitz_hint is not None:
        out["lipschitz_hint"] = dms.lipschitz_hint
    return out


def save_tensor_json(dms: SampledDMS, path: str | Path) -> None:
    # json writes floats with repr, so the round trip is bit-exact
    Path(path).write_text(json.dumps(tensor_to_dict(dms)) + "\n")


def load_dms(source, ambient: str = "euclidean") -> SampledDMS:
    """Load from a path (``.csv`` trajectories or ``.json`` tensor), a dict, or a DMS."""
    if isinstance(source, SampledDMS):
        return source
    if isinstance(source, Mapping):
        return tensor_from_dict(source)
    path = Path(source)
    if not path.exists():
        raise DMSError(f"input file not found: {path}")
    if path.suffix.lower() == ".csv":
        return load_trajectory_csv(path, ambient)
    return load_tensor_json(path)


# ---------------------------------------------------------------------------
# interval minima


class IntervalMinIndex:
    """Sparse-table range minima over the time axis, for all pairs at once.

    ``table[j][k]`` holds the minimum over samples ``k .. k + 2**j - 1``. When
    the table would exceed ``memory_cap`` bytes, queries fall back to a direct
    scan of the stored slices.
    """

    def __init__(self, dms: SampledDMS, memory_cap: int = 1 << 30) -> None:
        self.dms = dms
        d = dms.dist
        levels = max(1, dms.count.bit_length())
        if d.nbytes * levels > memory_cap:
            self._table = None
            return
        table = [d]
        span = 1
        while 2 * span <= dms.count:
            prev = table[-1]
            table.append(np.minimum(prev[:-span], prev[span:]))
            span *= 2
        for t in table:
            t.setflags(write=False)
        self._table = table

    @property
    def uses_table(self) -> bool:
        return self._table is not None

    def _check(self, k1: int, k2: int) -> None:
        if not 0 <= k1 <= k2 < self.dms.count:
            raise IndexError(f"window [{k1}, {k2}] outside 0..{self.dms.count - 1}")

    def matrix(self, k1: int, k2: int) -> np.ndarray:
        """The n x n matrix of pairwise minima over samples ``k1..k2``."""
        self._check(k1, k2)
        if self._table is None:
            return self.dms.dist[k1 : k2 + 1].min(axis=0)
        j = (k2 - k1 + 1).bit_length() - 1
        t = self._table[j]
        return np.minimum(t[k1], t[k2 - (1 << j) + 1])

    def query(self, i: int, j: int, k1: int, k2: int) -> float:
        self._check(k1, k2)
        if self._table is None:
            return float(self.dms.dist[k1 : k2 + 1, i, j].min())
        lv = (k2 - k1 + 1).bit_length() - 1
        t = self._table[lv]
        return float(min(t[k1, i, j], t[k2 - (1 << lv) + 1, i, j]))

    def sliding_min(self, radius: int) -> np.ndarray:
        """Minima over the windows ``[k - radius, k + radius]`` clipped to the grid."""
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        if radius == 0:
            return self.dms.dist
        # 'nearest' padding repeats edge samples, which are already in the window
        return minimum_filter1d(self.dms.dist, size=2 * radius + 1, axis=0, mode="nearest")


def interval_min(dms: SampledDMS, pair: tuple[int, int], window: tuple[int, int]) -> float:
    k1, k2 = window
    if not 0 <= k1 <= k2 < dms.count:
        raise IndexError(f"window [{k1}, {k2}] outside 0..{dms.count - 1}")
    i, j = pair
    return float(dms.dist[k1 : k2 + 1, i, j].min())


# ---------------------------------------------------------------------------
# discretization and Lipschitz estimate


def discretize(dms: SampledDMS, coarsen: int, keep_grid: bool = False) -> SampledDMS:
    """Left-endpoint coarsening by a factor ``coarsen``.

    With ``keep_grid`` the result stays on the original grid and holds each
    coarse value until the next coarse sample (a step function in time), which
    is what a comparison against the original DMS needs.
    """
    m = int(coarsen)
    if m < 1 or m != coarsen:
        raise DMSError(f"coarsening factor must be a positive integer, got {coarsen}")
    if keep_grid:
        idx = (np.arange(dms.count) // m) * m
        return SampledDMS(dms.points, dms.grid, dms.dist[idx], dms.lipschitz_hint)
    coarse = dms.dist[::m]
    grid = TimeGrid(dms.grid.t0, dms.grid.step * m, coarse.shape[0])
    return SampledDMS(dms.points, grid, coarse, dms.lipschitz_hint)


def estimate_lipschitz(dms: SampledDMS) -> float:
    if dms.count < 2:
        raise DMSError("Lipschitz estimate needs at least two samples")
    return float(np.max(np.abs(np.diff(dms.dist, axis=0))) / dms.grid.step)


# ---------------------------------------------------------------------------
# built-in examples


def _as_metric(metric) -> np.ndarray:
    m = np.asarray(metric, dtype=np.float64)
    if m.ndim == 0:
        m = np.array([[0.0, float(m)], [float(m), 0.0]])
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DMSError("metric must be a square matrix")
    n = m.shape[0]
    off = ~np.eye(n, dtype=bool)
    if (
        not np.array_equal(m, m.T)
        or np.any(np.diag(m) != 0)
        or np.any(m[off] <= 0)
        or np.any(m > np.min(m[:, :, None] + m[None, :, :], axis=1) + 1e-12)
    ):
        raise DMSError("constant DMS requires a genuine metric")
    return m


def constant_dms(metric, grid: TimeGrid, points: Iterable[str] | None = None) -> SampledDMS:
    m = _as_metric(metric)
    names = tuple(points) if points is not None else tuple(f"x{i + 1}" for i in range(m.shape[0]))
    return SampledDMS(names, grid, np.broadcast_to(m, (grid.count,) + m.shape).copy(), 0.0)


def figure1_positions(family: str, r: float, times: np.ndarray) -> np.ndarray:
    if r <= 0:
        raise DMSError("r must be positive")
    mid = r * np.sin(times)
    if family == "figure1_Y":
        mid = np.abs(mid)
    elif family != "figure1_X":
        raise DMSError(f"unknown figure-1 family {family!r}")
    pos = np.empty((len(times), 3))
    pos[:, 0] = -r
    pos[:, 1] = mid
    pos[:, 2] = r
    return pos


def make_example(family: str, grid: TimeGrid, r: float = 1.0, metric=None) -> SampledDMS:
    """Built-in DMSs: ``constant`` (needs ``metric``), ``figure1_X``, ``figure1_Y``."""
    if family == "constant":
        if metric is None:
            raise DMSError("constant family needs a metric")
        return constant_dms(metric, grid)
    pos = figure1_positions(family, r, grid.times())
    return trajectories_to_dms(("x1", "x2", "x3"), grid, pos, lipschitz_hint=float(r))
