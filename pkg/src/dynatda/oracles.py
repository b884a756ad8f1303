"""Brute-force reference distances over correspondences, for tiny inputs only.

Every relation R between X and Y that covers both sides is enumerated. For a
fixed quadruple ((x, y), (x', y')) the distortion condition is monotone in the
slack, so each quadruple has a least feasible value. The distance of R is the
largest such value over its pairs, and the distance itself is the smallest
over all R.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .dms_core import IntervalMinIndex, SampledDMS

__all__ = [
    "MAX_POINTS",
    "SizeCapError",
    "Correspondence",
    "OracleResult",
    "surjective_relations",
    "dyn_distortion",
    "distortion_violation",
    "ddyn_bruteforce",
    "ddyn_multiplicative",
    "dyn_gh",
    "weak_lp_gh",
    "gh_bruteforce",
    "gh_with_correspondence",
]

MAX_POINTS = 4


class SizeCapError(ValueError):
    """Input too large for exhaustive enumeration."""


@dataclass(frozen=True)
class Correspondence:
    pairs: tuple[tuple[int, int], ...]
    nx: int
    ny: int

    def __post_init__(self) -> None:
        xs = {p[0] for p in self.pairs}
        ys = {p[1] for p in self.pairs}
        if xs != set(range(self.nx)) or ys != set(range(self.ny)):
            raise ValueError("a correspondence must cover both point sets")

    @classmethod
    def identity(cls, n: int) -> "Correspondence":
        return cls(tuple((i, i) for i in range(n)), n, n)

    @classmethod
    def from_mask(cls, mask: np.ndarray, nx: int, ny: int) -> "Correspondence":
        m = np.asarray(mask, dtype=bool).reshape(nx, ny)
        return cls(tuple((int(i), int(j)) for i, j in np.argwhere(m)), nx, ny)


@dataclass(frozen=True)
class OracleResult:
    value: float
    correspondence: Correspondence


def _cap(nx: int, ny: int) -> None:
    if nx > MAX_POINTS or ny > MAX_POINTS:
        raise SizeCapError(
            f"exhaustive search is capped at {MAX_POINTS} points per side (got {nx} and {ny}); "
            "use the invariant lower bounds for larger inputs"
        )


@lru_cache(maxsize=None)
def surjective_relations(nx: int, ny: int) -> np.ndarray:
    """Boolean masks of shape (M, nx*ny) for every relation covering both sides."""
    _cap(nx, ny)
    n = nx * ny
    codes = np.arange(1 << n, dtype=np.int64)
    masks = ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
    grid = masks.reshape(-1, nx, ny)
    keep = grid.any(axis=2).all(axis=1) & grid.any(axis=1).all(axis=1)
    out = masks[keep]
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# per-quadruple feasibility thresholds


def _need(wa: np.ndarray, wb: np.ndarray, da: np.ndarray, db: np.ndarray) -> np.ndarray:
    """max over t of the two one-sided excesses, indexed [x, y, x', y']."""
    one = wa[:, :, None, :, None] - db[:, None, :, None, :]
    two = wb[:, None, :, None, :] - da[:, :, None, :, None]
    return np.maximum(one, two).max(axis=0)


def _thresholds(A: SampledDMS, B: SampledDMS, width: float, slack: float) -> np.ndarray:
    """Least feasible slack per quadruple.

    The window radius in samples is floor(eps / width) and the condition reads
    min over the window of d_A <= d_B + slack * eps (and symmetrically). On
    eps in [j*width, (j+1)*width) the radius is j, so the least feasible eps
    there is max(j*width, need_j / slack) if that is below (j+1)*width.
    """
    if not A.grid.aligned_with(B.grid):
        raise ValueError("DMSs must share one time grid")
    da, db = A.dist, B.dist
    ia, ib = IntervalMinIndex(A), IntervalMinIndex(B)
    shape = (A.n, B.n, A.n, B.n)
    out = np.full(shape, np.nan)
    pending = np.ones(shape, dtype=bool)
    last = A.count - 1
    j = 0
    while True:
        need = _need(ia.sliding_min(j), ib.sliding_min(j), da, db)
        if math.isinf(width):
            return need / slack
        cand = np.maximum(j * width, need / slack)
        # once the window covers the whole grid nothing changes for larger j
        accept = pending & ((cand < (j + 1) * width) | (j >= last))
        out[accept] = cand[accept]
        pending &= ~accept
        if not pending.any():
            return out
        j += 1


def _minmax(E: np.ndarray, nx: int, ny: int, threads: int | None = None) -> OracleResult:
    n = nx * ny
    e2 = E.reshape(n, n)
    masks = surjective_relations(nx, ny)
    chunk = 4096

    def best(lo: int) -> tuple[float, int]:
        m = masks[lo : lo + chunk]
        both = m[:, :, None] & m[:, None, :]
        vals = np.where(both, e2[None], -np.inf).max(axis=(1, 2))
        i = int(np.argmin(vals))
        return float(vals[i]), lo + i

    starts = range(0, len(masks), chunk)
    with ThreadPoolExecutor(max(1, threads or 1)) as pool:
        results = list(pool.map(best, starts))
    # ties resolved by the first relation in enumeration order
    value, idx = min(results, key=lambda r: (r[0], r[1]))
    return OracleResult(max(value, 0.0), Correspondence.from_mask(masks[idx], nx, ny))


# ---------------------------------------------------------------------------
# public oracles


def _window_radius(eps: float, alpha: float) -> int:
    return int(math.floor(eps / alpha + 1e-9))


def distortion_violation(
    A: SampledDMS, B: SampledDMS, R: Correspondence, eps: float
) -> tuple[int, tuple[int, int], tuple[int, int]] | None:
    """First (t, (x, y), (x', y')) breaking the distortion bound, if any."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if not A.grid.aligned_with(B.grid):
        raise ValueError("DMSs must share one time grid")
    j = _window_radius(eps, A.grid.step)
    wa, wb = IntervalMinIndex(A).sliding_min(j), IntervalMinIndex(B).sliding_min(j)
    for t in range(A.count):
        for x, y in R.pairs:
            for x2, y2 in R.pairs:
                if wa[t, x, x2] > B.dist[t, y, y2] + 2 * eps or wb[t, y, y2] > A.dist[t, x, x2] + 2 * eps:
                    return t, (x, y), (x2, y2)
    return None


def dyn_distortion(A: SampledDMS, B: SampledDMS, R: Correspondence, eps: float) -> bool:
    return distortion_violation(A, B, R, eps) is None


def ddyn_bruteforce(A: SampledDMS, B: SampledDMS, threads: int | None = None) -> OracleResult:
    """Sampled slack interleaving distance with its optimal correspondence."""
    _cap(A.n, B.n)
    return _minmax(_thresholds(A, B, A.grid.step, 2.0), A.n, B.n, threads)


def ddyn_multiplicative(A: SampledDMS, B: SampledDMS, lam: float, threads: int | None = None) -> OracleResult:
    """Variant with window radius eps / lam and slack eps."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    _cap(A.n, B.n)
    return _minmax(_thresholds(A, B, lam * A.grid.step, 1.0), A.n, B.n, threads)


def dyn_gh(A: SampledDMS, B: SampledDMS) -> OracleResult:
    """min over R of the sup over samples of the instantaneous distortion."""
    _cap(A.n, B.n)
    return _minmax(_thresholds(A, B, math.inf, 1.0), A.n, B.n)


def gh_with_correspondence(dA, dB) -> OracleResult:
    a = np.asarray(dA, dtype=np.float64)
    b = np.asarray(dB, dtype=np.float64)
    _cap(a.shape[0], b.shape[0])
    dis = np.abs(a[:, None, :, None] - b[None, :, None, :])
    res = _minmax(dis, a.shape[0], b.shape[0])
    return OracleResult(res.value / 2.0, res.correspondence)


def gh_bruteforce(dA, dB) -> float:
    """Gromov-Hausdorff distance: half the least distortion of a correspondence."""
    return gh_with_correspondence(dA, dB).value


def weak_lp_gh(A: SampledDMS, B: SampledDMS, p: float = 1.0, weights: Sequence[float] | None = None) -> float:
    if p < 1:
        raise ValueError("p must be at least 1")
    if A.count != B.count:
        raise ValueError("DMSs must share one time grid")
    w = np.full(A.count, 1.0 / A.count) if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != (A.count,) or np.any(w < 0) or not math.isclose(float(w.sum()), 1.0, rel_tol=1e-9):
        raise ValueError("weights must be a probability vector over the samples")
    per = np.array([gh_bruteforce(A.dist[t], B.dist[t]) for t in range(A.count)])
    if math.isinf(p):
        return float(per[w > 0].max()) if np.any(w > 0) else 0.0
    return float(np.sum(w * per**p) ** (1.0 / p))
