"""Random and hand-made inputs shared by the test modules."""

from __future__ import annotations

import math

import numpy as np

from dynatda import Axis, GridFunction, SampledDMS, TimeGrid
from dynatda.dms_core import trajectories_to_dms


def grid_function(values, decreasing: tuple[int, ...] = ()) -> GridFunction:
    v = np.asarray(values, dtype=np.int64)
    axes = tuple(Axis(f"a{i}", 0.0, 1.0, n, i in decreasing) for i, n in enumerate(v.shape))
    return GridFunction(axes, v)


def lattice_dms(
    rng: np.random.Generator,
    n: int,
    count: int,
    alpha: float = 0.5,
    walk: bool = True,
    top: int = 4,
) -> SampledDMS:
    """Distances that are integer multiples of 2 * alpha (one scale cell)."""
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    if walk:
        steps = rng.integers(-1, 2, size=(count, m))
        steps[0] = 0
        units = np.clip(rng.integers(1, top, size=m) + np.cumsum(steps, axis=0), 0, top)
    else:
        units = rng.integers(0, top, size=(count, m))
    d = np.zeros((count, n, n))
    d[:, iu[0], iu[1]] = units * 2 * alpha
    d[:, iu[1], iu[0]] = units * 2 * alpha
    return SampledDMS(tuple(f"p{i}" for i in range(n)), TimeGrid(0.0, alpha, count), d)


def square_dms(rng: np.random.Generator, count: int, alpha: float = 0.5) -> SampledDMS:
    """Four points whose Rips complexes often carry a 1-cycle."""
    iu = np.triu_indices(4, 1)
    # pairs (01, 02, 03, 12, 13, 23): sides 01, 12, 23, 03 and diagonals 02, 13
    base = np.array([2, 3, 2, 2, 3, 2])
    steps = rng.integers(-1, 2, size=(count, 6))
    steps[0] = 0
    units = np.clip(base + np.cumsum(steps, axis=0), 1, 5)
    d = np.zeros((count, 4, 4))
    d[:, iu[0], iu[1]] = units * 2 * alpha
    d[:, iu[1], iu[0]] = units * 2 * alpha
    return SampledDMS(tuple("abcd"), TimeGrid(0.0, alpha, count), d)


def smooth_dms(rng: np.random.Generator, n: int, count: int, alpha: float) -> SampledDMS:
    """Points on a line moving sinusoidally, hence Lipschitz in time."""
    t = np.arange(count) * alpha
    pos = np.stack(
        [rng.uniform(0.5, 2.0) * np.sin(rng.uniform(0.2, 1.0) * t + rng.uniform(0, 2 * math.pi)) for _ in range(n)],
        axis=1,
    )
    return trajectories_to_dms([f"p{i}" for i in range(n)], TimeGrid(0.0, alpha, count), pos)


def random_metric(rng: np.random.Generator, n: int, dim: int = 2) -> np.ndarray:
    x = rng.normal(size=(n, dim))
    d = np.sqrt(((x[:, None] - x[None]) ** 2).sum(-1))
    return 0.5 * (d + d.T)


def random_semimetric(rng: np.random.Generator, n: int, levels: int = 5) -> np.ndarray:
    d = rng.integers(0, levels, size=(n, n)).astype(float)
    d = np.triu(d, 1)
    return d + d.T


def bfs_components(d: np.ndarray, delta: float) -> list[list[int]]:
    n = d.shape[0]
    seen = [False] * n
    blocks = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        block, queue = [], [s]
        while queue:
            u = queue.pop()
            block.append(u)
            for v in range(n):
                if not seen[v] and d[u, v] <= delta:
                    seen[v] = True
                    queue.append(v)
        blocks.append(sorted(block))
    return sorted(blocks, key=lambda b: b[0])
