"""Persistence diagrams as plain (birth, death) arrays."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = ["PersistenceDiagram"]


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    """Multiset of (birth, death) pairs; death may be ``inf``."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        if np.any(np.isnan(pts)) or np.any(np.isinf(pts[:, 0])):
            raise ValueError("births must be finite numbers")
        if np.any(pts[:, 0] > pts[:, 1]):
            raise ValueError("every point needs birth <= death")
        # canonical order makes equality and serialization deterministic
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        pts = pts[order]
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "PersistenceDiagram":
        return cls(np.array(list(pairs), dtype=np.float64).reshape(-1, 2))

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PersistenceDiagram) and np.array_equal(self.points, other.points)

    def finite(self) -> np.ndarray:
        return self.points[np.isfinite(self.points[:, 1])]

    def essential(self) -> np.ndarray:
        """Births of the points with infinite death."""
        return self.points[~np.isfinite(self.points[:, 1]), 0]

    def to_list(self) -> list[list[float | str]]:
        return [[float(b), float(d) if np.isfinite(d) else "inf"] for b, d in self.points]
