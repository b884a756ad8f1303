"""Rips complexes on semi-metric slices and F2 homology of inclusions.

Chains are stored as Python ints used as bitsets (bit ``i`` set means the
``i``-th simplex of that dimension is present), so a row operation over F2 is
a single XOR on arbitrarily wide packed words.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

__all__ = [
    "ComplexError",
    "SimplicialComplexSlice",
    "BoundaryMatrix",
    "rips_slice",
    "boundary_matrix",
    "betti",
    "rank_of_inclusion",
    "connected_components",
    "f2_rank",
]

DEFAULT_MAX_DIM = 2


class ComplexError(ValueError):
    pass


def _check_semimetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ComplexError("semi-metric must be a square matrix")
    if not np.array_equal(m, m.T):
        raise ComplexError("semi-metric must be symmetric")
    if np.any(np.diag(m) != 0):
        raise ComplexError("semi-metric must have zero diagonal")
    return m


@dataclass(frozen=True)
class SimplicialComplexSlice:
    """Rips complex of one slice. ``simplices[p]`` lists sorted ``p``-simplices."""

    n: int
    simplices: tuple[tuple[tuple[int, ...], ...], ...]
    delta: float
    max_dim: int

    def index(self, p: int) -> dict[tuple[int, ...], int]:
        cache = self.__dict__.get("_index")
        if cache is None:
            cache = {}
            object.__setattr__(self, "_index", cache)
        if p not in cache:
            cache[p] = {s: i for i, s in enumerate(self.simplices_of(p))}
        return cache[p]

    def simplices_of(self, p: int) -> tuple[tuple[int, ...], ...]:
        if 0 <= p < len(self.simplices):
            return self.simplices[p]
        return ()

    def to_text(self) -> str:
        """One simplex per line, vertices separated by spaces."""
        lines = [" ".join(map(str, s)) for dim in self.simplices for s in dim]
        return "\n".join(lines) + ("\n" if lines else "")


def rips_slice(semimetric, delta: float, max_dim: int = DEFAULT_MAX_DIM) -> SimplicialComplexSlice:
    """Rips complex at scale ``delta`` with simplices up to dimension ``max_dim + 1``."""
    m = _check_semimetric(semimetric)
    if max_dim < 0:
        raise ComplexError("max_dim must be nonnegative")
    n = m.shape[0]
    top = max_dim + 1
    if delta < 0:
        return SimplicialComplexSlice(n, tuple(() for _ in range(top + 1)), float(delta), max_dim)
    adj = m <= delta
    nbr = [0] * n
    for i in range(n):
        for j in np.flatnonzero(adj[i, i + 1 :]) + i + 1:
            nbr[i] |= 1 << int(j)
    levels: list[list[tuple[int, ...]]] = [[(i,) for i in range(n)]]
    # common upper neighbours of each simplex, used to extend it by one vertex
    frontier = [(s, nbr[s[0]]) for s in levels[0]]
    for _ in range(top):
        nxt: list[tuple[tuple[int, ...], int]] = []
        for s, cand in frontier:
            c = cand
            while c:
                low = c & -c
                v = low.bit_length() - 1
                c ^= low
                nxt.append((s + (v,), cand & nbr[v]))
        levels.append([s for s, _ in nxt])
        frontier = nxt
    return SimplicialComplexSlice(n, tuple(tuple(lv) for lv in levels), float(delta), max_dim)


@dataclass(frozen=True)
class BoundaryMatrix:
    """Boundary map from ``dim``-simplices to ``(dim-1)``-simplices over F2.

    ``columns[j]`` is a bitset over the ``rows`` faces.
    """

    dim: int
    rows: int
    columns: tuple[int, ...]

    def dense(self) -> np.ndarray:
        out = np.zeros((self.rows, len(self.columns)), dtype=np.uint8)
        for j, col in enumerate(self.columns):
            c = col
            while c:
                low = c & -c
                out[low.bit_length() - 1, j] = 1
                c ^= low
        return out


def boundary_matrix(c: SimplicialComplexSlice, dim: int) -> BoundaryMatrix:
    if dim <= 0:
        return BoundaryMatrix(dim, 0, tuple(0 for _ in c.simplices_of(dim)))
    faces = c.index(dim - 1)
    cols = []
    for s in c.simplices_of(dim):
        col = 0
        for drop in range(len(s)):
            col |= 1 << faces[s[:drop] + s[drop + 1 :]]
        cols.append(col)
    return BoundaryMatrix(dim, len(faces), tuple(cols))


class _Echelon:
    """Incrementally maintained F2 row-echelon basis keyed by leading bit."""

    __slots__ = ("rows",)

    def __init__(self) -> None:
        self.rows: dict[int, int] = {}

    def reduce(self, v: int) -> int:
        rows = self.rows
        while v:
            p = v.bit_length() - 1
            r = rows.get(p)
            if r is None:
                return v
            v ^= r
        return 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if v:
            self.rows[v.bit_length() - 1] = v
            return True
        return False

    def __len__(self) -> int:
        return len(self.rows)


def f2_rank(vectors) -> int:
    e = _Echelon()
    for v in vectors:
        e.add(int(v))
    return len(e)


def _kernel(columns) -> list[int]:
    """Basis of the kernel of a column list, as bitsets over column indices."""
    rows: dict[int, tuple[int, int]] = {}
    kernel = []
    for j, col in enumerate(columns):
        v, combo = col, 1 << j
        while v:
            p = v.bit_length() - 1
            hit = rows.get(p)
            if hit is None:
                rows[p] = (v, combo)
                break
            v ^= hit[0]
            combo ^= hit[1]
        else:
            kernel.append(combo)
    return kernel


def _check_dim(c: SimplicialComplexSlice, k: int) -> None:
    if k < 0 or k > c.max_dim:
        raise ComplexError(f"homology dimension {k} outside 0..{c.max_dim}")


def betti(c: SimplicialComplexSlice, k: int) -> int:
    _check_dim(c, k)
    nk = len(c.simplices_of(k))
    rk = f2_rank(boundary_matrix(c, k).columns) if k > 0 else 0
    rk1 = f2_rank(boundary_matrix(c, k + 1).columns)
    return nk - rk - rk1


def rank_of_inclusion(sub: SimplicialComplexSlice, sup: SimplicialComplexSlice, k: int) -> int:
    """Rank of H_k(sub) -> H_k(sup) induced by inclusion, over F2.

    Uses dim Z_k(sub) - dim(Z_k(sub) ∩ B_k(sup)) = dim(Z + B) - dim B.
    """
    _check_dim(sub, k)
    _check_dim(sup, k)
    if sub.n != sup.n:
        raise ComplexError("complexes live on different vertex sets")
    for p in range(min(len(sub.simplices), len(sup.simplices))):
        idx = sup.index(p)
        for s in sub.simplices[p]:
            if s not in idx:
                raise ComplexError(f"simplex {s} of the subcomplex is missing from the supercomplex")
    sup_k = sup.index(k)
    sub_k = sub.simplices_of(k)
    translate = [sup_k[s] for s in sub_k]
    z_sub = _kernel(boundary_matrix(sub, k).columns) if k > 0 else [1 << i for i in range(len(sub_k))]
    cycles = []
    for combo in z_sub:
        v = 0
        while combo:
            low = combo & -combo
            v |= 1 << translate[low.bit_length() - 1]
            combo ^= low
        cycles.append(v)
    basis = _Echelon()
    for col in boundary_matrix(sup, k + 1).columns:
        basis.add(col)
    dim_b = len(basis)
    for v in cycles:
        basis.add(v)
    return len(basis) - dim_b


def connected_components(semimetric, delta: float) -> list[list[int]]:
    """Blocks of the threshold graph ``d <= delta``, sorted by least element."""
    m = np.asarray(semimetric, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or not np.array_equal(m, m.T):
        raise ComplexError("semi-metric must be a symmetric square matrix")
    n = m.shape[0]
    if n == 0:
        return []
    _, labels = _cc(csr_matrix(m <= delta), directed=False)
    blocks: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        blocks.setdefault(int(lab), []).append(i)
    return sorted(blocks.values(), key=lambda b: b[0])
