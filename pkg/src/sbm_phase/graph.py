"""Immutable undirected simple graphs in compressed sparse row form."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.sparse as sp

# n*n must fit in int64 when pairs are encoded as i*n + j.
MAX_NODES = 3_037_000_499


class EmptyGraphError(ValueError):
    """Raised when an operation needs at least one edge."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph.

    ``indices[indptr[i]:indptr[i+1]]`` is the sorted neighbor list of node
    ``i``. Both orientations of every edge are stored, so ``m2`` (the sum
    of all adjacency entries) is twice the edge count.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def m2(self) -> int:
        return int(self.indices.shape[0])

    @property
    def num_edges(self) -> int:
        return self.m2 // 2

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.diff(self.indptr)
        d.flags.writeable = False
        return d

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Float64 CSR adjacency; row order of ``indices`` is kept, so sparse
        products accumulate in sorted-neighbor order."""
        data = np.ones(self.m2, dtype=np.float64)
        A = sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))
        A.has_sorted_indices = True
        return A

    def edges(self) -> np.ndarray:
        """Edge array of shape (num_edges, 2) with ``i < j``, sorted."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges})"


@dataclass(frozen=True)
class DegreeData:
    d: np.ndarray
    b: float


def build_graph(n: int, edges: Iterable[tuple[int, int]] | np.ndarray) -> Graph:
    """Build a simple graph on nodes ``0..n-1``.

    Duplicate pairs and both orientations collapse to one undirected edge;
    self-loops are dropped.
    """
    n = int(n)
    if n < 1:
        raise ValueError("graph needs at least one node")
    if n > MAX_NODES:
        raise ValueError(f"n={n} exceeds the supported maximum {MAX_NODES}")
    arr = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        bad = arr[(arr < 0).any(axis=1) | (arr >= n).any(axis=1)][0]
        raise ValueError(f"edge ({bad[0]}, {bad[1]}) has an endpoint outside [0, {n})")

    u = np.minimum(arr[:, 0], arr[:, 1])
    v = np.maximum(arr[:, 0], arr[:, 1])
    loop_free = u != v
    keys = np.unique(u[loop_free] * n + v[loop_free])
    u, v = keys // n, keys % n

    both = np.sort(np.concatenate([u * n + v, v * n + u]))
    rows, cols = both // n, both % n
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    indices = cols.astype(np.int64)
    indptr.flags.writeable = False
    indices.flags.writeable = False
    return Graph(n, indptr, indices)


def degree_data(g: Graph) -> DegreeData:
    if g.m2 == 0:
        raise EmptyGraphError("empty graph: b = 1/m2 is undefined")
    return DegreeData(d=g.degrees, b=1.0 / g.m2)


def block_mask(labels: np.ndarray | Iterable[int]) -> np.ndarray:
    """Boolean mask of community-1 membership.

    Accepts 1/2-coded labels (the package convention) or 0/1-coded labels;
    the coding is 0/1 whenever a 0 is present.
    """
    lab = np.asarray(labels)
    values = set(np.unique(lab).tolist())
    if 0 in values:
        if not values <= {0, 1}:
            raise ValueError(f"labels must be coded 0/1 or 1/2, got {sorted(values)}")
        return lab == 0
    if not values <= {1, 2}:
        raise ValueError(f"labels must be coded 0/1 or 1/2, got {sorted(values)}")
    return lab == 1


def cut_counts(g: Graph, labels) -> tuple[int, int, int]:
    """(within-block-1, within-block-2, cross) edge counts, each edge once."""
    lab = np.asarray(labels)
    if lab.shape != (g.n,):
        raise ValueError(f"labels has length {lab.size}, graph has {g.n} nodes")
    first = block_mask(lab)
    e = g.edges()
    a, b = first[e[:, 0]], first[e[:, 1]]
    m1 = int(np.count_nonzero(a & b))
    m2 = int(np.count_nonzero(~a & ~b))
    return m1, m2, int(e.shape[0]) - m1 - m2
