"""The modularity matrix B = A - b d d^T as a matrix-free operator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import DegreeData, EmptyGraphError, Graph, degree_data

DENSE_CAP = 512


class ModularityOperator:
    """x -> A x - b (d . x) d in O(m2 + n), never forming B."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self.deg = degree_data(graph)
        self._A = graph.adjacency
        self._d = self.deg.d.astype(np.float64)

    @property
    def n(self) -> int:
        return self.graph.n

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"vector has shape {x.shape}, operator acts on length {self.n}")
        return self._A @ x - (self.deg.b * (self._d @ x)) * self._d

    __call__ = apply


def apply(op: ModularityOperator, x: np.ndarray) -> np.ndarray:
    return op.apply(x)


def dense_modularity(g: Graph, cap: int = DENSE_CAP) -> np.ndarray:
    """Entrywise A - b d d^T; a test oracle for small graphs only."""
    if g.n > cap:
        raise ValueError(f"n={g.n} exceeds the dense cap {cap}")
    deg = degree_data(g)
    d = deg.d.astype(np.float64)
    return g.adjacency.toarray() - deg.b * np.outer(d, d)


@dataclass(frozen=True)
class CommunityView:
    """A node subset S with its induced-subgraph degrees and b_S."""

    nodes: np.ndarray
    d_within: np.ndarray
    b: float


def _induced(g: Graph, nodes: np.ndarray) -> sp.csr_matrix:
    return g.adjacency[nodes][:, nodes]


def community_view(g: Graph, nodes) -> CommunityView:
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    if nodes.size and (nodes[0] < 0 or nodes[-1] >= g.n):
        raise ValueError("node subset out of range")
    d = np.asarray(_induced(g, nodes).sum(axis=1)).ravel().astype(np.int64)
    total = int(d.sum())
    if total == 0:
        raise EmptyGraphError("induced subgraph has no edges")
    return CommunityView(nodes=nodes, d_within=d, b=1.0 / total)


def restricted_quadform(g: Graph, view: CommunityView, x: np.ndarray) -> float:
    """x^T (A_S - b_S d_S d_S^T) x over the induced subgraph on S."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != view.nodes.shape:
        raise ValueError("vector length does not match the community size")
    dx = float(view.d_within @ x)
    return float(x @ (_induced(g, view.nodes) @ x)) - view.b * dx * dx
