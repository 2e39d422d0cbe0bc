"""Two-community stochastic block model sampling.

Every block (A1, A2, C) gets its own Philox4x64 stream keyed by
``derive_seed(params_key, seed, block_id)``, so blocks are independent of
generation order. Within a block, uniforms are consumed row-major over the
pairs (i < j for diagonal blocks, all (i, j) for C) and a pair is an edge
iff its uniform is below the block probability.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import MAX_NODES, Graph, build_graph

# Uniforms drawn per chunk; bounds peak memory on large blocks.
_CHUNK = 1 << 22


def derive_seed(*parts) -> int:
    """Stable 64-bit hash (BLAKE2b) of the ``repr`` of each part."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(repr(part).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


def block_rng(*parts) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(derive_seed(*parts)))


@dataclass(frozen=True)
class SbmParams:
    n1: int
    n2: int
    p1: float
    p2: float
    p: float

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("community sizes must be >= 1")
        if self.n1 + self.n2 > MAX_NODES:
            raise ValueError(f"n1 + n2 exceeds the supported maximum {MAX_NODES}")
        for name in ("p1", "p2", "p"):
            q = getattr(self, name)
            if not 0.0 <= q <= 1.0:
                raise ValueError(f"{name}={q} is not a probability")

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def key(self) -> tuple:
        return (self.n1, self.n2, float(self.p1), float(self.p2), float(self.p))


@dataclass(frozen=True)
class SbmSample:
    params: SbmParams
    graph: Graph
    truth: np.ndarray
    seed: int


def _upper_pairs(rng: np.random.Generator, m: int, q: float) -> np.ndarray:
    """Edges (i, j), i < j, of a G(m, q) block."""
    out = []
    r0 = 0
    while r0 < m - 1:
        # rows r0..r1-1 hold sum(m-1-r) pairs
        r1 = r0 + 1
        total = m - 1 - r0
        while r1 < m - 1 and total + (m - 1 - r1) <= _CHUNK:
            total += m - 1 - r1
            r1 += 1
        rows = np.arange(r0, r1, dtype=np.int64)
        counts = m - 1 - rows
        starts = np.cumsum(counts) - counts
        hit = np.flatnonzero(rng.random(total) < q)
        k = np.searchsorted(starts, hit, side="right") - 1
        i = rows[k]
        out.append(np.column_stack([i, i + 1 + (hit - starts[k])]))
        r0 = r1
    return np.concatenate(out) if out else np.empty((0, 2), dtype=np.int64)


def _rect_pairs(rng: np.random.Generator, m1: int, m2: int, q: float) -> np.ndarray:
    """Entries (i, j) of an m1-by-m2 Bernoulli(q) matrix that equal 1."""
    out = []
    rows_per_chunk = max(1, _CHUNK // m2)
    for r0 in range(0, m1, rows_per_chunk):
        r1 = min(m1, r0 + rows_per_chunk)
        hit = np.flatnonzero(rng.random((r1 - r0) * m2) < q)
        out.append(np.column_stack([r0 + hit // m2, hit % m2]))
    return np.concatenate(out) if out else np.empty((0, 2), dtype=np.int64)


def generate(params: SbmParams, seed: int) -> SbmSample:
    """Sample the block model; nodes ``0..n1-1`` form community 1."""
    n1, n2 = params.n1, params.n2
    a1 = _upper_pairs(block_rng(params.key, seed, "A1"), n1, params.p1)
    a2 = _upper_pairs(block_rng(params.key, seed, "A2"), n2, params.p2) + n1
    c = _rect_pairs(block_rng(params.key, seed, "C"), n1, n2, params.p)
    c[:, 1] += n1
    g = build_graph(params.n, np.concatenate([a1, a2, c]))
    truth = np.concatenate([np.ones(n1, dtype=np.int8), np.full(n2, 2, dtype=np.int8)])
    truth.flags.writeable = False
    return SbmSample(params=params, graph=g, truth=truth, seed=seed)


def generate_cross_block(n1: int, n2: int, p: float, seed: int) -> sp.csr_matrix:
    """Standalone n1-by-n2 Bernoulli(p) 0/1 matrix as float64 CSR."""
    if n1 < 1 or n2 < 1:
        raise ValueError("block dimensions must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} is not a probability")
    ij = _rect_pairs(block_rng((n1, n2, float(p)), seed, "C"), n1, n2, p)
    data = np.ones(ij.shape[0], dtype=np.float64)
    return sp.csr_matrix((data, (ij[:, 0], ij[:, 1])), shape=(n1, n2))
