"""A-posteriori estimates of the block probabilities and the threshold.

Given an identified two-way partition, the within-community probability
is estimated as m_i / n_i**2 (not the simple-graph density
2 m_i / (n_i (n_i - 1))); the two differ by O(1/n). Cross edges are
counted once.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .detect import Partition
from .graph import Graph, block_mask, cut_counts


@dataclass(frozen=True)
class EmpiricalEstimates:
    n1: int
    n2: int
    m1: int
    m2: int
    x: int
    p_hat: float
    p1_hat: float
    p2_hat: float
    p_star_hat: float
    reliable: bool
    convention: str = "single"

    def to_dict(self) -> dict:
        return asdict(self)


def estimate(g: Graph, pred, convention: str = "single") -> EmpiricalEstimates:
    """Estimate p, p1, p2 and sqrt(p1 p2) from a partition of ``g``.

    ``convention="double"`` counts each within-community edge twice in
    m_i (both adjacency entries); cross edges are always counted once.
    ``reliable`` is the strict comparison p_hat < p_star_hat.
    """
    if convention not in ("single", "double"):
        raise ValueError("convention must be 'single' or 'double'")
    labels = pred.labels if isinstance(pred, Partition) else np.asarray(pred)
    first = block_mask(labels)
    n1 = int(np.count_nonzero(first))
    n2 = int(labels.size) - n1
    if n1 == 0 or n2 == 0:
        raise ValueError("both communities must be nonempty")
    m1, m2, x = cut_counts(g, labels)
    mult = 2 if convention == "double" else 1
    p_hat = x / (n1 * n2)
    p1_hat = mult * m1 / n1**2
    p2_hat = mult * m2 / n2**2
    p_star_hat = math.sqrt(p1_hat * p2_hat)
    return EmpiricalEstimates(
        n1=n1,
        n2=n2,
        m1=m1,
        m2=m2,
        x=x,
        p_hat=p_hat,
        p1_hat=p1_hat,
        p2_hat=p2_hat,
        p_star_hat=p_star_hat,
        reliable=p_hat < p_star_hat,
        convention=convention,
    )
