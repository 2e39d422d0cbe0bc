"""Two-way partitions from the leading eigenvector, and their scoring."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ZERO_TOL = 1e-12


@dataclass(frozen=True)
class Partition:
    labels: np.ndarray  # int8 values in {1, 2}
    method: str

    @property
    def sizes(self) -> tuple[int, int]:
        k = int(np.count_nonzero(self.labels == 1))
        return k, int(self.labels.size) - k


def swap_labels(labels) -> np.ndarray:
    lab = np.asarray(labels)
    return (3 - lab).astype(lab.dtype)


def partition_by_sign(y) -> Partition:
    """Label 1 where y > 0, label 2 where y < 0; |y_i| <= 1e-12 counts as 1."""
    y = np.asarray(y, dtype=np.float64)
    if not np.any(np.abs(y) > ZERO_TOL):
        raise ValueError("cannot partition an all-zero vector")
    labels = np.where(y < -ZERO_TOL, 2, 1).astype(np.int8)
    return Partition(labels, "sign")


def two_means_split(values) -> tuple[int, float]:
    """Exact 1-D 2-means on sorted ``values``.

    Returns ``(k, wcss)``: the optimal clusters are ``sorted[:k]`` and
    ``sorted[k:]``. Splits only fall between distinct values; among
    splits whose WCSS ties (relative 1e-12), the leftmost wins.
    """
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = x.size
    if n < 2:
        raise ValueError("need at least two values")
    cuts = np.flatnonzero(x[1:] > x[:-1]) + 1
    if cuts.size == 0:
        raise ValueError("all entries identical: no two-cluster structure")
    # center first to keep the prefix-sum form well conditioned
    x = x - x.mean()
    s1 = np.cumsum(x)
    s2 = np.cumsum(x * x)
    k = cuts.astype(np.float64)
    left = s2[cuts - 1] - s1[cuts - 1] ** 2 / k
    right = (s2[-1] - s2[cuts - 1]) - (s1[-1] - s1[cuts - 1]) ** 2 / (n - k)
    wcss = left + right
    best = wcss.min()
    tie = 1e-12 * max(float(s2[-1]), 1e-300)
    i = int(np.flatnonzero(wcss <= best + tie)[0])
    return int(cuts[i]), float(wcss[i])


def partition_by_kmeans2(y) -> Partition:
    """1-D 2-means on the entries of ``y``, solved exactly by a split scan.

    The cluster holding the larger values gets label 1, matching the sign
    rule's orientation.
    """
    y = np.asarray(y, dtype=np.float64)
    k, _ = two_means_split(y)
    threshold = np.sort(y)[k]
    labels = np.where(y >= threshold, 1, 2).astype(np.int8)
    return Partition(labels, "kmeans2")


def partition(y, method: str = "sign") -> Partition:
    if method == "sign":
        return partition_by_sign(y)
    if method in ("kmeans", "kmeans2"):
        return partition_by_kmeans2(y)
    raise ValueError(f"unknown partition method {method!r}")


def detectability(pred, truth) -> float:
    """Fraction of nodes correctly labeled, maximized over the label swap."""
    a = pred.labels if isinstance(pred, Partition) else np.asarray(pred)
    b = truth.labels if isinstance(truth, Partition) else np.asarray(truth)
    if a.shape != b.shape:
        raise ValueError("prediction and truth have different lengths")
    n = a.size
    hits = int(np.count_nonzero(a == b))
    return max(hits, n - hits) / n
