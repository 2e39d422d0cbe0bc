"""Whitespace edge-list and label-file readers, plus graph clean-up.

Edge list: UTF-8 text, one edge per line, two whitespace-separated id
tokens (extra tokens ignored), ``#`` starts a comment. Label file: one
``id label`` pair per line in the same dialect.

Two id dialects:

* ``str``: tokens are opaque names, numbered in order of first appearance.
* ``int``: tokens are dense node indices ``0..n-1``; ``n`` is given or is
  one past the largest id, so nodes without edges survive. This is the
  dialect the canonical writer emits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np
from scipy.sparse.csgraph import connected_components

from .graph import Graph, build_graph


class ParseError(ValueError):
    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


@dataclass(frozen=True)
class EdgeListFile:
    path: Path
    dialect: str = "str"
    comment: str = "#"
    num_nodes: int | None = None

    def __post_init__(self):
        if self.dialect not in ("str", "int"):
            raise ValueError("dialect must be 'str' or 'int'")


@dataclass(frozen=True)
class LabeledGraph:
    graph: Graph
    id_map: dict = field(repr=False)
    labels: np.ndarray | None = None

    @property
    def ids(self) -> list:
        """External ids in index order."""
        out = [None] * len(self.id_map)
        for key, i in self.id_map.items():
            out[i] = key
        return out


def _records(path, comment: str) -> Iterator[tuple[int, list[str]]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if comment and comment in line:
                line = line[: line.index(comment)]
            tokens = line.split()
            if tokens:
                yield lineno, tokens


def _as_int(token: str, path, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(path, lineno, f"node id {token!r} is not an integer") from None
    if value < 0:
        raise ParseError(path, lineno, f"node id {value} is negative")
    return value


def read_edge_list(file: EdgeListFile | str | Path) -> LabeledGraph:
    if not isinstance(file, EdgeListFile):
        file = EdgeListFile(Path(file))
    path = file.path
    pairs = []
    id_map: dict = {}
    for lineno, tokens in _records(path, file.comment):
        if len(tokens) < 2:
            raise ParseError(path, lineno, f"expected 2 node ids, found {len(tokens)}")
        a, b = tokens[0], tokens[1]
        if file.dialect == "int":
            i, j = _as_int(a, path, lineno), _as_int(b, path, lineno)
            if file.num_nodes is not None and max(i, j) >= file.num_nodes:
                raise ParseError(path, lineno, f"node id {max(i, j)} >= num_nodes {file.num_nodes}")
        else:
            i = id_map.setdefault(a, len(id_map))
            j = id_map.setdefault(b, len(id_map))
        pairs.append((i, j))

    if file.dialect == "int":
        n = file.num_nodes
        if n is None:
            n = 1 + max((max(e) for e in pairs), default=-1)
        id_map = {i: i for i in range(n)}
    n = len(id_map)
    if n == 0:
        raise ParseError(path, 0, "no edges and no nodes")
    return LabeledGraph(build_graph(n, pairs), id_map)


def read_labels(path, id_map: dict, dialect: str = "str", comment: str = "#") -> np.ndarray:
    """Per-node labels in {1, 2}, numbered by first appearance of the value."""
    values: dict[str, int] = {}
    labels = np.zeros(len(id_map), dtype=np.int8)
    for lineno, tokens in _records(path, comment):
        if len(tokens) < 2:
            raise ParseError(path, lineno, "expected 'id label'")
        key = _as_int(tokens[0], path, lineno) if dialect == "int" else tokens[0]
        if key not in id_map:
            raise ParseError(path, lineno, f"unknown node id {tokens[0]!r}")
        code = values.setdefault(tokens[1], len(values) + 1)
        if code > 2:
            raise ParseError(path, lineno, f"more than 2 distinct labels: {sorted(values)}")
        labels[id_map[key]] = code
    missing = np.flatnonzero(labels == 0)
    if missing.size:
        inverse = {i: key for key, i in id_map.items()}
        names = ", ".join(repr(inverse[i]) for i in missing[:5].tolist())
        raise ValueError(f"{path}: no label for node(s) {names}" + (" ..." if missing.size > 5 else ""))
    if len(values) != 2:
        raise ValueError(f"{path}: expected exactly 2 distinct labels, found {len(values)}")
    return labels


def _subset(lg: LabeledGraph, keep: np.ndarray) -> LabeledGraph:
    g = lg.graph
    new_index = np.full(g.n, -1, dtype=np.int64)
    new_index[keep] = np.arange(keep.size)
    e = g.edges()
    e = e[(new_index[e[:, 0]] >= 0) & (new_index[e[:, 1]] >= 0)]
    ids = lg.ids
    id_map = {ids[old]: new for new, old in enumerate(keep.tolist())}
    labels = None if lg.labels is None else lg.labels[keep]
    return LabeledGraph(build_graph(keep.size, new_index[e]), id_map, labels)


def preprocess(lg: LabeledGraph, drop_isolated: bool = False, largest_component: bool = False) -> LabeledGraph:
    """Remove degree-0 nodes and/or keep only the largest connected
    component (ties go to the component holding the smallest index).
    Relative node order is preserved.
    """
    g = lg.graph
    keep = np.ones(g.n, dtype=bool)
    if drop_isolated:
        keep &= g.degrees > 0
    if largest_component:
        _, comp = connected_components(g.adjacency, directed=False)
        sizes = np.bincount(comp)
        keep &= comp == int(np.argmax(sizes))
    if keep.all():
        return lg
    if not keep.any():
        raise ValueError("preprocessing removed every node")
    return _subset(lg, np.flatnonzero(keep))


def write_edge_list(g: Graph, path) -> None:
    """Canonical form: sorted ``min max`` index pairs, one per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, j in g.edges().tolist():
            fh.write(f"{i} {j}\n")
