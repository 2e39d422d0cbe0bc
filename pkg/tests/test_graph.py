import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbm_phase.graph import EmptyGraphError, build_graph, cut_counts, degree_data


def triangle():
    return build_graph(3, [(0, 1), (0, 2), (1, 2)])


def test_build_collapses_duplicates_and_loops():
    g = build_graph(3, [(0, 1), (1, 0), (1, 1), (1, 2)])
    assert g.edges().tolist() == [[0, 1], [1, 2]]
    assert g.m2 == 4
    assert g.neighbors(1).tolist() == [0, 2]


def test_triangle_degrees():
    deg = degree_data(triangle())
    assert deg.d.tolist() == [2, 2, 2]
    assert deg.b == 1 / 6


@pytest.mark.parametrize(
    "n, edges, d, b",
    [
        (3, [(0, 1), (1, 2)], [1, 2, 1], 1 / 4),
        (2, [(0, 1)], [1, 1], 1 / 2),
    ],
)
def test_degree_data(n, edges, d, b):
    deg = degree_data(build_graph(n, edges))
    assert deg.d.tolist() == d
    assert deg.b == b


def test_empty_graph_is_valid_but_has_no_b():
    g = build_graph(2, [])
    assert g.m2 == 0
    with pytest.raises(EmptyGraphError):
        degree_data(g)


@pytest.mark.parametrize("n, edges", [(0, []), (3, [(0, 3)]), (3, [(-1, 2)])])
def test_build_rejects_bad_input(n, edges):
    with pytest.raises(ValueError):
        build_graph(n, edges)


def test_graph_arrays_are_read_only():
    g = triangle()
    with pytest.raises(ValueError):
        g.indices[0] = 2


@pytest.mark.parametrize(
    "g, labels, expected",
    [
        (triangle(), (0, 0, 0), (3, 0, 0)),
        (triangle(), (0, 0, 1), (1, 0, 2)),
        (build_graph(2, [(0, 1)]), (0, 1), (0, 0, 1)),
        (triangle(), (1, 1, 2), (1, 0, 2)),
    ],
)
def test_cut_counts(g, labels, expected):
    assert cut_counts(g, labels) == expected


def test_cut_counts_length_mismatch():
    with pytest.raises(ValueError):
        cut_counts(triangle(), (1, 2))


edge_lists = st.integers(1, 30).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=120),
    )
)


@settings(max_examples=200, deadline=None)
@given(edge_lists)
def test_graph_invariants(case):
    n, edges = case
    g = build_graph(n, edges)
    A = g.adjacency.toarray()
    assert np.array_equal(A, A.T)
    assert np.all(np.diag(A) == 0)
    assert g.m2 == int(g.degrees.sum()) and g.m2 % 2 == 0
    for i in range(n):
        nb = g.neighbors(i)
        assert np.all(np.diff(nb) > 0)
    expected = {(min(a, b), max(a, b)) for a, b in edges if a != b}
    assert {tuple(e) for e in g.edges().tolist()} == expected
    # idempotent rebuild
    assert build_graph(n, g.edges()) == g


@settings(max_examples=100, deadline=None)
@given(edge_lists, st.randoms(use_true_random=False))
def test_cut_counts_partition_edges_and_swap(case, rnd):
    n, edges = case
    g = build_graph(n, edges)
    labels = np.array([rnd.choice((1, 2)) for _ in range(n)])
    m1, m2, x = cut_counts(g, labels)
    assert m1 + m2 + x == g.num_edges
    assert cut_counts(g, 3 - labels) == (m2, m1, x)
