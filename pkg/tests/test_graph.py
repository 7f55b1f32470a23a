import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minorbench.errors import InvalidGraph
from minorbench.graph import Graph


def test_basic_queries():
    g = Graph(4, [(0, 1), (1, 2), (2, 0), (2, 3)])
    assert g.node_count == 4 and g.edge_count == 4
    assert g.neighbors(2) == {0, 1, 3}
    assert g.degree(3) == 1 and g.max_degree() == 3
    assert g.mean_degree() == 2.0
    assert g.has_edge(1, 0) and not g.has_edge(0, 3)


def test_edges_are_canonical_and_deduplicated():
    g = Graph(3, [(1, 0), (0, 1), (2, 1)])
    assert g.edges == {(0, 1), (1, 2)}


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 5)], [(-1, 0)]])
def test_invalid_edges_rejected(edges):
    with pytest.raises(InvalidGraph):
        Graph(3, edges)


def test_equality_is_node_and_edge_sets():
    assert Graph(3, [(0, 1)]) == Graph(3, [(1, 0)])
    assert Graph(3, [(0, 1)]) != Graph(2, [(0, 1)])
    assert hash(Graph(3, [(0, 1)])) == hash(Graph(3, [(1, 0)]))


def test_without_nodes_keeps_ids():
    g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    h = g.without_nodes([2])
    assert h.nodes == (0, 1, 3, 4)
    assert h.edges == {(0, 1), (3, 4)}
    assert not h.is_connected()
    assert sorted(map(sorted, h.components())) == [[0, 1], [3, 4]]


def test_relabeled_is_dense():
    h, mapping = Graph([3, 7, 9], [(3, 9)]).relabeled()
    assert h.nodes == (0, 1, 2)
    assert h.has_edge(mapping[3], mapping[9])


def test_edgelist_round_trip():
    g = Graph(4, [(0, 3), (1, 2)])
    text = g.to_edgelist()
    assert text.splitlines()[0] == "p 4 2"
    assert Graph.from_edgelist(text) == g


def test_csr_matches_adjacency():
    g = Graph([2, 5, 8], [(2, 5), (5, 8)])
    ids, indptr, indices = g.csr()
    assert ids.tolist() == [2, 5, 8]
    for i, v in enumerate(ids):
        nbrs = {int(ids[j]) for j in indices[indptr[i]:indptr[i + 1]]}
        assert nbrs == g.neighbors(int(v))


edge_lists = st.integers(1, 12).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)))))


@given(edge_lists)
def test_property_no_loops_no_duplicates(case):
    n, raw = case
    edges = [(u, v) for u, v in raw if u != v]
    g = Graph(n, edges)
    assert all(u < v for u, v in g.edges)
    assert g.edge_count == len({tuple(sorted(e)) for e in edges})
    assert sum(g.degrees().values()) == 2 * g.edge_count
    ids, indptr, _ = g.csr()
    assert int(np.diff(indptr).sum()) == 2 * g.edge_count
