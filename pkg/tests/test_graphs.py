import itertools
import json

import pytest
from hypothesis import given, strategies as st

from edgeaudit.errors import CapacityError, InputError
from edgeaudit.graphs import (
    EdgeIndex,
    Graph,
    edge_flip,
    edge_list,
    enumerate_graphs,
    neighbors,
    num_edges,
    symmetric_difference_size,
)


def edge_set(g):
    return {(e.i, e.j) for e in g.edges()}


@st.composite
def graphs(draw, n_min=2, n_max=7):
    n = draw(st.integers(n_min, n_max))
    code = draw(st.integers(0, 2 ** num_edges(n) - 1))
    return Graph(n, code)


@st.composite
def graph_and_edge(draw):
    g = draw(graphs())
    e = draw(st.sampled_from(edge_list(g.n)))
    return g, e


def test_edge_order_is_lexicographic():
    assert [e.to_list() for e in edge_list(4)] == [[1, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4]]
    for k, e in enumerate(edge_list(6)):
        assert e.position(6) == k


def test_first_edge_is_most_significant_bit():
    assert Graph.from_edges(3, [(1, 2)]).bitstring() == "100"
    assert Graph.from_edges(3, [(2, 3)]).bitstring() == "001"


def test_edge_flip_adds_to_empty():
    g = edge_flip(Graph.empty(3), EdgeIndex(1, 2))
    assert edge_set(g) == {(1, 2)}


def test_edge_flip_removes():
    g = Graph.from_edges(3, [(1, 2)])
    assert edge_flip(g, (1, 2)) == Graph.empty(3)


@given(graph_and_edge())
def test_edge_flip_is_involution_and_changes_one_edge(ge):
    g, e = ge
    h = edge_flip(g, e)
    assert edge_flip(h, e) == g
    assert len(edge_set(g) ^ edge_set(h)) == 1


def test_invalid_edges_rejected():
    with pytest.raises(InputError):
        edge_flip(Graph.empty(3), (1, 4))
    with pytest.raises(InputError):
        EdgeIndex(2, 2)
    with pytest.raises(InputError):
        EdgeIndex(0, 2)


def test_edge_index_is_unordered():
    assert EdgeIndex(3, 1) == EdgeIndex(1, 3)


@pytest.mark.parametrize("n, expected", [(2, 1), (3, 3), (5, 10)])
def test_neighbor_count(n, expected):
    assert len(neighbors(Graph.empty(n))) == expected


def test_neighbors_of_n2_empty():
    assert neighbors(Graph.empty(2)) == [Graph.complete(2)]


@given(graphs(n_max=6))
def test_neighbors_distinct_and_at_distance_one(g):
    nbrs = neighbors(g)
    assert len(set(nbrs)) == num_edges(g.n)
    for h in nbrs:
        assert len(edge_set(g) ^ edge_set(h)) == 1
        assert g in neighbors(h)


@pytest.mark.parametrize("n, count", [(1, 1), (2, 2), (3, 8), (4, 64)])
def test_enumerate_counts(n, count):
    gs = list(enumerate_graphs(n))
    assert len(gs) == count
    assert len(set(gs)) == count


def test_enumeration_is_lexicographic_in_bitstrings():
    strings = [g.bitstring() for g in enumerate_graphs(4)]
    assert strings == sorted(strings)
    assert strings == ["".join(bits) for bits in itertools.product("01", repeat=6)]


def test_enumeration_cap():
    with pytest.raises(CapacityError, match="cap"):
        list(enumerate_graphs(7))
    assert sum(1 for _ in enumerate_graphs(4, cap=4)) == 64
    with pytest.raises(CapacityError):
        list(enumerate_graphs(5, cap=4))


def test_enumeration_cap_env_override(monkeypatch):
    monkeypatch.setenv("EDGEAUDIT_ENUM_CAP", "3")
    with pytest.raises(CapacityError, match="n <= 3"):
        next(enumerate_graphs(4))


def test_symmetric_difference_examples():
    g = Graph.from_edges(3, [(1, 3)])
    assert symmetric_difference_size(g, g) == 0
    assert symmetric_difference_size(Graph.empty(3), Graph.complete(3)) == 3
    assert symmetric_difference_size(g, edge_flip(g, (2, 3))) == 1
    with pytest.raises(InputError):
        symmetric_difference_size(Graph.empty(3), Graph.empty(4))


def test_symmetric_difference_is_a_metric_on_n3():
    gs = list(enumerate_graphs(3))
    d = symmetric_difference_size
    for g, h in itertools.product(gs, repeat=2):
        assert d(g, h) == len(edge_set(g) ^ edge_set(h))
        assert d(g, h) == d(h, g)
        assert (d(g, h) == 0) == (g == h)
    for g, h, k in itertools.product(gs, repeat=3):
        assert d(g, k) <= d(g, h) + d(h, k)


@given(graphs(n_max=12))
def test_json_round_trip(g):
    obj = g.to_json()
    assert obj["edges"] == sorted(obj["edges"])
    assert all(i < j for i, j in obj["edges"])
    assert Graph.from_json(json.dumps(obj)) == g
    assert json.dumps(Graph.from_json(obj).to_json()) == json.dumps(obj)


def test_json_rejects_unordered_pairs():
    with pytest.raises(InputError):
        Graph.from_json({"n": 3, "edges": [[2, 1]]})


@given(graphs(n_max=20))
def test_bits_round_trip(g):
    assert Graph.from_bits(g.bits()) == g
    assert g.edge_count() == int(g.bits().sum())


def test_adjacency_is_symmetric():
    g = Graph.from_edges(4, [(1, 2), (2, 4)])
    a = g.adjacency()
    assert (a == a.T).all() and a.trace() == 0
    assert a[0, 1] == a[1, 3] == 1 and a.sum() == 4
