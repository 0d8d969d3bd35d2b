import itertools

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from robustpart.errors import InputError
from robustpart.generators import fig1i_parts, fig1ii_parts, gen_fig1i, gen_fig1ii
from robustpart.graph import (
    Digraph,
    Graph,
    Params,
    bipartite_matching,
    connected_components,
    disjoint_paths,
    edge_counts,
    general_matching,
    is_k_connected,
    is_matching,
    max_matching,
    parse_rational,
    vertex_connectivity,
)

from builders import complete, complete_bipartite, cycle, disjoint_union, graphs, graphs_with_subsets, petersen


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def test_graph_rejects_loops_and_range():
    with pytest.raises(InputError):
        Graph(3, [(1, 1)])
    with pytest.raises(InputError):
        Graph(3, [(0, 3)])


def test_parallel_edges_collapse_or_reject():
    g = Graph(3, [(0, 1), (1, 2)])
    assert g.m == 2 and g.degree(1) == 2


def test_edge_counts_complete_disjoint():
    assert edge_counts(complete(4), [0, 1], [2, 3]) == (4, 4, 1)


def test_edge_counts_overlap_on_c5():
    # exactly-one-endpoint-in-each reading; e' sums degrees into b over a
    e_ab, e_prime, e_a = edge_counts(cycle(5), [0, 1], [0, 1])
    assert e_a == 1
    assert e_prime == sum(len(set(cycle(5).neighbors(x)) & {0, 1}) for x in (0, 1)) == 2


def test_edge_counts_empty_set():
    assert edge_counts(petersen(), [], [1, 2]) == (0, 0, 0)


def test_edge_counts_out_of_range():
    with pytest.raises(InputError):
        edge_counts(cycle(5), [7], [0])


@given(graphs_with_subsets(count=2))
def test_edge_prime_is_degree_sum(data):
    g, (a, b) = data
    _, e_prime, _ = edge_counts(g, a, b)
    assert e_prime == sum(len(set(g.neighbors(x)) & b) for x in a)


@given(graphs_with_subsets(count=2))
def test_edge_counts_symmetric_on_disjoint_sets(data):
    g, (a, b) = data
    b = b - a
    assert edge_counts(g, a, b)[0] == edge_counts(g, b, a)[0]


@given(graphs())
def test_handshake(g):
    assert sum(g.degrees()) == 2 * g.m


def test_vertex_connectivity_examples():
    assert vertex_connectivity(petersen()) == 3
    assert vertex_connectivity(complete(5)) == 4
    assert vertex_connectivity(disjoint_union(complete(3), complete(3))) == 0
    with pytest.raises(InputError):
        vertex_connectivity(Graph(1))


@settings(max_examples=60, deadline=None)
@given(graphs(min_n=2, max_n=9))
def test_vertex_connectivity_matches_networkx(g):
    k = vertex_connectivity(g)
    assert k == nx.node_connectivity(to_nx(g))
    assert k <= g.min_degree()
    assert is_k_connected(g, k) and not is_k_connected(g, k + 1)


def test_disjoint_paths_are_disjoint():
    g = petersen()
    paths = disjoint_paths(g, [0, 1, 2], [7, 8, 9])
    assert len(paths) == 3
    inner = [set(p) for p in paths]
    assert all(not (x & y) for x, y in itertools.combinations(inner, 2))
    assert all(g.has_edge(u, v) for p in paths for u, v in zip(p, p[1:]))


def test_matching_examples():
    assert len(max_matching(complete_bipartite(3), range(3), range(3, 6))) == 3
    assert len(max_matching(cycle(7))) == 3
    assert max_matching(Graph(5)) == []
    with pytest.raises(InputError):
        max_matching(cycle(4), [0, 1], [1, 2])


def brute_matching_size(g):
    best = 0
    for r in range(1, g.n // 2 + 1):
        for es in itertools.combinations(g.edges, r):
            if is_matching(es):
                best = r
                break
        else:
            break
    return best


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=8))
def test_general_matching_is_maximum(g):
    m = general_matching(g)
    assert is_matching(m) and all(g.has_edge(u, v) for u, v in m)
    assert len(m) == brute_matching_size(g)


@settings(max_examples=60, deadline=None)
@given(graphs(min_n=2, max_n=10), st.integers(1, 9))
def test_bipartite_matching_is_maximum(g, split):
    split = min(split, g.n - 1)
    a, b = range(split), range(split, g.n)
    m = bipartite_matching(g, a, b)
    assert is_matching(m)
    h = nx.Graph([(u, v) for u, v in g.edges if (u < split) != (v < split)])
    h.add_nodes_from(range(g.n))
    want = len(nx.bipartite.maximum_matching(h, top_nodes=[x for x in a])) // 2 if h.number_of_edges() else 0
    assert len(m) == want


def test_components_examples():
    assert len(connected_components(gen_fig1i(4), fig1i_parts(4)["A"])) == 5
    p = fig1ii_parts(2)
    assert len(connected_components(gen_fig1ii(2), p["a"] + p["b"])) == 3
    assert connected_components(petersen()) == [frozenset(range(10))]


def test_components_sorted_by_minimum():
    comps = connected_components(disjoint_union(cycle(3), cycle(4)), [0])
    assert [min(c) for c in comps] == sorted(min(c) for c in comps)


def test_digraph_semidegree():
    d = Digraph(3, [(0, 1), (1, 2), (2, 0)])
    assert d.min_semidegree() == 1 and d.has_arc(0, 1) and not d.has_arc(1, 0)


def test_params_hierarchy_and_parsing():
    assert parse_rational("3/12") == parse_rational("1/4")
    with pytest.raises(InputError):
        parse_rational("x/2")
    with pytest.raises(InputError):
        Params(parse_rational("1/2"), parse_rational("1/4"), parse_rational("1/5"))
