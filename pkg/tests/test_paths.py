import itertools
import math
import random
from fractions import Fraction as F

import networkx as nx
import pytest
from hypothesis import assume, given, settings, strategies as st

from robustpart.errors import AnchoringError, InputError, PreconditionError
from robustpart.generators import PlantedSpec, gen_planted, gen_random_regular
from robustpart.graph import DEFAULT_PARAMS, Graph, mask_of
from robustpart.paths import (
    balance_extend,
    balance_lhs,
    bounded_matching,
    connector_clauses,
    cycle_connector,
    edges_to_paths,
    is_balanced,
    is_extension,
    menger_matching,
    path_cover_balance,
    prune_path_system,
    reduced_multigraph,
    reduced_multigraph_euler,
    regular_partition_identity,
    seed_one_each,
    subpartition_tour,
    three_part_connector,
    validate_tour,
)
from robustpart.structures import ComponentLabel, PathSystem, RobustPartition

from builders import complete, complete_bipartite, cycle, graphs, one_clique_one_bipartite, petersen, two_cliques_bridged
from tourcheck import as_classes, tour_violations


def nx_of(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


# ---------------------------------------------------------------------------
# reduced multigraph and Euler tours


def test_euler_two_parts_doubled_edge():
    rm, tour = reduced_multigraph_euler([[0, 1], [2, 3]], PathSystem.of([[0, 2], [1, 3]]))
    assert rm.edges == ((0, 1), (0, 1))
    assert len(tour) == 2 and {e for e, _, _ in tour} == {0, 1}


def test_euler_single_crossing_path_has_none():
    _, tour = reduced_multigraph_euler([[0, 1], [2, 3]], PathSystem.of([[0, 2]]))
    assert tour is None


def test_euler_triangle():
    parts = [[0, 1], [2, 3], [4, 5]]
    _, tour = reduced_multigraph_euler(parts, PathSystem.of([[0, 2], [3, 4], [5, 1]]))
    assert len(tour) == 3
    walk = [u for _, u, _ in tour]
    assert sorted(walk) == [0, 1, 2]
    assert all(tour[i][2] == tour[(i + 1) % 3][1] for i in range(3))


def test_loop_counts_two_and_anchoring_error():
    rm, tour = reduced_multigraph_euler([[0, 1, 2]], PathSystem.of([[0, 5, 2]]))
    assert rm.degree(0) == 2 and tour is not None
    with pytest.raises(AnchoringError):
        reduced_multigraph([[0, 1]], PathSystem.of([[0, 7]]))


def test_disconnected_reduced_multigraph_has_no_tour():
    parts = [[0], [1], [2], [3]]
    _, tour = reduced_multigraph_euler(parts, PathSystem.of([[0, 1], [2, 3]]))
    assert tour is None


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 5), st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=9))
def test_euler_agrees_with_networkx(k, pairs):
    pairs = [(i % k, j % k) for i, j in pairs]
    # every path gets its own two end vertices and one middle vertex
    base = 2 * k
    fresh, paths2, parts2 = base + len(pairs), [], [[2 * i, 2 * i + 1] for i in range(k)]
    for idx, (i, j) in enumerate(pairs):
        x, y = fresh, fresh + 1
        fresh += 2
        parts2[i].append(x)
        parts2[j].append(y)
        paths2.append([x, base + idx, y])
    rm, tour = reduced_multigraph_euler(parts2, PathSystem.of(paths2))
    r = nx.MultiGraph()
    r.add_nodes_from(range(k))
    r.add_edges_from(pairs)
    assert (tour is not None) == nx.is_eulerian(r)
    if tour is not None:
        assert sorted(e for e, _, _ in tour) == list(range(len(pairs)))
        assert all(tour[i][2] == tour[(i + 1) % len(tour)][1] for i in range(len(tour)))


# ---------------------------------------------------------------------------
# matchings and the identity


def test_menger_matching_petersen_every_half():
    g = petersen()
    for a in itertools.combinations(range(10), 5):
        m = menger_matching(g, a, 3)
        assert len(m) >= 3
        assert all(g.has_edge(*p) and (p[0] in a) != (p[1] in a) for p in m.paths)


def test_menger_matching_small_cases():
    g = complete(6)
    m = menger_matching(g, [0, 1, 2], 3)
    assert len(m) == 3
    with pytest.raises(PreconditionError):
        menger_matching(cycle(4), [0, 1], 3)


def test_bounded_matching_examples():
    assert len(bounded_matching(cycle(7), cycle(7).edges)) == 3
    assert len(bounded_matching(None, [(0, i) for i in range(1, 6)])) == 1
    assert len(bounded_matching(None, [])) == 0


@settings(max_examples=120, deadline=None)
@given(graphs(0, 11))
def test_bounded_matching_is_maximum(g):
    m = bounded_matching(g, g.edges)
    assume(g.m > 0)
    oracle = nx.max_weight_matching(nx_of(g), maxcardinality=True)
    assert len(m) == len(oracle)
    assert len(m) >= math.ceil(g.m / (g.max_degree() + 1))
    verts = [v for p in m.paths for v in p]
    assert len(verts) == len(set(verts)) and all(g.has_edge(*p) for p in m.paths)


def test_regular_identity_examples():
    assert regular_partition_identity(complete(4), [0], [1], [2, 3]) == (0, 0)
    assert regular_partition_identity(cycle(5), [0, 1], [2], [3, 4]) == (2, 2)
    g = petersen()
    assert regular_partition_identity(g, [], [], range(10)) == (0, 0)
    with pytest.raises(InputError):
        regular_partition_identity(g, [0], [0], range(1, 10))
    with pytest.raises(InputError):
        regular_partition_identity(Graph(3, [(0, 1)]), [0], [1], [2])


def identity_by_hand(g, a, b, v):
    e = lambda x, y: sum(1 for p, q in g.edges if (p in x and q in y) or (p in y and q in x))
    inside = lambda x: sum(1 for p, q in g.edges if p in x and q in x)
    lhs = 2 * (inside(a) - inside(b)) + e(a, v) - e(b, v)
    return lhs, (len(a) - len(b)) * g.degree(0)


@settings(max_examples=60, deadline=None)
@given(st.integers(6, 16), st.integers(2, 5), st.integers(0, 10**6), st.data())
def test_regular_identity_random(n, degree, seed, data):
    assume(n * degree % 2 == 0 and degree < n)
    g = gen_random_regular(n, degree, seed)
    labels = data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    a, b, v = ([x for x in range(n) if labels[x] == t] for t in range(3))
    lhs, rhs = regular_partition_identity(g, a, b, v)
    assert lhs == rhs
    assert (lhs, rhs) == identity_by_hand(g, set(a), set(b), set(v))


# ---------------------------------------------------------------------------
# connectors


def test_three_part_connector_one_part_is_a_loop():
    g = complete(5)
    ps = three_part_connector(g, [range(5)])
    assert len(ps) == 1 and len(ps.paths[0]) == 2
    rm, tour = reduced_multigraph_euler([range(5)], ps)
    assert rm.edges == ((0, 0),) and tour is not None


def test_three_part_connector_two_parts_is_a_two_matching():
    g = complete(8)
    parts = [[0, 1, 2, 3], [4, 5, 6, 7]]
    ps = three_part_connector(g, parts)
    assert len(ps) == 2 and all(len(p) == 2 for p in ps.paths)
    assert all((p[0] < 4) != (p[1] < 4) for p in ps.paths)


def test_three_part_connector_k9():
    g = complete(9)
    parts = [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
    ps = three_part_connector(g, parts)
    masks = [mask_of(p) for p in parts]
    assert connector_clauses(ps, masks)
    classes = [{"vertices": set(p)} for p in parts]
    assert tour_violations(g, classes, [list(p) for p in ps.paths]) == []
    assert len(ps.edges) <= 4


def test_three_part_connector_preconditions():
    with pytest.raises(PreconditionError):
        three_part_connector(cycle(9), [[0, 1, 2], [3, 4, 5], [6, 7, 8]])
    with pytest.raises(PreconditionError):
        three_part_connector(complete(8), [[0, 1], [2, 3, 4, 5, 6, 7]])
    with pytest.raises(InputError):
        three_part_connector(complete(8), [[0, 1, 2], [3, 4, 5]])


def degree_counts_ok(ps, parts):
    for p in parts:
        c1 = sum(1 for v in p if v in ps.vertex_set and ps.degree(v) == 1)
        c2 = sum(1 for v in p if v in ps.vertex_set and ps.degree(v) == 2)
        if c1 + 2 * c2 not in (2, 4) or c2 > 1:
            return False
    return True


@settings(max_examples=60, deadline=None)
@given(st.integers(9, 16), st.integers(0, 10**6), st.integers(1, 3))
def test_three_part_connector_random_3_connected(n, seed, k):
    rng = random.Random(seed)
    g = gen_random_regular(n, 6, seed)
    assume(nx.node_connectivity(nx_of(g)) >= 3)
    order = list(range(n))
    rng.shuffle(order)
    cuts = sorted(rng.sample(range(3, n - 2), k - 1)) if k > 1 else []
    parts = [order[lo:hi] for lo, hi in zip([0] + cuts, cuts + [n])]
    assume(all(len(p) >= 3 for p in parts))
    ps = three_part_connector(g, parts)
    classes = [{"vertices": set(p)} for p in parts]
    assert tour_violations(g, classes, [list(p) for p in ps.paths]) == []
    assert len(ps.edges) <= 4 and degree_counts_ok(ps, parts)
    if k > 1:
        where = {v: i for i, p in enumerate(parts) for v in p}
        assert all(where[u] != where[v] for u, v in ps.edges)


def test_cycle_connector_c8():
    ps = cycle_connector(cycle(8), [[0, 1, 2, 3], [4, 5, 6, 7]])
    assert ps.edges == frozenset({(3, 4), (0, 7)})


def test_cycle_connector_single_part_loop():
    ps = cycle_connector(complete(6), [[0, 1, 2]])
    rm = reduced_multigraph([[0, 1, 2]], ps)
    assert rm.edges == ((0, 0),)


def test_cycle_connector_k9_triangle():
    parts = [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
    with pytest.raises(PreconditionError):
        cycle_connector(complete(9), parts)  # parts need 2t = 6 vertices
    g = complete(18)
    parts = [list(range(i, i + 6)) for i in (0, 6, 12)]
    ps = cycle_connector(g, parts)
    rm = reduced_multigraph(parts, ps)
    r = nx.MultiGraph(list(rm.edges))
    assert len(rm.edges) == 3 and sorted(d for _, d in r.degree()) == [2, 2, 2] and nx.is_connected(r)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_cycle_connector_on_planted(t, seed):
    g, truth = gen_planted(PlantedSpec("expanders", (8,) * t, bridge=t, seed=seed))
    parts = [c.vertices for c in truth.classes]
    ps = cycle_connector(g, parts)
    rm = reduced_multigraph(parts, ps)
    r = nx.MultiGraph()
    r.add_nodes_from(range(t))
    r.add_edges_from(rm.edges)
    assert len(rm.edges) == t and all(d == 2 for _, d in r.degree()) and nx.is_connected(r)
    assert ps.is_in(g)


def test_prune_fixed_point():
    parts = [[0, 1, 2, 3], [4, 5, 6, 7]]
    ps = PathSystem.of([[3, 4], [7, 0]])
    assert prune_path_system(parts, ps).canonical() == ps.canonical()


def test_prune_weave():
    g = complete(24)
    w, x = list(range(10)), list(range(10, 20))
    weave = [0, 20, 1, 21, 2, 22, 3, 23, 4, 10]
    ps = PathSystem.of([weave, [11, 5]])
    out = prune_path_system([w, x], ps)
    assert len(out.vertex_set & set(w)) <= 4
    _, tour = reduced_multigraph_euler([w, x], out)
    assert tour is not None
    in_edges = ps.edges
    assert out.edges <= in_edges
    assert tour_violations(g, [{"vertices": set(w)}, {"vertices": set(x)}], [list(p) for p in out.paths]) == []


def test_prune_removes_same_part_path_first():
    w, x = list(range(6)), list(range(6, 12))
    ps = PathSystem.of([[0, 6], [7, 1], [2, 12, 3]])
    out = prune_path_system([w, x], ps)
    ends = [(p[0] in w, p[-1] in w) for p in out.paths]
    assert all(a != b for a, b in ends)
    assert out.edges <= ps.edges


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 3), st.integers(0, 10**6))
def test_prune_bound_and_edge_subset(t, seed):
    rng = random.Random(seed)
    size = 8
    parts = [list(range(i * size, (i + 1) * size)) for i in range(t)]
    extra = list(range(t * size, t * size + 12))
    pool = {i: list(p) for i, p in enumerate(parts)}
    for p in pool.values():
        rng.shuffle(p)
    rng.shuffle(extra)
    paths = []
    for i in range(t):
        j = (i + 1) % t
        body = []
        for _ in range(rng.randint(0, 3)):
            if pool[i] and extra:
                body += [extra.pop(), pool[i].pop()]
        paths.append([pool[i].pop()] + body + [pool[j].pop()])
    ps = PathSystem.of(paths)
    out = prune_path_system(parts, ps)
    assert all(len(out.vertex_set & set(p)) <= 2 * t for p in parts)
    assert out.edges <= ps.edges
    _, tour = reduced_multigraph_euler(parts, out)
    assert tour is not None


def test_prune_rejects_non_tour():
    with pytest.raises(PreconditionError):
        prune_path_system([[0, 1], [2, 3]], PathSystem.of([[0, 2]]))


# ---------------------------------------------------------------------------
# balancing


def test_path_cover_balance_smallest_instance():
    g = complete_bipartite(8)
    a, b = list(range(8)), list(range(8, 16))
    ps = PathSystem.of([[0, 8]])
    out = path_cover_balance(g, a, b, ps, F(1, 20), strict=False)
    assert out.end_count(a) == out.end_count(b) == 1
    assert is_extension(ps, out, [a + b])
    assert len(out.paths) == 1 and len(out.paths[0]) == 4
    with pytest.raises(PreconditionError, match="footprint"):
        path_cover_balance(g, a, b, ps, F(1, 20))


def test_path_cover_balance_one_extra_vertex():
    base = complete_bipartite(5, 4)
    g = Graph(9, list(base.edges) + [(0, 1)])
    a, b = list(range(5)), list(range(5, 9))
    ps = PathSystem.of([[0, 1]])
    out = path_cover_balance(g, a, b, ps, F(1, 20), strict=False)
    assert is_balanced(out, a, b)
    assert out.int_count(a) - out.int_count(b) == 1
    assert tour_violations(g, [{"vertices": set(a + b), "a": set(a), "b": set(b)}], [list(p) for p in out.paths]) == []


def test_path_cover_balance_needs_an_endpoint_in_u():
    g = Graph(10, list(complete_bipartite(4).edges) + [(8, 9)])
    with pytest.raises(PreconditionError, match="endpoint"):
        path_cover_balance(g, range(4), range(4, 8), PathSystem.of([[8, 9]]), F(1, 20), strict=False)


def test_path_cover_balance_rejects_wrong_equation():
    g = complete_bipartite(5, 4)
    with pytest.raises(PreconditionError, match="balance equation"):
        path_cover_balance(g, range(5), range(5, 9), PathSystem.of([[0, 5]]), F(1, 20), strict=False)


def test_balance_extend_without_bipartite_classes():
    g = two_cliques_bridged(12, 2)
    sub = RobustPartition((ComponentLabel.expander(range(12)), ComponentLabel.expander(range(12, 24))), DEFAULT_PARAMS)
    ps = PathSystem.of([[0, 12], [1, 13]])
    assert balance_extend(g, sub, ps, F(1, 20), strict=False) == ps
    with pytest.raises(PreconditionError, match="footprint"):
        balance_extend(g, sub, ps, F(1, 20))


def test_balance_extend_one_of_each():
    g, c, a, b = one_clique_one_bipartite()
    sub = RobustPartition((ComponentLabel.expander(c), ComponentLabel.bipartite(a, b)), DEFAULT_PARAMS)
    ps = PathSystem.of([[c[0], a[0]], [c[1], b[0]]])
    out = balance_extend(g, sub, ps, F(1, 20), strict=False)
    assert is_extension(ps, out, [c, a + b])
    assert tour_violations(g, as_classes(sub), [list(p) for p in out.paths]) == []
    assert validate_tour(g, sub, out).ok


def test_balance_extend_requires_euler_tour():
    g, c, a, b = one_clique_one_bipartite()
    sub = RobustPartition((ComponentLabel.expander(c), ComponentLabel.bipartite(a, b)), DEFAULT_PARAMS)
    with pytest.raises(PreconditionError, match="Euler"):
        balance_extend(g, sub, PathSystem.of([[c[0], a[0]]]), F(1, 20), strict=False)


def test_seed_one_each_parity():
    g, c, a, b = one_clique_one_bipartite()
    ps = seed_one_each(g, c, a, b)
    vw = sum(1 for p in ps.paths if (p[0] in c) != (p[-1] in c))
    assert vw > 0 and vw % 2 == 0


@settings(max_examples=150, deadline=None)
@given(st.integers(6, 14), st.integers(0, 10**6))
def test_vw_path_count_parity(n, seed):
    # in any system on V u A u B satisfying the balance equation, the number of
    # paths joining V to W = A u B is even
    rng = random.Random(seed)
    labels = [rng.randrange(3) for _ in range(n)]
    v = {x for x in range(n) if labels[x] == 0}
    a = {x for x in range(n) if labels[x] == 1}
    b = {x for x in range(n) if labels[x] == 2}
    order = list(range(n))
    rng.shuffle(order)
    paths, i = [], 0
    while i < n:
        ln = rng.randint(1, 4)
        paths.append(order[i : i + ln])
        i += ln
    ps = PathSystem.of([p for p in paths if len(p) > 1])
    assume(len(ps))
    vw = sum(1 for p in ps.paths if (p[0] in v) != (p[-1] in v))
    cross = sum(1 for x, y in ps.edges if (x in v) != (y in v))
    assert vw % 2 == cross % 2
    if balance_lhs(ps, mask_of(a), mask_of(b), mask_of(a | b), n) == 2 * (len(a) - len(b)):
        assert vw % 2 == 0


# ---------------------------------------------------------------------------
# tours for subpartitions


def test_subpartition_tour_two_expanders():
    g = two_cliques_bridged(12, 2)
    sub = RobustPartition((ComponentLabel.expander(range(12)), ComponentLabel.expander(range(12, 24))), DEFAULT_PARAMS)
    adjusted, tour = subpartition_tour(g, sub, 2)
    assert adjusted.covered == sub.covered
    assert tour_violations(g, as_classes(adjusted), [list(p) for p in tour.paths], 54 * DEFAULT_PARAMS.rho) == []


def test_subpartition_tour_too_many_classes():
    g = two_cliques_bridged(12, 2)
    sub = RobustPartition((ComponentLabel.expander(range(12)), ComponentLabel.expander(range(12, 24))), DEFAULT_PARAMS)
    with pytest.raises(PreconditionError, match="exceeds"):
        subpartition_tour(g, sub, 1)


def test_subpartition_tour_with_bipartite_class():
    g, truth = gen_planted(PlantedSpec("bipartite", (8, 8), bridge=2, seed=3))
    adjusted, tour = subpartition_tour(g, truth, 2, strict=False)
    slack = 2 * truth.params.rho * truth.ell * g.n
    assert len(adjusted.covered) >= len(truth.covered) - slack
    assert tour_violations(g, as_classes(adjusted), [list(p) for p in tour.paths]) == []


def test_edges_to_paths_rejects_cycles():
    assert edges_to_paths([(0, 1), (1, 2)]).paths == ((0, 1, 2),)
    with pytest.raises(InputError):
        edges_to_paths([(0, 1), (1, 2), (0, 2)])
