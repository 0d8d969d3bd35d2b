from fractions import Fraction as F

import pytest

from robustpart.errors import PreconditionError
from robustpart.generators import PlantedSpec, gen_fig1i, gen_planted
from robustpart.graph import is_k_connected
from robustpart.oracle import CycleResult
from robustpart.pipelines import StabilityPartition, circumference_bound, find_hamilton_pipeline, long_cycle_pipeline

from builders import complete, cycle, one_clique_one_bipartite, two_cliques_bridged


def is_cycle_of(g, cyc):
    n = len(cyc)
    return len(set(cyc)) == n and all(g.has_edge(cyc[i], cyc[(i + 1) % n]) for i in range(n))


def assert_hamiltonian(g, out):
    assert out.found and isinstance(out.result, CycleResult)
    assert sorted(out.result.cycle) == list(range(g.n)) and is_cycle_of(g, out.result.cycle)


def test_complete_graph():
    g = complete(20)
    out = find_hamilton_pipeline(g)
    assert_hamiltonian(g, out)
    assert (out.partition.k, out.partition.ell) == (1, 0)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_three_planted_expanders(seed):
    g, truth = gen_planted(PlantedSpec("expanders", (15, 15, 15), bridge=3, seed=seed))
    assert is_k_connected(g, 3)
    out = find_hamilton_pipeline(g)
    assert_hamiltonian(g, out)
    assert (out.partition.k, out.partition.ell) == (3, 0)


def test_two_cliques():
    g = two_cliques_bridged(20, 4)
    out = find_hamilton_pipeline(g)
    assert_hamiltonian(g, out)
    assert (out.partition.k, out.partition.ell) == (2, 0)


def test_single_bipartite_class():
    g, _ = gen_planted(PlantedSpec("bipartite", (10,), seed=4))
    out = find_hamilton_pipeline(g)
    assert_hamiltonian(g, out)
    assert (out.partition.k, out.partition.ell) == (0, 1)


def test_one_class_of_each_kind():
    g, *_ = one_clique_one_bipartite()
    out = find_hamilton_pipeline(g)
    assert_hamiltonian(g, out)
    assert (out.partition.k, out.partition.ell) == (1, 1)


def test_fig1i_returns_partition():
    out = find_hamilton_pipeline(gen_fig1i(4))
    assert not out.found and isinstance(out.result, StabilityPartition)
    assert out.result.shape == (2, 1)
    assert out.tour is None


def test_four_classes_stop_and_report():
    g, _ = gen_planted(PlantedSpec("expanders", (12, 12, 12, 12), bridge=3, seed=0))
    out = find_hamilton_pipeline(g)
    assert isinstance(out.result, StabilityPartition) and out.result.shape == (4, 0)
    assert "no tour construction" in out.result.reason


def test_long_cycle_two_largest_of_four():
    g, _ = gen_planted(PlantedSpec("expanders", (16, 16, 16, 16), bridge=1, seed=0))
    out = long_cycle_pipeline(g, 2, r=5, eps=F(1, 10))
    assert is_cycle_of(g, out.cycle.cycle)
    assert out.length >= out.covered_target - out.slack
    assert set(out.selected.covered) <= set(out.cycle.cycle)
    assert out.bound == circumference_bound(g.n, 2, 5, F(1, 10))


def test_long_cycle_covering_everything():
    g, _ = gen_planted(PlantedSpec("expanders", (12, 12, 12), bridge=2, seed=1))
    out = long_cycle_pipeline(g, 3)
    assert out.length == g.n and is_cycle_of(g, out.cycle.cycle)


def test_long_cycle_needs_connectivity():
    with pytest.raises(PreconditionError, match="3-connected"):
        long_cycle_pipeline(cycle(12), 3)
    with pytest.raises(PreconditionError):
        long_cycle_pipeline(complete(5), 0)


def test_circumference_bound_values():
    assert circumference_bound(100, 2, 5, F(1, 10)) == 50
    assert circumference_bound(100, 4, 3, F(1, 10)) == 90
    assert circumference_bound(100, 1, 12, F(1, 10), bipartite=True) == F(200, 10) - 10
    with pytest.raises(PreconditionError):
        circumference_bound(10, 1, 1, 0)
