import itertools
import json

import numpy as np
import pytest

from magtorus.errors import GraphError, SupportError
from magtorus.fixtures import (
    chain_of_cycles,
    flower,
    partition_figure_fixture,
    random_connected_graph,
)
from magtorus.graphs import (
    Graph,
    betti,
    enumerate_admissible_supports,
    fundamental_cycles,
    graph_from_json,
    induced_subgraph,
    is_admissible_support,
    partition_for_support,
    spanning_tree_count,
    supports_3regular,
    whole_graph_partition,
)
from magtorus.experiments import random_3regular

K4 = Graph(4, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])
TRIANGLE = Graph(3, [(1, 2), (1, 3), (2, 3)])
PATH3 = Graph(3, [(1, 2), (2, 3)])


def brute_force_supports(g):
    out = []
    for size in range(1, g.n + 1):
        for comb in itertools.combinations(range(1, g.n + 1), size):
            if is_admissible_support(g, comb):
                out.append(comb)
    return sorted(out, key=lambda t: (-len(t), t))


def test_betti_triangle_and_tree():
    assert betti(TRIANGLE) == 1
    assert betti(PATH3) == 0
    tree = Graph(5, [(1, 2), (1, 3), (3, 4), (3, 5)])
    assert betti(tree) == 0


def test_betti_3regular():
    for n in (8, 10, 12):
        g = random_3regular(n, seed=n)
        assert betti(g) == n // 2 + 1


def test_loader_rejects_bad_input():
    with pytest.raises(GraphError, match="loop"):
        Graph(3, [(1, 1), (1, 2), (2, 3)])
    with pytest.raises(GraphError, match="duplicate"):
        Graph(3, [(1, 2), (2, 1), (2, 3)])
    with pytest.raises(GraphError, match="outside"):
        Graph(3, [(1, 2), (2, 5)])
    with pytest.raises(GraphError, match="disconnected.*vertex 3|vertex 3"):
        Graph(4, [(1, 2), (3, 4)])


def test_json_round_trip():
    g = graph_from_json(json.dumps({"n": 4, "edges": [[1, 2], [2, 3], [3, 4], [1, 4]]}))
    assert g.n == 4 and g.betti == 1
    assert graph_from_json(g.to_json()) == g


def test_admissible_basics():
    assert is_admissible_support(TRIANGLE, (1, 2, 3))
    assert not is_admissible_support(PATH3, (1, 3))
    for sub in itertools.combinations(range(1, 5), 3):
        assert is_admissible_support(K4, sub)
    with pytest.raises(SupportError):
        is_admissible_support(K4, ())


def test_enumerate_supports_tree_and_disjoint_cycles():
    tree = Graph(6, [(1, 2), (2, 3), (2, 4), (4, 5), (4, 6)])
    assert enumerate_admissible_supports(tree) == [tuple(range(1, 7))]
    g = chain_of_cycles(3)
    assert enumerate_admissible_supports(g) == [tuple(range(1, g.n + 1))]
    assert enumerate_admissible_supports(flower(3)) == [tuple(range(1, 8))]


def test_enumerate_supports_k4():
    sups = enumerate_admissible_supports(K4)
    assert sups[0] == (1, 2, 3, 4)
    assert sorted(sups[1:]) == [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]


def test_enumerate_matches_brute_force():
    for seed in range(4):
        g = random_connected_graph(7, beta=3, seed=seed)
        assert enumerate_admissible_supports(g) == brute_force_supports(g)


def test_enumerate_deterministic():
    g = random_3regular(10, seed=3)
    assert enumerate_admissible_supports(g) == enumerate_admissible_supports(g)


def test_3regular_specialization_matches_general():
    for n, seed in ((8, 0), (10, 1)):
        g = random_3regular(n, seed=seed)
        assert enumerate_admissible_supports(g) == supports_3regular(g)


def test_partition_whole_graph():
    part = whole_graph_partition(K4)
    assert part.boundary == () and part.residual == ()
    assert part.cross_edges == () and part.residual_edges == ()
    assert len(part.free_support) == K4.betti == 3


def test_partition_k4_three_support():
    part = partition_for_support(K4, (1, 2, 3))
    assert len(part.cross_edges) == 3
    assert len(part.free_cross) == 2
    assert part.residual_edges == ()
    assert part.boundary == (4,)
    assert set(part.tree_cross_edge) == {4}


def test_partition_figure_sizes():
    g, support = partition_figure_fixture()
    part = partition_for_support(g, support)
    assert len(part.support) == 7
    assert len(part.boundary) == 3
    assert len(part.residual) == 3
    assert len(part.cross_edges) == 10
    assert len(part.residual_edges) == 4
    assert len(part.free_cross) == len(part.cross_edges) - len(part.boundary)
    assert len(part.free_residual) == len(part.residual_edges) - len(part.residual)


def test_partition_invariants_random():
    for seed in range(3):
        g = random_3regular(10, seed=seed + 20)
        for sup in enumerate_admissible_supports(g):
            part = partition_for_support(g, sup)
            # boundary vertices see the support at least three times
            for r in part.boundary:
                inside = sum(1 for w in g.adjacency[r] if w in set(sup))
                assert inside >= 3
            assert len(part.free_support) == len(part.support_edges) - len(sup) + 1
            assert len(part.free_cross) == len(part.cross_edges) - len(part.boundary)
            assert len(part.free_residual) == len(part.residual_edges) - len(part.residual)
            assert len(part.tree_edges) == g.n - 1
            # the tree restricted to the support spans it
            sup_tree = [e for e in part.tree_edges if e in set(part.support_edges)]
            assert len(sup_tree) == len(sup) - 1


def test_partition_rejects_inadmissible():
    with pytest.raises(SupportError):
        partition_for_support(PATH3, (1, 3))


def test_induced_subgraph():
    sub = induced_subgraph(K4, (1, 2, 3, 4))
    assert sub.vertices == (1, 2, 3, 4) and len(sub.edges) == 6
    single = induced_subgraph(K4, (2,))
    assert single.vertices == (2,) and single.edges == ()
    empty = induced_subgraph(K4, ())
    assert empty.vertices == () and empty.components == ()
    two = induced_subgraph(PATH3, (1, 3))
    assert two.components == ((1,), (3,))


def test_spanning_tree_count():
    assert spanning_tree_count(TRIANGLE) == 3
    assert spanning_tree_count(PATH3) == 1
    assert spanning_tree_count(K4) == 16  # Cayley 4^2


def test_fundamental_cycles_are_cycles():
    g = random_connected_graph(8, beta=3, seed=5)
    part = whole_graph_partition(g)
    cycles = fundamental_cycles(g, part)
    assert cycles.shape == (g.betti, len(g.edges))
    # boundary of each cycle vanishes: signed edge values at each vertex sum to zero
    for vec in cycles:
        net = np.zeros(g.n)
        for i, (r, s) in enumerate(g.edges):
            net[r - 1] -= vec[i]
            net[s - 1] += vec[i]
        assert np.abs(net).max() == 0
        assert set(np.round(vec).astype(int)) <= {-1, 0, 1}
        assert np.array_equal(vec, np.round(vec))
