import dataclasses

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlgnet.exceptions import InstanceError
from mlgnet.graph import LOGICAL, TRANSPORT, validate
from mlgnet.instance import DISTANCE_LIMITED, CandidatePolicy
from mlgnet.synthesis import candidate_paths, logical_candidates, synthesize

from oracles import random_instance, ranked_simple_paths


@st.composite
def weighted_graphs(draw):
    n = draw(st.integers(2, 7))
    g = nx.Graph()
    g.add_nodes_from(range(n))
    for a in range(n):
        for b in range(a + 1, n):
            if draw(st.booleans()):
                g.add_edge(a, b, weight=draw(st.integers(0, 5)))
    return g


@settings(max_examples=150, deadline=None)
@given(weighted_graphs(), st.integers(1, 5))
def test_yen_matches_enumeration(g, k):
    expected = ranked_simple_paths(g, 0, 1, "weight")[:k]
    assert candidate_paths(g, 0, 1, k) == expected


def test_candidate_paths_edge_cases():
    g = nx.path_graph(3)
    nx.set_edge_attributes(g, 1, "weight")
    assert candidate_paths(g, 0, 2, 4) == [[0, 1, 2]]
    assert candidate_paths(g, 0, 2, 0) == []
    g.add_node(9)
    assert candidate_paths(g, 0, 9, 2) == []
    with pytest.raises(ValueError):
        candidate_paths(g, 1, 1, 2)
    with pytest.raises(KeyError):
        candidate_paths(g, 0, "missing", 1)


def test_ties_break_on_hops_then_ids():
    g = nx.Graph()
    g.add_weighted_edges_from([("s", "a", 1), ("a", "t", 1), ("s", "t", 2), ("s", "b", 1), ("b", "t", 1)])
    assert candidate_paths(g, "s", "t", 3) == [["s", "t"], ["s", "a", "t"], ["s", "b", "t"]]


def test_synthesized_layers_of_ring(I1):
    mlg = synthesize(I1)
    assert validate(mlg) == []
    assert mlg.layers == (0, 1, 2, 3)
    assert len(mlg.vertices_on(TRANSPORT)) == 5
    assert [v.id for v in mlg.vertices_on(LOGICAL)] == ["n1", "n3", "n4"]
    cands = logical_candidates(mlg)
    assert sorted(cands) == ["g/n1|n3", "g/n1|n4", "g/n3|n4"]
    assert cands["g/n1|n3"].candidate_paths == (("n1", "n2", "n3"), ("n1", "n5", "n4", "n3"))
    assert cands["g/n1|n3"].link_paths[0] == ("t/l12", "t/l23")
    # every flow endpoint maps to the logical layer
    for layer in mlg.flow_layers():
        for v in mlg.vertices_on(layer):
            assert mlg.downward(v.key) == ((LOGICAL, v.id),)


def test_flow_layer_edges_follow_logical_adjacency(I1):
    mlg = synthesize(I1)
    assert sorted(e.id for e in mlg.intra_edges(2)) == ["f/d1/n1|n3", "f/d1/n1|n4", "f/d1/n3|n4"]


def test_degree_cap_keeps_cheapest_edges(I1):
    capped = dataclasses.replace(I1, policy=CandidatePolicy(k_paths=1, max_logical_degree=1))
    mlg = synthesize(capped)
    assert [e.id for e in mlg.intra_edges(LOGICAL)] == ["g/n3|n4"]


def test_distance_limited_rule(I1):
    policy = CandidatePolicy(k_paths=1, logical_edge_rule=DISTANCE_LIMITED, hop_limit=1)
    mlg = synthesize(dataclasses.replace(I1, policy=policy))
    assert [e.id for e in mlg.intra_edges(LOGICAL)] == ["g/n3|n4"]


def test_invalid_instance_is_rejected(I1):
    broken = dataclasses.replace(I1, demands=(dataclasses.replace(I1.demands[0], source="n2"),))
    with pytest.raises(InstanceError) as info:
        synthesize(broken)
    assert info.value.location


@pytest.mark.parametrize("seed", range(15))
def test_random_instances_synthesize_validly(seed):
    inst = random_instance(seed)
    mlg = synthesize(inst)
    assert validate(mlg) == []
    n = len(inst.lsr_candidates)
    assert len(mlg.intra_edges(LOGICAL)) == n * (n - 1) // 2
    for e in mlg.intra_edges(LOGICAL):
        assert 1 <= len(e.paths) <= inst.policy.k_paths
