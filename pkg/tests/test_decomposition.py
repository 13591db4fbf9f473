import random

import pytest
from hypothesis import given, settings, strategies as st

from cuspkit.decomposition import (
    block_structure_oracle,
    block_structures,
    brute_force_oracle,
    combined_tree,
    r_classes,
    spqr_nodes,
)
from cuspkit.errors import PreconditionError
from cuspkit.graph import (
    FiniteGraph,
    block_chain,
    complete_graph,
    cycle_graph,
    path_graph,
    random_connected_graph,
    star_graph,
    theta_graph,
    wheel_graph,
)


def kinds(tree):
    return sorted((n.kind, tuple(sorted(n.vertices))) for n in tree.nodes)


def two_triangles():
    return FiniteGraph(["v", "a", "b", "c", "d"], [("v", "a"), ("a", "b"), ("b", "v"), ("v", "c"), ("c", "d"), ("d", "v")])


def k4_minus_edge():
    return FiniteGraph(["a", "b", "c", "d"], [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("c", "d")])


def test_r_classes():
    rc = r_classes(two_triangles())
    assert len(rc.blocks) == 2 and rc.cut_points == ("v",)
    assert rc.incidence == {"v": (0, 1)}
    assert r_classes(cycle_graph(6)).cut_points == ()
    rc = r_classes(path_graph(4))
    assert len(rc.blocks) == 3 and rc.cut_points == ("1", "2")
    with pytest.raises(PreconditionError):
        r_classes(FiniteGraph(["a", "b"], []))


def test_block_structures_examples():
    st = block_structures(cycle_graph(8))
    assert st.necklaces == (frozenset(cycle_graph(8).vertices),) and not st.cut_pairs and not st.rigid
    assert block_structures(complete_graph(4)).rigid == (frozenset("0123"),)
    th = block_structures(theta_graph(3, 2))
    assert th.cut_pairs == (frozenset({"u", "v"}),)
    assert len(th.necklaces) == 3
    with pytest.raises(PreconditionError):
        block_structures(two_triangles())


def test_oracle_examples():
    assert kinds(brute_force_oracle(cycle_graph(5))) == [("Necklace", tuple("01234"))]
    st = block_structure_oracle(k4_minus_edge())
    assert st.cut_pairs == (frozenset({"a", "c"}),)
    star = brute_force_oracle(star_graph(3))
    assert ("CutPoint", ("c",)) in kinds(star)
    with pytest.raises(PreconditionError):
        brute_force_oracle(path_graph(13))


def test_combined_tree_examples():
    w5 = combined_tree(wheel_graph(5))
    assert kinds(w5) == [("Rigid", tuple(sorted(wheel_graph(5).vertices)))] and w5.edges == ()
    tt = combined_tree(two_triangles())
    assert kinds(tt) == [("CutPoint", ("v",)), ("Necklace", ("a", "b", "v")), ("Necklace", ("c", "d", "v"))]
    assert len(tt.edges) == 2
    th = combined_tree(theta_graph(3, 2))
    pair = [i for i, n in enumerate(th.nodes) if n.kind == "CutPair"]
    assert len(pair) == 1 and sum(pair[0] in e for e in th.edges) == 3
    with pytest.raises(PreconditionError):
        combined_tree(path_graph(2))


def test_bridges_become_two_vertex_rigid_nodes():
    t = combined_tree(path_graph(4))
    assert kinds(t) == [("CutPoint", ("1",)), ("CutPoint", ("2",)),
                        ("Rigid", ("0", "1")), ("Rigid", ("1", "2")), ("Rigid", ("2", "3"))]
    assert t.is_tree()


def test_spqr_nodes_of_a_prism():
    # triangular prism: 3-connected, so a single R node
    g = FiniteGraph.from_index_edges(list("abcdef"), [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)])
    nodes = spqr_nodes(g)
    assert [n.kind for n in nodes] == ["R"]


def test_json_and_dot():
    t = combined_tree(block_chain([3, 4]))
    js = t.to_json()
    assert {n["kind"] for n in js["nodes"]} == {"CutPoint", "Necklace"}
    assert "shape=\"point\"" in t.to_dot()


graphs = st.builds(
    lambda n, p, seed: random_connected_graph(n, p, random.Random(seed)),
    st.integers(3, 9),
    st.sampled_from([0.1, 0.25, 0.4, 0.6, 0.8]),
    st.integers(0, 10**6),
)


@settings(max_examples=150, deadline=None)
@given(graphs)
def test_fast_path_equals_oracle(g):
    fast, slow = combined_tree(g), brute_force_oracle(g)
    assert fast.signature() == slow.signature()
    assert fast.is_tree()


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_structure_nodes_are_not_nested_and_edges_are_containments(g):
    t = combined_tree(g)
    for i, j in t.edges:
        a, b = t.nodes[i].vertices, t.nodes[j].vertices
        assert a < b or b < a
    for block in r_classes(g).blocks:
        st_ = block_structures(g.induced_subgraph(block))
        big = list(st_.necklaces) + list(st_.rigid)
        for x in big:
            for y in big:
                assert x is y or not x <= y
