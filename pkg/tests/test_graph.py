import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from cuspkit.errors import ParseError, PreconditionError
from cuspkit.graph import (
    FiniteGraph,
    all_pairs_distances,
    articulation_points,
    biconnected_components,
    block_chain,
    graph_from_json,
    graph_from_spec,
    graph_to_dot,
    graph_to_json,
    loads_json,
    path_graph,
    random_connected_graph,
    theta_graph,
    wheel_graph,
)


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(g.edges)
    return h


graphs = st.builds(
    lambda n, p, seed: random_connected_graph(n, p, random.Random(seed)),
    st.integers(1, 14),
    st.sampled_from([0.0, 0.1, 0.3, 0.6]),
    st.integers(0, 10**6),
)


def test_malformed_json_reports_position():
    with pytest.raises(ParseError, match="line 1 column"):
        loads_json('{"vertices": [1, 2,', "g.json")


def test_json_round_trip():
    g = theta_graph(3, 2)
    assert graph_from_json(graph_to_json(g)) == g


def test_bad_graph_json():
    with pytest.raises(ParseError):
        graph_from_json({"vertices": ["a"]})
    with pytest.raises(ParseError):
        graph_from_json({"vertices": ["a", "b"], "edges": [["a"]]})


def test_families():
    assert graph_from_spec({"family": "wheel", "k": 5}) == wheel_graph(5)
    assert block_chain([3, 2, 4]).n == 1 + 2 + 1 + 3
    with pytest.raises(ParseError):
        graph_from_spec({"family": "moebius"})


def test_dot_output():
    dot = graph_to_dot(path_graph(2), "p")
    assert dot.startswith('graph "p" {') and '"0" -- "1";' in dot


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_distances_match_networkx(g):
    D = all_pairs_distances(g)
    ref = dict(nx.all_pairs_shortest_path_length(to_nx(g)))
    for u in g.vertices:
        for v in g.vertices:
            assert D(u, v) == ref[u][v]


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_blocks_and_cut_points_match_networkx(g):
    h = to_nx(g)
    assert set(articulation_points(g)) == set(nx.articulation_points(h))
    # an isolated vertex is its own (singleton) block here; networkx lists no block for it
    ours = {frozenset(b) for b in biconnected_components(g) if len(b) > 1}
    theirs = {frozenset(b) for b in nx.biconnected_components(h)}
    assert ours == theirs


def test_articulation_points_need_connected_graph():
    g = FiniteGraph(["a", "b", "c"], [("a", "b")])
    with pytest.raises(PreconditionError):
        articulation_points(g)
