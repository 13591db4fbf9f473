import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cuspkit.errors import PreconditionError
from cuspkit.graph import FiniteGraph, all_pairs_distances, cycle_graph, path_graph, random_connected_graph
from cuspkit.horoball import (
    build_horoball,
    ceil_log2,
    closed_form_matrix,
    horoball_distance_asymptotic,
    horoball_distance_closed_form,
    verify_distance_formulas,
)

graphs = st.builds(
    lambda n, p, seed: random_connected_graph(n, p, random.Random(seed)),
    st.integers(1, 20),
    st.sampled_from([0.0, 0.1, 0.3]),
    st.integers(0, 10**6),
)


def test_ceil_log2():
    assert [ceil_log2(d) for d in (0, 1, 2, 3, 4, 5, 8, 9)] == [0, 0, 1, 2, 2, 3, 3, 4]


def test_edges_of_small_horoball():
    hb = build_horoball(path_graph(3), 1)
    # level 0: path edges; level 1: pairs at base distance <= 2; plus 3 vertical edges
    assert hb.graph.m == 2 + 3 + 3


@pytest.mark.parametrize(
    "m, n, d, expected",
    [
        # frozen from breadth-first search in a depth-6 horoball over P_9
        (0, 0, 8, 6),
        (2, 1, 5, 3),
        (4, 0, 0, 4),
        (0, 0, 1, 1),
        (3, 3, 8, 1),
        (1, 1, 3, 2),
    ],
)
def test_frozen_distances_over_p9(m, n, d, expected):
    hb = build_horoball(path_graph(9), 6)
    u, v = ("0", m), (str(d), n)
    assert int(hb.distances(u, v)) == expected
    assert horoball_distance_closed_form("0", m, str(d), n, d) == expected


def test_p9_depth6_report():
    rep = verify_distance_formulas(path_graph(9), 6)
    assert rep.mismatches == 0
    assert rep.pairs_checked == 63 * 62 // 2


def test_preconditions():
    with pytest.raises(PreconditionError):
        build_horoball(FiniteGraph(["a", "b"], []), 2)
    with pytest.raises(PreconditionError, match="too shallow"):
        verify_distance_formulas(path_graph(17), 2)


@settings(max_examples=40, deadline=None)
@given(graphs)
def test_closed_form_equals_bfs(g):
    depth = ceil_log2(int(all_pairs_distances(g).diameter())) + 1
    hb = build_horoball(g, depth)
    assert np.array_equal(hb.distances.matrix, closed_form_matrix(hb.base_distances.matrix, depth))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 200))
def test_asymptotic_form_is_close(m, n, d):
    y = 0 if d == 0 else 1
    exact = horoball_distance_closed_form(0, m, y, n, d)
    assert abs(exact - horoball_distance_asymptotic(0, m, y, n, d)) <= 6


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 300), st.integers(0, 10))
def test_level_distance_monotone_in_height(d, m):
    # going up never lengthens a same-level distance, and one step up changes it by at most 2
    a = horoball_distance_closed_form(0, m, 1, m, d)
    b = horoball_distance_closed_form(0, m + 1, 1, m + 1, d)
    assert b <= a <= b + 2


def test_cycle_horoball_tops_out():
    hb = build_horoball(cycle_graph(16), 5)
    top = hb.level(5)
    # at height >= log2(diameter) every level is a complete graph
    assert top.m == top.n * (top.n - 1) // 2
