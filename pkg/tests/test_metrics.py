import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cuspkit.errors import PreconditionError, UsageError
from cuspkit.graph import all_pairs_distances, cycle_graph, grid_graph, path_graph, random_connected_graph, star_graph
from cuspkit.groups import FreeGroup, cayley_ball
from cuspkit.metrics import (
    DegenerateConfiguration,
    cross_ratio,
    delta_four_point,
    four_point_value,
    gromov_product,
    quasi_mobius_distortion,
    upper_half_space_distance,
    visual_values,
)


def brute_delta(g):
    D = all_pairs_distances(g).matrix
    best = 0
    for x, y, z, w in itertools.combinations(range(g.n), 4):
        s = sorted([D[x, y] + D[z, w], D[x, z] + D[y, w], D[x, w] + D[y, z]])
        best = max(best, s[2] - s[1])
    return Fraction(int(best), 2)


graphs = st.builds(
    lambda n, p, seed: random_connected_graph(n, p, random.Random(seed)),
    st.integers(1, 13),
    st.sampled_from([0.0, 0.15, 0.3, 0.6]),
    st.integers(0, 10**6),
)
trees = st.builds(
    lambda n, seed: random_connected_graph(n, 0.0, random.Random(seed)),
    st.integers(1, 40),
    st.integers(0, 10**6),
)


@pytest.mark.parametrize("n, expected", [(3, 0), (4, 1), (5, Fraction(1, 2)), (6, 1), (8, 2), (9, Fraction(3, 2))])
def test_cycle_deltas(n, expected):
    assert delta_four_point(cycle_graph(n)).delta == expected == brute_delta(cycle_graph(n))


def test_free_group_balls_are_trees():
    for r in (2, 3):
        assert delta_four_point(cayley_ball(FreeGroup(2), r).graph).delta == 0


def test_grid_delta_frozen():
    # 4x4 grid; exact value cross-checked against the all-quadruples scan
    g = grid_graph(4, 4)
    assert delta_four_point(g).delta == brute_delta(g) == 3


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_exhaustive_is_exact(g):
    rep = delta_four_point(g)
    assert rep.delta == brute_delta(g)
    if rep.witness is not None:
        D = all_pairs_distances(g)
        x, y, z, w = rep.witness
        s = sorted([D(x, y) + D(z, w), D(x, z) + D(y, w), D(x, w) + D(y, z)])
        assert Fraction(s[2] - s[1], 2) == rep.delta


@settings(max_examples=30, deadline=None)
@given(trees)
def test_trees_have_delta_zero(g):
    assert delta_four_point(g).delta == 0


@settings(max_examples=30, deadline=None)
@given(graphs, st.integers(0, 1000))
def test_sampled_is_a_lower_bound_and_reproducible(g, seed):
    exact = delta_four_point(g).delta
    a = delta_four_point(g, mode="sampled", seed=seed, samples=500)
    b = delta_four_point(g, mode="sampled", seed=seed, samples=500)
    assert a.delta <= exact
    assert a.to_json() == b.to_json()


def test_delta_errors():
    with pytest.raises(UsageError, match="seed"):
        delta_four_point(cycle_graph(5), mode="sampled")
    with pytest.raises(PreconditionError):
        delta_four_point(path_graph(30), max_vertices=10)
    with pytest.raises(UsageError):
        delta_four_point(cycle_graph(5), mode="bogus")


def test_gromov_product_and_pointwise_value():
    D = all_pairs_distances(cycle_graph(4))
    assert gromov_product(D, "0", "2", "1") == 0
    assert gromov_product(D, "1", "3", "0") == 0
    assert gromov_product(D, "1", "2", "0") == 1
    assert four_point_value(D, "1", "3", "2", "0") == 1


def test_cross_ratio_exact_and_degenerate():
    D = all_pairs_distances(path_graph(5))
    assert cross_ratio(D, "0", "1", "3", "4") == Fraction(1 * 1, 3 * 3)
    with pytest.raises(DegenerateConfiguration):
        cross_ratio(D, "0", "1", "0", "4")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 20), min_size=6, max_size=6), st.integers(1, 9))
def test_cross_ratio_is_scale_invariant(ds, k):
    names = ["a", "b", "c", "d"]
    pairs = list(itertools.combinations(names, 2))
    table = dict(zip(pairs, ds))

    def d(u, v, s=1):
        return 0 if u == v else s * table[tuple(sorted((u, v)))]

    assert cross_ratio(d, *names) == cross_ratio(lambda u, v: d(u, v, k), *names)


def test_visual_values():
    D = all_pairs_distances(star_graph(3))
    vis = visual_values(D, "c", ["0", "1"], 1.0)
    assert vis.value("0", "1") == pytest.approx(1.0)
    assert vis.value("0", "0") == pytest.approx(math.exp(-1.0))
    with pytest.raises(UsageError):
        visual_values(D, "c", ["0"], 0.0)


def test_quasi_mobius_identity():
    D = all_pairs_distances(cycle_graph(6))
    rep = quasi_mobius_distortion({v: v for v in cycle_graph(6).vertices}, D, D)
    assert rep.max_ratio == pytest.approx(1.0)
    assert all(t == s for t, s in rep.table)


points = st.tuples(st.floats(-50, 50), st.floats(0.01, 100))


@settings(max_examples=100)
@given(points, points, points)
def test_half_space_triangle_inequality(p, q, r):
    d = lambda a, b: upper_half_space_distance([a[0]], a[1], [b[0]], b[1])  # noqa: E731
    assert d(p, r) <= d(p, q) + d(q, r) + 1e-9
    assert d(p, q) == pytest.approx(d(q, p), abs=1e-12)


def test_half_space_closed_forms():
    assert upper_half_space_distance([0.0], 1.0, [0.0], 8.0) == pytest.approx(math.log(8))
    assert upper_half_space_distance([0.0], 1.0, [1.0], 1.0) == pytest.approx(math.acosh(1.5))
    with pytest.raises(UsageError):
        upper_half_space_distance([0.0], 0.0, [0.0], 1.0)
