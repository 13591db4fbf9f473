import itertools

import numpy as np
import pytest

from cuspkit.cusped import build_cusped, vertex_name
from cuspkit.errors import UsageError
from cuspkit.groups import FreeAbelianGroup, FreeGroup
from cuspkit.metrics import delta_four_point


def brute_delta(D):
    best = 0
    for q in itertools.combinations(range(len(D)), 4):
        x, y, z, w = q
        s = sorted([D[x, y] + D[z, w], D[x, z] + D[y, w], D[x, w] + D[y, z]])
        best = max(best, s[2] - s[1])
    return best / 2


def test_z_with_full_peripheral():
    Z = FreeAbelianGroup(1)
    sp = build_cusped(Z, [["x"]], 3, 2)
    assert sp.cayley.graph.n == 7
    assert sp.graph.n == 7 + 2 * 7
    assert len(sp.pieces) == 1
    # height 0 of the horoball is the Cayley vertex itself
    assert sp.horoball_vertex(0, "0", 0) == ("cay", "0")
    v = sp.horoball_vertex(0, "3", 2)
    assert vertex_name(v) == "P0[0]:3@2"
    # climb one level, cross ceil(6/2) = 3 edges, come down
    assert sp.distance(("cay", "-3"), ("cay", "3")) == 5


def test_rim_marking():
    sp = build_cusped(FreeAbelianGroup(1), [["x"]], 4, 1)
    rim = {sp.base_label(v) for v in sp.graph.vertices if sp.is_rim(v)}
    assert rim == {"2", "-2", "3", "-3", "4", "-4"}


def test_cells_of_z2_by_x():
    sp = build_cusped(FreeAbelianGroup(2), [["x"]], 3, 1)
    # one cell per row y = -3..3
    assert [len(c.cells) for c in sp.cosets] == [7]
    assert sp.split_cells == 0


def test_free_group_cusped_delta_matches_brute_force():
    sp = build_cusped(FreeGroup(2), [["a"]], 2, 2)
    rep = delta_four_point(sp.graph, distances=sp.distances)
    assert float(rep.delta) == brute_delta(sp.distances.matrix)


def test_z2_cusped_delta_frozen():
    # exact four-point constant of the single-horoball cusped space over Z^2 balls, depth 4
    for r in (4, 6):
        sp = build_cusped(FreeAbelianGroup(2), [["x", "y"]], r, 4)
        assert delta_four_point(sp.graph, max_vertices=sp.graph.n, distances=sp.distances).delta == 2


def test_bad_arguments():
    with pytest.raises(UsageError):
        build_cusped(FreeAbelianGroup(1), [["x"]], -1, 2)
    with pytest.raises(UsageError):
        build_cusped(FreeAbelianGroup(1), [["q"]], 2, 2)
