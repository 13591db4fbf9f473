from fractions import Fraction

import pytest

from cuspkit.cusped import build_cusped
from cuspkit.errors import PreconditionError, UsageError
from cuspkit.graph import all_pairs_distances, path_graph
from cuspkit.groups import FreeAbelianGroup, FreeGroup, cayley_ball
from cuspkit.horoball import build_horoball
from cuspkit.qi import (
    HeightSchedule,
    builtin_map,
    embed_in_half_space,
    extend_to_cusped,
    extend_to_horoball,
    measure_qi,
    verify_certificate,
)

Z = FreeAbelianGroup(1)


def segment_map(name, k, r_src, r_dst):
    X, Y = cayley_ball(Z, r_src), cayley_ball(Z, r_dst)
    f = builtin_map(name, Z, k)
    return X, Y, {v: Y.vertex(f(X.element(v))) for v in X.graph.vertices}


@pytest.mark.parametrize(
    "name, k, lam, c",
    [("identity", 1, 1, 0), ("shift", 5, 1, 0), ("scale", 2, 2, 0)],
)
def test_base_constants(name, k, lam, c):
    X, Y, f = segment_map(name, k, 5, 10)
    cert = measure_qi(f, all_pairs_distances(X.graph), all_pairs_distances(Y.graph))
    assert (cert.lam, cert.c) == (lam, c)
    assert cert.violations == 0


def test_collapsing_map_needs_additive_constant():
    X = path_graph(5)
    f = {v: "0" for v in X.vertices}
    cert = measure_qi(f, all_pairs_distances(X), all_pairs_distances(X))
    # d_Y = 0, so c >= d_X / lambda for all pairs; best lambda + c on the grid
    assert cert.lam + cert.c == min(l + Fraction(4) / l for l in (Fraction(k, 10) for k in range(10, 81)))
    assert cert.s == 4


def test_certificate_reverification_catches_bad_constants():
    X = path_graph(6)
    D = all_pairs_distances(X)
    f = {v: v for v in X.vertices}
    assert verify_certificate(f, D, D, Fraction(1), Fraction(0)) == 0
    g = {v: str(min(int(v) * 2, 5)) for v in X.vertices}
    assert verify_certificate(g, D, D, Fraction(1), Fraction(0)) > 0


@pytest.mark.parametrize("name, k", [("identity", 1), ("shift", 5), ("scale", 2)])
def test_horoball_extension_keeps_lambda(name, k):
    X, Y, f = segment_map(name, k, 5, 10)
    base = measure_qi(f, all_pairs_distances(X.graph), all_pairs_distances(Y.graph))
    ext = extend_to_horoball(f, build_horoball(X.graph, 5), build_horoball(Y.graph, 5)).certificate
    assert ext.lam == base.lam
    assert ext.c <= base.c + 8
    assert ext.violations == 0


def test_extension_preconditions():
    X, Y, f = segment_map("identity", 1, 3, 3)
    with pytest.raises(PreconditionError):
        extend_to_horoball(f, build_horoball(X.graph, 3), build_horoball(Y.graph, 2))
    with pytest.raises(UsageError):
        builtin_map("shift", FreeGroup(2), 1)
    with pytest.raises(UsageError):
        builtin_map("swap", Z)


def test_cusped_extension_of_shift():
    G = build_cusped(Z, [["x"]], 8, 4)
    H = build_cusped(Z, [["x"]], 14, 4)
    cert = extend_to_cusped(builtin_map("shift", Z, 5), G, H).certificate
    assert (cert.lam, cert.c) == (1, 0)


def test_cusped_extension_of_swap():
    Z2 = FreeAbelianGroup(2)
    G = build_cusped(Z2, [["x", "y"]], 5, 3)
    cert = extend_to_cusped(builtin_map("swap", Z2), G, G).certificate
    assert cert.lam == 1 and cert.violations == 0


@pytest.mark.parametrize("schedule", ["constant", "alternating"])
@pytest.mark.parametrize("depth", [1, 3, 6])
def test_half_space_gap(schedule, depth):
    sched = HeightSchedule.constant(depth) if schedule == "constant" else HeightSchedule.alternating(depth, 2.0)
    H = build_horoball(path_graph(9), depth)
    pts, rep = embed_in_half_space({str(i): [float(i)] for i in range(9)}, sched, H)
    assert rep.max_gap_vertical <= 3 and rep.max_gap_level <= 3
    assert pts[("0", depth)][1] == sched.values[depth] * 2**depth


def test_schedule_validation():
    with pytest.raises(UsageError):
        HeightSchedule((1.0, 3.0), 2.0)
    with pytest.raises(UsageError):
        HeightSchedule((1.0,), 0.5)
