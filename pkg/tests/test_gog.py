import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cuspkit.errors import PreconditionError, UsageError
from cuspkit.gog import (
    FillingSpec,
    GogEdge,
    GraphOfGroups,
    Homomorphism,
    bass_serre_ball,
    dehn_fill_free,
    filling_subgroup,
    finite_quotient_avoiding,
    free_product_group,
    free_product_normal_form,
    fundamental_presentation,
    homomorphism_from_json,
    kernel_subgroup,
    quotient_by_vertex_subgroups,
)
from cuspkit.groups import CyclicGroup, FreeAbelianGroup, FreeGroup, PermutationGroup, TrivialGroup
from cuspkit.words import parse_word


def z2_z3():
    return GraphOfGroups({"A": CyclicGroup(2, "a"), "B": CyclicGroup(3, "b")}, [GogEdge("e", "A", "B")])


def free2():
    return GraphOfGroups({"o": TrivialGroup()}, [GogEdge("a", "o", "o"), GogEdge("b", "o", "o")])


def hnn(p, q):
    Z, C = FreeAbelianGroup(1, ["x"]), FreeAbelianGroup(1, ["c"])
    return GraphOfGroups({"v": Z}, [GogEdge("t", "v", "v", C, {"c": parse_word(f"x^{p}")}, {"c": parse_word(f"x^{q}")})])


def test_presentations():
    assert fundamental_presentation(z2_z3()).to_text() == "<a, b | a^2, b^3>"
    assert fundamental_presentation(free2()).to_text() == "<a, b | >"
    P = fundamental_presentation(hnn(1, 2))
    assert P.generators == ("x", "t")
    assert len(P.relators) == 1 and P.deficiency() == 1


def test_normal_forms():
    g = z2_z3()
    assert free_product_normal_form(g, "a a b") == [("B", "b")]
    assert free_product_normal_form(g, "b b b a b^-1 b") == [("A", "a")]
    assert free_product_normal_form(g, "a b a b^-1") == [("A", "a"), ("B", "b"), ("A", "a"), ("B", "b^-1")]
    # a b has infinite order in Z/2 * Z/3 but (ab)^k is never trivial
    G = free_product_group(g)
    assert G.order_of(G.evaluate("a b"), 60) is None


letters = st.tuples(st.sampled_from(["a", "b"]), st.sampled_from([1, -1]))


@settings(max_examples=60, deadline=None)
@given(st.lists(letters, max_size=16).map(tuple))
def test_normal_form_identity_test(w):
    # a word is trivial iff its normal form is empty; relators can be inserted freely
    g = z2_z3()
    nf = free_product_normal_form(g, w)
    padded = w[:1] + (("a", 1), ("a", 1)) + w[1:] + (("b", -1),) * 3
    assert free_product_normal_form(g, padded) == nf
    for (u, _), (v, _) in zip(nf, nf[1:]):
        assert u != v


def test_kernel_of_z2_z3_onto_z6():
    g = z2_z3()
    P = fundamental_presentation(g)
    rep = kernel_subgroup(P, homomorphism_from_json(P, {"cyclic": 6, "images": {"a": 3, "b": 2}}))
    assert rep.index == 6
    assert rep.free_rank == 2


def test_kernel_of_f2_onto_z2():
    P = fundamental_presentation(free2())
    rep = kernel_subgroup(P, homomorphism_from_json(P, {"cyclic": 2, "images": {"a": 1, "b": 0}}))
    assert (rep.index, rep.free_rank) == (2, 3)


def random_perm(n, rng):
    p = list(range(n))
    rng.shuffle(p)
    return tuple(p)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_nielsen_schreier(n, seed):
    rng = random.Random(seed)
    P = fundamental_presentation(free2())
    hom = Homomorphism(P, n, {"a": random_perm(n, rng), "b": random_perm(n, rng)})
    rep = kernel_subgroup(P, hom)
    assert rep.index == hom.image_group().order()
    assert rep.free_rank == 1 + rep.index


def cycles_perm(n, size, rng):
    """Product of disjoint ``size``-cycles covering as much of range(n) as possible."""
    pts = list(range(n))
    rng.shuffle(pts)
    p = list(range(n))
    for k in range(0, n - n % size, size):
        block = pts[k:k + size]
        for i, x in enumerate(block):
            p[x] = block[(i + 1) % size]
    return tuple(p)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 7), st.integers(0, 10**6))
def test_euler_characteristic_of_torsion_free_kernels(n, seed):
    rng = random.Random(seed)
    g = z2_z3()
    P = fundamental_presentation(g)
    hom = Homomorphism(P, n, {"a": cycles_perm(n, 2, rng), "b": cycles_perm(n, 3, rng)})
    hom.verify()
    rep = kernel_subgroup(P, hom)
    chi = Fraction(1, 2) + Fraction(1, 3) - 1
    assert rep.free_rank == 1 - rep.index * chi


def test_finite_quotient_avoiding():
    g = z2_z3()
    h = finite_quotient_avoiding(g, ["a", "b", "b^2", "a b"], seed=0)
    assert all(not h.is_trivial_on(w) for w in ["a", "b", "b^2", "a b"])
    assert h.to_json() == finite_quotient_avoiding(g, ["a", "b", "b^2", "a b"], seed=0).to_json()
    with pytest.raises(UsageError, match="identity"):
        finite_quotient_avoiding(g, ["a a"])
    with pytest.raises(PreconditionError):
        finite_quotient_avoiding(hnn(1, 1), ["x"])


def test_finite_quotient_with_stable_letters():
    g = GraphOfGroups({"A": CyclicGroup(2, "a")}, [GogEdge("t", "A", "A")])
    words = ["t^3", "t a t^-1 a", "a t^2"]
    h = finite_quotient_avoiding(g, words, seed=1)
    assert all(not h.is_trivial_on(w) for w in words)


def test_quotient_by_vertex_subgroups():
    S3 = PermutationGroup(3, {"s": [1, 0, 2], "r": [1, 2, 0]})
    g = GraphOfGroups({"A": S3, "B": CyclicGroup(2, "c")}, [GogEdge("e", "A", "B")])
    q = quotient_by_vertex_subgroups(g, {"A": ["r"]})
    assert q.vertices["A"].order() == 2
    with pytest.raises(UsageError):
        quotient_by_vertex_subgroups(g, {"A": ["s"]})


@pytest.mark.parametrize("n", [2, 3, 5])
def test_dehn_filling(n):
    filled = dehn_fill_free(FreeGroup(["a", "b"]), FillingSpec({"a": n}))
    assert filled.order("a") == n
    assert filled.order("b") is None
    sub = filling_subgroup(filled, seed=0, radius=4)
    assert sub.kernel.index == sub.homomorphism.image_group().order()
    assert sub.kernel.free_rank == 1 + sub.kernel.index


def test_filling_rejects_non_basis_peripheral():
    with pytest.raises(UsageError):
        dehn_fill_free(FreeGroup(["a", "b"]), FillingSpec({"c": 2}))
    with pytest.raises(UsageError):
        FillingSpec({"a": 0})


def test_bass_serre_biregular_tree():
    ball = bass_serre_ball(z2_z3(), 4)
    assert ball.tree.n == 1 + 2 + 4 + 4 + 8
    assert ball.local_degree == {"A": 2, "B": 3}
    inner = [v for v in ball.tree.vertices if v.count("/") < 4]
    for v in inner:
        assert ball.tree.degree(v) == ball.local_degree[ball.types[v]]


def test_bass_serre_hnn_trees():
    line = bass_serre_ball(hnn(1, 1), 3)
    assert line.tree.n == 7
    bs12 = bass_serre_ball(hnn(1, 2), 2)
    assert bs12.local_degree == {"v": 3}
    assert bs12.tree.n == 1 + 3 + 6
