import pytest
from hypothesis import given, settings, strategies as st

from cuspkit.errors import ParseError, PreconditionError
from cuspkit.groups import (
    CyclicGroup,
    DirectProduct,
    FreeAbelianGroup,
    FreeGroup,
    FreeProduct,
    PermutationGroup,
    cayley_ball,
    coset_representatives,
    enumerate_elements,
    group_from_config,
)
from cuspkit.words import free_reduce, invert

S3 = PermutationGroup(3, {"s": [1, 0, 2], "r": [1, 2, 0]})

letters = st.tuples(st.sampled_from(["a", "b"]), st.sampled_from([1, -1]))
words = st.lists(letters, max_size=12).map(tuple)


def test_free_group_ball_spheres():
    # 4 * 3^(k-1) reduced words of length k
    assert cayley_ball(FreeGroup(2), 3).sphere_sizes() == [1, 4, 12, 36]


@pytest.mark.parametrize("r", [1, 2, 5])
def test_z2_ball_size(r):
    ball = cayley_ball(FreeAbelianGroup(2), r)
    assert ball.graph.n == 2 * r * r + 2 * r + 1


def test_permutation_group_orders():
    assert S3.order() == 6
    assert CyclicGroup(5).order_of(CyclicGroup(5).evaluate("a^2")) == 5
    assert len(enumerate_elements(DirectProduct([CyclicGroup(2, "a"), CyclicGroup(3, "b")]))) == 6


def test_cosets_of_cyclic_subgroup_in_free_group():
    F = FreeGroup(2)
    ball = cayley_ball(F, 1)
    cs = coset_representatives(F, ["a"], ball)
    cells = {frozenset(c) for c in cs.cells}
    assert cells == {frozenset({"1", "a", "a^-1"}), frozenset({"b"}), frozenset({"b^-1"})}
    assert cs.exact


def test_coset_transversals():
    Z2 = FreeAbelianGroup(2)
    reps = Z2.left_coset_transversal([(2, 0), (0, 3)])
    assert len(reps) == 6
    F = FreeGroup(2)
    assert len(F.left_coset_transversal([F.evaluate("a^2"), F.evaluate("b"), F.evaluate("a b a^-1")])) == 2
    with pytest.raises(PreconditionError):
        F.left_coset_transversal([F.evaluate("a")])


def test_free_group_membership():
    F = FreeGroup(2)
    H = [F.evaluate("a^2"), F.evaluate("b a b^-1")]
    assert F.is_member(H, F.evaluate("b a^3 b^-1 a^-2"))
    assert not F.is_member(H, F.evaluate("a"))


def test_group_config():
    G = group_from_config({"kind": "product", "type": "free", "factors": [{"kind": "cyclic", "n": 2, "generator": "a"}, {"kind": "cyclic", "n": 3, "generator": "b"}]})
    assert isinstance(G, FreeProduct)
    with pytest.raises(ParseError):
        group_from_config({"kind": "heisenberg"})


@settings(max_examples=80, deadline=None)
@given(words, words)
def test_free_product_axioms(u, v):
    G = FreeProduct([CyclicGroup(2, "a"), CyclicGroup(3, "b")])
    assert G.is_identity(G.evaluate(u + invert(u)))
    assert G.mul(G.evaluate(u), G.evaluate(v)) == G.evaluate(u + v)
    # the normal form's word evaluates back to the same element
    g = G.evaluate(u)
    assert G.evaluate(G.to_word(g)) == g


@settings(max_examples=80, deadline=None)
@given(words)
def test_free_group_normal_form_is_free_reduction(u):
    F = FreeGroup(2)
    assert F.to_word(F.evaluate(u)) == free_reduce(u)
