import pytest
from hypothesis import given, strategies as st

from cuspkit.errors import ParseError
from cuspkit.words import cyclic_reduce, exponent_sum, format_word, free_reduce, invert, parse_word, power

letters = st.tuples(st.sampled_from(["a", "b", "c"]), st.sampled_from([1, -1]))
words = st.lists(letters, max_size=20).map(tuple)


def test_parse_and_format():
    w = parse_word("a b^-2 c^3")
    assert w == (("a", 1), ("b", -1), ("b", -1), ("c", 1), ("c", 1), ("c", 1))
    assert format_word(w) == "a*b^-2*c^3"
    assert parse_word("1") == ()
    assert format_word(()) == "1"


@pytest.mark.parametrize("bad", ["a^", "3a", "a^x", "a b^-"])
def test_parse_rejects(bad):
    with pytest.raises(ParseError):
        parse_word(bad)


@given(words)
def test_format_round_trip(w):
    assert parse_word(format_word(w)) == w


@given(words)
def test_free_reduce_is_idempotent_and_cancels_inverse(w):
    r = free_reduce(w)
    assert free_reduce(r) == r
    assert free_reduce(w + invert(w)) == ()
    assert all(not (x[0] == y[0] and x[1] == -y[1]) for x, y in zip(r, r[1:]))


@given(words)
def test_cyclic_reduce_is_conjugate(w):
    c = cyclic_reduce(w)
    assert len(c) <= len(free_reduce(w))
    if c:
        assert not (c[0][0] == c[-1][0] and c[0][1] == -c[-1][1])


@given(words, st.integers(-3, 3))
def test_exponent_sums_are_additive(w, k):
    assert exponent_sum(power(w, k), "a") == k * exponent_sum(w, "a")
