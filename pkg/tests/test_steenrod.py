from __future__ import annotations

from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from sqalg.errors import ParseError
from sqalg.steenrod import (
    SteenrodElement,
    Sq,
    a1_basis,
    a1_contains,
    a1_coordinates,
    a1_top,
    a1_words,
    adem_reduce,
    adem_relation,
    admissible_basis,
    antipode,
    binom2,
    coproduct,
    counit,
    excess,
    format_element,
    generator_relations,
    in_generators,
    is_admissible,
    multiply,
    parse_element,
)

words = st.lists(st.integers(1, 6), min_size=0, max_size=4).map(tuple)


def compositions(n):
    if n == 0:
        yield ()
        return
    for r in range(1, n + 1):
        for rest in compositions(n - r):
            yield (r,) + rest


@lru_cache(maxsize=None)
def milnor_count(n: int, parts: tuple = (1, 3, 7, 15, 31, 63)) -> int:
    # partitions of n into parts 2^k - 1: the size of the Milnor basis
    if n == 0:
        return 1
    if not parts or n < 0:
        return 0
    return milnor_count(n - parts[-1], parts) + milnor_count(n, parts[:-1])


def test_binomials_mod_two_match_lucas():
    from math import comb

    for n in range(20):
        for k in range(n + 1):
            assert binom2(n, k) == comb(n, k) % 2


@pytest.mark.parametrize(
    "word, expected",
    [
        ((1, 2), "Sq3"),
        ((1, 1), "0"),
        ((2, 2), "Sq3 Sq1"),
        ((2, 3), "Sq5 + Sq4 Sq1"),
        ((3, 2), "0"),
        ((1, 3), "0"),
        ((2, 4), "Sq6 + Sq5 Sq1"),
        ((4, 4), "Sq7 Sq1 + Sq6 Sq2"),
    ],
)
def test_adem_examples(word, expected):
    assert format_element(adem_reduce(word)) == expected


def test_adem_relation_rejects_admissible_pairs():
    with pytest.raises(ValueError):
        adem_relation(4, 2)


def test_admissibility_and_excess():
    assert is_admissible((4, 2, 1))
    assert not is_admissible((1, 2))
    assert excess((4, 2, 1)) == 1


@pytest.mark.parametrize("n", range(0, 25))
def test_basis_size_matches_milnor_count(n):
    assert len(admissible_basis(n)) == milnor_count(n)


def test_detectors_are_faithful_through_degree_12():
    for n in range(1, 13):
        sigs = [tuple(O.apply_word(m, d) for d in O.DETECTORS) for m in admissible_basis(n)]
        assert O._independent(sigs), n


@pytest.mark.parametrize("n", range(1, 13))
def test_reduction_agrees_with_polynomial_action(n):
    for w in compositions(n):
        red = adem_reduce(w)
        for d in O.DETECTORS:
            assert O.apply_word(w, d) == O.apply_sum(red.terms, d), w


@settings(max_examples=200)
@given(words)
def test_reduction_orders_agree(w):
    left, right = adem_reduce(w, "left"), adem_reduce(w, "right")
    assert left == right
    assert all(is_admissible(m) for m in left.terms)


@given(words, words, words)
def test_multiplication_is_associative(a, b, c):
    x, y, z = adem_reduce(a), adem_reduce(b), adem_reduce(c)
    assert multiply(multiply(x, y), z) == multiply(x, multiply(y, z))


def test_antipode_values():
    assert format_element(antipode(Sq(1))) == "Sq1"
    assert format_element(antipode(Sq(2))) == "Sq2"
    assert format_element(antipode(Sq(3))) == "Sq2 Sq1"
    assert format_element(antipode(Sq(4))) == "Sq4 + Sq3 Sq1"


@given(words, words)
def test_antipode_reverses_products(a, b):
    x, y = adem_reduce(a), adem_reduce(b)
    assert antipode(multiply(x, y)) == multiply(antipode(y), antipode(x))


@given(words)
def test_antipode_is_an_involution(w):
    x = adem_reduce(w)
    assert antipode(antipode(x)) == x


@given(words, words)
def test_coproduct_is_multiplicative(a, b):
    x, y = adem_reduce(a), adem_reduce(b)
    assert coproduct(multiply(x, y)) == coproduct(x) * coproduct(y)


@settings(max_examples=40)
@given(words)
def test_coproduct_is_coassociative_and_counital(w):
    x = adem_reduce(w)
    psi = coproduct(x)
    left, right = set(), set()
    for a, b in psi.terms:
        for a1, a2 in coproduct(SteenrodElement(frozenset((a,)))).terms:
            left ^= {(a1, a2, b)}
        for b1, b2 in coproduct(SteenrodElement(frozenset((b,)))).terms:
            right ^= {(a, b1, b2)}
    assert left == right
    # (eps ⊗ 1) psi = x
    acc = SteenrodElement.zero()
    for a, b in psi.terms:
        if counit(SteenrodElement(frozenset((a,)))):
            acc = acc + SteenrodElement(frozenset((b,)))
    assert acc == x


def test_a1_structure():
    basis = a1_basis()
    assert len(basis) == 8
    assert [b.degree for b in basis] == [0, 1, 2, 3, 3, 4, 5, 6]
    assert a1_top() == Sq(5, 1)
    assert format_element(a1_top()) == "Sq5 Sq1"
    assert multiply(Sq(1), a1_top()).is_zero() and multiply(Sq(2), a1_top()).is_zero()
    assert a1_contains(Sq(3)) and a1_contains(Sq(5) + Sq(4, 1))
    assert not a1_contains(Sq(4))
    for b, w in zip(basis, a1_words()):
        assert adem_reduce(w) == b
    assert a1_coordinates(Sq(3)) is not None


def test_generator_words_and_relations():
    assert in_generators(Sq(3), (1, 2)) is not None
    assert in_generators(Sq(4), (1, 2)) is None
    assert generator_relations(2, (1, 2)) == (((1, 1),),)


@given(words)
def test_text_round_trip(w):
    x = adem_reduce(w)
    assert parse_element(format_element(x)) == x


def test_parse_accepts_caret_and_constants():
    assert parse_element("Sq^2 Sq^2") == Sq(3, 1)
    assert parse_element("1") == SteenrodElement.unit()
    assert parse_element("0").is_zero()


@pytest.mark.parametrize("text, column", [("Sq1 + + Sq2", 7), ("Sq1 Sqx", 5), ("Sq2 +", 6)])
def test_parse_errors_carry_columns(text, column):
    with pytest.raises(ParseError) as e:
        parse_element(text)
    assert e.value.column == column
