import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from conftest import random_unimodular
from geography4.errors import DomainError, ParseError
from geography4.exterior import (
    BasisChange,
    KVector,
    MultiIndex,
    gl_action,
    monomial_codec,
    monomial_product,
    monomial_product_bruteforce,
    parse_kvector,
    pushforward_omega,
    rank_subset,
    subsets,
    top_coefficient,
    unrank_subset,
    wedge,
    wedge_bruteforce,
)


def mono(n, *idx, c=1):
    return KVector.from_terms(n, len(idx), {idx: c})


def kvectors(n, k, bound=3):
    return st.lists(st.integers(-bound, bound), min_size=math.comb(n, k), max_size=math.comb(n, k)).map(
        lambda cs: KVector(n, k, cs)
    )


@pytest.mark.parametrize("n", range(1, 9))
def test_rank_unrank_roundtrip(n):
    for k in range(n + 1):
        for pos, idx in enumerate(subsets(n, k)):
            assert rank_subset(n, idx) == pos
            assert unrank_subset(n, k, pos) == idx
            assert MultiIndex(n, idx).rank_position == pos


def test_lex_order_and_codec():
    assert subsets(4, 2) == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
    assert monomial_codec(4, 2, (2, 4)) == 4
    assert monomial_codec(4, 2, 4) == (2, 4)
    assert rank_subset(16, tuple(range(9, 17))) == math.comb(16, 8) - 1


def test_rank_rejects_bad_input():
    with pytest.raises(DomainError):
        rank_subset(4, (2, 1))
    with pytest.raises(DomainError):
        rank_subset(4, (1, 5))
    with pytest.raises(DomainError):
        subsets(17, 2)


def test_sign_rule_example():
    assert wedge(mono(4, 1, 3), mono(4, 2, 4)) == mono(4, 1, 2, 3, 4, c=-1)


def test_cube_of_canonical_class():
    w = KVector.from_terms(6, 2, {(1, 2): 1, (3, 4): 1, (5, 6): 1})
    assert top_coefficient(w ** 3) == 6


@pytest.mark.parametrize("n", range(1, 7))
def test_monomial_product_exhaustive(n):
    full = [s for k in range(n + 1) for s in subsets(n, k)]
    for a in full:
        for b in full:
            assert monomial_product(a, b) == monomial_product_bruteforce(a, b)


@given(kvectors(5, 2), kvectors(5, 2))
def test_graded_commutativity(u, v):
    assert wedge(u, v) == wedge(v, u)


@given(kvectors(5, 1), kvectors(5, 2))
def test_odd_even_commute(u, v):
    assert wedge(u, v) == wedge(v, u)


@given(kvectors(5, 1))
def test_square_of_one_form_vanishes(u):
    assert wedge(u, u).is_zero()


@given(kvectors(6, 1), kvectors(6, 2), kvectors(6, 2))
def test_associativity(a, b, c):
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


@given(kvectors(5, 2), kvectors(5, 1), kvectors(5, 1))
def test_bilinearity(u, v, w):
    assert wedge(u, v + w) == wedge(u, v) + wedge(u, w)
    assert wedge(3 * u, v) == 3 * wedge(u, v)


@given(kvectors(6, 2), kvectors(6, 3))
def test_wedge_matches_bruteforce(u, v):
    assert wedge(u, v) == wedge_bruteforce(u, v)


def test_wedge_degree_overflow():
    with pytest.raises(DomainError):
        wedge(mono(3, 1, 2), mono(3, 2, 3))
    with pytest.raises(DomainError):
        wedge(mono(3, 1), mono(4, 1))


def test_from_terms_sorts_with_sign():
    assert KVector.from_terms(4, 2, {(3, 1): 1}) == mono(4, 1, 3, c=-1)
    with pytest.raises(DomainError):
        KVector.from_terms(4, 2, {(1, 1): 1})


def test_text_roundtrip_and_errors():
    w = KVector.from_terms(6, 2, {(1, 2): 2, (3, 4): -6})
    assert parse_kvector(w.to_text()) == w
    with pytest.raises(ParseError) as err:
        parse_kvector("n=4 k=2\n1 2 : 1\n2 1 : 3\n", "f.kv")
    assert err.value.line == 3
    with pytest.raises(ParseError) as err:
        parse_kvector("n=4 k=2\n1 2 : x\n")
    assert err.value.line == 2
    with pytest.raises(ParseError):
        parse_kvector("hello\n")


def test_basis_change_validation():
    with pytest.raises(DomainError):
        BasisChange([[2, 0], [0, 1]])
    b = BasisChange([[1, 1], [0, 1]])
    assert (b @ b.inverse()).matrix == BasisChange.identity(2).matrix


def test_gl_action_identity_and_generators():
    b = BasisChange([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    assert gl_action(b, mono(3, 1, 2)) == mono(3, 1, 2, c=-1)
    u = KVector.from_terms(4, 2, {(1, 2): 3, (2, 4): -1})
    assert gl_action(BasisChange.identity(4), u) == u


def test_gl_action_composition_rule(rng):
    # row convention: the action reverses the order of products
    for _ in range(25):
        b1, b2 = random_unimodular(5, rng), random_unimodular(5, rng)
        u = KVector(5, 2, [rng.randint(-3, 3) for _ in range(10)])
        assert gl_action(b1 @ b2, u) == gl_action(b2, gl_action(b1, u))


def test_gl_action_is_multiplicative(rng):
    for _ in range(25):
        b = random_unimodular(5, rng)
        u = KVector(5, 2, [rng.randint(-3, 3) for _ in range(10)])
        v = KVector(5, 1, [rng.randint(-3, 3) for _ in range(5)])
        assert gl_action(b, wedge(u, v)) == wedge(gl_action(b, u), gl_action(b, v))


def test_top_degree_scales_by_determinant(rng):
    for det in (1, -1):
        b = random_unimodular(4, rng, det=det)
        assert gl_action(b, mono(4, 1, 2, 3, 4)) == det * mono(4, 1, 2, 3, 4)


def test_pushforward_preserves_the_pairing(rng):
    # A_* on cap products: the pushed class pairs the images of the pulled classes
    from geography4.classes import pairing_gram
    from geography4.forms import invariants

    for _ in range(10):
        a = random_unimodular(6, rng, det=rng.choice((1, -1)))
        omega = KVector(6, 2, [rng.randint(-2, 2) for _ in range(15)])
        pushed = pushforward_omega(a, omega)
        assert invariants(pairing_gram(pushed).form) == invariants(pairing_gram(omega).form)


def test_pushforward_degree_check():
    with pytest.raises(DomainError):
        pushforward_omega(BasisChange.identity(6), mono(6, 1))


def test_exhaustive_small_ranks_against_oracle():
    for n in range(1, 6):
        for k in range(n + 1):
            for l in range(n - k + 1):
                for a in subsets(n, k):
                    for b in subsets(n, l):
                        assert wedge(mono(n, *a), mono(n, *b)) == wedge_bruteforce(mono(n, *a), mono(n, *b))


def test_random_pairs_large_rank():
    r = random.Random(7)
    for _ in range(200):
        n = r.randint(8, 12)
        k, l = r.randint(0, 4), r.randint(0, 4)
        u = KVector(n, k, [r.choice((0, 0, 0, 1, -2)) for _ in range(math.comb(n, k))])
        v = KVector(n, l, [r.choice((0, 0, 0, 1, 3)) for _ in range(math.comb(n, l))])
        assert wedge(u, v) == wedge_bruteforce(u, v)


def test_itertools_reference_for_subsets():
    for n in range(1, 7):
        for k in range(n + 1):
            assert subsets(n, k) == tuple(itertools.combinations(range(1, n + 1), k))
