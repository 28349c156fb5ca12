import math
import random

import pytest
from hypothesis import given, strategies as st

from conftest import random_unimodular
from geography4.classes import (
    ISOTROPIC_FAMILIES,
    PRINTED_V1,
    NormalTriple,
    canonical_class,
    content_via_quotient,
    family_vectors,
    gcd_lcm_substitution,
    gram_by_wedge,
    induced_on_squares,
    is_isotropic,
    normal_form_5,
    normal_form_6,
    pairing_gram,
    pairing_invariants,
    triple_invariants,
)
from geography4.errors import DomainError, ParseError
from geography4.exterior import KVector, gl_action, rank_subset
from geography4.forms import rational_isotropic_dim, witt_isotropic_dim_mod_p

two_forms = st.lists(st.integers(-9, 9), min_size=15, max_size=15).map(lambda cs: KVector(6, 2, cs))


def entry(form, a, b):
    return form.gram[rank_subset(6, a)][rank_subset(6, b)]


def test_pairing_sign_rule():
    f = pairing_gram(canonical_class(1, 1, 1)).form
    assert entry(f, (1, 2), (3, 4)) == 1
    assert entry(f, (1, 3), (2, 4)) == -1


@given(two_forms)
def test_table_gram_matches_wedge_oracle(omega):
    assert pairing_gram(omega).form.gram == gram_by_wedge(omega)


@pytest.mark.parametrize("n", [4, 5, 7, 8])
def test_table_gram_other_ranks(n):
    r = random.Random(n)
    k = n - 4
    omega = KVector(n, k, [r.randint(-2, 2) for _ in range(math.comb(n, k))])
    assert pairing_gram(omega).form.gram == gram_by_wedge(omega)


def test_pairing_degree_check():
    with pytest.raises(DomainError):
        pairing_gram(KVector(6, 1, [0] * 6))


def test_pairing_of_canonical_111():
    # frozen from exact diagonalization (see oracle in test_acceptance)
    inv = pairing_invariants(canonical_class(1, 1, 1))
    assert (inv.rank, inv.b_plus, inv.b_minus, inv.signature) == (15, 7, 8, -1)
    assert inv.parity == "even" and inv.determinant == 2 and inv.torsion == (2,)
    assert rational_isotropic_dim(inv) == 7


@pytest.mark.parametrize(
    "triple,expected",
    [((1, 0, 0), (6, 3, 3, 12)), ((1, 1, 0), (10, 5, 5, 10)), ((0, 0, 0), (0, 0, 0, 15))],
)
def test_pairing_rank_and_isotropic(triple, expected):
    inv = pairing_invariants(canonical_class(*triple))
    assert (inv.rank, inv.b_plus, inv.b_minus, rational_isotropic_dim(inv)) == expected


def test_reversed_class_flips_signature():
    inv = pairing_invariants(canonical_class(1, 1, -1))
    assert (inv.b_plus, inv.b_minus) == (8, 7)


def test_isotropic_families():
    for triple in [(1, 1, 1), (2, 6, 30), (1, 2, -4), (0, 0, 0)]:
        assert is_isotropic(pairing_gram(canonical_class(*triple)).form, family_vectors("V1"))
    for triple in [(1, 1, 0), (3, 9, 0)]:
        assert is_isotropic(pairing_gram(canonical_class(*triple)).form, family_vectors("V2"))
    assert is_isotropic(pairing_gram(canonical_class(5, 0, 0)).form, family_vectors("V3"))
    # reductions mod a prime dividing the later coefficients
    assert is_isotropic(pairing_gram(canonical_class(1, 1, 3)).form, family_vectors("V2"), modulus=3)
    assert is_isotropic(pairing_gram(canonical_class(1, 5, 5)).form, family_vectors("V3"), modulus=5)
    assert not is_isotropic(pairing_gram(canonical_class(1, 1, 3)).form, family_vectors("V2"))


def test_printed_v1_has_one_bad_pair():
    f = pairing_gram(canonical_class(1, 1, 1)).form
    vecs = family_vectors(PRINTED_V1)
    bad = [(PRINTED_V1[i], PRINTED_V1[j]) for i in range(7) for j in range(i, 7) if f.pair(vecs[i], vecs[j])]
    assert bad == [((3, 6), (4, 5))]
    assert len(ISOTROPIC_FAMILIES["V1"]) == 7


def test_modp_witt_dims_for_bounds():
    # V3 mod p (b > 1) and V2 mod p (c > 1) give 12- and 10-dimensional isotropic spaces
    assert witt_isotropic_dim_mod_p(pairing_gram(canonical_class(1, 2, 2)).form, 2) == 12
    assert witt_isotropic_dim_mod_p(pairing_gram(canonical_class(1, 1, 3)).form, 3) == 10
    assert witt_isotropic_dim_mod_p(pairing_gram(canonical_class(2, 2, 2)).form, 2) == 15


def test_substitution_example():
    w = KVector.from_terms(4, 2, {(1, 2): 2, (3, 4): 3})
    assert gl_action(gcd_lcm_substitution(2, 3, -1, 1), w) == KVector.from_terms(4, 2, {(1, 2): 1, (3, 4): 6})
    with pytest.raises(DomainError):
        gcd_lcm_substitution(2, 4, 1, 0)


@pytest.mark.parametrize(
    "terms,triple",
    [
        ({(1, 2): 2, (3, 4): 3}, (1, 6, 0)),
        ({(1, 2): 1, (3, 4): 1, (5, 6): 1}, (1, 1, 1)),
        ({(1, 2): 1, (1, 3): 1}, (1, 0, 0)),
        ({}, (0, 0, 0)),
        ({(1, 2): 4, (3, 4): 6, (5, 6): 10}, (2, 2, 60)),
        ({(1, 2): 1, (3, 4): 1, (5, 6): -1}, (1, 1, -1)),
    ],
)
def test_normal_form_examples(terms, triple):
    omega = KVector.from_terms(6, 2, terms)
    nf = normal_form_6(omega)
    assert nf.triple == triple
    assert nf.witness.determinant == 1
    assert gl_action(nf.witness, omega) == nf.canonical()


@given(two_forms, st.integers(0, 10**6))
def test_normal_form_invariance_and_idempotence(omega, seed):
    b = random_unimodular(6, random.Random(seed))
    nf = normal_form_6(omega)
    assert normal_form_6(gl_action(b, omega)).triple == nf.triple
    assert normal_form_6(nf.canonical()).triple == nf.triple
    a, bb, c = nf.triple
    t = triple_invariants(omega)
    assert (t.content, t.half_square, t.sixth_cube * t.sign) == (a, a * bb, a * bb * c)


@given(two_forms)
def test_content_two_ways(omega):
    assert content_via_quotient(omega) == omega.content


def test_determinant_minus_one_changes_sign_of_c():
    r = random.Random(1)
    omega = canonical_class(1, 2, 6)
    b = random_unimodular(6, r, det=-1)
    assert normal_form_6(gl_action(b, omega)).triple == (1, 2, -6)


def test_normal_form_text_roundtrip():
    nf = normal_form_6(KVector.from_terms(6, 2, {(1, 2): 2, (3, 4): 3}))
    back = NormalTriple.from_text(nf.to_text())
    assert back == nf
    with pytest.raises(ParseError):
        NormalTriple.from_text("1 2\n")


def test_normal_form_5():
    r = random.Random(5)
    for k in (0, 1, 3, -4):
        omega = KVector.from_terms(5, 1, {(1,): k})
        b = random_unimodular(5, r)
        got, witness = normal_form_5(gl_action(b, omega))
        assert got == abs(k)
        assert gl_action(witness, gl_action(b, omega)) == KVector.from_terms(5, 1, {(1,): abs(k)})


def test_normal_form_domain():
    with pytest.raises(DomainError):
        normal_form_6(KVector(5, 2, [0] * 10))


def test_induced_on_squares_transports_the_pairing():
    # B* is a ring map, so phi_{B*w}(B*u, B*v) = det(B) phi_w(u, v)
    from geography4 import linalg

    r = random.Random(2)
    for det in (1, -1, 1, -1):
        b = random_unimodular(6, r, det=det)
        omega = KVector(6, 2, [r.randint(-3, 3) for _ in range(15)])
        s = induced_on_squares(b)
        g = pairing_gram(omega).form.gram
        g2 = pairing_gram(gl_action(b, omega)).form.gram
        moved = linalg.matmul(linalg.matmul(s, g2), linalg.transpose(s))
        assert [list(row) for row in moved] == [[det * x for x in row] for row in g]
