import itertools
import random

import pytest
from hypothesis import given, strategies as st

from conftest import random_unimodular
from geography4.errors import DomainError, InternalInconsistencyError, NotSupportedError, ParseError
from geography4.forms import (
    FormInvariants,
    SymIntForm,
    classify_indefinite_unimodular,
    inertia,
    parse_class_label,
    parse_gram,
    rational_isotropic_dim,
    witt_isotropic_dim_mod_p,
)

H = SymIntForm.hyperbolic()
E8 = SymIntForm.e8()


def sym_matrices(max_dim=6, bound=5):
    def build(n):
        return st.lists(st.integers(-bound, bound), min_size=n * (n + 1) // 2, max_size=n * (n + 1) // 2).map(
            lambda xs: _fill(n, xs)
        )

    return st.integers(1, max_dim).flatmap(build)


def _fill(n, xs):
    g = [[0] * n for _ in range(n)]
    it = iter(xs)
    for i in range(n):
        for j in range(i, n):
            g[i][j] = g[j][i] = next(it)
    return SymIntForm(g)


def test_basic_forms():
    assert (H.invariants.rank, H.invariants.signature, H.invariants.parity, H.invariants.unimodular) == (2, 0, "even", True)
    e = E8.invariants
    assert (e.rank, e.signature, e.determinant, e.parity, e.unimodular) == (8, 8, 1, "even", True)
    assert (H + H + H).invariants.signature == 0


def test_diagonal_and_torsion():
    inv = SymIntForm.diagonal([2, 6, 0]).invariants
    assert (inv.rank, inv.b_plus, inv.b_minus, inv.nullity) == (2, 2, 0, 1)
    assert inv.torsion == (2, 6)
    assert inv.determinant == 0 and not inv.unimodular


def test_symmetry_required():
    with pytest.raises(DomainError):
        SymIntForm([[0, 1], [2, 0]])


@given(sym_matrices())
def test_signature_and_rank_consistency(f):
    inv = f.invariants
    assert inv.b_plus + inv.b_minus == inv.rank
    assert inv.signature == inv.b_plus - inv.b_minus
    # eigenvalue-free cross check: inertia from leading minors of a generic congruent copy
    import sympy

    m = sympy.Matrix(f.gram)
    eig = m.eigenvals()
    pos = sum(mult for ev, mult in eig.items() if sympy.re(sympy.N(ev, 50)) > 0)
    neg = sum(mult for ev, mult in eig.items() if sympy.re(sympy.N(ev, 50)) < 0)
    assert (pos, neg) == (inv.b_plus, inv.b_minus)


@given(sym_matrices(max_dim=7), st.integers(0, 10**6))
def test_congruence_invariance_property(f, seed):
    b = random_unimodular(f.dim, random.Random(seed)) if f.dim > 1 else None
    if b is None:
        return
    assert f.congruent(b.matrix).invariants == f.invariants


def test_congruence_invariance_500():
    r = random.Random(99)
    for _ in range(500):
        n = r.randint(2, 15)
        xs = [r.randint(-3, 3) for _ in range(n * (n + 1) // 2)]
        f = _fill(n, xs)
        b = random_unimodular(n, r, steps=n)
        assert f.congruent(b.matrix).invariants == f.invariants


def test_parity():
    assert SymIntForm.diagonal([1, -1]).invariants.parity == "odd"
    assert SymIntForm([[2, 1], [1, 2]]).invariants.parity == "even"


def test_text_roundtrip_and_tsv():
    f = SymIntForm([[2, 1], [1, -4]])
    assert parse_gram(f.to_text()) == f
    header = FormInvariants.tsv_header()
    assert header.split("\t") == ["rank", "b+", "b-", "sigma", "det", "parity", "unimodular", "torsion"]
    assert H.invariants.tsv_row() == "2\t1\t1\t0\t-1\teven\ttrue\t-"


@pytest.mark.parametrize(
    "text,line",
    [("dim=2\n0 1\n", None), ("dim=2\n0 1\n1 x\n", 3), ("dim=2\n0 1\n2 0\n", None), ("hello\n", 1)],
)
def test_parse_errors(text, line):
    with pytest.raises((ParseError, DomainError)) as err:
        parse_gram(text, "g.txt")
    if line is not None and isinstance(err.value, ParseError):
        assert err.value.line == line


def test_classification():
    f = H
    for _ in range(13):
        f = f + H
    assert str(classify_indefinite_unimodular(f.invariants)) == "14H"
    g = E8
    for _ in range(10):
        g = g + H
    cls = classify_indefinite_unimodular(g.invariants, smooth_spin=True)
    assert str(cls) == "E8 + 10H" and cls.rohlin_violation
    assert not classify_indefinite_unimodular(g.invariants).rohlin_violation
    odd = SymIntForm.diagonal([1, 1, -1])
    assert str(classify_indefinite_unimodular(odd.invariants)) == "2<+1> + 1<-1>"


def test_classification_errors():
    with pytest.raises(DomainError):
        classify_indefinite_unimodular(SymIntForm.diagonal([2, -1]).invariants)
    with pytest.raises(NotSupportedError):
        classify_indefinite_unimodular(E8.invariants)


def test_even_with_bad_signature_is_internal_error():
    # an even unimodular form of signature 4 cannot exist; force the record
    inv = (E8 + H).invariants
    fake = object.__new__(FormInvariants)
    for name in FormInvariants.__dataclass_fields__:
        object.__setattr__(fake, name, getattr(inv, name))
    object.__setattr__(fake, "signature", 4)
    object.__setattr__(fake, "b_plus", 7)
    object.__setattr__(fake, "b_minus", 3)
    with pytest.raises(InternalInconsistencyError):
        classify_indefinite_unimodular(fake)


@pytest.mark.parametrize("label", ["14H", "E8 + 10H", "(-E8) + 2H", "2E8 + 3H", "3<+1> + 2<-1>"])
def test_class_label_roundtrip(label):
    assert str(parse_class_label(label)) == label


def test_rational_isotropic_dim():
    assert rational_isotropic_dim((H + H + H).invariants) == 3
    assert rational_isotropic_dim(SymIntForm.zero(4).invariants) == 4
    assert rational_isotropic_dim(E8.invariants) == 0


def _oracle_witt(g, p):
    """Largest totally isotropic subspace by exhaustive search over F_p^d."""
    d = len(g)

    def pair(u, v):
        return sum(u[i] * g[i][j] * v[j] for i in range(d) for j in range(d)) % p

    vecs = [v for v in itertools.product(range(p), repeat=d) if any(v) and pair(v, v) == 0]
    best = 0
    seen = set()

    def span(basis):
        out = set()
        for coeffs in itertools.product(range(p), repeat=len(basis)):
            out.add(tuple(sum(c * b[i] for c, b in zip(coeffs, basis)) % p for i in range(d)))
        return frozenset(out)

    def dfs(basis, sp):
        nonlocal best
        best = max(best, len(basis))
        for v in vecs:
            if v in sp or any(pair(v, b) for b in basis):
                continue
            nb = basis + [v]
            nsp = span(nb)
            if nsp in seen:
                continue
            seen.add(nsp)
            dfs(nb, nsp)

    dfs([], frozenset([(0,) * d]))
    return best


@pytest.mark.parametrize("p", [2, 3, 5])
def test_witt_index_against_exhaustive_search(p):
    r = random.Random(p)
    for _ in range(25 if p < 5 else 12):
        d = r.randint(1, 4 if p < 5 else 3)
        f = _fill(d, [r.randint(-4, 4) for _ in range(d * (d + 1) // 2)])
        assert witt_isotropic_dim_mod_p(f, p) == _oracle_witt(f.gram, p), f.gram


def test_witt_index_examples():
    assert witt_isotropic_dim_mod_p(H + H, 3) == 2
    assert witt_isotropic_dim_mod_p(SymIntForm.diagonal([1, 1]), 3) == 0
    assert witt_isotropic_dim_mod_p(SymIntForm.diagonal([1, 1]), 5) == 1
    assert witt_isotropic_dim_mod_p(SymIntForm.diagonal([2, 2]), 2) == 2
    with pytest.raises(DomainError):
        witt_isotropic_dim_mod_p(H, 4)


def test_inertia_function():
    assert inertia(((1, 0), (0, -1))) == (1, 1)
