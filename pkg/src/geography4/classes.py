"""Pairings x, y -> x ^ y ^ omega on Lambda^2 and normal forms of classes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from . import linalg
from .errors import DomainError, InternalInconsistencyError, ParseError
from .exterior import (
    BasisChange,
    KVector,
    monomial_product,
    rank_subset,
    subsets,
    top_coefficient,
    wedge,
)
from .forms import SymIntForm, invariants


@lru_cache(maxsize=None)
def pairing_table(n: int):
    """Entries (r, s, position, sign) with r <= s of the pairing on Lambda^2(Z^n).

    Gram[r][s] = sign * omega[position] whenever monomials r and s are disjoint.
    """
    if not 4 <= n <= 16:
        raise DomainError(f"pairing needs 4 <= n <= 16, got {n}")
    pairs = subsets(n, 2)
    full = set(range(1, n + 1))
    out = []
    for r, mr in enumerate(pairs):
        for s in range(r, len(pairs)):
            ms = pairs[s]
            if set(mr) & set(ms):
                continue
            comp = tuple(sorted(full - set(mr) - set(ms)))
            s1, idx = monomial_product(mr, ms)
            s2, _ = monomial_product(idx, comp)
            out.append((r, s, rank_subset(n, comp), s1 * s2))
    return tuple(out)


def gram_from_table(n: int, coeffs) -> tuple[tuple[int, ...], ...]:
    m = math.comb(n, 2)
    g = [[0] * m for _ in range(m)]
    for r, s, pos, sign in pairing_table(n):
        v = sign * int(coeffs[pos])
        g[r][s] = g[s][r] = v
    return tuple(tuple(row) for row in g)


def gram_by_wedge(omega: KVector) -> tuple[tuple[int, ...], ...]:
    """Reference construction straight from wedge and top_coefficient."""
    n = omega.n
    monos = [KVector.basis(n, idx) for idx in subsets(n, 2)]
    return tuple(
        tuple(top_coefficient(wedge(wedge(mr, ms), omega)) for ms in monos)
        for mr in monos
    )


@dataclass(frozen=True)
class PairingForm:
    n: int
    omega: KVector
    form: SymIntForm

    @property
    def invariants(self):
        return self.form.invariants


def pairing_gram(omega: KVector) -> PairingForm:
    n = omega.n
    if not 4 <= n <= 16:
        raise DomainError(f"pairing needs 4 <= n <= 16, got {n}")
    if omega.k != n - 4:
        raise DomainError(f"class must have degree n-4={n - 4}, got {omega.k}")
    g = gram_from_table(n, omega.coeffs)
    if any(g[i][i] for i in range(len(g))):
        raise InternalInconsistencyError("pairing has a nonzero diagonal entry")
    return PairingForm(n, omega, SymIntForm(g))


def induced_on_squares(b: BasisChange):
    """Matrix of the induced action on Lambda^2 in the monomial basis.

    Row r holds the coordinates of B*(m_r).  With S this matrix,
    S G(B*omega) S^T = det(B) G(omega).
    """
    from .exterior import gl_action

    n = b.n
    return tuple(
        gl_action(b, KVector.basis(n, idx)).coeffs for idx in subsets(n, 2)
    )


# ---------------------------------------------------------------- normal forms


@dataclass(frozen=True)
class NormalTriple:
    a: int
    b: int
    c: int
    witness: BasisChange

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise InternalInconsistencyError("a and b must be nonnegative")
        if not (_divides(self.a, self.b) and _divides(self.b, self.c)):
            raise InternalInconsistencyError(f"{self.triple} is not a divisibility chain")

    @property
    def triple(self):
        return (self.a, self.b, self.c)

    def canonical(self) -> KVector:
        return canonical_class(self.a, self.b, self.c)

    def to_text(self) -> str:
        lines = [f"{self.a} {self.b} {self.c}"]
        lines += [" ".join(str(x) for x in row) for row in self.witness.matrix]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text, source=None):
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        try:
            a, b, c = (int(x) for x in rows[0])
            m = [[int(x) for x in r] for r in rows[1:]]
        except (ValueError, IndexError):
            raise ParseError("expected 'a b c' then a 6x6 matrix", None, source) from None
        if len(m) != 6 or any(len(r) != 6 for r in m):
            raise ParseError("witness must be 6x6", None, source)
        return cls(a, b, c, BasisChange(m))


def _divides(x, y):
    return y == 0 if x == 0 else y % x == 0


def canonical_class(a, b, c) -> KVector:
    return KVector.from_terms(6, 2, {(1, 2): a, (3, 4): b, (5, 6): c})


class _Reducer:
    """Skew matrix of a 2-form under a running change of basis.

    A step x_i -> sum_j B_ij x_j sends the skew matrix W to B^T W B and the
    accumulated witness to witness @ B.
    """

    def __init__(self, omega: KVector):
        n = omega.n
        self.n = n
        w = [[0] * n for _ in range(n)]
        for (i, j), c in omega.terms():
            w[i - 1][j - 1] = c
            w[j - 1][i - 1] = -c
        self.w = w
        self.witness = [[int(i == j) for j in range(n)] for i in range(n)]
        self.det = 1

    def coeff(self, i, j):
        return self.w[i][j]

    def add(self, i, j, q):
        """x_i -> x_i + q x_j."""
        if not q:
            return
        w = self.w
        # column j += q column i, then row j += q row i
        for r in range(self.n):
            w[r][j] += q * w[r][i]
        for s in range(self.n):
            w[j][s] += q * w[i][s]
        for row in self.witness:
            row[j] += q * row[i]

    def swap(self, i, j):
        if i == j:
            return
        w = self.w
        w[i], w[j] = w[j], w[i]
        for row in w:
            row[i], row[j] = row[j], row[i]
        for row in self.witness:
            row[i], row[j] = row[j], row[i]
        self.det = -self.det

    def negate(self, i):
        w = self.w
        w[i] = [-x for x in w[i]]
        for row in w:
            row[i] = -row[i]
        for row in self.witness:
            row[i] = -row[i]
        self.det = -self.det

    def apply(self, b):
        """General change of basis, given as a full n x n matrix."""
        bt = linalg.transpose(b)
        self.w = [list(r) for r in linalg.matmul(linalg.matmul(bt, self.w), b)]
        self.witness = [list(r) for r in linalg.matmul(self.witness, b)]
        self.det *= linalg.bareiss_det(b)

    def collect(self, u, targets):
        """Change basis on ``targets`` so row u is g at targets[0] and 0 elsewhere, g >= 0."""
        while True:
            live = [t for t in targets if self.w[u][t]]
            if len(live) <= 1:
                break
            piv = min(live, key=lambda t: abs(self.w[u][t]))
            for t in live:
                if t != piv:
                    self.add(piv, t, -(self.w[u][t] // self.w[u][piv]))
        live = [t for t in targets if self.w[u][t]]
        if live:
            self.swap(targets[0], live[0])
            if self.w[u][targets[0]] < 0:
                self.negate(targets[0])
        return self.w[u][targets[0]] if targets else 0


def _split_pairs(red: _Reducer, active: list[int]):
    """Peel off hyperbolic-like pairs; returns ([(u, v, g)], absent)."""
    pairs, absent = [], []
    while len(active) >= 2:
        u, rest = active[0], active[1:]
        a1 = red.collect(u, rest)
        if a1 == 0:
            absent.append(u)
            active = rest
            continue
        v, others = rest[0], rest[1:]
        measure = None
        while others:
            a2 = red.collect(v, others)
            if a2 == 0:
                break
            new = (a1, a2)
            if measure is not None and not new < measure:
                raise InternalInconsistencyError("Euclidean reduction failed to decrease")
            measure = new
            w0 = others[0]
            if a1 <= a2:
                # x_u -> x_u + q x_w lowers the x_v x_w coefficient by q*a1
                red.add(u, w0, a2 // a1)
            else:
                # x_v -> x_v + x_u moves a2 into row u, then re-collect
                red.add(v, u, 1)
                a1 = red.collect(u, rest)
        pairs.append((u, v, a1))
        active = others
    absent.extend(active)
    return pairs, absent


def gcd_lcm_substitution(a: int, b: int, p: int, q: int) -> BasisChange:
    """Change of basis of Z^4 taking a x1x2 + b x3x4 to x1x2 + ab x3x4 when ap + bq = 1.

    Old variables in terms of new:
    x1 = x1' - bq x3', x2 = p x2' - b x4', x3 = x1' + ap x3', x4 = q x2' + a x4'.
    """
    if a * p + b * q != 1:
        raise DomainError("need a p + b q = 1")
    return BasisChange(
        [
            [1, 0, -b * q, 0],
            [0, p, 0, -b],
            [1, 0, a * p, 0],
            [0, q, 0, a],
        ]
    )


def _gcd_lcm_step(red: _Reducer, i: int, j: int):
    """Replace coefficients (g_i, g_j) of pairs i, j by (gcd, lcm)."""
    u1, u2, u3, u4 = 2 * i, 2 * i + 1, 2 * j, 2 * j + 1
    gi, gj = red.coeff(u1, u2), red.coeff(u3, u4)
    if gj == 0:
        return
    if gi == 0:
        red.swap(u1, u3)
        red.swap(u2, u4)
        return
    if gj % gi == 0:
        return
    d, p, q = linalg.xgcd(gi, gj)
    a, b = gi // d, gj // d
    # old variables in terms of new:
    #   x1 = x1' - bq x3', x2 = p x2' - b x4', x3 = x1' + ap x3', x4 = q x2' + a x4'
    m = [[int(r == s) for s in range(red.n)] for r in range(red.n)]
    for r in (u1, u2, u3, u4):
        m[r][r] = 0
    m[u1][u1], m[u1][u3] = 1, -b * q
    m[u2][u2], m[u2][u4] = p, -b
    m[u3][u1], m[u3][u3] = 1, a * p
    m[u4][u2], m[u4][u4] = q, a
    red.apply(m)


def _canonical_order(red: _Reducer, pairs, absent):
    order = []
    for u, v, _ in pairs:
        order += [u, v]
    order += absent
    perm = [[0] * red.n for _ in range(red.n)]
    for k, old in enumerate(order):
        perm[old][k] = 1
    red.apply(perm)


def normal_form_6(omega: KVector) -> NormalTriple:
    """GL_6(Z) normal form a x1x2 + b x3x4 + c x5x6 with a | b | c."""
    if omega.n != 6 or omega.k != 2:
        raise DomainError("normal_form_6 needs a degree-2 class on Z^6")
    red = _Reducer(omega)
    pairs, absent = _split_pairs(red, list(range(6)))
    _canonical_order(red, pairs, absent)
    for i in range(3):
        if red.coeff(2 * i, 2 * i + 1) < 0:
            red.negate(2 * i + 1)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        _gcd_lcm_step(red, i, j)
    if red.det == -1:
        red.negate(5)
    a, b, c = red.coeff(0, 1), red.coeff(2, 3), red.coeff(4, 5)
    witness = BasisChange(red.witness)
    if witness.determinant != 1:
        raise InternalInconsistencyError("normal form witness has determinant -1")
    result = NormalTriple(a, b, c, witness)
    _verify_witness(witness, omega, result.canonical())
    return result


def _verify_witness(witness, omega, target):
    from .exterior import gl_action

    if gl_action(witness, omega) != target:
        raise InternalInconsistencyError("normal form witness does not reproduce the class")


def normal_form_5(omega: KVector):
    """Returns (k, witness) with witness sending omega to k x1."""
    if omega.n != 5 or omega.k != 1:
        raise DomainError("normal_form_5 needs a degree-1 class on Z^5")
    n = 5
    v = list(omega.coeffs)
    b = [[int(i == j) for j in range(n)] for i in range(n)]
    # a degree-1 class transforms as the row vector v -> v B
    while sum(1 for x in v if x) > 1:
        piv = min((i for i in range(n) if v[i]), key=lambda i: abs(v[i]))
        for t in range(n):
            if t != piv and v[t]:
                q = v[t] // v[piv]
                v[t] -= q * v[piv]
                for row in b:
                    row[t] -= q * row[piv]
    nz = next((i for i in range(n) if v[i]), 0)
    if nz:
        v[0], v[nz] = v[nz], v[0]
        for row in b:
            row[0], row[nz] = row[nz], row[0]
    if v[0] < 0:
        v[0] = -v[0]
        for row in b:
            row[0] = -row[0]
    if linalg.bareiss_det(b) == -1:
        for row in b:
            row[n - 1] = -row[n - 1]
    witness = BasisChange(b)
    k = v[0]
    _verify_witness(witness, omega, KVector.from_terms(5, 1, {(1,): k}))
    return k, witness


@dataclass(frozen=True)
class TripleInvariants:
    content: int
    half_square: int
    sixth_cube: int
    sign: int

    def as_tuple(self):
        return (self.content, self.half_square, self.sixth_cube, self.sign)


def triple_invariants(omega: KVector) -> TripleInvariants:
    """Content a, content(omega^2)/2 = ab, |omega^3|/6 = |abc| and the sign of abc."""
    if omega.n != 6 or omega.k != 2:
        raise DomainError("triple_invariants needs a degree-2 class on Z^6")
    sq = wedge(omega, omega)
    cube = top_coefficient(wedge(sq, omega))
    if sq.content % 2 or cube % 6:
        raise InternalInconsistencyError("square or cube not divisible as expected")
    return TripleInvariants(omega.content, sq.content // 2, abs(cube) // 6, -1 if cube < 0 else 1)


def content_via_quotient(omega: KVector) -> int:
    """Order of the torsion of Lambda/<omega>, read off the Smith form."""
    d = linalg.smith_diagonal([omega.coeffs])
    return d[0] if d else 0


# explicit isotropic subspaces for omega = a x1x2 + b x3x4 + c x5x6.
# The commonly quoted 7-element list ends in x3x6, x4x5, but those two pair
# through the x1x2 term; swapping x4x5 for x1x6 gives an isotropic set for
# every (a, b, c).
PRINTED_V1 = ((1, 2), (1, 3), (1, 4), (1, 5), (3, 5), (3, 6), (4, 5))

ISOTROPIC_FAMILIES = {
    "V1": ((1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (3, 5), (3, 6)),
    "V2": ((1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (2, 3), (2, 4), (3, 4), (3, 5), (3, 6)),
    "V3": (
        (1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (2, 3),
        (2, 4), (2, 5), (2, 6), (3, 4), (3, 5), (3, 6),
    ),
}


def family_vectors(name_or_indices):
    """Coordinate vectors of a named family, or of an explicit tuple of index pairs."""
    n = 6
    m = math.comb(n, 2)
    out = []
    indices = ISOTROPIC_FAMILIES[name_or_indices] if isinstance(name_or_indices, str) else name_or_indices
    for idx in indices:
        v = [0] * m
        v[rank_subset(n, idx)] = 1
        out.append(tuple(v))
    return out


def is_isotropic(form: SymIntForm, vectors, modulus: int = 0) -> bool:
    for i, u in enumerate(vectors):
        for v in vectors[i:]:
            x = form.pair(u, v)
            if (x % modulus if modulus else x) != 0:
                return False
    return True


def pairing_invariants(omega: KVector):
    return invariants(pairing_gram(omega).form)
