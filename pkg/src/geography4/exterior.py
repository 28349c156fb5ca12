"""Exterior algebra over the integers.

Elements of degree k on Z^n are stored densely in the lexicographic order of
increasing index tuples (1-based).  Positions come from the combinatorial
number system, so ranking is O(k) and the text format is stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations

from . import linalg
from .errors import DomainError, ParseError

MAX_RANK = 16


def _check_rank(n):
    if not 1 <= n <= MAX_RANK:
        raise DomainError(f"ambient rank n={n} outside 1..{MAX_RANK}")


def _check_degree(n, k):
    _check_rank(n)
    if not 0 <= k <= n:
        raise DomainError(f"degree k={k} outside 0..{n}")


@lru_cache(maxsize=None)
def subsets(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All k-subsets of 1..n in canonical order."""
    _check_degree(n, k)
    return tuple(combinations(range(1, n + 1), k))


@lru_cache(maxsize=None)
def _position_table(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {s: i for i, s in enumerate(subsets(n, k))}


def rank_subset(n: int, indices) -> int:
    indices = tuple(indices)
    k = len(indices)
    _check_degree(n, k)
    if any(not 1 <= i <= n for i in indices) or any(
        a >= b for a, b in zip(indices, indices[1:])
    ):
        raise DomainError(f"{indices} is not a strictly increasing subset of 1..{n}")
    total = math.comb(n, k)
    return total - 1 - sum(math.comb(n - c, k - t) for t, c in enumerate(indices))


def unrank_subset(n: int, k: int, position: int) -> tuple[int, ...]:
    _check_degree(n, k)
    total = math.comb(n, k)
    if not 0 <= position < total:
        raise DomainError(f"position {position} outside 0..{total - 1}")
    # complement rank in the reverse-colex system
    r = total - 1 - position
    out = []
    top = n
    for t in range(k, 0, -1):
        # largest m with C(m, t) <= r
        m = t - 1
        while m + 1 <= top - 1 and math.comb(m + 1, t) <= r:
            m += 1
        r -= math.comb(m, t)
        out.append(n - m)
        top = m
    return tuple(out)


def monomial_codec(n: int, k: int, x):
    """Position -> index tuple, or index tuple -> position."""
    if isinstance(x, int):
        return unrank_subset(n, k, x)
    x = tuple(x)
    if len(x) != k:
        raise DomainError(f"expected {k} indices, got {len(x)}")
    return rank_subset(n, x)


@dataclass(frozen=True)
class MultiIndex:
    n: int
    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        rank_subset(self.n, self.indices)

    @property
    def k(self):
        return len(self.indices)

    @property
    def rank_position(self) -> int:
        return rank_subset(self.n, self.indices)

    @classmethod
    def from_position(cls, n, k, position):
        return cls(n, unrank_subset(n, k, position))


def _mask(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def monomial_product(left, right):
    """Product of two basis monomials: (sign, sorted indices) or (0, None)."""
    lm = _mask(left)
    if lm & _mask(right):
        return 0, None
    swaps = 0
    for j in right:
        swaps += bin(lm >> (j + 1)).count("1")
    return (-1 if swaps & 1 else 1), tuple(sorted(left + right))


def monomial_product_bruteforce(left, right):
    """Reference product: sort the concatenation by adjacent swaps."""
    word = list(left) + list(right)
    if len(set(word)) != len(word):
        return 0, None
    swaps = 0
    for end in range(len(word) - 1, 0, -1):
        for i in range(end):
            if word[i] > word[i + 1]:
                word[i], word[i + 1] = word[i + 1], word[i]
                swaps += 1
    return (-1 if swaps % 2 else 1), tuple(word)


@dataclass(frozen=True)
class KVector:
    """Element of Lambda^k(Z^n) with integer coefficients."""

    n: int
    k: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        _check_degree(self.n, self.k)
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if len(self.coeffs) != math.comb(self.n, self.k):
            raise DomainError(
                f"need {math.comb(self.n, self.k)} coefficients for degree {self.k} on Z^{self.n}"
            )

    @classmethod
    def zero(cls, n, k):
        return cls(n, k, (0,) * math.comb(n, k))

    @classmethod
    def from_terms(cls, n, k, terms):
        """Build from ``{indices: coeff}`` or an iterable of pairs.

        Indices need not be sorted; they are sorted with the permutation sign.
        """
        coeffs = [0] * math.comb(n, k)
        items = terms.items() if isinstance(terms, dict) else terms
        table = _position_table(n, k)
        for idx, c in items:
            idx = tuple(idx)
            if len(idx) != k:
                raise DomainError(f"term {idx} does not have degree {k}")
            sign, srt = monomial_product_bruteforce(idx, ())
            if srt is None:
                raise DomainError(f"term {idx} repeats an index")
            if srt not in table:
                raise DomainError(f"term {idx} has an index outside 1..{n}")
            coeffs[table[srt]] += sign * c
        return cls(n, k, coeffs)

    @classmethod
    def basis(cls, n, indices, coeff=1):
        return cls.from_terms(n, len(indices), {tuple(indices): coeff})

    @classmethod
    def scalar(cls, n, value):
        return cls(n, 0, (value,))

    def terms(self):
        """Nonzero (indices, coeff) pairs in canonical order."""
        subs = subsets(self.n, self.k)
        return [(subs[i], c) for i, c in enumerate(self.coeffs) if c]

    def coefficient(self, indices):
        return self.coeffs[rank_subset(self.n, indices)]

    def is_zero(self):
        return not any(self.coeffs)

    @cached_property
    def content(self) -> int:
        return math.gcd(*self.coeffs)

    def _same_space(self, other):
        if not isinstance(other, KVector) or (self.n, self.k) != (other.n, other.k):
            raise DomainError("k-vectors live in different spaces")

    def __add__(self, other):
        self._same_space(other)
        return KVector(self.n, self.k, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._same_space(other)
        return KVector(self.n, self.k, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return KVector(self.n, self.k, tuple(-a for a in self.coeffs))

    def __mul__(self, scalar):
        if not isinstance(scalar, int):
            return NotImplemented
        return KVector(self.n, self.k, tuple(scalar * a for a in self.coeffs))

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __pow__(self, m: int):
        out = KVector.scalar(self.n, 1)
        for _ in range(m):
            out = wedge(out, self)
        return out

    def to_text(self) -> str:
        lines = [f"n={self.n} k={self.k}"]
        for idx, c in self.terms():
            lines.append(f"{' '.join(map(str, idx))} : {c}".lstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, source=None):
        return parse_kvector(text, source)

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for idx, c in self.terms():
            mono = "".join(f"x{i}" for i in idx) or "1"
            parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def parse_kvector(text: str, source=None) -> KVector:
    header = None
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            fields = dict(f.split("=", 1) for f in line.split() if "=" in f)
            try:
                header = (int(fields["n"]), int(fields["k"]))
            except (KeyError, ValueError):
                raise ParseError("expected header 'n=<n> k=<k>'", lineno, source) from None
            continue
        if ":" not in line:
            raise ParseError("expected '<indices> : <coeff>'", lineno, source)
        left, right = line.split(":", 1)
        try:
            idx = tuple(int(t) for t in left.split())
            coeff = int(right.strip())
        except ValueError:
            raise ParseError("non-integer token", lineno, source) from None
        if len(idx) != header[1] or list(idx) != sorted(set(idx)):
            raise ParseError(f"indices {idx} must be {header[1]} strictly increasing values", lineno, source)
        terms.append((idx, coeff, lineno))
    if header is None:
        raise ParseError("empty k-vector file", None, source)
    n, k = header
    try:
        coeffs = [0] * math.comb(n, k)
        _check_degree(n, k)
        for idx, coeff, lineno in terms:
            try:
                coeffs[rank_subset(n, idx)] += coeff
            except DomainError as exc:
                raise ParseError(str(exc), lineno, source) from None
    except DomainError as exc:
        raise ParseError(str(exc), 1, source) from None
    return KVector(n, k, coeffs)


def wedge(u: KVector, v: KVector) -> KVector:
    if u.n != v.n:
        raise DomainError("wedge of k-vectors on different lattices")
    k = u.k + v.k
    if k > u.n:
        raise DomainError(f"degree overflow: {u.k} + {v.k} > {u.n}")
    out = [0] * math.comb(u.n, k)
    table = _position_table(u.n, k)
    vterms = v.terms()
    for idx, a in u.terms():
        for jdx, b in vterms:
            sign, srt = monomial_product(idx, jdx)
            if sign:
                out[table[srt]] += sign * a * b
    return KVector(u.n, k, out)


def wedge_bruteforce(u: KVector, v: KVector) -> KVector:
    """Same product as :func:`wedge`, via adjacent-transposition sorting."""
    if u.n != v.n or u.k + v.k > u.n:
        raise DomainError("incompatible operands")
    k = u.k + v.k
    out = [0] * math.comb(u.n, k)
    subs = subsets(u.n, k)
    for idx, a in u.terms():
        for jdx, b in v.terms():
            sign, srt = monomial_product_bruteforce(idx, jdx)
            if sign:
                out[subs.index(srt)] += sign * a * b
    return KVector(u.n, k, out)


def top_coefficient(w: KVector) -> int:
    """Evaluate a top-degree element against the orientation class."""
    if w.k != w.n:
        raise DomainError(f"top_coefficient needs degree {w.n}, got {w.k}")
    return w.coeffs[0]


@dataclass(frozen=True)
class BasisChange:
    """An element of GL_n(Z), acting by x_i -> sum_j M[i][j] x_j."""

    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if not m or not linalg.is_square(m):
            raise DomainError("basis change must be a nonempty square matrix")
        _check_rank(len(m))
        if abs(self.determinant) != 1:
            raise DomainError(f"determinant {self.determinant} is not a unit")

    @property
    def n(self):
        return len(self.matrix)

    @cached_property
    def determinant(self) -> int:
        return linalg.bareiss_det(self.matrix)

    @classmethod
    def identity(cls, n):
        return cls(linalg.identity(n))

    def __matmul__(self, other):
        return BasisChange(linalg.matmul(self.matrix, other.matrix))

    def inverse(self):
        return BasisChange(linalg.unimodular_inverse(self.matrix))

    def transpose(self):
        return BasisChange(linalg.transpose(self.matrix))

    def image_of_generator(self, i: int) -> KVector:
        """B*(x_i) as a degree-1 vector (1-based i)."""
        return KVector(self.n, 1, self.matrix[i - 1])


def gl_action(b: BasisChange, u: KVector) -> KVector:
    """Induced action on Lambda^k: x_{i1}...x_{ik} -> B*(x_{i1}) ^ ... ^ B*(x_{ik}).

    Composition rule (row convention): gl_action(B1 @ B2, u) equals
    gl_action(B2, gl_action(B1, u)).
    """
    if b.n != u.n:
        raise DomainError("basis change and k-vector have different ranks")
    rows = [b.image_of_generator(i) for i in range(1, b.n + 1)]
    images: dict[tuple[int, ...], KVector] = {(): KVector.scalar(b.n, 1)}

    def image(idx):
        got = images.get(idx)
        if got is None:
            got = wedge(image(idx[:-1]), rows[idx[-1] - 1])
            images[idx] = got
        return got

    out = KVector.zero(u.n, u.k)
    for idx, c in u.terms():
        out = out + c * image(idx)
    return out


def pushforward_omega(a: BasisChange, omega: KVector) -> KVector:
    """Dual class of A_*(omega cap [T]): det(A) * ((A^T)^{-1})^*(omega)."""
    if a.n != omega.n:
        raise DomainError("basis change and class have different ranks")
    if omega.k != omega.n - 4:
        raise DomainError(f"class must have degree n-4={omega.n - 4}")
    return a.determinant * gl_action(a.transpose().inverse(), omega)
