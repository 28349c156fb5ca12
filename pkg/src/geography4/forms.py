"""Symmetric integer bilinear forms and their invariants."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from sympy import isprime
from sympy.ntheory import sqrt_mod

from . import linalg
from .errors import (
    DomainError,
    InternalInconsistencyError,
    NotSupportedError,
    ParseError,
)

# Cartan matrix of E8, Bourbaki labelling: chain 1-3-4-5-6-7-8, node 2 on node 4.
_E8_EDGES = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]


@dataclass(frozen=True)
class SymIntForm:
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        g = linalg.as_matrix(self.gram)
        object.__setattr__(self, "gram", g)
        if not linalg.is_square(g):
            raise DomainError("Gram matrix must be square")
        for i, row in enumerate(g):
            for j in range(i):
                if row[j] != g[j][i]:
                    raise DomainError(f"Gram matrix not symmetric at ({i}, {j})")

    @property
    def dim(self) -> int:
        return len(self.gram)

    @classmethod
    def zero(cls, dim):
        return cls(tuple((0,) * dim for _ in range(dim)))

    @classmethod
    def hyperbolic(cls):
        return cls(((0, 1), (1, 0)))

    @classmethod
    def e8(cls):
        g = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
        for a, b in _E8_EDGES:
            g[a - 1][b - 1] = g[b - 1][a - 1] = -1
        return cls(g)

    @classmethod
    def diagonal(cls, entries):
        d = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else 0 for j in range(d)) for i in range(d)))

    def direct_sum(self, other):
        d, e = self.dim, other.dim
        rows = [row + (0,) * e for row in self.gram]
        rows += [(0,) * d + row for row in other.gram]
        return SymIntForm(rows)

    def __add__(self, other):
        return self.direct_sum(other)

    def scaled(self, k: int):
        return SymIntForm(tuple(tuple(k * x for x in row) for row in self.gram))

    def congruent(self, b):
        """The form in a new basis: B^T G B (columns of B are the new basis)."""
        b = linalg.as_matrix(b)
        return SymIntForm(linalg.matmul(linalg.matmul(linalg.transpose(b), self.gram), b))

    def restrict(self, vectors):
        """Gram matrix on the span of the given coordinate vectors."""
        return SymIntForm(
            [[self.pair(u, v) for v in vectors] for u in vectors]
        )

    def pair(self, u, v) -> int:
        return sum(ui * x for ui, x in zip(u, linalg.matvec(self.gram, v)))

    @cached_property
    def invariants(self) -> FormInvariants:
        return invariants(self)

    def to_text(self) -> str:
        lines = [f"dim={self.dim}"]
        lines += [" ".join(str(x) for x in row) for row in self.gram]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text, source=None):
        return parse_gram(text, source)


def parse_gram(text: str, source=None) -> SymIntForm:
    lines = [
        (no, ln.split("#", 1)[0].strip())
        for no, ln in enumerate(text.splitlines(), 1)
    ]
    lines = [(no, ln) for no, ln in lines if ln]
    if not lines or not lines[0][1].startswith("dim="):
        raise ParseError("expected header 'dim=<d>'", lines[0][0] if lines else None, source)
    try:
        dim = int(lines[0][1][4:])
    except ValueError:
        raise ParseError("bad dimension", lines[0][0], source) from None
    if dim < 0:
        raise ParseError("negative dimension", lines[0][0], source)
    body = lines[1:]
    if len(body) != dim:
        raise ParseError(f"expected {dim} rows, found {len(body)}", None, source)
    rows = []
    for no, ln in body:
        try:
            row = [int(t) for t in ln.split()]
        except ValueError:
            raise ParseError("non-integer entry", no, source) from None
        if len(row) != dim:
            raise ParseError(f"row has {len(row)} entries, expected {dim}", no, source)
        rows.append(row)
    try:
        return SymIntForm(rows)
    except DomainError as exc:
        raise ParseError(str(exc), None, source) from None


TSV_COLUMNS = ("rank", "b+", "b-", "sigma", "det", "parity", "unimodular", "torsion")


@dataclass(frozen=True)
class FormInvariants:
    dim: int
    rank: int
    b_plus: int
    b_minus: int
    signature: int
    determinant: int
    parity: str
    unimodular: bool
    torsion: tuple[int, ...]

    def __post_init__(self):
        if self.signature != self.b_plus - self.b_minus:
            raise InternalInconsistencyError("signature != b+ - b-")
        if self.rank != self.b_plus + self.b_minus or self.rank > self.dim:
            raise InternalInconsistencyError("rank != b+ + b-")
        if self.unimodular != (abs(self.determinant) == 1):
            raise InternalInconsistencyError("unimodular flag disagrees with determinant")

    @property
    def nullity(self) -> int:
        return self.dim - self.rank

    @property
    def is_even(self) -> bool:
        return self.parity == "even"

    @property
    def definite(self) -> bool:
        return self.rank == self.dim and abs(self.signature) == self.rank

    def tsv_row(self) -> str:
        fields = (
            self.rank,
            self.b_plus,
            self.b_minus,
            self.signature,
            self.determinant,
            self.parity,
            str(self.unimodular).lower(),
            ",".join(map(str, self.torsion)) or "-",
        )
        return "\t".join(str(f) for f in fields)

    @staticmethod
    def tsv_header() -> str:
        return "\t".join(TSV_COLUMNS)


def inertia(gram) -> tuple[int, int]:
    """(b+, b-) by congruence diagonalization over Q.

    Diagonal pivots are used when available.  When the remaining block has
    zero diagonal but a nonzero entry a at (i, j), the pair spans a
    hyperbolic plane, which is split off and contributes one of each sign.
    """
    a = [[Fraction(x) for x in row] for row in gram]
    active = list(range(len(a)))
    plus = minus = 0
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is not None:
            d = a[piv][piv]
            if d > 0:
                plus += 1
            else:
                minus += 1
            active.remove(piv)
            col = [a[r][piv] for r in range(len(a))]
            for r in active:
                if col[r]:
                    f = col[r] / d
                    row_r = a[r]
                    for s in active:
                        if col[s]:
                            row_r[s] -= f * col[s]
            continue
        pair = next(
            ((i, j) for i in active for j in active if i < j and a[i][j] != 0), None
        )
        if pair is None:
            break
        i, j = pair
        x = a[i][j]
        plus += 1
        minus += 1
        active.remove(i)
        active.remove(j)
        ci = [a[r][i] for r in range(len(a))]
        cj = [a[r][j] for r in range(len(a))]
        # Schur complement of [[0, x], [x, 0]]
        for r in active:
            if ci[r] or cj[r]:
                row_r = a[r]
                for s in active:
                    row_r[s] -= (ci[r] * cj[s] + cj[r] * ci[s]) / x
    return plus, minus


def invariants(form: SymIntForm) -> FormInvariants:
    g = form.gram
    plus, minus = inertia(g)
    det = linalg.bareiss_det(g)
    parity = "even" if all(g[i][i] % 2 == 0 for i in range(form.dim)) else "odd"
    torsion = tuple(d for d in linalg.smith_diagonal(g) if d > 1)
    return FormInvariants(
        dim=form.dim,
        rank=plus + minus,
        b_plus=plus,
        b_minus=minus,
        signature=plus - minus,
        determinant=det,
        parity=parity,
        unimodular=abs(det) == 1,
        torsion=torsion,
    )


@dataclass(frozen=True)
class UnimodularClass:
    """Either diag(+1^plus, -1^minus) or e8_count*E8 + hyperbolic_count*H."""

    even: bool
    plus: int = 0
    minus: int = 0
    e8_count: int = 0
    hyperbolic_count: int = 0
    rohlin_violation: bool = False

    @property
    def rank(self):
        if self.even:
            return 8 * abs(self.e8_count) + 2 * self.hyperbolic_count
        return self.plus + self.minus

    @property
    def signature(self):
        return 8 * self.e8_count if self.even else self.plus - self.minus

    def __str__(self):
        if not self.even:
            return f"{self.plus}<+1> + {self.minus}<-1>"
        parts = []
        if self.e8_count:
            k = self.e8_count
            parts.append(("" if abs(k) == 1 else f"{abs(k)}") + ("E8" if k > 0 else "(-E8)"))
        if self.hyperbolic_count:
            parts.append(f"{self.hyperbolic_count}H")
        return " + ".join(parts) or "0"


def classify_indefinite_unimodular(inv: FormInvariants, smooth_spin: bool = False) -> UnimodularClass:
    if not inv.unimodular:
        raise DomainError("form is not unimodular")
    if inv.b_plus == 0 or inv.b_minus == 0:
        raise NotSupportedError("definite forms are not classified")
    if not inv.is_even:
        return UnimodularClass(even=False, plus=inv.b_plus, minus=inv.b_minus)
    if inv.signature % 8:
        raise InternalInconsistencyError(
            f"even unimodular form with signature {inv.signature} not divisible by 8"
        )
    k = inv.signature // 8
    ell = (inv.rank - 8 * abs(k)) // 2
    return UnimodularClass(
        even=True,
        e8_count=k,
        hyperbolic_count=ell,
        rohlin_violation=bool(smooth_spin and k % 2),
    )


def rational_isotropic_dim(inv: FormInvariants, dim: int | None = None) -> int:
    """Largest totally isotropic subspace over Q."""
    dim = inv.dim if dim is None else dim
    return dim - inv.rank + min(inv.b_plus, inv.b_minus)


# ---------------------------------------------------------------- mod p


def _diagonalize_mod_p(g, p):
    """Congruence-diagonalize a symmetric matrix over F_p, p odd.

    Returns (diagonal, basis) with basis[i] the i-th new basis vector.
    """
    d = len(g)
    a = [[x % p for x in row] for row in g]
    basis = [[int(i == j) for j in range(d)] for i in range(d)]
    diag = []
    for t in range(d):
        piv = next((i for i in range(t, d) if a[i][i]), None)
        if piv is None:
            off = next(((i, j) for i in range(t, d) for j in range(i + 1, d) if a[i][j]), None)
            if off is None:
                diag.extend([0] * (d - t))
                break
            i, j = off
            # e_i <- e_i + e_j gives diagonal 2 a_ij != 0
            for r in range(d):
                a[r][i] = (a[r][i] + a[r][j]) % p
            for s in range(d):
                a[i][s] = (a[i][s] + a[j][s]) % p
            basis[i] = [(x + y) % p for x, y in zip(basis[i], basis[j])]
            piv = i
        if piv != t:
            a[t], a[piv] = a[piv], a[t]
            for row in a:
                row[t], row[piv] = row[piv], row[t]
            basis[t], basis[piv] = basis[piv], basis[t]
        inv = pow(a[t][t], -1, p)
        for r in range(t + 1, d):
            f = a[r][t] * inv % p
            if f:
                for s in range(d):
                    a[r][s] = (a[r][s] - f * a[t][s]) % p
                for s in range(d):
                    a[s][r] = (a[s][r] - f * a[s][t]) % p
                basis[r] = [(x - f * y) % p for x, y in zip(basis[r], basis[t])]
        diag.append(a[t][t])
    return diag, basis


def _pair_mod(g, u, v, p):
    return sum(ui * gij * vj for ui, row in zip(u, g) for gij, vj in zip(row, v)) % p


def _is_square(x, p):
    return x % p == 0 or pow(x, (p - 1) // 2, p) == 1


def _isotropic_vector(g, p):
    """A nonzero isotropic vector of a nondegenerate form over F_p, or None."""
    diag, basis = _diagonalize_mod_p(g, p)
    r = len(diag)
    coords = None
    if r == 2:
        disc = -diag[0] * diag[1] % p
        if _is_square(disc, p):
            # d0 x^2 + d1 y^2 = 0 with y = 1
            x2 = -diag[1] * pow(diag[0], -1, p) % p
            coords = [sqrt_mod(x2, p), 1]
    elif r >= 3:
        d0, d1, d2 = diag[:3]
        inv1 = pow(d1, -1, p)
        for x in range(p):
            y2 = (-d2 - d0 * x * x) * inv1 % p
            if _is_square(y2, p):
                coords = [x, sqrt_mod(y2, p) if y2 else 0, 1] + [0] * (r - 3)
                break
        else:  # pragma: no cover - Chevalley-Warning guarantees a solution
            raise InternalInconsistencyError("no isotropic vector in dimension >= 3")
    if coords is None:
        return None
    coords += [0] * (r - len(coords))
    return [sum(c * b[k] for c, b in zip(coords, basis)) % p for k in range(r)]


def _witt_index_nondegenerate(g, p):
    d = len(g)
    if d < 2:
        return 0
    v = _isotropic_vector(g, p)
    if v is None:
        return 0
    gv = [sum(row[j] * v[j] for j in range(d)) % p for row in g]
    k = next(i for i in range(d) if gv[i])
    w = [0] * d
    w[k] = pow(gv[k], -1, p)  # B(v, w) = 1
    bww = _pair_mod(g, w, w, p)
    half = bww * pow(2, -1, p) % p
    w = [(wi - half * vi) % p for wi, vi in zip(w, v)]
    gw = [sum(row[j] * w[j] for j in range(d)) % p for row in g]
    comp = linalg.nullspace_mod_p([gv, gw], p, d)
    sub = [[_pair_mod(g, u, x, p) for x in comp] for u in comp]
    return 1 + _witt_index_nondegenerate(sub, p)


def witt_isotropic_dim_mod_p(form: SymIntForm, p: int) -> int:
    """Dimension of a maximal totally isotropic subspace of F mod p."""
    if not isinstance(p, int) or not isprime(p):
        raise DomainError(f"{p} is not prime")
    g = [[x % p for x in row] for row in form.gram]
    d = form.dim
    if d == 0:
        return 0
    if p == 2:
        # isotropic vectors lie in the kernel K of x -> sum g_ii x_i, on
        # which the reduction is alternating
        ell = [g[i][i] for i in range(d)]
        k_basis = linalg.nullspace_mod_p([ell], 2, d) if any(ell) else [
            tuple(int(i == j) for j in range(d)) for i in range(d)
        ]
        sub = [[_pair_mod(g, u, v, 2) for v in k_basis] for u in k_basis]
        rk = linalg.rank_mod_p(sub, 2) if sub else 0
        return len(k_basis) - rk // 2
    rad = linalg.nullspace_mod_p(g, p, d)
    diag, basis = _diagonalize_mod_p(g, p)
    nondeg = [b for x, b in zip(diag, basis) if x]
    if len(nondeg) + len(rad) != d:
        raise InternalInconsistencyError("mod-p diagonalization lost rank")
    sub = [[_pair_mod(g, u, v, p) for v in nondeg] for u in nondeg]
    return len(rad) + _witt_index_nondegenerate(sub, p)


_EVEN_PART = re.compile(r"^(\d*)(E8|\(-E8\)|H)$")
_ODD_PART = re.compile(r"^(\d+)<([+-])1>$")


def parse_class_label(label: str) -> UnimodularClass:
    """Inverse of ``str(UnimodularClass)``."""
    parts = [p.strip() for p in label.split("+ ") if p.strip()] if label != "0" else []
    if parts and _ODD_PART.match(parts[0]):
        counts = {}
        for part in parts:
            m = _ODD_PART.match(part)
            if not m:
                raise ValueError(f"bad class label {label!r}")
            counts[m.group(2)] = int(m.group(1))
        return UnimodularClass(even=False, plus=counts.get("+", 0), minus=counts.get("-", 0))
    k = ell = 0
    for part in parts:
        m = _EVEN_PART.match(part)
        if not m:
            raise ValueError(f"bad class label {label!r}")
        mult = int(m.group(1) or 1)
        if m.group(2) == "H":
            ell = mult
        else:
            k = mult if m.group(2) == "E8" else -mult
    return UnimodularClass(even=True, e8_count=k, hyperbolic_count=ell)
