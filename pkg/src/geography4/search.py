"""Bounded search for degree-4 classes on Z^8 with a unimodular pairing.

Candidates are screened in batches by a determinant mod a large prime and
only survivors get exact treatment.  The candidate stream is cut into
fixed-size chunks whose contents do not depend on the number of workers,
so results are identical under any degree of parallelism.
"""

from __future__ import annotations

import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import kernels, linalg
from .classes import gram_from_table
from .errors import (
    BudgetExceededError,
    DomainError,
    InternalInconsistencyError,
    ParseError,
    VerificationError,
)
from .exterior import KVector, monomial_product_bruteforce, parse_kvector, rank_subset, subsets
from .forms import (
    FormInvariants,
    SymIntForm,
    UnimodularClass,
    classify_indefinite_unimodular,
    invariants,
    parse_class_label,
    parse_gram,
)

log = logging.getLogger(__name__)

N = 8
DEGREE = 4
WIDTH = math.comb(N, DEGREE)  # 70 coefficients
DIM = math.comb(N, 2)  # 28
FAMILIES = ("full-grid", "decomposable-sums", "random")
DEFAULT_BUDGET = 2_000_000
BUDGET_ENV = "GEOGRAPHY4_SEARCH_BUDGET"
CHUNK = 4096


@dataclass(frozen=True)
class SearchSpec:
    family: str = "decomposable-sums"
    coefficient_bound: int = 1
    support_bound: int = 7
    seed: int | None = None
    trials: int = 0
    dedupe: bool = True
    limit: int | None = None  # examine only this many leading candidates

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.coefficient_bound < 1 or self.support_bound < 1:
            raise DomainError("coefficient and support bounds must be positive")
        if self.support_bound > WIDTH:
            raise DomainError(f"support bound exceeds {WIDTH}")
        if self.family == "random":
            if self.seed is None:
                raise DomainError("the random family needs a seed")
            if self.trials < 1:
                raise DomainError("the random family needs trials >= 1")
        if self.limit is not None and self.limit < 0:
            raise DomainError("limit must be nonnegative")


@dataclass(frozen=True)
class SearchHit:
    index: int
    omega: KVector
    gram: SymIntForm
    invariants: FormInvariants
    classification: UnimodularClass

    @property
    def signature_key(self):
        inv = self.invariants
        return (inv.rank, inv.signature, inv.parity, inv.unimodular)

    def certificate(self) -> str:
        return "\n".join([
            self.omega.to_text(),
            self.gram.to_text(),
            FormInvariants.tsv_header() + "\n" + self.invariants.tsv_row() + "\n",
            f"classification\t{self.classification}\n",
        ])


@dataclass
class SearchResult:
    spec: SearchSpec
    hits: list[SearchHit]
    examined: int = 0
    screened: int = 0
    by_signature: dict[int, int] = field(default_factory=dict)
    certificates: list[Path] = field(default_factory=list)

    def summary(self) -> str:
        lines = [
            f"family\t{self.spec.family}",
            f"examined\t{self.examined}",
            f"passed_screen\t{self.screened}",
            f"unimodular_hits\t{sum(self.by_signature.values())}",
        ]
        for sig in sorted(self.by_signature):
            lines.append(f"hits_sigma={sig}\t{self.by_signature[sig]}")
        if not any(abs(s) == 8 for s in self.by_signature):
            lines.append("sigma=+-8\tnone found (not evidence of nonexistence)")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- families


@lru_cache(maxsize=None)
def _coverage():
    """Bitmask over the 28 pairs of Lambda^2 each support monomial can pair up."""
    full = set(range(1, N + 1))
    masks = []
    for quad in subsets(N, DEGREE):
        rest = sorted(full - set(quad))
        masks.append(sum(1 << rank_subset(N, p) for p in itertools.combinations(rest, 2)))
    by_pair = tuple(tuple(q for q in range(WIDTH) if masks[q] >> p & 1) for p in range(DIM))
    return tuple(masks), by_pair


def covering_supports(max_terms: int):
    """Supports whose monomials pair up every element of Lambda^2.

    A unimodular pairing has no zero row, so this is necessary.  By symmetry
    of the coordinates the first monomial is fixed to x1x2x3x4.  Supports
    are yielded in a fixed depth-first order without repeats.
    """
    masks, by_pair = _coverage()
    everything = (1 << DIM) - 1
    seen = set()

    def dfs(chosen, covered):
        if covered == everything:
            key = tuple(sorted(chosen))
            if key not in seen:
                seen.add(key)
                yield key
            return
        if len(chosen) == max_terms:
            return
        missing = DIM - bin(covered).count("1")
        if missing > 6 * (max_terms - len(chosen)):
            return
        free = covered ^ everything
        first = (free & -free).bit_length() - 1
        for q in by_pair[first]:
            if q not in chosen:
                yield from dfs(chosen + [q], covered | masks[q])

    yield from dfs([0], masks[0])


@lru_cache(maxsize=None)
def _support_sizes(max_terms: int):
    counts = {}
    for s in covering_supports(max_terms):
        counts[len(s)] = counts.get(len(s), 0) + 1
    return counts


def _nonzero_values(bound):
    return [v for m in range(1, bound + 1) for v in (m, -m)]


def _decomposable_stream(spec: SearchSpec):
    values = _nonzero_values(spec.coefficient_bound)
    lead = list(range(1, spec.coefficient_bound + 1))
    for support in covering_supports(spec.support_bound):
        for first in lead:
            for rest in itertools.product(values, repeat=len(support) - 1):
                c = [0] * WIDTH
                c[support[0]] = first
                for q, v in zip(support[1:], rest):
                    c[q] = v
                yield c


def _grid_stream(spec: SearchSpec):
    values = _nonzero_values(spec.coefficient_bound)
    for size in range(0, spec.support_bound + 1):
        for support in itertools.combinations(range(WIDTH), size):
            for vals in itertools.product(values, repeat=size):
                c = [0] * WIDTH
                for q, v in zip(support, vals):
                    c[q] = v
                yield c


def _random_chunk(spec: SearchSpec, chunk_id: int, start: int, stop: int):
    rng = np.random.default_rng([spec.seed, chunk_id])
    b = spec.coefficient_bound
    out = np.zeros((stop - start, WIDTH), dtype=np.int64)
    for row in out:
        support = rng.choice(WIDTH, size=spec.support_bound, replace=False)
        row[support] = rng.integers(-b, b + 1, size=spec.support_bound)
    return out


def estimate(spec: SearchSpec) -> int:
    if spec.family == "random":
        total = spec.trials
    elif spec.limit is not None:
        return spec.limit
    elif spec.family == "full-grid":
        total = sum(
            math.comb(WIDTH, j) * (2 * spec.coefficient_bound) ** j
            for j in range(spec.support_bound + 1)
        )
    else:
        b = spec.coefficient_bound
        total = sum(
            count * b * (2 * b) ** (size - 1)
            for size, count in _support_sizes(spec.support_bound).items()
        )
    return total if spec.limit is None else min(total, spec.limit)


def resolve_budget(budget: int | None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get(BUDGET_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise DomainError(f"{BUDGET_ENV} must be an integer") from None
    return DEFAULT_BUDGET


def _chunks(spec: SearchSpec):
    """(chunk_id, first candidate index, coefficient array) in stream order."""
    cap = spec.limit
    if spec.family == "random":
        total = spec.trials if cap is None else min(spec.trials, cap)
        for cid, start in enumerate(range(0, total, CHUNK)):
            stop = min(start + CHUNK, total)
            yield cid, start, _random_chunk(spec, cid, start, stop)
        return
    stream = _decomposable_stream(spec) if spec.family == "decomposable-sums" else _grid_stream(spec)
    if cap is not None:
        stream = itertools.islice(stream, cap)
    cid = start = 0
    while True:
        block = list(itertools.islice(stream, CHUNK))
        if not block:
            return
        yield cid, start, np.array(block, dtype=np.int64)
        cid += 1
        start += len(block)


# ---------------------------------------------------------------- evaluation


def exact_hit(index: int, coeffs) -> SearchHit | None:
    """Exact check of one candidate; None unless the pairing is unimodular."""
    omega = KVector(N, DEGREE, [int(x) for x in coeffs])
    g = SymIntForm(gram_from_table(N, omega.coeffs))
    if abs(linalg.bareiss_det(g.gram)) != 1:
        return None
    inv = invariants(g)
    if inv.signature % 8:
        raise InternalInconsistencyError(
            f"even unimodular pairing with signature {inv.signature} (candidate {index})"
        )
    return SearchHit(index, omega, g, inv, classify_indefinite_unimodular(inv, smooth_spin=True))


def _process_chunk(args):
    start, coeffs, use_numba = args
    grams = kernels.gram_batch(N, coeffs, use_numba)
    dets = kernels.det_mod_p_batch(grams, use_numba=use_numba)
    p = kernels.SCREEN_PRIME
    survivors = np.nonzero((dets == 1) | (dets == p - 1))[0]
    hits = []
    for i in survivors:
        h = exact_hit(start + int(i), coeffs[i])
        if h is not None:
            hits.append(h)
    return start, len(coeffs), len(survivors), hits


def run_search(
    spec: SearchSpec,
    workers: int = 1,
    budget: int | None = None,
    out_dir: str | os.PathLike | None = None,
    use_numba: bool | None = None,
) -> SearchResult:
    est = estimate(spec)
    limit = resolve_budget(budget)
    if est > limit:
        raise BudgetExceededError(est, limit)
    result = SearchResult(spec, [])
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    jobs = ((start, coeffs, use_numba) for _, start, coeffs in _chunks(spec))
    all_hits = []
    if workers <= 1:
        outputs = map(_process_chunk, jobs)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        outputs = pool.map(_process_chunk, jobs)
    try:
        for start, count, screened, hits in outputs:
            result.examined += count
            result.screened += screened
            for h in hits:
                result.by_signature[h.invariants.signature] = (
                    result.by_signature.get(h.invariants.signature, 0) + 1
                )
                if abs(h.invariants.signature) == 8:
                    # would settle an open question; persist before anything else
                    result.certificates.append(write_certificate(h, out or Path("."), prefix="sigma8"))
                    log.warning("signature %d hit at candidate %d", h.invariants.signature, h.index)
            all_hits.extend(hits)
    finally:
        if pool is not None:
            pool.shutdown()
    all_hits.sort(key=lambda h: h.index)
    if spec.dedupe:
        kept, keys = [], set()
        for h in all_hits:
            if h.signature_key not in keys:
                keys.add(h.signature_key)
                kept.append(h)
        all_hits = kept
    result.hits = all_hits
    if out is not None:
        for h in all_hits:
            if abs(h.invariants.signature) != 8:
                result.certificates.append(write_certificate(h, out))
    return result


# ---------------------------------------------------------------- certificates


def write_certificate(hit: SearchHit, directory: Path, prefix="hit") -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{prefix}-{hit.index:012d}-sigma{hit.invariants.signature}.cert"
    path.write_text(hit.certificate())
    return path


def parse_certificate(text: str, source=None) -> SearchHit:
    sections = [s for s in text.strip("\n").split("\n\n") if s.strip()]
    if len(sections) != 4:
        raise ParseError("certificate needs 4 blank-line separated sections", None, source)
    omega = parse_kvector(sections[0], source)
    gram = parse_gram(sections[1], source)
    tsv = sections[2].strip().splitlines()
    if len(tsv) != 2 or tuple(tsv[0].split("\t")) != tuple(FormInvariants.tsv_header().split("\t")):
        raise ParseError("bad invariants table", None, source)
    f = tsv[1].split("\t")
    try:
        inv = FormInvariants(
            dim=gram.dim,
            rank=int(f[0]),
            b_plus=int(f[1]),
            b_minus=int(f[2]),
            signature=int(f[3]),
            determinant=int(f[4]),
            parity=f[5],
            unimodular=f[6] == "true",
            torsion=() if f[7] == "-" else tuple(int(x) for x in f[7].split(",")),
        )
    except (ValueError, IndexError, InternalInconsistencyError) as exc:
        raise ParseError(f"bad invariants row: {exc}", None, source) from None
    cls_line = sections[3].strip()
    if not cls_line.startswith("classification\t"):
        raise ParseError("missing classification line", None, source)
    try:
        cls = parse_class_label(cls_line.split("\t", 1)[1])
    except ValueError as exc:
        raise ParseError(str(exc), None, source) from None
    return SearchHit(-1, omega, gram, inv, cls)


def _oracle_gram(omega: KVector):
    """Gram matrix by brute-force sorting of index words."""
    pairs = subsets(N, 2)
    coeff = dict(omega.terms())
    rows = []
    for mr in pairs:
        row = []
        for ms in pairs:
            total = 0
            for quad, c in coeff.items():
                sign, word = monomial_product_bruteforce(mr + ms, quad)
                if sign:
                    total += sign * c
            row.append(total)
        rows.append(row)
    return rows


def check_hit(hit: SearchHit) -> None:
    """Raise VerificationError describing the first problem found."""
    omega = hit.omega
    if (omega.n, omega.k) != (N, DEGREE):
        raise VerificationError("class is not a degree-4 class on Z^8")
    stored = hit.gram.gram
    if len(stored) != DIM:
        raise VerificationError(f"Gram matrix has dimension {len(stored)}, expected {DIM}")
    oracle = _oracle_gram(omega)
    for r in range(DIM):
        for s in range(DIM):
            if stored[r][s] != oracle[r][s]:
                raise VerificationError(
                    f"Gram entry ({r}, {s}) is {stored[r][s]}, recomputed {oracle[r][s]}"
                )
    d1 = linalg.bareiss_det(oracle)
    d2 = linalg.det_modular(oracle)
    if d1 != d2:
        raise VerificationError(f"determinants disagree: {d1} vs {d2}")
    if abs(d1) != 1:
        raise VerificationError(f"pairing is not unimodular (det {d1})")
    fresh = invariants(SymIntForm(oracle))
    if fresh != hit.invariants:
        raise VerificationError(f"stored invariants differ from recomputed {fresh}")
    if fresh.rank != DIM or not fresh.is_even or fresh.signature % 8:
        raise VerificationError("hit is not an even unimodular form of rank 28")
    cls = hit.classification
    if not cls.even or 8 * abs(cls.e8_count) + 2 * cls.hyperbolic_count != DIM:
        raise VerificationError("classification does not satisfy 28 = 8|k| + 2l")
    if cls.signature != fresh.signature:
        raise VerificationError("classification signature differs from the form's")


def verify_hit(hit: SearchHit) -> bool:
    try:
        check_hit(hit)
    except VerificationError as exc:
        log.info("verification failed: %s", exc)
        return False
    return True
