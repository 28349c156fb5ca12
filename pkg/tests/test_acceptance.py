"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line."""

import math
import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest
import sympy

from conftest import random_unimodular
from geography4 import constructions as cons
from geography4 import geography as geo
from geography4 import linalg, search
from geography4.classes import (
    PRINTED_V1,
    canonical_class,
    family_vectors,
    is_isotropic,
    normal_form_6,
    pairing_gram,
    triple_invariants,
)
from geography4.errors import DomainError, ParseError
from geography4.exterior import KVector, gl_action, subsets, wedge, wedge_bruteforce
from geography4.forms import SymIntForm, rational_isotropic_dim
from geography4.tables import random_plan

Q_RANGE = 16
SEARCH_LIMIT = 25000


# 1 ------------------------------------------------------------------------
def test_c1_exterior_oracle(acceptance):
    t0 = time.perf_counter()
    pairs = 0
    for n in range(1, 9):
        monos = [KVector.basis(n, s) if s else KVector.scalar(n, 1) for k in range(n + 1) for s in subsets(n, k)]
        for a in monos:
            for b in monos:
                if a.k + b.k <= n:
                    assert wedge(a, b) == wedge_bruteforce(a, b)
                    pairs += 1
    r = random.Random(1)
    for _ in range(10_000):
        n = r.randint(2, 8)
        k, l = r.randint(0, n // 2), r.randint(0, n - n // 2)
        u = KVector(n, k, [r.randint(-3, 3) for _ in range(math.comb(n, k))])
        v = KVector(n, l, [r.randint(-3, 3) for _ in range(math.comb(n, l))])
        assert wedge(u, v) == wedge_bruteforce(u, v)
    elapsed = time.perf_counter() - t0
    ok = elapsed < 30
    acceptance("1 exterior oracle equivalence", ok, f"{pairs} monomial pairs + 10^4 random, {elapsed:.1f}s")
    assert ok


# 2 ------------------------------------------------------------------------
def test_c2_form_invariants(acceptance):
    h = SymIntForm.hyperbolic()
    assert SymIntForm.e8().invariants.signature == 8
    assert h.invariants.signature == 0
    assert (h + h + h).invariants.signature == 0
    r = random.Random(2)
    for _ in range(500):
        n = r.randint(1, 15)
        g = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                g[i][j] = g[j][i] = r.randint(-4, 4)
        f = SymIntForm(g)
        if n == 1:
            b = [[r.choice((1, -1))]]
        else:
            b = random_unimodular(n, r, steps=2 * n).matrix
        assert f.congruent(b).invariants == f.invariants
    for _ in range(200):
        n = r.randint(1, 8)
        m = [[r.randint(-30, 30) for _ in range(n)] for _ in range(n)]
        d = linalg.bareiss_det(m)
        sd = linalg.smith_diagonal(m)
        prod = math.prod(sd) if len(sd) == n and all(sd) else 0
        assert abs(d) == prod
        assert linalg.det_modular(m) == d
    acceptance("2 form invariants", True, "E8/H/3H, 500 congruences, 200 Smith/Bareiss dets")


# 3 ------------------------------------------------------------------------
def test_c3_normal_form(acceptance):
    t0 = time.perf_counter()
    r = random.Random(3)
    for _ in range(500):
        omega = KVector(6, 2, [r.randint(-9, 9) for _ in range(15)])
        b = random_unimodular(6, r)
        nf = normal_form_6(omega)
        assert normal_form_6(gl_action(b, omega)).triple == nf.triple
        assert normal_form_6(nf.canonical()).triple == nf.triple
        a, bb, c = nf.triple
        t = triple_invariants(omega)
        assert (t.content, t.half_square, t.sign * t.sixth_cube) == (a, a * bb, a * bb * c)
    elapsed = time.perf_counter() - t0
    ok = elapsed < 60
    acceptance("3 normal form invariance", ok, f"500 classes, {elapsed:.1f}s")
    assert ok


# 4 ------------------------------------------------------------------------
EXACT_CASES = [
    ("trivial", lambda s: abs(s) + 2),
    ("zn=1", lambda s: abs(s)),
    ("zn=2", lambda s: abs(s)),
    ("zn=3", lambda s: abs(s) + 2),
    ("zn=4", lambda s: abs(s)),
    ("zn=5", lambda s: abs(s) + 6),
    ("z5_k=0", lambda s: abs(s) + 12),
    ("zn=6", lambda s: 6 if s == 0 else 7 if abs(s) == 1 else abs(s) + 4),
    ("z6_abc=0,0,0", lambda s: 20 + abs(s)),
    ("z6_abc=1,0,0", lambda s: 14 + abs(s)),
    ("z6_abc=1,1,0", lambda s: 10 + abs(s)),
]

GAP_CASES = ["z4_k=2", "z4_k=3", "z5_k=2", "z6_abc=2,2,2", "z6_abc=1,2,2", "z6_abc=1,3,6", "z6_abc=1,1,2"]


def _gap_rows(spec):
    qf = geo.builtin(spec).qfunction()
    return {s: qf[s] for s in range(-Q_RANGE, Q_RANGE + 1)}


def test_c4_geography_tables(acceptance):
    for spec, fn in EXACT_CASES:
        qf = geo.builtin(spec).qfunction()
        for s in range(-Q_RANGE, Q_RANGE + 1):
            assert qf[s].exact and qf[s].lower == fn(s), (spec, s)
    # gap cases: engine reproduces the published bounds (parity rounded),
    # exact only where the endpoints coincide
    for spec in GAP_CASES:
        g = geo.builtin(spec)
        for s, row in _gap_rows(spec).items():
            table = geo.q_exact(g.tag, g.params, s)
            if isinstance(table, geo.Interval):
                assert (row.lower, row.upper) == (table.lo, table.hi) or (
                    not row.exact and table.lo <= row.lower and row.upper == table.hi
                ), (spec, s)
            else:
                assert row.exact and row.lower == table, (spec, s)
    z4 = _gap_rows("z4_k=2")
    assert all(not z4[s].exact for s in range(2, Q_RANGE + 1, 2))
    z5 = _gap_rows("z5_k=2")
    assert z5[0].exact and all(not z5[s].exact for s in range(2, Q_RANGE + 1))
    for spec in ("z6_abc=2,2,2", "z6_abc=1,2,2", "z6_abc=1,1,2"):
        rows = _gap_rows(spec)
        assert rows[0].exact and all(not rows[s].exact for s in range(2, Q_RANGE + 1))
    q111 = geo.builtin("z6_abc=1,1,1").qfunction()
    for s in range(2, Q_RANGE + 1):
        row = q111[s]
        assert (not row.exact) or (row.derived_sharpening and row.status() == "exact (derived sharpening)")
    acceptance("4 geography tables", True, "exact tables, parity-rounded gaps, derived sharpening flagged for q_{1,1,1}")


@pytest.mark.xfail(strict=True, reason="parity closes sigma=+-1 in the gap cases; the literal list of open spots disagrees")
def test_c4_literal_open_spots(acceptance):
    z4 = _gap_rows("z4_k=2")
    z5 = _gap_rows("z5_k=2")
    open_z4 = {s for s, r in z4.items() if not r.exact and s >= 0}
    ok = open_z4 == set(range(2, Q_RANGE + 1, 2))
    ok &= all(not z5[s].exact for s in z5 if s != 0)
    for spec in ("z6_abc=2,2,2", "z6_abc=1,2,2", "z6_abc=1,1,2"):
        rows = _gap_rows(spec)
        ok &= all(not rows[s].exact for s in rows if s != 0)
    acceptance("4b literal open-spot list (Z4 even only, Z5/Z6 every sigma != 0)", ok, "sigma=+-1 exact by parity")
    assert ok


# 5 ------------------------------------------------------------------------
def test_c5_torus_values(acceptance):
    for n in range(6, 13):
        row = geo.builtin(f"zn={n}").qfunction(window=8)[0]
        c = math.comb(n, 2)
        assert row.exact and row.lower == 2 - 2 * n + c + c % 2
    assert geo.builtin("zn=3").qfunction(window=8)[0].lower == 2
    assert geo.builtin("zn=5").qfunction(window=8)[0].lower == 6
    ps = [geo.derived_invariants(geo.builtin(f"zn={n}").qfunction()).p for n in range(8)]
    ok = ps == [2, 0, 0, 2, 0, 6, 4, 2]
    acceptance("5 q(Z^n) at sigma=0 and p-list", ok, f"p = {ps}")
    assert ok


# 6 ------------------------------------------------------------------------
def _descartes_inertia(gram):
    """(b+, b-) from sign changes of the characteristic polynomial (all roots real)."""
    x = sympy.symbols("x")
    poly = sympy.Matrix(gram).charpoly(x)
    coeffs = [c for c in poly.all_coeffs()]
    nonzero = [c for c in coeffs if c != 0]
    pos = sum(1 for a, b in zip(nonzero, nonzero[1:]) if a * b < 0)
    neg_coeffs = [c * (-1) ** (len(coeffs) - 1 - i) for i, c in enumerate(coeffs)]
    nonzero = [c for c in neg_coeffs if c != 0]
    neg = sum(1 for a, b in zip(nonzero, nonzero[1:]) if a * b < 0)
    return pos, neg


# frozen from the oracle above: b+ = 7, b- = 8 for the canonical class (1,1,1)
FROZEN_INERTIA_111 = (7, 8)


def test_c6_pairing_engine(acceptance):
    pf = pairing_gram(canonical_class(1, 1, 1))
    inv = pf.invariants
    assert _descartes_inertia(pf.form.gram) == FROZEN_INERTIA_111
    assert (inv.b_plus, inv.b_minus) == FROZEN_INERTIA_111
    assert inv.rank == 15 and inv.parity == "even"
    m = rational_isotropic_dim(inv)
    assert m == 7
    assert is_isotropic(pf.form, family_vectors("V1"))
    beta2 = geo.min_beta2(inv.b_plus, inv.b_minus, m, -2)
    chi = 2 - 2 * 6 + beta2
    ok = chi == 6 == geo.q_exact("z6_abc", (1, 1, 1), -2)
    acceptance("6 pairing bound engine", ok, f"b+-={FROZEN_INERTIA_111}, m={m}, chi bound at sigma=-2 is {chi}")
    assert ok


@pytest.mark.xfail(strict=True, reason="the printed V1 is not isotropic: x3x6 and x4x5 pair via x1x2")
def test_c6_literal_v1(acceptance):
    pf = pairing_gram(canonical_class(1, 1, 1))
    ok = is_isotropic(pf.form, family_vectors(PRINTED_V1))
    acceptance("6b isotropic subspace containing the printed V1", ok, "(x3x6, x4x5) pair to 1")
    assert ok


# 7 ------------------------------------------------------------------------
def test_c7_projective(acceptance):
    assert cons.projective_counts(2, 2) == (7, 7) == cons.projective_counts_bruteforce(2, 2)
    assert cons.projective_counts(5, 3) == (156, 806)
    w = cons.projective_construction(cons.ProjectivePlan(5, 3, cons.block_by_name("-S6")))
    assert (w.sigma, w.chi) == (1612, 12586)
    rng = random.Random(7)
    for _ in range(20):
        plan = random_plan(rng)
        assert cons.projective_formula(plan) == cons.evaluate(cons.projective_recipe(plan))
    acceptance("7 projective construction", True, "(7,7), (156,806), (1612,12586), 20 replays")


# 8 ------------------------------------------------------------------------
def test_c8_ratio(acceptance):
    best = cons.minimize_p_ratio(50)
    ok = best == (7, Fraction(13, 28)) and cons.p_ratio_bound(5) == Fraction(7, 15)
    acceptance("8 13/28 bound", ok, f"argmin {best[0]}, value {best[1]}")
    assert ok


# 9 ------------------------------------------------------------------------
def test_c9_search(acceptance):
    spec = search.SearchSpec("decomposable-sums", 1, 7, limit=SEARCH_LIMIT)
    one = search.run_search(spec, workers=1)
    eight = search.run_search(spec, workers=8)
    hits0 = [h for h in one.hits if h.invariants.signature == 0 and str(h.classification) == "14H"]
    assert hits0 and all(search.verify_hit(h) for h in hits0)
    assert [h.index for h in one.hits] == [h.index for h in eight.hits]
    text = hits0[0].certificate()
    corrupted = [
        text.replace("classification\t14H", "classification\tE8 + 10H"),
        text.replace("\n28\t14\t14\t0\t", "\n28\t15\t13\t2\t"),
    ]
    lines = text.split("\n")
    k = next(i for i, ln in enumerate(lines) if ":" in ln)
    lines[k] = lines[k].rsplit(":", 1)[0] + ": -1" if not lines[k].endswith("-1") else lines[k].rsplit(":", 1)[0] + ": 1"
    corrupted.append("\n".join(lines))
    for bad in corrupted:
        assert bad != text
        try:
            assert not search.verify_hit(search.parse_certificate(bad))
        except (ParseError, DomainError):
            pass
    acceptance("9 search", True, f"first 14H hit at candidate {hits0[0].index}; 1 vs 8 workers identical")


# 10 -----------------------------------------------------------------------
def test_c10_tables_cli(acceptance):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "geography4.cli", "tables"], capture_output=True, text=True)
    elapsed = time.perf_counter() - t0
    rows = proc.stdout.splitlines()[1:]
    ok = proc.returncode == 0 and rows and all(r.startswith("OK") for r in rows) and elapsed < 300
    acceptance("10 tables CLI", ok, f"{len(rows)} rows, exit {proc.returncode}, {elapsed:.1f}s")
    assert ok
