"""Built-in regression suite: every published number recomputed from scratch."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable

from . import constructions as cons
from . import geography as geo
from .classes import (
    PRINTED_V1,
    canonical_class,
    family_vectors,
    gcd_lcm_substitution,
    is_isotropic,
    normal_form_6,
    pairing_gram,
    triple_invariants,
)
from .errors import GeographyError, RegressionMismatch
from .exterior import KVector, gl_action, rank_subset, top_coefficient, wedge
from .forms import SymIntForm, classify_indefinite_unimodular, rational_isotropic_dim
from .search import SearchSpec, run_search, verify_hit

SEARCH_LIMIT = 25000
Q_RANGE = 16


@dataclass(frozen=True)
class Row:
    section: str
    label: str
    expected: str
    computed: str
    citation: str

    @property
    def ok(self) -> bool:
        return self.expected == self.computed

    def line(self) -> str:
        status = "OK" if self.ok else "MISMATCH"
        return "\t".join([status, self.section, self.label, self.expected, self.computed, self.citation])


HEADER = "status\tsection\tcheck\texpected\tcomputed\tcitation"


def _row(section, label, expected, computed, citation):
    return Row(section, label, str(expected), str(computed), citation)


def _mono(n, *idx):
    return KVector.from_terms(n, len(idx), {idx: 1})


# ---------------------------------------------------------------- sections


def exterior_rows():
    s = "exterior"
    yield _row(s, "x1x3 ^ x2x4", "-1*x1x2x3x4", wedge(_mono(4, 1, 3), _mono(4, 2, 4)), "sign rule for degree-2 products")
    w = canonical_class(1, 1, 1)
    yield _row(s, "(x1x2+x3x4+x5x6)^3", 6, top_coefficient(wedge(wedge(w, w), w)), "cube of the canonical class is 6abc")
    two = KVector.from_terms(4, 2, {(1, 2): 2, (3, 4): 3})
    yield _row(
        s, "gcd/lcm substitution on 2x1x2+3x3x4", "1*x1x2 + 6*x3x4",
        gl_action(gcd_lcm_substitution(2, 3, -1, 1), two), "normal form substitution",
    )


def forms_rows():
    s = "forms"
    h = SymIntForm.hyperbolic().invariants
    yield _row(s, "H", "2 0 even True", f"{h.rank} {h.signature} {h.parity} {h.unimodular}", "hyperbolic plane")
    e = SymIntForm.e8().invariants
    yield _row(s, "E8", "8 8 even True", f"{e.rank} {e.signature} {e.parity} {e.unimodular}", "E8 form")
    h3 = (SymIntForm.hyperbolic() + SymIntForm.hyperbolic() + SymIntForm.hyperbolic()).invariants
    yield _row(s, "sigma(3H)", 0, h3.signature, "hyperbolic sum")
    f0 = SymIntForm.hyperbolic()
    for _ in range(13):
        f0 = f0 + SymIntForm.hyperbolic()
    yield _row(s, "rank 28 sigma 0 even", "14H", classify_indefinite_unimodular(f0.invariants), "rank-28 pairing classes")
    f8 = SymIntForm.e8()
    for _ in range(10):
        f8 = f8 + SymIntForm.hyperbolic()
    cls = classify_indefinite_unimodular(f8.invariants, smooth_spin=True)
    yield _row(s, "rank 28 sigma 8 even", "E8 + 10H rohlin-violating", f"{cls} {'rohlin-violating' if cls.rohlin_violation else 'ok'}", "rank-28 pairing classes")


def classes_rows():
    s = "classes"
    x12 = KVector.from_terms(6, 2, {(1, 2): 1})
    yield _row(s, "isotropic dim of pairing of x1x2", 12, rational_isotropic_dim(pairing_gram(x12).invariants), "12-dimensional isotropic subspace")
    w = canonical_class(1, 1, 1)
    pf = pairing_gram(w)
    g = pf.form.gram
    yield _row(s, "pairing entry (x1x2, x3x4)", 1, g[rank_subset(6, (1, 2))][rank_subset(6, (3, 4))], "sign rule for degree-2 products")
    yield _row(s, "pairing entry (x1x3, x2x4)", -1, g[rank_subset(6, (1, 3))][rank_subset(6, (2, 4))], "sign rule for degree-2 products")
    inv = pf.invariants
    yield _row(
        s, "pairing of (1,1,1): rank parity b+ b- isotropic", "15 even 7 8 7",
        f"{inv.rank} {inv.parity} {inv.b_plus} {inv.b_minus} {rational_isotropic_dim(inv)}",
        "derived: exact diagonalization of the pairing",
    )
    yield _row(s, "V1 isotropic for (1,1,1)", True, is_isotropic(pf.form, family_vectors("V1")), "7-dimensional isotropic subspace")
    printed = family_vectors(PRINTED_V1)
    clash = [
        (PRINTED_V1[i], PRINTED_V1[j])
        for i in range(7) for j in range(i + 1, 7)
        if pf.form.pair(printed[i], printed[j])
    ]
    yield _row(s, "non-isotropic pairs in the printed V1", [((3, 6), (4, 5))], clash, "7-dimensional isotropic subspace, as printed")
    yield _row(s, "triple invariants of (1,1,1)", (1, 1, 1), triple_invariants(w).as_tuple()[:3], "content, square and cube invariants")
    nf = normal_form_6(KVector.from_terms(6, 2, {(1, 2): 2, (3, 4): 3}))
    yield _row(s, "normal form of 2x1x2+3x3x4", (1, 6, 0), nf.triple, "normal form for Z^6")


_Q_CASES = (
    ("trivial", "trivial", "trivial group"),
    ("zn=1", "Z", "Z and Z^2"),
    ("zn=2", "Z^2", "Z and Z^2"),
    ("zn=3", "Z^3", "trivial group and Z^3"),
    ("zn=4", "Z^4", "Z^4 geography"),
    ("zn=5", "Z^5", "Z^5 geography"),
    ("z5_k=0", "Z^5 alpha=0", "Z^5 geography, alpha = 0"),
    ("zn=6", "Z^6", "Z^6 master table"),
    ("z6_abc=0,0,0", "Z^6 (0,0,0)", "Z^6 classes, s = 20"),
    ("z6_abc=1,0,0", "Z^6 (1,0,0)", "Z^6 classes, s = 14"),
    ("z6_abc=1,1,0", "Z^6 (1,1,0)", "Z^6 classes, s = 10"),
    ("z6_abc=1,1,1", "Z^6 (1,1,1)", "Z^6 classes, r in {4,6}"),
    ("z6_abc=2,2,2", "Z^6 (2,2,2)", "Z^6 classes, s = 20 gap"),
    ("z6_abc=1,2,2", "Z^6 (1,2,2)", "Z^6 classes, s = 14 gap"),
    ("z6_abc=1,1,2", "Z^6 (1,1,2)", "Z^6 classes, s = 10 gap"),
    ("z4_k=0", "Z^4 alpha=0", "Z^4 geography, alpha = 0"),
    ("z4_k=1", "Z^4 alpha=[T]", "Z^4 geography"),
    ("z4_k=2", "Z^4 alpha=2[T]", "Z^4 geography, k > 1 gap"),
    ("z5_k=1", "Z^5 alpha=x1", "Z^5 geography"),
    ("z5_k=2", "Z^5 alpha=2x1", "Z^5 geography, k > 1 gap"),
    ("free=3", "F_3", "free groups"),
    ("surface=2", "genus-2 surface group", "surface groups"),
    ("knot", "knot group", "knot groups"),
)


def _contained(engine: geo.Resolved, table) -> bool:
    if isinstance(table, geo.Interval):
        return (
            engine.upper is not None
            and table.lo <= engine.lower <= engine.upper <= table.hi
        )
    return engine.exact and engine.lower == table


def _as_text(r: geo.Resolved):
    return str(r.lower) if r.exact else f"[{r.lower}, {'inf' if r.upper is None else r.upper}]"


def geography_rows():
    s = "geography"
    f3 = geo.builtin("free=3").profile
    yield _row(s, "lower bound F_3, sigma=5", 5 + 2 - 6, geo.lower_bound(f3, 5), "free groups")
    z42 = geo.builtin("z4_k=2").profile
    yield _row(s, "lower bound Z^4 alpha=2[T], sigma=0", 6, geo.lower_bound(z42, 0), "Z^4, class divisible by 2")
    z111 = geo.builtin("z6_abc=1,1,1").profile
    yield _row(s, "lower bound Z^6 (1,1,1), sigma=-2", 6, geo.lower_bound(z111, -2), "derived: pairing inertia and isotropic bound")
    yield _row(s, "q_exact trivial, sigma=3", 5, geo.q_exact("trivial", None, 3), "trivial group")
    yield _row(s, "q_exact Z^5 alpha=2x1, sigma=0", 12, geo.q_exact("z5_k", 2, 0), "Z^5 geography, k > 1")
    yield _row(s, "q_exact Z^6 (0,0,0), sigma=4", 24, geo.q_exact("z6_abc", (0, 0, 0), 4), "Z^6 classes, s = 20")

    for spec, name, cite in _Q_CASES:
        g = geo.builtin(spec)
        qf = g.qfunction()
        bad = []
        sharpened = []
        for sigma in range(-Q_RANGE, Q_RANGE + 1):
            table = geo.q_exact(g.tag, g.params, sigma)
            r = qf[sigma]
            if not _contained(r, table):
                bad.append(f"{sigma}:{_as_text(r)} vs {table}")
            elif isinstance(table, geo.Interval) and r.exact:
                if not r.derived_sharpening:
                    bad.append(f"{sigma}: interval closed without derived flag")
                sharpened.append(sigma)
        yield _row(s, f"q for {name} on |sigma|<={Q_RANGE}", "agrees", "agrees" if not bad else "; ".join(bad[:3]), cite)
        if sharpened:
            yield _row(
                s, f"derived sharpening for {name}", "sigma>=2",
                f"sigma>={min(sharpened)}" if sharpened == list(range(min(sharpened), Q_RANGE + 1)) else sharpened,
                "derived: inertia of the pairing closes the r in {4,6} gap",
            )

    for spec, expected, cite in (
        ("zn=6", (6, 4, (-2, 0, 2)), "Z^6 minimum points"),
        ("zn=5", (6, 6, (0,)), "Z^5 invariants"),
        ("trivial", (2, 2, (0,)), "trivial group"),
    ):
        d = geo.derived_invariants(geo.builtin(spec).qfunction())
        yield _row(s, f"q, p, minimum points for {spec}", expected, (d.q, d.p, d.minimum_points), cite)

    plist = []
    for n in range(8):
        d = geo.derived_invariants(geo.builtin(f"zn={n}").qfunction())
        plist.append(d.p)
    yield _row(s, "p(Z^n), n=0..7", [2, 0, 0, 2, 0, 6, 4, 2], plist, "p-list for free abelian groups")

    got = []
    for n in range(6, 13):
        r = geo.builtin(f"zn={n}").qfunction(window=8)[0]
        got.append(r.lower if r.exact else _as_text(r))
    want = [2 - 2 * n + math.comb(n, 2) + math.comb(n, 2) % 2 for n in range(6, 13)]
    yield _row(s, "q(Z^n) at sigma=0, n=6..12", want, got, "Euler characteristic of Z^n at signature zero")
    exc = [geo.builtin(f"zn={n}").qfunction(window=8)[0].lower for n in (3, 5)]
    yield _row(s, "q(Z^3), q(Z^5) at sigma=0", [2, 6], exc, "exceptions to the general formula")


def random_plan(rng: random.Random) -> cons.ProjectivePlan:
    p = rng.choice((2, 3, 5, 7))
    k = rng.randint(1, 3)
    if p % 2 and rng.random() < 0.5:
        blk = cons.sym_product((p + 1) // 2)
    else:
        beta2 = rng.randint(0, 12)
        sigma = rng.randint(-beta2, beta2)
        if (beta2 - sigma) % 2:
            sigma += 1 if sigma < beta2 else -1
        blk = cons.Block("X", p + 1, beta2 + 2 - 2 * (p + 1), sigma)
    if rng.random() < 0.5:
        blk = blk.reversed()
    return cons.ProjectivePlan(p, k, blk)


def constructions_rows():
    s = "constructions"
    s6 = cons.sym_product(3)
    yield _row(s, "S6", (6, 6, -2), (s6.beta1, s6.chi, s6.sigma), "symmetric square of the genus-3 surface")
    for r in cons.REFERENCE_RECIPES:
        b = r.block()
        yield _row(s, f"recipe {r.label}", r.expected, (b.sigma, b.chi), r.citation)
    yield _row(s, "P^2(F_2) counts", (7, 7), cons.projective_counts(2, 2), "Fano plane")
    yield _row(s, "P^2(F_2) enumerated", (7, 7), cons.projective_counts_bruteforce(2, 2), "Fano plane")
    yield _row(s, "P^3(F_5) counts", (156, 806), cons.projective_counts(5, 3), "projective space over F_5")
    w = cons.projective_construction(cons.ProjectivePlan(5, 3, cons.block_by_name("-S6")))
    yield _row(s, "plan (5,3,-S6)", (1612, 12586), (w.sigma, w.chi), "projective construction")
    rng = random.Random(20)
    agree = sum(
        cons.projective_formula(plan) == cons.evaluate(cons.projective_recipe(plan))
        for plan in (random_plan(rng) for _ in range(20))
    )
    yield _row(s, "replay equals formula on 20 random plans", 20, agree, "projective construction")
    yield _row(s, "ratio at p=7", "13/28", cons.p_ratio_bound(7), "13/28 bound")
    yield _row(s, "ratio at p=5", "7/15", cons.p_ratio_bound(5), "13/28 bound")
    best = cons.minimize_p_ratio(50)
    yield _row(s, "minimizing prime <= 50", (7, "13/28"), (best[0], str(best[1])), "13/28 bound")


def search_rows():
    s = "search"
    res = run_search(SearchSpec("decomposable-sums", 1, 7, limit=SEARCH_LIMIT))
    labels = sorted({str(h.classification) for h in res.hits if h.invariants.signature == 0})
    yield _row(s, "decomposable sums, sigma 0 class", "14H", labels[0] if labels else "none", "rank-28 pairing classes")
    yield _row(s, "hits verify", True, bool(res.hits) and all(verify_hit(h) for h in res.hits), "rank-28 pairing classes")


SECTIONS: dict[str, Callable] = {
    "exterior": exterior_rows,
    "forms": forms_rows,
    "classes": classes_rows,
    "geography": geography_rows,
    "constructions": constructions_rows,
    "search": search_rows,
}


def run_tables(sections=None, write=print) -> list[Row]:
    """Run the suite, writing one line per row; raise RegressionMismatch on any failure."""
    rows = []
    write(HEADER)
    for name, fn in SECTIONS.items():
        if sections and name not in sections:
            continue
        try:
            for row in fn():
                rows.append(row)
                write(row.line())
        except GeographyError as exc:
            row = Row(name, "section raised", "no error", f"{type(exc).__name__}: {exc}", "-")
            rows.append(row)
            write(row.line())
    failed = [r for r in rows if not r.ok]
    if failed:
        raise RegressionMismatch(f"{len(failed)} of {len(rows)} rows disagree")
    return rows
