"""Lower-bound rules, realized points, and the resulting q-functions.

A q-function is assembled from two independent sources: the lower bounds
proved for every manifold with the given group (and class), and points
(sigma, chi) realized by explicit constructions.  Where the two meet the
value is exact; elsewhere the row is an interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Callable

from sympy import factorint

from . import constructions
from .classes import PairingForm, canonical_class, normal_form_6, pairing_gram
from .errors import (
    ConfigurationError,
    ContradictionError,
    DomainError,
    GeographyError,
    InternalInconsistencyError,
    NotSupportedError,
    ParseError,
    WindowTooSmallError,
)
from .exterior import KVector, parse_kvector
from .forms import rational_isotropic_dim, witt_isotropic_dim_mod_p

ALPHA_KINDS = ("zero", "torsion", "multiple", "primitive", "general")
DEFAULT_WINDOW = 64
STABLE_STEPS = 8


def round_to_parity(value: int, sigma: int) -> int:
    """Smallest integer >= value congruent to sigma mod 2."""
    return value if (value - sigma) % 2 == 0 else value + 1


@dataclass(frozen=True)
class GeographyPoint:
    sigma: int
    chi: int
    label: str = ""
    citation: str = ""

    def __post_init__(self):
        if (self.chi - self.sigma) % 2:
            raise DomainError(f"point ({self.sigma}, {self.chi}) violates chi = sigma mod 2")

    def mirrored(self):
        return GeographyPoint(-self.sigma, self.chi, self.label + " (reversed)", self.citation)


@dataclass(frozen=True)
class GroupProfile:
    name: str
    beta1: int
    beta2: int
    deficiency: int | None = None
    l2_b1_vanishes: bool = False
    alpha_kind: str = "general"
    alpha_prime: int | None = None
    torus_rank: int | None = None  # set for Z^n
    pairing: PairingForm | None = None
    modp_dims: tuple[tuple[int, int, int], ...] = ()  # (p, dim H^1, dim H^2)

    def __post_init__(self):
        if self.beta1 < 0 or self.beta2 < 0:
            raise ConfigurationError("Betti numbers must be nonnegative")
        if self.alpha_kind not in ALPHA_KINDS:
            raise ConfigurationError(f"alpha_kind must be one of {ALPHA_KINDS}")
        n = self.torus_rank
        if n is not None and (self.beta1 != n or self.beta2 != math.comb(n, 2)):
            raise ConfigurationError(f"Z^{n} needs beta1={n} and beta2={math.comb(n, 2)}")
        if self.pairing is not None and (n is None or self.pairing.n != n):
            raise ConfigurationError("a pairing needs a matching torus rank")
        if self.alpha_kind == "multiple":
            if self.alpha_prime is None:
                raise ConfigurationError("alpha_kind=multiple needs alpha_prime")
            if self._modp(self.alpha_prime) is None:
                raise ConfigurationError(
                    f"alpha_kind=multiple({self.alpha_prime}) needs mod-p cohomology dimensions"
                )

    def _modp(self, p):
        for q, h1, h2 in self.modp_dims:
            if q == p:
                return h1, h2
        if self.torus_rank is not None:
            return self.torus_rank, math.comb(self.torus_rank, 2)
        return None

    @cached_property
    def pairing_data(self):
        """(b+, b-, isotropic dim, {p: mod-p isotropic dim}) of the pairing."""
        if self.pairing is None:
            return None
        inv = self.pairing.invariants
        m = rational_isotropic_dim(inv)
        primes = {2}
        for d in inv.torsion:
            primes.update(factorint(d))
        witt = {p: witt_isotropic_dim_mod_p(self.pairing.form, p) for p in sorted(primes)}
        return inv.b_plus, inv.b_minus, m, witt


# ---------------------------------------------------------------- rules


@dataclass(frozen=True)
class BoundRule:
    name: str
    citation: str
    evaluate: Callable[[GroupProfile, int], int | None]
    derived: bool = False  # combines stated facts in a way not spelled out in the source


def _chi_from_beta2(profile, beta2):
    return 2 - 2 * profile.beta1 + beta2


def _basic_signature(pr, s):
    return abs(s) - 2 * pr.beta1 + 2


def _basic_beta2(pr, s):
    return pr.beta2 - 2 * pr.beta1 + 2


def _torsion_class(pr, s):
    if pr.alpha_kind in ("zero", "torsion"):
        return abs(s) + 2 - 2 * pr.beta1 + 2 * pr.beta2
    return None


def _multiple(pr, s):
    if pr.alpha_kind != "multiple":
        return None
    h1, h2 = pr._modp(pr.alpha_prime)
    return 2 - 2 * h1 + 2 * h2


def _l2(pr, s):
    return abs(s) if pr.l2_b1_vanishes else None


def _torus_isotropic(pr, s):
    n = pr.torus_rank
    if n is None or n < 2:
        return None
    return _chi_from_beta2(pr, abs(s) + 2 * (n - 1))


def _torus_full_image(pr, s):
    n = pr.torus_rank
    if n is None or n < 4:
        return None
    c = math.comb(n, 2)
    return _chi_from_beta2(pr, c + (c % 2))


def _torus_seven(pr, s):
    n = pr.torus_rank
    if n is None or not 5 <= n <= 7:
        return None
    return _chi_from_beta2(pr, abs(s) + 14)


def _pairing_isotropic(pr, s):
    if pr.pairing is None:
        return None
    _, _, m, _ = pr.pairing_data
    return _chi_from_beta2(pr, abs(s) + 2 * m)


def min_beta2(b_plus: int, b_minus: int, isotropic: int, sigma: int) -> int:
    """Least b+ + b- with b+ - b- = sigma, b+ >= max(b_plus, m), b- >= max(b_minus, m)."""
    lo_plus = max(b_plus, isotropic)
    lo_minus = max(b_minus, isotropic)
    bp = max(lo_plus, lo_minus + sigma)
    return 2 * bp - sigma


def _pairing_inertia(pr, s):
    if pr.pairing is None:
        return None
    bp, bm, m, _ = pr.pairing_data
    return _chi_from_beta2(pr, min_beta2(bp, bm, m, s))


def _pairing_modp(pr, s):
    if pr.pairing is None:
        return None
    _, _, _, witt = pr.pairing_data
    return max(_chi_from_beta2(pr, 2 * w) for w in witt.values())


def _pairing_full_image(pr, s):
    if pr.pairing is None:
        return None
    inv = pr.pairing.invariants
    c = math.comb(pr.torus_rank, 2)
    if inv.unimodular and inv.signature == s:
        return _chi_from_beta2(pr, c)
    return _chi_from_beta2(pr, c + 1)


RULES = (
    BoundRule("basic-signature", "half-plane bound chi >= |sigma| - 2 beta1(G) + 2", _basic_signature),
    BoundRule("basic-beta2", "bound chi >= beta2(G) - 2 beta1(G) + 2", _basic_beta2),
    BoundRule("torsion-class", "torsion fundamental class: chi >= |sigma| + 2 - 2 beta1 + 2 beta2", _torsion_class),
    BoundRule("multiple-mod-p", "class divisible by p: chi >= 2 - 2 dim H^1(G;Z/p) + 2 dim H^2(G;Z/p)", _multiple),
    BoundRule("l2", "vanishing first L2 Betti number: chi >= |sigma|", _l2),
    BoundRule("torus-isotropic", "(n-1)-dimensional isotropic subspace x1x2..x1xn", _torus_isotropic),
    BoundRule("torus-full-image", "image of H^2(Z^n) has rank C(n,2); odd rank cannot be unimodular even", _torus_full_image),
    BoundRule("torus-seven-isotropic", "7-dimensional isotropic subspace of the image", _torus_seven),
    BoundRule("pairing-isotropic", "isotropic subspace of the pairing: beta2 >= |sigma| + 2m", _pairing_isotropic),
    BoundRule("pairing-mod-p", "mod-p isotropic subspace of the pairing: beta2 >= 2 w_p", _pairing_modp),
    BoundRule("pairing-full-image", "beta2 = C(n,2) forces the pairing to be the unimodular intersection form", _pairing_full_image),
    BoundRule(
        "pairing-inertia",
        "b+(M) >= b+(pairing), b-(M) >= b-(pairing) combined with the isotropic bound",
        _pairing_inertia,
        derived=True,
    ),
)


@dataclass(frozen=True)
class LowerBound:
    sigma: int
    value: int
    active: tuple[str, ...]
    by_rule: tuple[tuple[str, int], ...]
    stated_value: int  # same maximum without derived rules

    @property
    def active_rule(self):
        return self.active[0] if self.active else "none"


def explain_lower(profile: GroupProfile, sigma: int, rules=RULES) -> LowerBound:
    values = []
    for rule in rules:
        v = rule.evaluate(profile, sigma)
        if v is not None:
            values.append((rule, v))
    best = max(v for _, v in values)
    value = round_to_parity(best, sigma)
    stated = round_to_parity(max(v for r, v in values if not r.derived), sigma)
    tied = [r for r, v in values if round_to_parity(v, sigma) == value]
    # most specific stated rule first; derived rules only when nothing stated reaches the bound
    active = tuple(r.name for r in reversed(tied) if not r.derived) + tuple(
        r.name for r in tied if r.derived
    )
    return LowerBound(sigma, value, active, tuple((r.name, v) for r, v in values), stated)


def lower_bound(profile: GroupProfile, sigma: int) -> int:
    return explain_lower(profile, sigma).value


# ---------------------------------------------------------------- q-functions


@dataclass(frozen=True)
class Resolved:
    sigma: int
    lower: int
    upper: int | None
    active_rule: str
    witness: str
    derived_sharpening: bool = False

    @property
    def exact(self) -> bool:
        return self.upper is not None and self.lower == self.upper

    @property
    def value(self):
        return self.lower if self.exact else None

    def status(self) -> str:
        if not self.exact:
            return "interval"
        return "exact (derived sharpening)" if self.derived_sharpening else "exact"

    def tsv_row(self) -> str:
        up = "inf" if self.upper is None else str(self.upper)
        return "\t".join([str(self.sigma), str(self.lower), up, self.status(), self.active_rule, self.witness])


TSV_HEADER = "sigma\tlower\tupper\texact?\tactive-rule\twitness-recipe"


@dataclass(frozen=True)
class QFunction:
    name: str
    window: int
    rows: tuple[Resolved, ...]
    realized: tuple[GeographyPoint, ...]
    lower_fn: Callable[[int], LowerBound] = field(repr=False, compare=False)
    cited_slopes: tuple[tuple[str, int, str], ...] = ()  # (side, value, citation)

    def __getitem__(self, sigma) -> Resolved:
        return self.rows[sigma + self.window]

    @property
    def sigmas(self):
        return range(-self.window, self.window + 1)

    def upper_at(self, sigma):
        return cone_minimum(self.realized, sigma)

    def mirror(self) -> QFunction:
        """q for the reversed class: sigma -> -sigma."""
        rows = tuple(
            Resolved(-r.sigma, r.lower, r.upper, r.active_rule, r.witness, r.derived_sharpening)
            for r in reversed(self.rows)
        )
        fn = self.lower_fn
        flipped = {"+": "-", "-": "+"}
        return QFunction(
            self.name + " (reversed)",
            self.window,
            rows,
            tuple(p.mirrored() for p in self.realized),
            lambda s: _mirror_bound(fn(-s)),
            tuple((flipped[side], v, c) for side, v, c in self.cited_slopes),
        )

    def tsv(self) -> str:
        return TSV_HEADER + "\n" + "\n".join(r.tsv_row() for r in self.rows) + "\n"


def _mirror_bound(b: LowerBound) -> LowerBound:
    return LowerBound(-b.sigma, b.value, b.active, b.by_rule, b.stated_value)


def cone_minimum(points, sigma):
    """Least chi reachable at sigma from realized points by +-CP2 sums."""
    best = None
    for p in points:
        v = p.chi + abs(sigma - p.sigma)
        if best is None or v < best[0]:
            best = (v, p)
    return best


def _witness_text(point: GeographyPoint, sigma: int) -> str:
    d = sigma - point.sigma
    if d == 0:
        return point.label
    return f"{point.label} # {abs(d)}({'CP2' if d > 0 else '-CP2'})"


def assemble_q(
    lower: Callable[[int], LowerBound] | Callable[[int], int],
    realized,
    window: int = DEFAULT_WINDOW,
    name: str = "",
    cited_slopes=(),
) -> QFunction:
    """Combine a lower-bound function with realized points on [-window, window]."""
    if window < 1:
        raise DomainError("window must be positive")
    realized = tuple(
        p if isinstance(p, GeographyPoint) else GeographyPoint(*p) for p in realized
    )

    def as_bound(s):
        got = lower(s)
        if isinstance(got, LowerBound):
            return got
        return LowerBound(s, round_to_parity(int(got), s), ("lower",), (("lower", int(got)),), round_to_parity(int(got), s))

    for p in realized:
        lb = as_bound(p.sigma)
        if p.chi < lb.value:
            raise ContradictionError(
                f"realized point ({p.sigma}, {p.chi}) from {p.label or 'construction'} lies below "
                f"the lower bound {lb.value} ({lb.active_rule})"
            )
    sig = range(-window - 1, window + 2)
    bounds = {s: as_bound(s) for s in sig}
    # one-step propagation: q(s) = q(s +- 1) +- 1
    lo = {s: bounds[s].value for s in sig}
    lo_stated = {s: bounds[s].stated_value for s in sig}
    step_active = set()
    changed = True
    while changed:
        changed = False
        for s in range(-window, window + 1):
            for table in (lo, lo_stated):
                nb = max(table[s - 1], table[s + 1]) - 1
                if nb > table[s]:
                    table[s] = nb
                    changed = True
                    if table is lo:
                        step_active.add(s)
    rows = []
    for s in range(-window, window + 1):
        cone = cone_minimum(realized, s)
        upper = cone[0] if cone else None
        if upper is not None and upper < lo[s]:
            raise ContradictionError(f"upper bound {upper} below lower bound {lo[s]} at sigma={s}")
        rule = "step" if s in step_active else bounds[s].active_rule
        witness = _witness_text(cone[1], s) if cone else "-"
        sharpened = upper is not None and upper == lo[s] and lo_stated[s] < lo[s]
        rows.append(Resolved(s, lo[s], upper, rule, witness, sharpened))
    return QFunction(name, window, tuple(rows), realized, as_bound, tuple(cited_slopes))


# ---------------------------------------------------------------- derived invariants


@dataclass(frozen=True)
class ConeSet:
    apexes: tuple[GeographyPoint, ...]

    def contains(self, sigma: int, chi: int) -> bool:
        return any(
            (chi - sigma) % 2 == 0 and chi >= a.chi + abs(sigma - a.sigma) for a in self.apexes
        )

    def minimum(self, sigma):
        return min(a.chi + abs(sigma - a.sigma) for a in self.apexes)


@dataclass(frozen=True)
class Interval:
    lo: int | Fraction
    hi: int | Fraction | None

    def __str__(self):
        return f"[{self.lo}, {'inf' if self.hi is None else self.hi}]"


@dataclass(frozen=True)
class DerivedInvariants:
    q: int | Interval
    p_plus: int | Interval
    p_minus: int | Interval
    p_provenance: str
    minimum_points: tuple[int, ...]
    cones: ConeSet | None

    @property
    def p(self):
        return self.p_plus

    def f(self, qf: QFunction, t: Fraction):
        return f_value(qf, t)


def _edge_values(qf: QFunction, side: str, which: str):
    sign = 1 if side == "+" else -1
    out = []
    for k in range(STABLE_STEPS + 1):
        s = sign * (qf.window - k)
        r = qf[s]
        v = r.lower if which == "lower" else r.upper
        out.append(None if v is None else v - sign * s)
    return out


def _stable(values):
    return values[0] is not None and all(v == values[0] for v in values)


def _required_window(qf: QFunction, side: str) -> int:
    """Smallest window (doubling) on which the lower bound minus |sigma| and the
    cone minimum minus |sigma| are constant over the last STABLE_STEPS steps."""
    sign = 1 if side == "+" else -1
    w = qf.window
    while w <= 1 << 16:
        w *= 2
        lows = [qf.lower_fn(sign * (w - k)).value - (w - k) for k in range(STABLE_STEPS + 1)]
        ups = [
            (cone_minimum(qf.realized, sign * (w - k)) or (None,))[0]
            for k in range(STABLE_STEPS + 1)
        ]
        ups = [None if u is None else u - (w - k) for u, k in zip(ups, range(STABLE_STEPS + 1))]
        if _stable(lows) and (_stable(ups) or ups[0] is None):
            return w
    return w


def _slope(qf: QFunction, side: str):
    lows = _edge_values(qf, side, "lower")
    ups = _edge_values(qf, side, "upper")
    upper_known = ups[0] is not None
    if not _stable(lows) or (upper_known and not _stable(ups)):
        raise WindowTooSmallError(qf.window, _required_window(qf, side))
    lo = lows[0]
    hi = ups[0] if upper_known else None
    if hi == lo:
        return lo, "exact"
    for s, v, cite in qf.cited_slopes:
        if s == side:
            if v < lo or (hi is not None and v > hi):
                raise ContradictionError(
                    f"cited asymptotic value {v} outside computed range [{lo}, {hi}]"
                )
            return v, f"cited: {cite}"
    return Interval(lo, hi), "interval"


def derived_invariants(qf: QFunction) -> DerivedInvariants:
    p_plus, prov_plus = _slope(qf, "+")
    p_minus, prov_minus = _slope(qf, "-")
    rows = qf.rows
    all_exact = all(r.exact for r in rows)
    if all_exact:
        q = min(r.lower for r in rows)
    else:
        uppers = [r.upper for r in rows if r.upper is not None]
        q = Interval(min(r.lower for r in rows), min(uppers) if uppers else None)
        if q.lo == q.hi:
            q = q.lo
    minima = []
    cones = None
    if all_exact:
        for s in range(-qf.window + 1, qf.window):
            v = qf[s].lower
            if qf[s - 1].lower == v + 1 and qf[s + 1].lower == v + 1:
                minima.append(s)
        cones = ConeSet(tuple(GeographyPoint(s, qf[s].lower, "minimum point") for s in minima))
        for r in rows:
            if cones.minimum(r.sigma) != r.lower:
                raise InternalInconsistencyError(
                    f"cones from minimum points give {cones.minimum(r.sigma)} at sigma={r.sigma}, "
                    f"q is {r.lower}"
                )
    provenance = prov_plus if prov_plus == prov_minus else f"+: {prov_plus}; -: {prov_minus}"
    return DerivedInvariants(q, p_plus, p_minus, provenance, tuple(minima), cones)


def f_value(qf: QFunction, t) -> Fraction | None:
    """min over the window of q(sigma) + t sigma; None stands for minus infinity."""
    t = Fraction(t)
    if abs(t) > 1:
        return None
    derived_invariants(qf)  # raises unless both ends have stabilized
    if not all(r.exact for r in qf.rows):
        raise DomainError("f_G needs an exactly resolved q-function")
    return min(r.lower + t * r.sigma for r in qf.rows)


# ---------------------------------------------------------------- closed forms


def _interval(lo, hi, sigma):
    lo = round_to_parity(lo, sigma)
    return lo if lo == hi else Interval(lo, hi)


def _eps(n):
    return math.comb(n, 2) % 2


def torus_sigma0(n: int) -> int:
    """q(Z^n) at signature zero."""
    if n == 3:
        return 2
    if n == 5:
        return 6
    if n < 3:
        return 2 if n == 0 else 0
    return 2 - 2 * n + math.comb(n, 2) + _eps(n)


def q_exact(tag: str, params, sigma: int):
    """Closed forms for known groups; Interval where only bounds are known."""
    s = abs(sigma)
    if tag == "trivial":
        return s + 2
    if tag == "free":
        return s + 2 - 2 * int(params)
    if tag == "surface":
        return s + 2 * (2 - 2 * int(params))
    if tag == "three-manifold":
        return s + 2 - 2 * int(params)
    if tag == "knot":
        return s
    if tag == "zn":
        n = int(params)
        table = {0: s + 2, 1: s, 2: s, 3: s + 2, 4: s, 5: s + 6}
        if n in table:
            return table[n]
        if n == 6:
            return 6 if s == 0 else 7 if s == 1 else s + 4
        if sigma == 0:
            return torus_sigma0(n)
        raise NotSupportedError(f"q(Z^{n}) is only tabulated at sigma = 0")
    if tag == "z4_k":
        k = abs(int(params))
        if k == 0:
            return s + 6
        if k == 1:
            return s
        return _interval(max(6, s), s + 6, sigma)
    if tag == "z5_k":
        k = abs(int(params))
        if k == 0:
            return s + 12
        if k == 1:
            return s + 6
        return _interval(max(12, s + 6), s + 12, sigma)
    if tag == "z6_abc":
        a, b, c = params
        if c < 0:
            return q_exact(tag, (a, b, -c), -sigma)
        if (a, b, c) == (0, 0, 0):
            return s + 20
        if a > 1:
            return _interval(max(20, 4 + s), 20 + s, sigma)
        if a == 1 and b == 0:
            return s + 14
        if a == 1 and b > 1:
            return _interval(max(14, 4 + s), 14 + s, sigma)
        if (a, b, c) == (1, 1, 0):
            return s + 10
        if a == 1 and b == 1 and c > 1:
            return _interval(max(10, 4 + s), 10 + s, sigma)
        if (a, b, c) == (1, 1, 1):
            if sigma in (-2, 0):
                return 6
            if sigma in (-1, 1):
                return 7
            if sigma <= -2:
                return 4 - sigma
            return Interval(4 + sigma, 6 + sigma)
    raise NotSupportedError(f"no closed form for {tag!r} with {params!r}")


# ---------------------------------------------------------------- builtin profiles


@dataclass(frozen=True)
class KnownGroup:
    profile: GroupProfile
    realized: tuple[GeographyPoint, ...]
    tag: str
    params: object
    cited_slopes: tuple[tuple[str, int, str], ...] = ()
    mirrored: bool = False

    def qfunction(self, window: int = DEFAULT_WINDOW) -> QFunction:
        pr = self.profile
        return assemble_q(
            lambda s: explain_lower(pr, s), self.realized, window, pr.name, self.cited_slopes
        )


def _recipe_point(label):
    r = constructions.recipe_by_label(label)
    b = r.block()
    return GeographyPoint(b.sigma, b.chi, label, r.citation)


def _torus_profile(n, name, omega=None, alpha_kind="general", alpha_prime=None):
    return GroupProfile(
        name=name,
        beta1=n,
        beta2=math.comb(n, 2),
        l2_b1_vanishes=n >= 1,
        alpha_kind=alpha_kind,
        alpha_prime=alpha_prime,
        torus_rank=n,
        pairing=pairing_gram(omega) if omega is not None else None,
    )


def _alpha_kind(content):
    if content == 0:
        return "zero", None
    if content == 1:
        return "primitive", None
    return "multiple", min(factorint(content))


def _sym_points(n):
    if n % 2 or n < 2:
        return ()
    b = constructions.sym_product(n // 2)
    cite = "symmetric square of a surface"
    return (
        GeographyPoint(b.sigma, b.chi, b.name, cite),
        GeographyPoint(-b.sigma, b.chi, "-" + b.name, cite),
    )


def builtin(spec: str) -> KnownGroup:
    """Profiles by name: trivial, knot, free=n, surface=g, zn=n, z4_k=k, z5_k=k, z6_abc=a,b,c."""
    key, _, arg = spec.partition("=")
    key = key.strip()
    try:
        if key == "trivial":
            pr = GroupProfile("trivial", 0, 0, alpha_kind="zero")
            return KnownGroup(pr, (GeographyPoint(0, 2, "S4", "the 4-sphere"),), "trivial", None)
        if key == "knot":
            pr = GroupProfile("knot group", 1, 0, deficiency=1, alpha_kind="zero")
            pt = GeographyPoint(0, 0, "knot-surgery", "surgery on a knot exterior times a circle")
            return KnownGroup(pr, (pt,), "knot", None)
        if key == "free":
            n = int(arg)
            if n < 0:
                raise ValueError
            pr = GroupProfile(f"F{n}", n, 0, deficiency=n, alpha_kind="zero")
            pt = GeographyPoint(0, 2 - 2 * n, f"#{n} S1xS3", "connected sum of S1xS3")
            return KnownGroup(pr, (pt,), "free", n)
        if key == "surface":
            g = int(arg)
            if g < 1:
                raise ValueError
            pr = GroupProfile(f"surface genus {g}", 2 * g, 1, alpha_kind="zero", l2_b1_vanishes=g == 1)
            pt = GeographyPoint(0, 2 * (2 - 2 * g), f"F{g}xS2", "surface times a sphere")
            return KnownGroup(pr, (pt,), "surface", g)
        if key == "zn":
            return _zn(int(arg))
        if key == "z4_k":
            k = int(arg)
            kind, p = _alpha_kind(abs(k))
            pr = _torus_profile(4, f"Z4 alpha={k}[T]", KVector.scalar(4, k), kind, p)
            if abs(k) == 1:
                pts = (GeographyPoint(0, 0, "T4", "identity map of the 4-torus"),)
            else:
                pts = (_recipe_point("Z4"),)
            return KnownGroup(pr, pts, "z4_k", k)
        if key == "z5_k":
            k = int(arg)
            kind, p = _alpha_kind(abs(k))
            omega = KVector.from_terms(5, 1, {(1,): k})
            pr = _torus_profile(5, f"Z5 alpha={k}x1", omega, kind, p)
            pts = (_recipe_point("Z5-k1" if abs(k) == 1 else "Z5-k0"),)
            return KnownGroup(pr, pts, "z5_k", k)
        if key == "z6_abc":
            a, b, c = (int(x) for x in arg.split(","))
            return _z6(a, b, c)
    except (ValueError, TypeError):
        raise ParseError(f"bad builtin profile {spec!r}") from None
    raise ParseError(f"unknown builtin profile {spec!r}")


def _zn(n: int) -> KnownGroup:
    if n < 0:
        raise ValueError
    if n == 0:
        g = builtin("trivial")
        return KnownGroup(g.profile, g.realized, "zn", 0)
    kind = "zero" if n < 4 else "general"
    pr = _torus_profile(n, f"Z{n}", None, kind)
    pts = {
        1: (GeographyPoint(0, 0, "S1xS3", "product"),),
        2: (GeographyPoint(0, 0, "T2xS2", "product"),),
        3: (_recipe_point("Z3"),),
        4: (GeographyPoint(0, 0, "T4", "the 4-torus"),),
        5: (_recipe_point("Z5-k1"),),
        6: (_recipe_point("Z6-M''"), _recipe_point("S6"), _recipe_point("-S6")),
    }.get(n)
    slopes = ()
    if pts is None:
        v = torus_sigma0(n)
        pts = (GeographyPoint(0, v, f"Z{n}-sigma0", "signature-zero surgery realization of q(Z^n)"),)
        pts += _sym_points(n)
        if n == 7:
            slopes = (("+", 2, "asymptotic value p(Z^7) = 2"), ("-", 2, "asymptotic value p(Z^7) = 2"))
    return KnownGroup(pr, pts, "zn", n, slopes)


def _z6(a, b, c) -> KnownGroup:
    omega = canonical_class(a, b, c)
    nf = normal_form_6(omega)
    na, nb, nc = nf.triple
    kind, p = _alpha_kind(na)
    pr = _torus_profile(6, f"Z6 ({a},{b},{c})", omega, kind, p)
    cc = abs(nc)
    pts = [_recipe_point("Z6-general")]
    if na == 1:
        if nb == 0:
            pts.append(_recipe_point("Z6-100"))
        else:
            pts.append(_recipe_point("Z6-1bc"))
            if nb == 1:
                pts.append(_recipe_point("Z6-11c"))
                if cc == 1:
                    pts.append(_recipe_point("Z6-M''"))
                    pts.append(_recipe_point("S6"))
    if nc < 0:
        pts = [q.mirrored() for q in pts]
    return KnownGroup(pr, tuple(pts), "z6_abc", (na, nb, nc))


# ---------------------------------------------------------------- profile files


def _bool(v):
    if v.lower() in ("1", "true", "yes"):
        return True
    if v.lower() in ("0", "false", "no"):
        return False
    raise ValueError(f"not a boolean: {v}")


def parse_profile(text: str, source=None, base_dir: Path | None = None) -> KnownGroup:
    """key=value profile file.

    Keys: builtin, name, beta1, beta2, deficiency, l2_b1_vanishes, alpha_kind,
    alpha_prime, torus_rank, modp (p:h1:h2, comma separated), omega (path to a
    k-vector file), realized (sigma:chi[:label], comma separated).
    """
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected key=value", lineno, source)
        k, v = line.split("=", 1)
        kv[k.strip()] = (v.strip(), lineno)
    if "builtin" in kv:
        return builtin(kv["builtin"][0])
    try:
        fields = {}
        for key in ("beta1", "beta2", "deficiency", "alpha_prime", "torus_rank"):
            if key in kv:
                fields[key] = int(kv[key][0])
        if "l2_b1_vanishes" in kv:
            fields["l2_b1_vanishes"] = _bool(kv["l2_b1_vanishes"][0])
        if "alpha_kind" in kv:
            fields["alpha_kind"] = kv["alpha_kind"][0]
        if "modp" in kv:
            fields["modp_dims"] = tuple(
                tuple(int(x) for x in item.split(":")) for item in kv["modp"][0].split(",")
            )
        if "omega" in kv:
            path = Path(kv["omega"][0])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            fields["pairing"] = pairing_gram(parse_kvector(path.read_text(), str(path)))
        realized = []
        if "realized" in kv:
            for item in kv["realized"][0].split(","):
                parts = item.split(":")
                realized.append(
                    GeographyPoint(int(parts[0]), int(parts[1]), parts[2] if len(parts) > 2 else "user")
                )
        if "beta1" not in fields or "beta2" not in fields:
            raise ParseError("profile needs beta1 and beta2", None, source)
        pr = GroupProfile(name=kv.get("name", ("profile", 0))[0], **fields)
    except (ValueError, TypeError, OSError) as exc:
        if isinstance(exc, GeographyError):
            raise
        raise ParseError(str(exc), None, source) from None
    return KnownGroup(pr, tuple(realized), "custom", None)


def load_profile(arg: str) -> KnownGroup:
    """A profile file path, or a builtin spec such as ``z6_abc=1,1,1``."""
    path = Path(arg)
    if path.is_file():
        return parse_profile(path.read_text(), str(path), path.parent)
    return builtin(arg)
