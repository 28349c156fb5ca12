"""Bookkeeping for building 4-manifolds out of blocks and surgeries.

Only (beta1, chi, sigma) are tracked; beta2 always follows from
chi = 2 - 2 beta1 + beta2.  Fundamental groups are not modelled.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction

from sympy import factorint, isprime, primerange

from .errors import DomainError, InternalInconsistencyError, ParseError


@dataclass(frozen=True)
class Block:
    name: str
    beta1: int
    chi: int
    sigma: int

    def __post_init__(self):
        if self.beta1 < 0:
            raise DomainError(f"{self.name}: negative first Betti number")
        if self.beta2 < 0:
            raise DomainError(f"{self.name}: negative second Betti number")
        if (self.chi - self.sigma) % 2:
            raise DomainError(f"{self.name}: chi and sigma have different parity")

    @property
    def beta2(self) -> int:
        return self.chi - 2 + 2 * self.beta1

    def reversed(self) -> Block:
        name = self.name[1:] if self.name.startswith("-") else "-" + self.name
        return replace(self, name=name, sigma=-self.sigma)

    def point(self):
        return (self.sigma, self.chi)

    def line(self) -> str:
        return f"beta1={self.beta1}\tbeta2={self.beta2}\tchi={self.chi}\tsigma={self.sigma}"


def sym_product(k: int) -> Block:
    """Symmetric square of a genus-k surface."""
    if not isinstance(k, int) or k < 1:
        raise DomainError("symmetric product needs genus k >= 1")
    return Block(f"S{2 * k}", 2 * k, 2 * k * k - 5 * k + 3, 1 - k)


def surface_product(g: int, h: int) -> Block:
    return Block(f"F{g}xF{h}", 2 * g + 2 * h, (2 - 2 * g) * (2 - 2 * h), 0)


BASIC_BLOCKS = {
    "S4": Block("S4", 0, 2, 0),
    "T4": Block("T4", 4, 0, 0),
    "S1xS3": Block("S1xS3", 1, 0, 0),
    "T2xS2": Block("T2xS2", 2, 0, 0),
    "CP2": Block("CP2", 0, 3, 1),
    "-CP2": Block("-CP2", 0, 3, -1),
    "S2xS2": Block("S2xS2", 0, 4, 0),
}

_SYM = re.compile(r"^(-?)S(\d+)$")
_PROD = re.compile(r"^F(\d+)xF(\d+)$")


def block_by_name(name: str) -> Block:
    if name in BASIC_BLOCKS:
        return BASIC_BLOCKS[name]
    m = _SYM.match(name)
    if m and name not in ("S4",):
        two_k = int(m.group(2))
        if two_k % 2 or two_k == 0:
            raise DomainError(f"symmetric product {name} needs an even positive index")
        b = sym_product(two_k // 2)
        return b.reversed() if m.group(1) else b
    m = _PROD.match(name)
    if m:
        return surface_product(int(m.group(1)), int(m.group(2)))
    raise DomainError(f"unknown block {name!r}")


STEP_KINDS = ("block", "sum", "kill-gen", "kill-comm", "cp2", "s2xs2")


@dataclass(frozen=True)
class Step:
    kind: str
    count: int = 1
    block: Block | None = None
    sign: int = 1

    def text(self) -> str:
        if self.kind == "block":
            b = self.block
            if _is_library(b):
                return f"block {b.name}"
            return f"block custom beta1={b.beta1} chi={b.chi} sigma={b.sigma}"
        if self.kind == "sum":
            return "sum"
        if self.kind == "cp2":
            return f"cp2 {'+' if self.sign > 0 else '-'} {self.count}"
        return f"{self.kind} {self.count}"


def _is_library(b: Block) -> bool:
    try:
        return block_by_name(b.name) == b
    except DomainError:
        return False


@dataclass(frozen=True)
class Recipe:
    steps: tuple[Step, ...]
    name: str = ""
    citation: str = ""

    def to_text(self) -> str:
        return "\n".join(s.text() for s in self.steps) + "\n"

    @classmethod
    def from_text(cls, text, source=None, name="", citation=""):
        return parse_recipe(text, source, name, citation)

    def surgeries(self):
        """Counts of (generator-killing, commutator-killing) surgeries."""
        gen = sum(s.count for s in self.steps if s.kind == "kill-gen")
        comm = sum(s.count for s in self.steps if s.kind == "kill-comm")
        return gen, comm


def parse_recipe(text: str, source=None, name="", citation="") -> Recipe:
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        kind = words[0]
        try:
            if kind == "block":
                if len(words) < 2:
                    raise ParseError("block needs a name", lineno, source)
                if words[1] == "custom":
                    kv = dict(w.split("=", 1) for w in words[2:])
                    blk = Block(
                        kv.get("name", "custom"),
                        int(kv["beta1"]),
                        int(kv["chi"]),
                        int(kv["sigma"]),
                    )
                else:
                    blk = block_by_name(words[1])
                steps.append(Step("block", block=blk))
            elif kind == "sum":
                steps.append(Step("sum"))
            elif kind in ("kill-gen", "kill-comm", "s2xs2"):
                steps.append(Step(kind, count=_count(words[1:], lineno, source)))
            elif kind == "cp2":
                if len(words) < 2 or words[1] not in ("+", "-"):
                    raise ParseError("cp2 needs a sign '+' or '-'", lineno, source)
                steps.append(Step("cp2", count=_count(words[2:], lineno, source),
                                  sign=1 if words[1] == "+" else -1))
            else:
                raise ParseError(f"unknown step {kind!r}", lineno, source)
        except (KeyError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed step: {exc}", lineno, source) from None
        except DomainError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), lineno, source) from None
    if not steps:
        raise ParseError("empty recipe", None, source)
    return Recipe(tuple(steps), name, citation)


def _count(words, lineno, source):
    if not words:
        return 1
    try:
        c = int(words[0])
    except ValueError:
        raise ParseError("count must be an integer", lineno, source) from None
    if c < 0:
        raise ParseError("count must be nonnegative", lineno, source)
    return c


def connected_sum(blocks) -> Block:
    blocks = list(blocks)
    if not blocks:
        raise DomainError("connected sum of nothing")
    return Block(
        " # ".join(b.name for b in blocks),
        sum(b.beta1 for b in blocks),
        sum(b.chi for b in blocks) - 2 * (len(blocks) - 1),
        sum(b.sigma for b in blocks),
    )


def evaluate(recipe: Recipe) -> Block:
    stack: list[Block] = []
    if not recipe.steps or recipe.steps[0].kind != "block":
        raise DomainError("recipe must start with a block")
    for step in recipe.steps:
        if step.kind == "block":
            stack.append(step.block)
            continue
        if step.kind == "sum":
            if len(stack) < 2:
                raise DomainError("'sum' needs at least two blocks")
            stack = [connected_sum(stack)]
            continue
        if len(stack) != 1:
            raise DomainError(f"'{step.kind}' needs a single block; sum the blocks first")
        cur = stack[0]
        if step.kind == "kill-gen":
            if cur.beta1 < step.count:
                raise DomainError("generator-killing surgery would make beta1 negative")
            cur = Block(cur.name, cur.beta1 - step.count, cur.chi + 2 * step.count, cur.sigma)
        elif step.kind == "kill-comm":
            cur = Block(cur.name, cur.beta1, cur.chi + 2 * step.count, cur.sigma)
        elif step.kind == "cp2":
            cur = Block(cur.name, cur.beta1, cur.chi + step.count, cur.sigma + step.sign * step.count)
        elif step.kind == "s2xs2":
            cur = Block(cur.name, cur.beta1, cur.chi + 2 * step.count, cur.sigma)
        stack = [cur]
    if len(stack) != 1:
        raise DomainError("recipe leaves several unsummed blocks")
    out = stack[0]
    if recipe.name:
        out = replace(out, name=recipe.name)
    return out


# ---------------------------------------------------------------- projective spaces


def _prime_power(p):
    if not isinstance(p, int) or p < 2:
        return None
    f = factorint(p)
    return next(iter(f)) if len(f) == 1 else None


def projective_counts(p: int, k: int):
    """(points, lines) of the projective space of dimension k over F_p."""
    if _prime_power(p) is None:
        raise DomainError(f"{p} is not a prime power")
    if not isinstance(k, int) or k < 1:
        raise DomainError("dimension k must be >= 1")
    n = (p ** (k + 1) - 1) // (p - 1)
    num = (p ** (k + 1) - 1) * (p**k - 1)
    den = (p + 1) * (p - 1) ** 2
    if num % den:
        raise InternalInconsistencyError("line count is not an integer")
    return n, num // den


def projective_counts_bruteforce(p: int, k: int):
    """Enumerate points and lines of P^k(F_p) for prime p."""
    if not isprime(p):
        raise DomainError("enumeration is implemented for primes only")

    def normalize(v):
        lead = next(x for x in v if x)
        inv = pow(lead, -1, p)
        return tuple(x * inv % p for x in v)

    points = sorted({
        normalize(v)
        for v in itertools.product(range(p), repeat=k + 1)
        if any(v)
    })
    lines = set()
    for u, v in itertools.combinations(points, 2):
        span = frozenset(
            normalize(tuple((a * x + b * y) % p for x, y in zip(u, v)))
            for a in range(p) for b in range(p) if a or b
        )
        lines.add(span)
    if any(len(line) != p + 1 for line in lines):
        raise InternalInconsistencyError("a line does not have p+1 points")
    return len(points), len(lines)


@dataclass(frozen=True)
class ProjectivePlan:
    p: int
    k: int
    block: Block

    def __post_init__(self):
        projective_counts(self.p, self.k)
        if self.block.beta1 != self.p + 1:
            raise DomainError(
                f"block must have beta1 = p+1 = {self.p + 1}, got {self.block.beta1}"
            )


def projective_formula(plan: ProjectivePlan) -> Block:
    n, lines = projective_counts(plan.p, plan.k)
    x = plan.block
    return Block(
        f"P{plan.k}(F{plan.p})[{x.name}]",
        n,
        2 - 2 * n + lines * x.beta2,
        lines * x.sigma,
    )


def projective_recipe(plan: ProjectivePlan) -> Recipe:
    """One copy of the block per line, summed, then surgeries identifying
    the generators that correspond to the same point."""
    n, lines = projective_counts(plan.p, plan.k)
    steps = [Step("block", block=plan.block) for _ in range(lines)]
    if lines > 1:
        steps.append(Step("sum"))
    steps.append(Step("kill-gen", count=lines * (plan.p + 1) - n))
    return Recipe(tuple(steps), name=f"P{plan.k}(F{plan.p})[{plan.block.name}]")


def projective_construction(plan: ProjectivePlan) -> Block:
    by_formula = projective_formula(plan)
    by_replay = evaluate(projective_recipe(plan))
    if by_formula != by_replay:
        raise InternalInconsistencyError(
            f"surgery replay {by_replay.line()} disagrees with formula {by_formula.line()}"
        )
    return by_formula


def p_ratio_bound(p: int) -> Fraction:
    """(beta2 - sigma)/n^2 ratio in the large-k limit of the projective construction."""
    if not isprime(p):
        raise DomainError(f"{p} is not prime")
    return Fraction(p * p + 3, 2 * (p * p + p))


def minimize_p_ratio(bound: int):
    """(prime, ratio) minimizing p_ratio_bound over primes <= bound."""
    primes = list(primerange(2, bound + 1))
    if not primes:
        raise DomainError("no primes below the bound")
    best = min(primes, key=lambda q: (p_ratio_bound(q), q))
    return best, p_ratio_bound(best)


# ---------------------------------------------------------------- recipe library


@dataclass(frozen=True)
class NamedRecipe:
    label: str
    group: str
    text: str
    expected: tuple[int, int]  # (sigma, chi)
    citation: str
    notes: str = ""
    tags: tuple[str, ...] = field(default_factory=tuple)

    def recipe(self) -> Recipe:
        return parse_recipe(self.text, name=self.label, citation=self.citation)

    def block(self) -> Block:
        return evaluate(self.recipe())


_N6_BASE = "block F2xF1\nblock T4\nsum\nkill-gen 4\n"

REFERENCE_RECIPES = (
    NamedRecipe(
        "Z3", "Z^3", "block T4\nkill-gen 1\n", (0, 2),
        "Z^3 realization by one surgery on T^4",
    ),
    NamedRecipe(
        "Z4", "Z^4 alpha=k[T]", "block T4\nblock S1xS3\nsum\nkill-gen 1\nkill-comm 3\n", (0, 6),
        "Z^4 construction, T^4 # S^1xS^3 with four surgeries",
        "first surgery introduces b^k = a_4; the other three add commutators",
    ),
    NamedRecipe(
        "Z5-k0", "Z^5 alpha=k x1 (k=0 or k>1)",
        "block T4\nblock T2xS2\nsum\nkill-gen 1\nkill-comm 6\n", (0, 12),
        "Z^5 construction, T^4 # T^2xS^2 with seven surgeries",
    ),
    NamedRecipe(
        "Z5-k1", "Z^5 alpha=x1",
        "block T4\nblock T2xS2\nsum\nkill-gen 1\nkill-comm 3\n", (0, 6),
        "Z^5 construction for k=1, four surgeries",
    ),
    NamedRecipe(
        "Z6-M''", "Z^6 (1,1,1)", _N6_BASE, (0, 6),
        "Z^6 construction, (F_2xF_1) # T^4 after four surgeries",
    ),
    NamedRecipe(
        "Z6-general", "Z^6 any (a,b,c)", _N6_BASE + "kill-comm 7\n", (0, 20),
        "Z^6 construction, M'' plus commutator surgeries z_1..z_7",
        "seven commutators are listed and chi=20 needs seven surgeries",
    ),
    NamedRecipe(
        "Z6-1bc", "Z^6 (1,b,c)", _N6_BASE + "kill-comm 4\n", (0, 14),
        "Z^6 construction for c=1, four commutator surgeries",
    ),
    NamedRecipe(
        "Z6-11c", "Z^6 (1,1,c)", _N6_BASE + "kill-comm 2\n", (0, 10),
        "Z^6 construction for a=b=1, two commutator surgeries",
    ),
    NamedRecipe(
        "Z6-100", "Z^6 (1,0,0)",
        "block T4\nblock S1xS3\nblock S1xS3\nsum\nkill-comm 9\n", (0, 14),
        "Z^6 construction for omega=x1x2, T^4 # 2 S^1xS^3 with nine surgeries",
    ),
    NamedRecipe(
        "S6", "Z^6 (1,1,1)", "block S6\n", (-2, 6),
        "symmetric square of the genus-3 surface",
    ),
    NamedRecipe(
        "-S6", "Z^6 (1,1,-1)", "block -S6\n", (2, 6),
        "symmetric square of the genus-3 surface, reversed",
    ),
    NamedRecipe(
        "-S156", "Z^156", "block -S156\n", (77, 11781),
        "symmetric square of the genus-78 surface, reversed",
    ),
)


def recipe_by_label(label: str) -> NamedRecipe:
    for r in REFERENCE_RECIPES:
        if r.label == label:
            return r
    raise DomainError(f"no recipe named {label!r}")
