"""Command-line front end.

Exit codes: 0 ok, 1 usage, 2 parse, 3 domain, 4 regression mismatch,
5 internal inconsistency or contradiction.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import geography as geo
from .classes import pairing_gram
from .constructions import evaluate, parse_recipe
from .errors import GeographyError, ParseError
from .exterior import parse_kvector
from .forms import FormInvariants, parse_gram
from .search import FAMILIES, SearchSpec, run_search
from .tables import run_tables

EXIT_USAGE = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", None, path) from None


def cmd_pairing(args, out):
    omega = parse_kvector(_read(args.omega), args.omega)
    out.write(pairing_gram(omega).form.to_text())


def cmd_invariants(args, out):
    form = parse_gram(_read(args.gram), args.gram)
    out.write(FormInvariants.tsv_header() + "\n" + form.invariants.tsv_row() + "\n")


def cmd_normal_form(args, out):
    from .classes import normal_form_5, normal_form_6

    omega = parse_kvector(_read(args.omega), args.omega)
    if omega.n == 5 and omega.k == 1:
        k, witness = normal_form_5(omega)
        out.write(f"{k}\n")
        out.write("\n".join(" ".join(str(x) for x in row) for row in witness.matrix) + "\n")
        return
    out.write(normal_form_6(omega).to_text())


def cmd_geography(args, out):
    known = geo.load_profile(args.profile)
    qf = known.qfunction(args.window)
    if args.reverse:
        qf = qf.mirror()
    out.write(qf.tsv())
    if args.summary:
        d = geo.derived_invariants(qf)
        pts = ",".join(str(s) for s in d.minimum_points) or "-"
        out.write(f"# q\t{d.q}\n# p\t{d.p_plus}\t{d.p_provenance}\n# p-\t{d.p_minus}\n# minimum points\t{pts}\n")


def cmd_construct(args, out):
    recipe = parse_recipe(_read(args.recipe), args.recipe)
    out.write(evaluate(recipe).line() + "\n")


def cmd_search(args, out):
    spec = SearchSpec(
        family=args.family,
        coefficient_bound=args.coeff_bound,
        support_bound=args.support_bound,
        seed=args.seed,
        trials=args.trials,
        limit=args.limit,
    )
    result = run_search(spec, workers=args.workers, budget=args.budget, out_dir=args.out)
    for hit in result.hits:
        inv = hit.invariants
        out.write(f"hit\t{hit.index}\tsigma={inv.signature}\t{hit.classification}\t{hit.omega}\n")
    out.write(result.summary())


def cmd_tables(args, out):
    run_tables(args.section or None, write=lambda line: out.write(line + "\n"))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="geography4", description="Exact tools for the geography of 4-manifolds.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("pairing", help="Gram matrix of the pairing induced by a class")
    s.add_argument("omega", help="k-vector file")
    s.set_defaults(func=cmd_pairing)

    s = sub.add_parser("invariants", help="invariants of a Gram matrix as TSV")
    s.add_argument("gram", help="Gram matrix file")
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("normal-form", help="normal form of a class on Z^6 (or Z^5)")
    s.add_argument("omega", help="k-vector file")
    s.set_defaults(func=cmd_normal_form)

    s = sub.add_parser("geography", help="q-function table for a group profile")
    s.add_argument("--profile", required=True, help="profile file, or builtin such as z6_abc=1,1,1")
    s.add_argument("--window", type=int, default=geo.DEFAULT_WINDOW)
    s.add_argument("--reverse", action="store_true", help="report the reversed class")
    s.add_argument("--summary", action="store_true", help="append q, p and minimum points")
    s.set_defaults(func=cmd_geography)

    s = sub.add_parser("construct", help="evaluate a construction recipe")
    s.add_argument("recipe", help="recipe file")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("search", help="search classes in Lambda^4(Z^8) for unimodular pairings")
    s.add_argument("--family", choices=FAMILIES, default="decomposable-sums")
    s.add_argument("--coeff-bound", type=int, default=1)
    s.add_argument("--support-bound", type=int, default=7)
    s.add_argument("--seed", type=int)
    s.add_argument("--trials", type=int, default=0)
    s.add_argument("--budget", type=int, help="candidate budget (overrides the environment)")
    s.add_argument("--out", help="directory for certificates")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--limit", type=int, help="examine only this many leading candidates")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("tables", help="run the built-in regression suite")
    s.add_argument("--section", action="append", help="restrict to a section (repeatable)")
    s.set_defaults(func=cmd_tables)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args, sys.stdout)
    except GeographyError as exc:
        sys.stdout.flush()
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
