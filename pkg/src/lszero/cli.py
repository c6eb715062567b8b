"""Command-line front end.

Exit codes: 0 success, 1 verdict or numeric failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import numeric, search
from .certify import (
    SUITE,
    Certificate,
    MalformedCertificate,
    Verdict,
    check,
    explain,
    load_fixture,
    summary,
)
from .poles import TAGS, load_rules
from .repring import ReprError
from .syntax import SyntaxProblem, parse_relation

OK, FAIL, INPUT_ERROR = 0, 1, 2
DEGREE_RANGE = (8, 18)


class InputError(Exception):
    pass


def _load(path: str) -> Certificate:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not text.strip():
        raise InputError(f"{path} is empty")
    try:
        cert = Certificate.from_json(text)
        cert.case()
    except MalformedCertificate as exc:
        raise InputError(f"{path}: {exc}") from exc
    return cert


def _rules(path: str | None):
    if path is None:
        return None
    try:
        return load_rules(path)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot load rule table {path}: {exc}") from exc


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False))


# --- commands ---------------------------------------------------------------

def cmd_verify(args) -> int:
    cert = _load(args.path)
    try:
        report = check(cert, _rules(args.rules))
    except MalformedCertificate as exc:
        raise InputError(str(exc)) from exc
    if args.json:
        _emit(report.to_dict())
    else:
        print(summary(report))
        if args.explain:
            print(explain(report))
        for m in report.mismatches:
            print(f"  mismatch: {m}")
    if report.verdict is Verdict.ELIMINATED:
        return OK
    if report.verdict is Verdict.ABELIAN and args.allow_abelian:
        return OK
    return FAIL


def cmd_paper_suite(args) -> int:
    reports = [check(load_fixture(n)) for n in SUITE]
    ok = True
    for r in reports:
        if r.verdict is not Verdict.ELIMINATED or r.mismatches:
            ok = False
        if r.family and not DEGREE_RANGE[0] <= r.target_degree <= DEGREE_RANGE[1]:
            ok = False
    if args.json:
        _emit([r.to_dict() for r in reports])
        return OK if ok else FAIL
    header = f"{'fixture':<15} {'l1':>3} {'l2':>3}  {'k':<5} {'pole':<8} {'verdict':<12} {'degree':>6}  family"
    print(header)
    for r in reports:
        k = "?" if r.pole is None else f"<={r.pole.hi}"
        pole = "?" if r.pole is None else str(r.pole)
        print(f"{r.name:<15} {r.l1:>3} {r.l2:>3}  {k:<5} {pole:<8} {r.verdict.value:<12} "
              f"{r.target_degree:>6}  {r.family or '-'}")
    done = sum(r.verdict is Verdict.ELIMINATED for r in reports)
    print(f"{done}/{len(reports)} eliminated")
    return OK if ok else FAIL


def cmd_expand(args) -> int:
    cert = _load(args.path)
    if args.as_certificate:
        print(cert.with_factor_list().to_json(), end="")
        return OK
    out = []
    for case in cert.case().scenarios():
        pi, d = cert.build(case)
        label = ", ".join(f"{s}={t}" for s, t in sorted(case.tags.items())) or "-"
        out.append({"scenario": label, "pi": str(pi), "degree": pi.degree,
                    "factors": [[str(f), e] for f, e in d.factors]})
    if args.json:
        _emit(out)
        return OK
    for block in out:
        print(f"[{block['scenario']}]  Pi = {block['pi']}  (degree {block['degree']})")
        for f, e in block["factors"]:
            print(f"  {f}^{e}" if e != 1 else f"  {f}")
    return OK


def _template(args) -> Certificate:
    slots = {"pi": "not-solvable-polyhedral", "pi2": "generic-non-dihedral"}
    for item in args.slot or []:
        name, _, tag = item.partition("=")
        if tag not in TAGS:
            raise InputError(f"--slot {item}: tag must be one of {', '.join(sorted(TAGS))}")
        slots[name] = tag
    names = list(slots)
    if len(names) != 2:
        raise InputError("search needs exactly two GL(2) slots")
    relations = list(args.rel or [])
    gens = set()
    try:
        for r in relations:
            gens |= parse_relation(r).generators
    except SyntaxProblem as exc:
        raise InputError(str(exc)) from exc
    gens |= set(args.gen or [])
    gens = sorted(g for g in gens if not g.startswith("omega_"))
    chi = args.chi or (gens[0] if len(gens) == 1 else "1")
    doc = {
        "schema": "lszero-certificate/1",
        "name": "search",
        "slots": [{"name": n, "kind": "gl2", "tag": t} for n, t in slots.items()],
        "generators": gens,
        "relations": relations,
        "nontrivial": list(args.nontrivial or []),
        "inequivalent": [names],
        "construction": {"kind": "lemma_d", "slots": names, "chi": chi, "c": {"0,0,0": 1}},
        "target": args.target,
    }
    try:
        cert = Certificate.from_dict(doc)
        cert.factor(cert.target, cert.case())
    except (MalformedCertificate, SyntaxProblem, ReprError) as exc:
        raise InputError(str(exc)) from exc
    return cert


def cmd_search(args) -> int:
    template = _template(args)
    try:
        bounds = search.SearchBounds(args.max_coeff, args.max_nonzero, args.max_degree, args.objective)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.minimal:
        best = search.minimal(template, bounds)
        found = [best] if best else []
    else:
        found = list(search.enumerate(template, bounds))
        if args.limit:
            found = found[:args.limit]
    if not found:
        print("no certificate within bounds")
        return FAIL
    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    for cert in found:
        c = dict(cert.construction.c)
        vec = " ".join(f"c[{j},{k},{r}]={n}" for (j, k, r), n in sorted(c.items()))
        l1, l2, k = cert.expected
        print(f"{cert.name}: {vec}  l1={l1} l2={l2} k<={k}")
        if outdir:
            (outdir / f"{cert.name}.cert").write_text(cert.to_json())
    print(f"{len(found)} certificate(s)")
    return OK


def cmd_numeric(args) -> int:
    cert = _load(args.path)
    if args.primes <= 0:
        print("warning: no primes requested; nothing tested", file=sys.stderr)
    try:
        rep = numeric.positivity_check(cert, args.primes, args.powers, args.tol, args.seed)
    except (numeric.NumericError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    if args.json:
        _emit(rep.to_dict())
    else:
        status = "ok" if rep.ok else "FAILED"
        print(f"{rep.name}: {status}  {rep.points} points, max |symbolic - direct| = {rep.max_diff:.3g}")
        for n in rep.notes:
            print(f"  note: {n}")
        for f in rep.failures:
            print(f"  {f}")
    return OK if rep.ok else FAIL


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lszero", description="Check and search zero-elimination certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check one certificate")
    v.add_argument("path")
    v.add_argument("--json", action="store_true")
    v.add_argument("--allow-abelian", action="store_true")
    v.add_argument("--explain", action="store_true", help="print one line per factor class")
    v.add_argument("--rules", help="pole rule table overriding the built-in one")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("paper-suite", help="run the built-in fixture suite")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_paper_suite)

    e = sub.add_parser("expand", help="print the factor multiset of a construction")
    e.add_argument("path")
    e.add_argument("--json", action="store_true")
    e.add_argument("--as-certificate", action="store_true",
                   help="print the certificate with its factor list written out")
    e.set_defaults(func=cmd_expand)

    q = sub.add_parser("search", help="search coefficient vectors for a target")
    q.add_argument("--target", required=True)
    q.add_argument("--slot", action="append", metavar="NAME=TAG",
                   help="slot tag; defaults pi=not-solvable-polyhedral, pi2=generic-non-dihedral")
    q.add_argument("--rel", action="append", metavar="RELATION", help='e.g. "chi^2=1"')
    q.add_argument("--gen", action="append", metavar="NAME", help="extra character generator")
    q.add_argument("--nontrivial", action="append", metavar="CHAR")
    q.add_argument("--chi", help="twist character of the construction")
    q.add_argument("--max-coeff", type=int, default=2)
    q.add_argument("--max-nonzero", type=int, default=4)
    q.add_argument("--max-degree", type=int, default=30)
    q.add_argument("--objective", choices=search.OBJECTIVES, default="min-degree")
    q.add_argument("--minimal", action="store_true", help="report only the best certificate")
    q.add_argument("--limit", type=int, default=0)
    q.add_argument("--out", help="directory for found certificate files")
    q.set_defaults(func=cmd_search)

    n = sub.add_parser("numeric", help="dual-path Dirichlet coefficient check")
    n.add_argument("path")
    n.add_argument("--primes", type=int, default=25)
    n.add_argument("--powers", type=int, default=3)
    n.add_argument("--tol", type=float, default=1e-9)
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--json", action="store_true")
    n.set_defaults(func=cmd_numeric)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
