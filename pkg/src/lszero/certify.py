"""Elimination certificates: the multiplicity test l1 + l2 > k and the fixture suite."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .lfactors import (
    FactorMultiset,
    FactorSymbol,
    RuleInapplicable,
    build_lemma_d,
    class_rep,
    dual_factor,
    expand_pairing,
    factor_of,
    make_factor,
    rewrite_polyhedral,
    total_degree,
)
from .poles import (
    CaseAssumptions,
    Cuspidality,
    PoleInterval,
    UnsupportedCase,
    UntaggedSlot,
    cuspidality,
    pole_interval,
    total_pole_interval,
)
from .repring import Atom, Opaque, ReprError, VirtualRep
from .syntax import SyntaxProblem, parse_atom, parse_character, parse_relation, split_factor

SCHEMA = "lszero-certificate/1"
REPORT_SCHEMA = "lszero-report/1"


class MalformedCertificate(ValueError):
    pass


class Verdict(enum.Enum):
    ELIMINATED = "Eliminated"
    ABELIAN = "AbelianFactorOnly"
    FAIL = "Fail"
    UNSUPPORTED = "Unsupported"


# --- certificate model ------------------------------------------------------

@dataclass(frozen=True)
class SlotSpec:
    name: str
    kind: str  # "gl2" or "opaque"
    tag: str | None = None
    rank: int = 2
    self_dual: bool = False
    dihedral: bool = False

    def to_dict(self) -> dict:
        if self.kind == "gl2":
            return {"name": self.name, "kind": "gl2", "tag": self.tag}
        return {"name": self.name, "kind": "opaque", "rank": self.rank,
                "self_dual": self.self_dual, "dihedral": self.dihedral}


@dataclass(frozen=True)
class LemmaD:
    c: tuple[tuple[tuple[int, int, int], int], ...]
    chi: str = "1"
    slots: tuple[str, str] = ("pi", "pi2")

    def to_dict(self) -> dict:
        return {"kind": "lemma_d", "slots": list(self.slots), "chi": self.chi,
                "c": {f"{j},{k},{r}": n for (j, k, r), n in self.c}}


@dataclass(frozen=True)
class Isobaric:
    terms: tuple[tuple[str, int], ...]
    local: bool = False

    def to_dict(self) -> dict:
        return {"kind": "local" if self.local else "isobaric",
                "terms": [[a, m] for a, m in self.terms]}


@dataclass(frozen=True)
class Certificate:
    """Declarative certificate; every text field uses the atom grammar of ``syntax``."""

    name: str
    slots: tuple[SlotSpec, ...]
    construction: LemmaD | Isobaric
    target: str
    generators: tuple[str, ...] = ()
    relations: tuple[str, ...] = ()
    nontrivial: tuple[str, ...] = ()
    inequivalent: tuple[tuple[str, str], ...] = ()
    equivalent: tuple[tuple[str, str], ...] = ()
    distinct: tuple[tuple[str, str], ...] = ()
    self_twists: tuple[tuple[str, str], ...] = ()
    non_self_twists: tuple[tuple[str, str], ...] = ()
    not_sym2_twist: tuple[tuple[str, str], ...] = ()
    rewrite: tuple[str, ...] = ()
    divisors: tuple[str, ...] = ()
    expected: tuple[int, int, int] | None = None
    family: str | None = None
    title: str = ""
    numeric: tuple[tuple[str, str], ...] = ()
    factors: tuple[tuple[str, int], ...] = ()

    # parsing helpers

    @property
    def gl2_slots(self) -> list[str]:
        return [s.name for s in self.slots if s.kind == "gl2"]

    @property
    def opaque_slots(self) -> dict[str, Opaque]:
        out = {}
        for s in self.slots:
            if s.kind == "opaque":
                out[s.name] = Opaque(s.name, s.rank, s.self_dual, s.dihedral)
        return out

    def atom(self, text: str) -> Atom:
        return parse_atom(text, self.gl2_slots, self.opaque_slots)

    def factor(self, text: str, case: CaseAssumptions) -> FactorSymbol:
        text = text.strip()
        if text.startswith("L(") and text.endswith(")"):
            text = text[2:-1]
        left, right = split_factor(text)
        if right is None:
            return factor_of(self.atom(left), case.rel)
        return make_factor(self.atom(left), self.atom(right), case.rel)

    def case(self, rules: Mapping[str, Any] | None = None) -> CaseAssumptions:
        try:
            return CaseAssumptions(
                {s.name: s.tag for s in self.slots if s.kind == "gl2"},
                self.opaque_slots.values(),
                generators=self.generators,
                relations=[parse_relation(r) for r in self.relations],
                nontrivial=[parse_character(c) for c in self.nontrivial],
                self_twists=[(self.atom(a), parse_character(x)) for a, x in self.self_twists],
                inequivalent=self.inequivalent,
                equivalent=self.equivalent,
                distinct_pairs=[(self.atom(a), self.atom(b)) for a, b in self.distinct],
                non_self_twists=[(self.atom(a), parse_character(x)) for a, x in self.non_self_twists],
                not_sym2_twist=self.not_sym2_twist,
                rules=rules,
            )
        except (SyntaxProblem, ReprError, ValueError) as exc:
            raise MalformedCertificate(str(exc)) from exc

    def build(self, case: CaseAssumptions) -> tuple[VirtualRep, FactorMultiset]:
        con = self.construction
        rel = case.rel
        if isinstance(con, LemmaD):
            c = dict(con.c)
            if not any(c.values()):
                raise MalformedCertificate("coefficient vector is zero")
            return build_lemma_d(c, parse_character(con.chi), rel, con.slots)
        pi = VirtualRep.of([(self.atom(a), m) for a, m in con.terms], rel)
        if not pi.terms:
            raise MalformedCertificate("construction has no terms")
        return pi, expand_pairing(pi, rel, local=con.local)

    def declared(self, case: CaseAssumptions) -> FactorMultiset | None:
        """The hand-written factor list, if the certificate carries one."""
        if not self.factors:
            return None
        return FactorMultiset.of([(self.factor(t, case), e) for t, e in self.factors], case.rel)

    def with_factor_list(self) -> "Certificate":
        """Copy carrying its own expansion as an explicit factor list.

        The list is taken from the scenario with the fewest generators so its
        text parses under every scenario of the case.
        """
        case = min(self.case().scenarios(), key=lambda c: len(c.rel.generators))
        _, d = self.build(case)
        return replace(self, factors=tuple((str(f), e) for f, e in d.factors))

    # serialization

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"schema": SCHEMA, "name": self.name}
        if self.title:
            out["title"] = self.title
        out["slots"] = [s.to_dict() for s in self.slots]
        for key in ("generators", "relations", "nontrivial", "rewrite", "divisors"):
            val = getattr(self, key)
            if val:
                out[key] = list(val)
        for key in ("inequivalent", "equivalent", "distinct", "self_twists",
                    "non_self_twists", "not_sym2_twist"):
            val = getattr(self, key)
            if val:
                out[key] = [list(p) for p in val]
        out["construction"] = self.construction.to_dict()
        out["target"] = self.target
        if self.expected is not None:
            l1, l2, k = self.expected
            out["expected"] = {"l1": l1, "l2": l2, "k": k}
        if self.family:
            out["family"] = self.family
        if self.numeric:
            out["numeric"] = dict(self.numeric)
        if self.factors:
            out["factors"] = [[t, e] for t, e in self.factors]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: Any) -> "Certificate":
        try:
            return _from_dict(d)
        except MalformedCertificate:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise MalformedCertificate(f"bad certificate: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedCertificate(f"not JSON: {exc}") from exc
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "Certificate":
        return cls.from_json(Path(path).read_text())


_KNOWN = {"schema", "name", "title", "slots", "generators", "relations", "nontrivial",
          "inequivalent", "equivalent", "distinct", "self_twists", "non_self_twists",
          "not_sym2_twist", "construction", "target", "rewrite", "divisors", "expected",
          "family", "numeric", "factors"}


def _pairs(v) -> tuple[tuple[str, str], ...]:
    out = []
    for p in v or ():
        if not isinstance(p, (list, tuple)) or len(p) != 2:
            raise MalformedCertificate(f"expected a pair, got {p!r}")
        out.append((str(p[0]), str(p[1])))
    return tuple(out)


def _from_dict(d) -> Certificate:
    if not isinstance(d, dict):
        raise MalformedCertificate("certificate must be a JSON object")
    if d.get("schema") != SCHEMA:
        raise MalformedCertificate(f"schema must be {SCHEMA!r}")
    extra = set(d) - _KNOWN
    if extra:
        raise MalformedCertificate(f"unknown field(s): {', '.join(sorted(extra))}")
    slots = []
    for s in d["slots"]:
        kind = s["kind"]
        if kind == "gl2":
            slots.append(SlotSpec(s["name"], "gl2", s["tag"]))
        elif kind == "opaque":
            slots.append(SlotSpec(s["name"], "opaque", None, int(s["rank"]),
                                  bool(s.get("self_dual", False)), bool(s.get("dihedral", False))))
        else:
            raise MalformedCertificate(f"unknown slot kind {kind!r}")
    con = d["construction"]
    kind = con["kind"]
    if kind == "lemma_d":
        c = []
        for key, n in con["c"].items():
            j, k, r = (int(x) for x in key.split(","))
            if int(n) < 0:
                raise MalformedCertificate("coefficients must be nonnegative")
            c.append(((j, k, r), int(n)))
        construction: LemmaD | Isobaric = LemmaD(tuple(sorted(c)), str(con.get("chi", "1")),
                                                 tuple(con.get("slots", ("pi", "pi2"))))
    elif kind in ("isobaric", "local"):
        terms = tuple((str(a), int(m)) for a, m in con["terms"])
        if any(m < 0 for _, m in terms):
            raise MalformedCertificate("multiplicities must be nonnegative")
        construction = Isobaric(terms, kind == "local")
    else:
        raise MalformedCertificate(f"unknown construction kind {kind!r}")
    exp = d.get("expected")
    expected = None if exp is None else (int(exp["l1"]), int(exp["l2"]), int(exp["k"]))
    return Certificate(
        name=str(d["name"]),
        slots=tuple(slots),
        construction=construction,
        target=str(d["target"]),
        generators=tuple(d.get("generators", ())),
        relations=tuple(d.get("relations", ())),
        nontrivial=tuple(d.get("nontrivial", ())),
        inequivalent=_pairs(d.get("inequivalent")),
        equivalent=_pairs(d.get("equivalent")),
        distinct=_pairs(d.get("distinct")),
        self_twists=_pairs(d.get("self_twists")),
        non_self_twists=_pairs(d.get("non_self_twists")),
        not_sym2_twist=_pairs(d.get("not_sym2_twist")),
        rewrite=tuple(d.get("rewrite", ())),
        divisors=tuple(d.get("divisors", ())),
        expected=expected,
        family=d.get("family"),
        title=str(d.get("title", "")),
        numeric=tuple(sorted((str(k), str(v)) for k, v in d.get("numeric", {}).items())),
        factors=tuple((str(t), int(e)) for t, e in d.get("factors", ())),
    )


# --- reports ----------------------------------------------------------------

@dataclass(frozen=True)
class Row:
    symbol: str
    exponent: int
    interval: str
    rules: tuple[str, ...]
    degree: int


@dataclass(frozen=True)
class Report:
    name: str
    verdict: Verdict
    l1: int = 0
    l2: int = 0
    pole: PoleInterval | None = None
    target: str = ""
    target_degree: int = 0
    degree: int = 0
    abelian: tuple[str, ...] = ()
    rows: tuple[Row, ...] = ()
    mismatches: tuple[str, ...] = ()
    message: str = ""
    scenarios: int = 1
    family: str | None = None

    @property
    def k(self) -> int | None:
        return None if self.pole is None else self.pole.hi

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": REPORT_SCHEMA,
            "name": self.name,
            "verdict": self.verdict.value,
            "l1": self.l1,
            "l2": self.l2,
            "pole": None if self.pole is None else [self.pole.lo, self.pole.hi],
            "target": self.target,
            "target_degree": self.target_degree,
            "degree": self.degree,
            "abelian": list(self.abelian),
            "factors": [{"symbol": r.symbol, "exponent": r.exponent, "pole": r.interval,
                         "rules": list(r.rules), "degree": r.degree} for r in self.rows],
            "mismatches": list(self.mismatches),
            "message": self.message,
            "scenarios": self.scenarios,
            "family": self.family,
        }


@dataclass
class _Scenario:
    l1: int
    l2: int
    pole: PoleInterval
    rows: dict[str, Row]
    degree: int
    target_degree: int
    abelian: tuple[str, ...]
    declared_ok: bool = True


def _class_exponent(d: FactorMultiset, f: FactorSymbol, case: CaseAssumptions) -> int:
    return d.exponent(f, case.rel)


def _same_class(f: FactorSymbol, g: FactorSymbol, case: CaseAssumptions) -> bool:
    rel = case.rel
    if class_rep(f, rel) == class_rep(g, rel):
        return True
    if not f.formal and not g.formal:
        return case.equal(f.atom(), g.atom()).value == "Equal"
    return False


def _abelian_pieces(f: FactorSymbol, case: CaseAssumptions) -> tuple[str, ...] | None:
    """Self-dual rank-1 constituents when ``f`` refines entirely into them."""
    if f.formal:
        return None
    stack, out = [f.atom()], []
    while stack:
        a = stack.pop()
        st = cuspidality(a, case)
        if st.kind is Cuspidality.ISOBARIC:
            stack.extend(st.pieces)
        elif st.kind is Cuspidality.CUSPIDAL and a.is_unit and case.rel.is_trivial(a.twist ** 2):
            out.append(str(a))
        else:
            return None
    return tuple(sorted(out))


def _regroup(d: FactorMultiset, case: CaseAssumptions, slots, wanted) -> FactorMultiset:
    """Split only those factors whose polyhedral pieces contain a wanted class."""
    rel = case.rel
    keys = {class_rep(w, rel) for w in wanted}
    items = []
    for f, e in d.factors:
        try:
            pieces = rewrite_polyhedral(f, case, slots)
        except RuleInapplicable:
            items.append((f, e))
            continue
        if keys & {g for g, _ in pieces.factors}:
            items.extend((g, e * n) for g, n in pieces.factors)
        else:
            items.append((f, e))
    return FactorMultiset.of(items, rel, d.pairings)


def _run(cert: Certificate, case: CaseAssumptions) -> _Scenario:
    _, d = cert.build(case)
    pole = total_pole_interval(d, case)
    target = cert.factor(cert.target, case)
    dual = dual_factor(target, case.rel)
    divisors = [cert.factor(t, case) for t in cert.divisors]
    wanted = [target, dual] + divisors + [dual_factor(g, case.rel) for g in divisors]
    counted = _regroup(d, case, cert.rewrite, wanted) if cert.rewrite else d
    l1 = _class_exponent(counted, target, case)
    l1 += sum(_class_exponent(counted, g, case) for g in divisors)
    if _same_class(target, dual, case):
        l2 = 0
    else:
        l2 = _class_exponent(counted, dual, case)
        l2 += sum(_class_exponent(counted, dual_factor(g, case.rel), case) for g in divisors)
    rows = {}
    for f, e in counted.factors:
        try:
            iv = pole_interval(f, case)
            text, rules = str(iv), iv.rules
        except UnsupportedCase:
            text, rules = "?", ("pairing bound only",)
        rows[str(f)] = Row(str(f), e, text, rules, f.degree)
    ab = _abelian_pieces(target, case) or ()
    declared = cert.declared(case)
    ok = declared is None or declared.factors == d.factors
    return _Scenario(l1, l2, pole, rows, total_degree(d), target.degree, ab, ok)


def _hull_text(a: str, b: str) -> str:
    if a == b:
        return a
    if "?" in (a, b):
        return "?"
    lo1, hi1 = (int(x) for x in a.strip("[]").split(","))
    lo2, hi2 = (int(x) for x in b.strip("[]").split(","))
    return f"[{min(lo1, lo2)},{max(hi1, hi2)}]"


def check(cert: Certificate, rules: Mapping[str, Any] | None = None) -> Report:
    """Build D for ``cert``, count the target and bound the pole at s = 1."""
    if isinstance(cert.construction, LemmaD) and not any(n for _, n in cert.construction.c):
        raise MalformedCertificate("coefficient vector is zero")
    if isinstance(cert.construction, Isobaric) and not any(m for _, m in cert.construction.terms):
        raise MalformedCertificate("construction has no terms")
    base = cert.case(rules)
    try:
        results = [_run(cert, case) for case in base.scenarios()]
    except UnsupportedCase as exc:
        return Report(cert.name, Verdict.UNSUPPORTED, message=str(exc), target=cert.target,
                      family=cert.family)
    except (SyntaxProblem, ReprError, UntaggedSlot) as exc:
        raise MalformedCertificate(str(exc)) from exc
    l1 = min(r.l1 for r in results)
    l2 = min(r.l2 for r in results)
    pole = results[0].pole
    for r in results[1:]:
        pole = pole.hull(r.pole)
    rows: dict[str, Row] = {}
    for r in results:
        for key, row in r.rows.items():
            if key in rows:
                old = rows[key]
                rows[key] = Row(key, old.exponent, _hull_text(old.interval, row.interval),
                                tuple(dict.fromkeys(old.rules + row.rules)), old.degree)
            else:
                rows[key] = row
    abelian = tuple(sorted({a for r in results for a in r.abelian}))
    if l1 + l2 > pole.hi:
        verdict = Verdict.ELIMINATED
    elif abelian and all(r.abelian for r in results):
        verdict = Verdict.ABELIAN
    else:
        verdict = Verdict.FAIL
    mismatches = []
    if cert.expected is not None:
        for label, want, got in zip(("l1", "l2", "k"), cert.expected, (l1, l2, pole.hi)):
            if want != got:
                mismatches.append(f"{label}: expected {want}, computed {got}")
    if not all(r.declared_ok for r in results):
        mismatches.append("declared factor list differs from the expansion")
    report = Report(cert.name, verdict, l1, l2, pole, cert.target, results[0].target_degree,
                    results[0].degree, abelian, tuple(rows.values()), tuple(mismatches),
                    "", len(results), cert.family)
    if report.verdict is Verdict.ELIMINATED:
        assert report.l1 + report.l2 > report.pole.hi
    return report


def explain(report: Report) -> str:
    """One line per factor class: symbol, exponent, pole interval and rules used."""
    if not report.rows:
        return ""
    width = max(len(r.symbol) for r in report.rows)
    lines = []
    for r in report.rows:
        lines.append(f"{r.symbol:<{width}}  ^{r.exponent:<3} {r.interval:<6} {', '.join(r.rules)}")
    return "\n".join(lines)


def summary(report: Report) -> str:
    if report.pole is None:
        return f"{report.name}: {report.verdict.value} ({report.message})"
    return (f"{report.name}: {report.verdict.value}  l1={report.l1}, l2={report.l2}, "
            f"k<={report.pole.hi} (pole in {report.pole})")


# --- fixtures ---------------------------------------------------------------

SUITE = (
    "d1_d2", "gl3xgl3_2", "gl4xgl3", "gl5xgl2", "gl2xgl2xgl2", "gl2xgl2xgl3",
    "gl2xgl3xgl3", "gl2xgl3xgl3_2", "gl4xgl2", "gl5xgl3", "gl5xgl3_2",
    "sym4", "self_twist",
)
CONTROLS = ("d1_d2_tetrahedral",)


def fixture_dir():
    return resources.files("lszero").joinpath("fixtures")


def load_fixture(name: str) -> Certificate:
    return Certificate.from_json(fixture_dir().joinpath(f"{name}.cert").read_text())


def paper_suite() -> list[Report]:
    return [check(load_fixture(n)) for n in SUITE]
