"""Case assumptions, cuspidality and pole-order intervals at s = 1."""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping

from .lfactors import FactorMultiset, FactorSymbol, decompose_level, make_factor, nu_slot
from .repring import (
    Atom,
    CharacterExpr,
    Equality,
    Opaque,
    RelationLattice,
    atoms_equal,
    dual_atom,
    omega,
)

TAGS = ("generic-non-dihedral", "dihedral", "tetrahedral", "octahedral", "not-solvable-polyhedral")
NON_DIHEDRAL = ("generic-non-dihedral", "tetrahedral", "octahedral", "not-solvable-polyhedral")


class UntaggedSlot(Exception):
    pass


class UnsupportedCase(Exception):
    pass


class InconsistentCase(ValueError):
    pass


_SECTIONS = {"counting_pole": dict, "dihedral_unary": list, "generic_scenarios": dict}


def load_rules(path=None) -> dict:
    if path is None:
        text = resources.files("lszero").joinpath("data/rules.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    rules = json.loads(text)
    if not isinstance(rules, dict) or rules.get("schema") != "lszero-rules/1":
        raise ValueError("rule table has an unknown schema")
    for key, kind in _SECTIONS.items():
        if not isinstance(rules.get(key), kind):
            raise ValueError(f"rule table needs a {kind.__name__} {key!r}")
    return rules


DEFAULT_RULES = load_rules()


@dataclass(frozen=True)
class PoleInterval:
    lo: int
    hi: int
    rules: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi:
            raise ValueError(f"bad pole interval [{self.lo},{self.hi}]")

    def __add__(self, other: "PoleInterval") -> "PoleInterval":
        return PoleInterval(self.lo + other.lo, self.hi + other.hi, _merge(self.rules, other.rules))

    def scale(self, n: int) -> "PoleInterval":
        return PoleInterval(n * self.lo, n * self.hi, self.rules)

    def meet(self, other: "PoleInterval") -> "PoleInterval":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise UnsupportedCase(f"conflicting pole bounds {self} and {other}")
        return PoleInterval(lo, hi, _merge(self.rules, other.rules))

    def hull(self, other: "PoleInterval") -> "PoleInterval":
        return PoleInterval(min(self.lo, other.lo), max(self.hi, other.hi), _merge(self.rules, other.rules))

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"


ZERO = PoleInterval(0, 0)


def _merge(a, b):
    return tuple(dict.fromkeys(a + b))


class Cuspidality(enum.Enum):
    CUSPIDAL = "Cuspidal"
    ISOBARIC = "Isobaric"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class CuspStatus:
    kind: Cuspidality
    pieces: tuple[Atom, ...] = ()


class CaseAssumptions:
    """Declared facts about the slots of one certificate.

    Tagging a GL(2) slot tetrahedral, octahedral or dihedral introduces the
    characters that witness the tag: ``mu_<s>`` (cubic, A2(s) (x) mu = A2(s)),
    ``eta_<s>`` (quadratic; A3(s) (x) eta = A3(s) when octahedral, s (x) eta = s
    when dihedral) and, for octahedral slots, the dihedral rank-2 piece
    ``nu_<s>`` whose central character is eta.
    """

    def __init__(self, tags: Mapping[str, str], opaque: Iterable[Opaque] = (),
                 generators: Iterable[str] = (), relations: Iterable[CharacterExpr] = (),
                 nontrivial: Iterable[CharacterExpr] = (),
                 self_twists: Iterable[tuple[Atom, CharacterExpr]] = (),
                 inequivalent: Iterable[tuple[str, str]] = (),
                 equivalent: Iterable[tuple[str, str]] = (),
                 distinct_pairs: Iterable[tuple[Atom, Atom]] = (),
                 non_self_twists: Iterable[tuple[Atom, CharacterExpr]] = (),
                 not_sym2_twist: Iterable[tuple[str, str]] = (),
                 rules: dict | None = None):
        self.tags = dict(tags)
        for s, t in self.tags.items():
            if t not in TAGS:
                raise InconsistentCase(f"unknown tag {t!r} for slot {s}")
        self.opaque = {o.name: o for o in opaque}
        clash = set(self.tags) & set(self.opaque)
        if clash:
            raise InconsistentCase(f"slot declared twice: {', '.join(sorted(clash))}")
        self.declared_generators = tuple(generators)
        self.declared_relations = tuple(relations)
        self.declared_nontrivial = tuple(nontrivial)
        self.declared_self_twists = tuple(self_twists)
        self.inequivalent_pairs = frozenset(frozenset(p) for p in inequivalent)
        self.equivalent_pairs = frozenset(frozenset(p) for p in equivalent)
        if self.inequivalent_pairs & self.equivalent_pairs:
            raise InconsistentCase("a pair is declared both twist-equivalent and inequivalent")
        for p in self.inequivalent_pairs | self.equivalent_pairs:
            if len(p) != 2 or not p <= set(self.tags):
                raise InconsistentCase(f"twist relation must name two GL(2) slots: {sorted(p)}")
        self.distinct_pairs = tuple(distinct_pairs)
        self.non_self_twists = tuple(non_self_twists)
        self.not_sym2_twist = frozenset(tuple(p) for p in not_sym2_twist)
        self.rules = rules or DEFAULT_RULES
        self.rel = self._build_lattice()
        self._cache: dict = {}

    # construction helpers

    def _auto(self):
        gens, rels, nontriv, twists = [], [], [], []
        for s, tag in sorted(self.tags.items()):
            if tag == "tetrahedral":
                mu = CharacterExpr.gen(f"mu_{s}")
                gens.append(f"mu_{s}")
                rels.append(mu ** 3)
                nontriv.append(mu)
                twists.append((Atom.A(2, s), mu))
            elif tag == "octahedral":
                eta = CharacterExpr.gen(f"eta_{s}")
                gens += [f"eta_{s}", omega(f"nu_{s}")]
                rels += [eta ** 2, CharacterExpr.gen(omega(f"nu_{s}")) * eta.inverse()]
                nontriv.append(eta)
                twists.append((Atom.A(3, s), eta))
                twists.append((Atom.of_opaque(nu_slot(s)), eta))
            elif tag == "dihedral":
                eta = CharacterExpr.gen(f"eta_{s}")
                gens.append(f"eta_{s}")
                rels.append(eta ** 2)
                nontriv.append(eta)
                twists.append((Atom.A(1, s), eta))
        return gens, rels, nontriv, twists

    def _build_lattice(self) -> RelationLattice:
        gens, rels, nontriv, twists = self._auto()
        slots = list(self.tags) + list(self.opaque)
        return RelationLattice.for_slots(
            slots, list(self.declared_generators) + gens,
            relations=list(self.declared_relations) + rels,
            nontrivial=list(self.declared_nontrivial) + nontriv,
            self_twists=list(self.declared_self_twists) + twists)

    def with_tags(self, tags: Mapping[str, str]) -> "CaseAssumptions":
        return CaseAssumptions(tags, self.opaque.values(), self.declared_generators,
                               self.declared_relations, self.declared_nontrivial,
                               self.declared_self_twists,
                               [tuple(p) for p in self.inequivalent_pairs],
                               [tuple(p) for p in self.equivalent_pairs],
                               self.distinct_pairs, self.non_self_twists,
                               self.not_sym2_twist, self.rules)

    def scenarios(self) -> list["CaseAssumptions"]:
        """Concrete cases covering every generic tag."""
        expand = self.rules.get("generic_scenarios", {})
        slots = sorted(self.tags)
        options = [expand.get(self.tags[s], [self.tags[s]]) for s in slots]
        if all(len(o) == 1 for o in options):
            return [self]
        return [self.with_tags(dict(zip(slots, combo))) for combo in itertools.product(*options)]

    # queries used by atoms_equal and the rules

    def tag(self, s: str) -> str:
        if s in self.opaque:
            return "dihedral" if self.opaque[s].dihedral else "opaque"
        if s not in self.tags:
            raise UntaggedSlot(f"slot {s} has no tag")
        return self.tags[s]

    def inequivalent(self, s: str, t: str) -> bool:
        return frozenset((s, t)) in self.inequivalent_pairs

    def non_dihedral(self, s: str) -> bool:
        return self.tag(s) in NON_DIHEDRAL

    def equal(self, a: Atom, b: Atom) -> Equality:
        return atoms_equal(a, b, self.rel, self)


# --- cuspidality ------------------------------------------------------------

def cuspidality(a: Atom, case: CaseAssumptions) -> CuspStatus:
    key = ("cusp", a)
    if key in case._cache:
        return case._cache[key]
    out = _cuspidality(a, case)
    case._cache[key] = out
    return out


def _cuspidality(a: Atom, case: CaseAssumptions) -> CuspStatus:
    for s, _ in a.gl2:
        case.tag(s)
    if a.is_unit or (not a.gl2 and len(a.opaque) == 1):
        return CuspStatus(Cuspidality.CUSPIDAL)
    # a decomposable level on any slot makes the whole atom isobaric
    for s, j in a.gl2:
        pieces = decompose_level(a, s, case.tag(s))
        if pieces is not None:
            return CuspStatus(Cuspidality.ISOBARIC, tuple(case.rel.canonical_atom(p) for p in pieces))
    if len(a.gl2) == 1 and not a.opaque:
        s, j = a.gl2[0]
        tag = case.tag(s)
        ok = {1: NON_DIHEDRAL + ("dihedral",), 2: NON_DIHEDRAL,
              3: ("octahedral", "not-solvable-polyhedral", "generic-non-dihedral"),
              4: ("not-solvable-polyhedral",)}[j]
        if tag == "generic-non-dihedral" and j == 4:
            return CuspStatus(Cuspidality.UNKNOWN)
        if tag == "generic-non-dihedral" and j == 3:
            return CuspStatus(Cuspidality.UNKNOWN)
        return CuspStatus(Cuspidality.CUSPIDAL if tag in ok else Cuspidality.UNKNOWN)
    levels = sorted(j for _, j in a.gl2)
    if len(a.gl2) == 2 and not a.opaque and levels in ([1, 1], [1, 2]):
        (s, _), (t, _) = a.gl2
        if case.inequivalent(s, t) and case.non_dihedral(s) and case.non_dihedral(t):
            return CuspStatus(Cuspidality.CUSPIDAL)
    if len(a.gl2) == 1 and len(a.opaque) == 1 and a.gl2[0][1] == 1:
        s = a.gl2[0][0]
        o = a.opaque[0][0]
        if o.rank == 3 and (o.name, s) in case.not_sym2_twist and case.non_dihedral(s):
            return CuspStatus(Cuspidality.CUSPIDAL)
    return CuspStatus(Cuspidality.UNKNOWN)


# --- single factors ---------------------------------------------------------

def _single(a: Atom) -> tuple[str, int] | None:
    if len(a.gl2) == 1 and not a.opaque:
        return a.gl2[0]
    return None


def _splits(f: FactorSymbol) -> list[tuple[Atom, Atom]]:
    if f.formal:
        return [(f.left, f.right)]
    z = f.atom()
    comps = z.components()
    out = []
    for r in range(len(comps) + 1):
        for pick in itertools.combinations(range(len(comps)), r):
            left = Atom.unit()
            right = Atom.unit(z.twist)
            for i, c in enumerate(comps):
                if i in pick:
                    left = left.merge(c)
                else:
                    right = right.merge(c)
            out.append((left, right))
    return out


def _counting_pole(x: Atom, y: Atom, case: CaseAssumptions) -> PoleInterval | None:
    sx, sy = _single(x), _single(y)
    if not sx or not sy:
        return None
    (s, m), (t, n) = sx, sy
    if s == t or not case.inequivalent(s, t):
        return None
    ts, tt = case.tag(s), case.tag(t)
    if ts not in NON_DIHEDRAL or tt not in NON_DIHEDRAL:
        return None
    if "generic-non-dihedral" in (ts, tt):
        return None
    table = case.rules["counting_pole"]
    for row in table["cases"]:
        for (a, ta), (b, tb) in (((m, ts), (n, tt)), ((n, tt), (m, ts))):
            if row["m"] == a and row["n"] == b and ta in row["left"] and tb in row["right"]:
                return PoleInterval(row["lo"], row["hi"], (row["key"],))
    d = table["default"]
    return PoleInterval(d["lo"], d["hi"], (d["key"],))


def _cusp_non_dihedral(a: Atom, case: CaseAssumptions) -> bool:
    sa = _single(a)
    return bool(sa) and case.non_dihedral(sa[0]) and cuspidality(a.untwisted(), case).kind is Cuspidality.CUSPIDAL


def _dihedral_pair(x: Atom, y: Atom, case: CaseAssumptions) -> PoleInterval | None:
    """Cuspidal non-dihedral A^m against any level of a dihedral slot.

    Every constituent of A^n of a dihedral form has rank at most 2 and is a
    character or a dihedral form, so it never pairs to a pole.
    """
    for a, b in ((x, y), (y, x)):
        sb = _single(b)
        if sb and case.tag(sb[0]) == "dihedral" and _cusp_non_dihedral(a, case):
            return PoleInterval(0, 0, ("dihedral pair",))
    return None


def _dihedral_unary(x: Atom, y: Atom, case: CaseAssumptions) -> PoleInterval | None:
    if not x.is_unit or not x.twist.is_identity:
        return None
    sy = _single(y)
    if not sy or case.tag(sy[0]) != "dihedral" or not case.rel.is_trivial(y.twist):
        return None
    for row in case.rules["dihedral_unary"]:
        if row["m"] == sy[1]:
            return PoleInterval(row["lo"], row["hi"], (row["key"],))
    return None


def _jpss(x: Atom, y: Atom, case: CaseAssumptions, depth: int) -> PoleInterval | None:
    cx, cy = cuspidality(x, case), cuspidality(y, case)
    kinds = {cx.kind, cy.kind}
    if Cuspidality.UNKNOWN in kinds:
        return None
    if kinds == {Cuspidality.CUSPIDAL}:
        if x.degree != y.degree:
            return PoleInterval(0, 0, ("JPSS rank",))
        eq = case.equal(case.rel.canonical_atom(dual_atom(x)), y)
        if eq is Equality.EQUAL:
            return PoleInterval(1, 1, ("JPSS dual",))
        if eq is Equality.DISTINCT:
            return PoleInterval(0, 0, ("JPSS distinct",))
        return PoleInterval(0, 1, ("JPSS undecided",))
    xs = cx.pieces if cx.kind is Cuspidality.ISOBARIC else (x,)
    ys = cy.pieces if cy.kind is Cuspidality.ISOBARIC else (y,)
    total = ZERO
    try:
        for px in xs:
            for py in ys:
                total = total + _pole(make_factor(px, py, case.rel), case, depth + 1)
    except UnsupportedCase:
        return None
    return PoleInterval(total.lo, total.hi, ("isobaric refinement",) + total.rules)


def pole_interval(f: FactorSymbol, case: CaseAssumptions) -> PoleInterval:
    """Interval guaranteed to contain -ord_{s=1} L(s, f) under ``case``."""
    return _pole(f, case, 0)


def _pole(f: FactorSymbol, case: CaseAssumptions, depth: int) -> PoleInterval:
    key = ("pole", f)
    if key in case._cache:
        hit = case._cache[key]
        if isinstance(hit, UnsupportedCase):
            raise hit
        return hit
    if depth > 12:
        raise UnsupportedCase(f"refinement too deep at {f}")
    try:
        out = _compute(f, case, depth)
    except UnsupportedCase as exc:
        case._cache[key] = exc
        raise
    case._cache[key] = out
    return out


def _compute(f: FactorSymbol, case: CaseAssumptions, depth: int) -> PoleInterval:
    if f.left.is_unit and f.right.is_unit:
        if case.rel.is_trivial(f.left.twist * f.right.twist):
            return PoleInterval(1, 1, ("zeta",))
    found = []
    for x, y in _splits(f):
        for rule in (_counting_pole, _dihedral_pair, _dihedral_unary):
            got = rule(x, y, case)
            if got is not None:
                found.append(got)
        got = _jpss(x, y, case, depth)
        if got is not None:
            found.append(got)
    if not found:
        raise UnsupportedCase(f"no pole rule applies to {f}")
    out = found[0]
    for g in found[1:]:
        out = out.meet(g)
    return out


# --- whole multisets --------------------------------------------------------

def pairing_interval(pieces, formal: FactorSymbol, case: CaseAssumptions) -> PoleInterval:
    """Pole of one pairing: the formal factor and the sum of its pieces both bound it."""
    bounds = []
    try:
        total = ZERO
        for p in pieces:
            total = total + pole_interval(p, case)
        bounds.append(total)
    except UnsupportedCase:
        pass
    if len(pieces) > 1 or pieces[0] != formal:
        try:
            bounds.append(pole_interval(formal, case))
        except UnsupportedCase:
            pass
    if not bounds:
        raise UnsupportedCase(f"no pole rule applies to {formal}")
    out = bounds[0]
    for b in bounds[1:]:
        out = out.meet(b)
    return out


def total_pole_interval(d: FactorMultiset, case: CaseAssumptions) -> PoleInterval:
    """Exponent-weighted sum of pole intervals over the factors of ``d``.

    When ``d`` records the pairings it was expanded from, each pairing is
    bounded separately, which can only tighten the sum.
    """
    total = ZERO
    if d.pairings:
        for p in d.pairings:
            total = total + pairing_interval(p.pieces, p.formal, case).scale(p.mult)
        return total
    for f, e in d.factors:
        total = total + pole_interval(f, case).scale(e)
    return total
