"""Rankin-Selberg factor symbols and the multisets that make up D(s)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .repring import (
    Atom,
    CharacterExpr,
    LevelOutOfRange,
    Opaque,
    OpaqueTensorUnsupported,
    RelationLattice,
    VirtualRep,
    dual_atom,
    tensor_atoms,
)


class RuleInapplicable(Exception):
    pass


@dataclass(frozen=True, order=True)
class FactorSymbol:
    """L(s, left x right).

    When the two sides have disjoint supports the symbol is determined by the
    product atom, split as (first component, rest); otherwise the pair is kept
    formally, sorted, with the whole twist on the right.
    """

    left: Atom
    right: Atom

    @property
    def formal(self) -> bool:
        return bool(self.left.slots & self.right.slots)

    @property
    def degree(self) -> int:
        return self.left.degree * self.right.degree

    def atom(self) -> Atom | None:
        if self.formal:
            return None
        return self.left.merge(self.right)

    def __str__(self) -> str:
        if self.left.is_unit and self.left.twist.is_identity:
            return f"L({self.right})"
        return f"L({self.left} x {self.right})"


def _split(z: Atom) -> FactorSymbol:
    comps = z.components()
    if len(comps) <= 1:
        return FactorSymbol(Atom.unit(), z)
    first, rest = comps[0], comps[1:]
    right = Atom.unit(z.twist)
    for c in rest:
        right = right.merge(c)
    return FactorSymbol(first, right)


def make_factor(x: Atom, y: Atom, rel: RelationLattice) -> FactorSymbol:
    tw = rel.canonical(x.twist * y.twist)
    x0, y0 = x.untwisted(), y.untwisted()
    if not (x0.slots & y0.slots):
        return _split(x0.merge(y0).with_twist(tw))
    a, b = sorted((x0, y0))
    return FactorSymbol(a, b.with_twist(tw))


def factor_of(z: Atom, rel: RelationLattice) -> FactorSymbol:
    return make_factor(Atom.unit(), z, rel)


ZETA = FactorSymbol(Atom.unit(), Atom.unit())


def dual_factor(f: FactorSymbol, rel: RelationLattice) -> FactorSymbol:
    return make_factor(dual_atom(f.left), dual_atom(f.right), rel)


def class_rep(f: FactorSymbol, rel: RelationLattice) -> FactorSymbol:
    """Representative of f modulo the self-twists of both sides."""
    if not f.formal:
        z = rel.orbit_rep(f.atom())
        return _split(z)
    group = {rel.canonical(g * h) for g in rel.twist_group(f.left) for h in rel.twist_group(f.right)}
    tw = rel.canonical(f.right.twist)
    best = min(rel.canonical(tw * g) for g in group)
    return FactorSymbol(f.left, f.right.with_twist(best))


@dataclass(frozen=True)
class Pairing:
    """One ordered pair of terms of Pi and the factors it contributes."""

    left: Atom
    right: Atom
    mult: int
    pieces: tuple[FactorSymbol, ...]
    formal: FactorSymbol


@dataclass(frozen=True)
class FactorMultiset:
    factors: tuple[tuple[FactorSymbol, int], ...] = ()
    pairings: tuple[Pairing, ...] = ()

    @classmethod
    def of(cls, items: Iterable[tuple[FactorSymbol, int]], rel: RelationLattice,
           pairings: Iterable[Pairing] = ()) -> "FactorMultiset":
        acc: dict[FactorSymbol, int] = {}
        for f, e in items:
            f = class_rep(f, rel)
            acc[f] = acc.get(f, 0) + e
        return cls(tuple(sorted((f, e) for f, e in acc.items() if e)), tuple(pairings))

    def as_dict(self) -> dict[FactorSymbol, int]:
        return dict(self.factors)

    def exponent(self, f: FactorSymbol, rel: RelationLattice) -> int:
        return self.as_dict().get(class_rep(f, rel), 0)

    def __len__(self) -> int:
        return len(self.factors)

    def __str__(self) -> str:
        return " ".join(str(f) if e == 1 else f"{f}^{e}" for f, e in self.factors)


def total_degree(d: FactorMultiset) -> int:
    return sum(e * f.degree for f, e in d.factors)


def _pieces(x: Atom, y: Atom, rel: RelationLattice) -> list[FactorSymbol]:
    try:
        return [factor_of(z, rel) for z in tensor_atoms(x, y, rel)]
    except (LevelOutOfRange, OpaqueTensorUnsupported):
        return [make_factor(x, y, rel)]


def expand_pairing(pi: VirtualRep, rel: RelationLattice, local: bool = False) -> FactorMultiset:
    """Factors of L(s, Pi x dual Pi).

    Pairs of distinct terms are decomposed slot-wise whenever the
    Clebsch-Gordan rule stays within level 4.  A term paired with its own
    dual stays a single factor unless ``local`` is set, which decomposes
    every pairing (the local Euler factor Pi_v (x) dual Pi_v).
    """
    if not pi.terms:
        raise ValueError("empty representation")
    items: list[tuple[FactorSymbol, int]] = []
    pairings = []
    for i, (x, m) in enumerate(pi.terms):
        for j, (w, n) in enumerate(pi.terms):
            y = rel.canonical_atom(dual_atom(w))
            formal = make_factor(x, y, rel)
            if i == j and not local:
                pieces = [formal]
            else:
                pieces = _pieces(x, y, rel)
            pairings.append(Pairing(x, y, m * n, tuple(pieces), formal))
            items.extend((p, m * n) for p in pieces)
    return FactorMultiset.of(items, rel, pairings)


LEMMA_D_KEYS = [(j, k, r) for j in range(3) for k in range(3) for r in range(2)]


def lemma_d_rep(c: Mapping[tuple[int, int, int], int], chi: CharacterExpr, rel: RelationLattice,
                slots: tuple[str, str] = ("pi", "pi2")) -> VirtualRep:
    s, t = slots
    items = []
    for key, n in c.items():
        j, k, r = key
        if key not in LEMMA_D_KEYS:
            raise ValueError(f"coefficient index {key} outside j,k in 0..2, r in 0..1")
        if n < 0:
            raise ValueError("coefficients must be nonnegative")
        if n:
            items.append((Atom.make({s: j, t: k}, (), rel.canonical(chi ** r)), n))
    if not items:
        raise ValueError("coefficient vector is zero")
    return VirtualRep.of(items, rel)


def build_lemma_d(c: Mapping[tuple[int, int, int], int], chi: CharacterExpr, rel: RelationLattice,
                  slots: tuple[str, str] = ("pi", "pi2")) -> tuple[VirtualRep, FactorMultiset]:
    pi = lemma_d_rep(c, chi, rel, slots)
    return pi, expand_pairing(pi, rel, local=True)


# --- polyhedral rewrites ----------------------------------------------------

def polyhedral_generators(slot: str) -> dict[str, str]:
    return {"mu": f"mu_{slot}", "eta": f"eta_{slot}", "nu": f"nu_{slot}"}


def nu_slot(slot: str) -> Opaque:
    return Opaque(f"nu_{slot}", 2, self_dual=True, dihedral=True)


def decompose_level(a: Atom, slot: str, tag: str) -> list[Atom] | None:
    """Isobaric pieces of ``a`` after splitting its level on a polyhedral slot."""
    j = a.levels.get(slot, 0)
    names = polyhedral_generators(slot)
    rest = Atom.make({s: k for s, k in a.gl2 if s != slot}, a.opaque, a.twist)
    if tag == "tetrahedral":
        mu = CharacterExpr.gen(names["mu"])
        if j == 3:
            return [rest.merge(Atom.A(1, slot, mu)), rest.merge(Atom.A(1, slot, mu.inverse()))]
        if j == 4:
            return [rest.merge(Atom.A(2, slot)), rest.twisted(mu), rest.twisted(mu.inverse())]
    elif tag == "octahedral":
        eta = CharacterExpr.gen(names["eta"])
        if j == 4:
            return [rest.merge(Atom.of_opaque(nu_slot(slot))), rest.merge(Atom.A(2, slot, eta))]
    return None


def rewrite_polyhedral(f, case, slots: Iterable[str] | None = None):
    """Replace A^3/A^4 on tetrahedral or octahedral slots by their isobaric pieces.

    Accepts a FactorSymbol (returns a FactorMultiset), a FactorMultiset or a
    VirtualRep.  With ``slots`` given, only those slots are rewritten.
    """
    rel = case.rel
    if isinstance(f, FactorSymbol):
        out = _rewrite_factor(f, case, slots, strict=True)
        return FactorMultiset.of([(g, 1) for g in out], rel)
    if isinstance(f, FactorMultiset):
        items = []
        for g, e in f.factors:
            items.extend((h, e) for h in _rewrite_factor(g, case, slots, strict=False))
        return FactorMultiset.of(items, rel, f.pairings)
    if isinstance(f, VirtualRep):
        items = []
        for a, m in f.terms:
            items.extend((p, m) for p in _rewrite_atom(a, case, slots))
        return VirtualRep.of(items, rel)
    raise TypeError(f"cannot rewrite {type(f).__name__}")


def _rewrite_atom(a: Atom, case, slots) -> list[Atom]:
    pieces = [a]
    for s, j in a.gl2:
        if slots is not None and s not in slots:
            continue
        tag = case.tags.get(s)
        nxt = []
        for p in pieces:
            d = decompose_level(p, s, tag) if tag else None
            nxt.extend(d if d else [p])
        pieces = nxt
    return [case.rel.canonical_atom(p) for p in pieces]


def _rewrite_factor(f: FactorSymbol, case, slots, strict: bool) -> list[FactorSymbol]:
    rel = case.rel
    touched = False
    for side in (f.left, f.right):
        for s, j in side.gl2:
            if slots is not None and s not in slots:
                continue
            if j >= 3 and case.tags.get(s) in ("tetrahedral", "octahedral"):
                if decompose_level(side, s, case.tags[s]) is not None:
                    touched = True
    if not touched:
        if strict:
            raise RuleInapplicable(f"no polyhedral rewrite applies to {f}")
        return [f]
    out = []
    for x in _rewrite_atom(f.left, case, slots):
        for y in _rewrite_atom(f.right, case, slots):
            out.append(make_factor(x, y, rel))
    return out
