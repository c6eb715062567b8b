"""Formal characters, symmetric-power atoms and their tensor calculus.

A GL(2) slot ``s`` carries the atoms A^j(s) for 0 <= j <= 4, where
A^j = Sym^j twisted by omega_s^(-floor(j/2)).  Opaque slots are cuspidal
representations of a declared rank that admit no decomposition.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Mapping

from .lattice import hermite_rows, reduce_vector

MAX_LEVEL = 4


class ReprError(Exception):
    pass


class UnknownGenerator(ReprError):
    pass


class LevelOutOfRange(ReprError):
    pass


class OpaqueTensorUnsupported(ReprError):
    pass


def omega(slot: str) -> str:
    """Generator name of the central character of ``slot``."""
    return f"omega_{slot}"


# --- characters -------------------------------------------------------------

@dataclass(frozen=True, order=True)
class CharacterExpr:
    exponents: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, int] | None = None, **kw: int) -> "CharacterExpr":
        acc: dict[str, int] = {}
        for src in (mapping or {}, kw):
            for g, e in src.items():
                acc[g] = acc.get(g, 0) + int(e)
        return cls(tuple(sorted((g, e) for g, e in acc.items() if e)))

    @classmethod
    def gen(cls, name: str, power: int = 1) -> "CharacterExpr":
        return cls.of({name: power})

    def as_dict(self) -> dict[str, int]:
        return dict(self.exponents)

    def get(self, g: str) -> int:
        return self.as_dict().get(g, 0)

    def __mul__(self, other: "CharacterExpr") -> "CharacterExpr":
        acc = self.as_dict()
        for g, e in other.exponents:
            acc[g] = acc.get(g, 0) + e
        return CharacterExpr.of(acc)

    def __pow__(self, n: int) -> "CharacterExpr":
        return CharacterExpr.of({g: e * n for g, e in self.exponents})

    def inverse(self) -> "CharacterExpr":
        return self ** -1

    @property
    def is_identity(self) -> bool:
        return not self.exponents

    @property
    def generators(self) -> set[str]:
        return {g for g, _ in self.exponents}

    def __str__(self) -> str:
        if not self.exponents:
            return "1"
        parts = []
        for g, e in self.exponents:
            parts.append(g if e == 1 else f"{g}^{e}")
        return "*".join(parts)


TRIVIAL = CharacterExpr()


# --- atoms ------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Opaque:
    """A cuspidal slot of fixed rank with no internal structure."""

    name: str
    rank: int
    self_dual: bool = False
    dihedral: bool = False


@dataclass(frozen=True, order=True)
class Atom:
    """Pure tensor of A-levels on GL(2) slots, opaque parts and a twist."""

    gl2: tuple[tuple[str, int], ...] = ()
    opaque: tuple[tuple[Opaque, bool], ...] = ()
    twist: CharacterExpr = TRIVIAL

    def __post_init__(self):
        for s, j in self.gl2:
            if not 0 < j <= MAX_LEVEL:
                raise LevelOutOfRange(f"A^{j}({s}) is outside levels 1..{MAX_LEVEL}")
        names = [s for s, _ in self.gl2]
        if len(set(names)) != len(names):
            raise ReprError("repeated GL(2) slot in one atom")

    @classmethod
    def make(cls, gl2: Mapping[str, int] | Iterable[tuple[str, int]] = (),
             opaque: Iterable[tuple[Opaque, bool]] = (),
             twist: CharacterExpr = TRIVIAL) -> "Atom":
        items = gl2.items() if isinstance(gl2, Mapping) else gl2
        parts = tuple(sorted((s, j) for s, j in items if j))
        ops = []
        for o, conj in opaque:
            ops.append((o, False if o.self_dual else bool(conj)))
        return cls(parts, tuple(sorted(ops)), twist)

    @classmethod
    def unit(cls, twist: CharacterExpr = TRIVIAL) -> "Atom":
        return cls((), (), twist)

    @classmethod
    def A(cls, j: int, slot: str, twist: CharacterExpr = TRIVIAL) -> "Atom":
        if j < 0 or j > MAX_LEVEL:
            raise LevelOutOfRange(f"level {j} not in 0..{MAX_LEVEL}")
        return cls.make({slot: j}, (), twist)

    @classmethod
    def of_opaque(cls, o: Opaque, conj: bool = False, twist: CharacterExpr = TRIVIAL) -> "Atom":
        return cls.make((), [(o, conj)], twist)

    @property
    def degree(self) -> int:
        d = 1
        for _, j in self.gl2:
            d *= j + 1
        for o, _ in self.opaque:
            d *= o.rank
        return d

    @property
    def levels(self) -> dict[str, int]:
        return dict(self.gl2)

    @property
    def slots(self) -> set[str]:
        return {s for s, _ in self.gl2} | {o.name for o, _ in self.opaque}

    @property
    def ncomponents(self) -> int:
        return len(self.gl2) + len(self.opaque)

    @property
    def is_unit(self) -> bool:
        return not self.gl2 and not self.opaque

    def untwisted(self) -> "Atom":
        return Atom(self.gl2, self.opaque, TRIVIAL)

    def with_twist(self, c: CharacterExpr) -> "Atom":
        return Atom(self.gl2, self.opaque, c)

    def twisted(self, c: CharacterExpr) -> "Atom":
        return Atom(self.gl2, self.opaque, self.twist * c)

    def components(self) -> list["Atom"]:
        out = [Atom(((s, j),), (), TRIVIAL) for s, j in self.gl2]
        out += [Atom((), ((o, c),), TRIVIAL) for o, c in self.opaque]
        return out

    def merge(self, other: "Atom") -> "Atom":
        if self.slots & other.slots:
            raise ReprError("merge requires disjoint supports")
        return Atom.make(self.gl2 + other.gl2, self.opaque + other.opaque,
                         self.twist * other.twist)

    def __str__(self) -> str:
        parts = [f"A{j}({s})" for s, j in self.gl2]
        parts += [("~" if c else "") + o.name for o, c in self.opaque]
        body = " ".join(parts) if parts else "1"
        if self.twist.is_identity:
            return body
        return f"{body} @{self.twist}"


def central_exponent(j: int) -> int:
    """Exponent of omega in the central character of A^j."""
    return j * (j + 1) // 2 - (j + 1) * (j // 2)


def central_character(a: Atom) -> CharacterExpr:
    deg = a.degree
    acc = a.twist ** deg
    for s, j in a.gl2:
        e = central_exponent(j) * (deg // (j + 1))
        acc = acc * CharacterExpr.gen(omega(s), e)
    for o, conj in a.opaque:
        e = (-1 if conj else 1) * (deg // o.rank)
        acc = acc * CharacterExpr.gen(omega(o.name), e)
    return acc


def dual_atom(a: Atom) -> Atom:
    tw = a.twist.inverse()
    for s, j in a.gl2:
        if j % 2:
            tw = tw * CharacterExpr.gen(omega(s), -1)
    ops = [(o, not c) for o, c in a.opaque]
    return Atom.make(a.gl2, ops, tw)


# --- relation lattice -------------------------------------------------------

class RelationLattice:
    """Character relations, declared nontrivial characters and self-twists.

    ``relations`` are characters declared trivial.  ``self_twists`` are pairs
    (B, xi) stating B (x) xi = B; they apply to every atom containing B as a
    tensor factor.  A bare A^1(s) or a bare opaque slot in ``B`` declares a
    self-twist of the slot itself, which then acts on all odd levels of s.
    """

    def __init__(self, generators: Iterable[str], relations: Iterable[CharacterExpr] = (),
                 nontrivial: Iterable[CharacterExpr] = (),
                 self_twists: Iterable[tuple[Atom, CharacterExpr]] = ()):
        # central characters come first so reduction rewrites them in terms of
        # the declared characters rather than the other way round
        self.generators = tuple(sorted(set(generators), key=lambda g: (not g.startswith("omega_"), g)))
        self._index = {g: i for i, g in enumerate(self.generators)}
        self._declared = tuple(relations)
        rels = list(self._declared)
        self.self_twists = tuple(self_twists)
        # B (x) xi = B forces xi^deg(B) = 1 by comparing central characters
        for b, xi in self.self_twists:
            rels.append(xi ** b.degree)
        self.relations = tuple(rels)
        for c in self.relations:
            self._check(c)
        self.nontrivial = tuple(nontrivial)
        for c in self.nontrivial:
            self._check(c)
        for _, xi in self.self_twists:
            self._check(xi)
        self._basis = hermite_rows([self._vec(c) for c in self.relations], len(self.generators))
        self._group_cache: dict[Atom, frozenset] = {}

    @classmethod
    def for_slots(cls, slots: Iterable[str], generators: Iterable[str] = (), **kw) -> "RelationLattice":
        gens = list(generators) + [omega(s) for s in slots]
        return cls(gens, **kw)

    def extend(self, generators: Iterable[str] = (), relations: Iterable[CharacterExpr] = (),
               nontrivial: Iterable[CharacterExpr] = (),
               self_twists: Iterable[tuple[Atom, CharacterExpr]] = ()) -> "RelationLattice":
        return RelationLattice(self.generators + tuple(generators),
                               list(self._declared) + list(relations),
                               self.nontrivial + tuple(nontrivial),
                               self.self_twists + tuple(self_twists))

    def _check(self, c: CharacterExpr) -> None:
        bad = c.generators - set(self.generators)
        if bad:
            raise UnknownGenerator(f"undeclared generator(s): {', '.join(sorted(bad))}")

    def _vec(self, c: CharacterExpr) -> list[int]:
        self._check(c)
        v = [0] * len(self.generators)
        for g, e in c.exponents:
            v[self._index[g]] += e
        return v

    def _char(self, v: list[int]) -> CharacterExpr:
        return CharacterExpr.of({g: e for g, e in zip(self.generators, v)})

    @property
    def basis(self) -> list[list[int]]:
        return [list(r) for r in self._basis]

    def canonical(self, c: CharacterExpr) -> CharacterExpr:
        return self._char(reduce_vector(self._vec(c), self._basis))

    def is_trivial(self, c: CharacterExpr) -> bool:
        return self.canonical(c).is_identity

    def equal(self, a: CharacterExpr, b: CharacterExpr) -> bool:
        return self.is_trivial(a * b.inverse())

    def order(self, c: CharacterExpr, limit: int = 64) -> int | None:
        for n in range(1, limit + 1):
            if self.is_trivial(c ** n):
                return n
        return None

    def provably_nontrivial(self, c: CharacterExpr) -> bool:
        """True when some power c^m is d^k for a declared nontrivial d with d^k != 1 forced."""
        if self.canonical(c).is_identity:
            return False
        n = self.order(c) or 2
        return any(self._power_of_nontrivial(c ** m) for m in range(1, n))

    def _power_of_nontrivial(self, c: CharacterExpr) -> bool:
        cc = self.canonical(c)
        if cc.is_identity:
            return False
        for d in self.nontrivial:
            n = self.order(d)
            if n is None:
                if cc in (self.canonical(d), self.canonical(d.inverse())):
                    return True
                continue
            for k in range(1, n):
                if gcd(k, n) == 1 and self.canonical(d ** k) == cc:
                    return True
        return False

    def canonical_atom(self, a: Atom) -> Atom:
        return a.with_twist(self.canonical(a.twist))

    # self-twist groups

    def _applies(self, b: Atom, a: Atom) -> bool:
        if b.twist.is_identity and b.ncomponents == 1:
            if b.gl2:
                s, j = b.gl2[0]
                if j == 1:
                    lv = a.levels.get(s, 0)
                    return lv % 2 == 1
            else:
                o = b.opaque[0][0]
                return any(p.name == o.name for p, _ in a.opaque)
        lv = a.levels
        for s, j in b.gl2:
            if lv.get(s) != j:
                return False
        names = [p.name for p, _ in a.opaque]
        for o, _ in b.opaque:
            if o.name not in names:
                return False
            names.remove(o.name)
        return True

    def twist_group(self, a: Atom, cap: int = 256) -> frozenset:
        """Canonical characters xi with a (x) xi = a, as far as declared."""
        base = a.untwisted()
        if base in self._group_cache:
            return self._group_cache[base]
        gens = [self.canonical(xi) for b, xi in self.self_twists if self._applies(b, base)]
        group = {TRIVIAL}
        frontier = [TRIVIAL]
        while frontier:
            nxt = []
            for g in frontier:
                for h in gens:
                    for k in (h, h.inverse()):
                        x = self.canonical(g * k)
                        if x not in group:
                            group.add(x)
                            nxt.append(x)
            if len(group) > cap:
                raise ReprError(f"self-twist group of {base} is not finite under the relations")
            frontier = nxt
        out = frozenset(group)
        self._group_cache[base] = out
        return out

    def orbit_rep(self, a: Atom) -> Atom:
        """Canonical representative of a modulo its self-twist group."""
        tw = self.canonical(a.twist)
        group = self.twist_group(a)
        best = min(self.canonical(tw * g) for g in group)
        return a.with_twist(best)


# --- Clebsch-Gordan ---------------------------------------------------------

def cg_tensor(j: int, k: int) -> list[tuple[int, int]]:
    """Sym^j (x) Sym^k = sum over r of Sym^(j+k-2r) (x) det^r."""
    if j < 0 or k < 0:
        raise ValueError("levels must be nonnegative")
    return [(j + k - 2 * r, r) for r in range(min(j, k) + 1)]


def slot_product(j: int, k: int) -> list[tuple[int, int]]:
    """A^j (x) A^k on one slot as a list of (level, power of omega)."""
    out = []
    for m, r in cg_tensor(j, k):
        out.append((m, r - j // 2 - k // 2 + m // 2))
    return out


def a_tensor(j: int, k: int, chi: CharacterExpr, slot_char: CharacterExpr) -> list[tuple[int, CharacterExpr]]:
    """A^j(pi) (x) A^k(dual pi) (x) chi for j, k <= 2."""
    if j > 2 or k > 2 or j < 0 or k < 0:
        raise LevelOutOfRange("a_tensor is defined for levels 0..2")
    out = []
    shift = -(k % 2)
    for m, e in slot_product(j, k):
        out.append((m, chi * slot_char ** (e + shift)))
    return out


# --- virtual representations ------------------------------------------------

@dataclass(frozen=True)
class VirtualRep:
    terms: tuple[tuple[Atom, int], ...] = ()

    @classmethod
    def of(cls, items: Iterable[tuple[Atom, int]] | Iterable[Atom], rel: RelationLattice | None = None) -> "VirtualRep":
        acc: dict[Atom, int] = {}
        for it in items:
            a, m = it if isinstance(it, tuple) else (it, 1)
            if m < 0:
                raise ValueError("multiplicities must be nonnegative")
            if rel is not None:
                a = rel.canonical_atom(a)
            acc[a] = acc.get(a, 0) + m
        return cls(tuple(sorted((a, m) for a, m in acc.items() if m)))

    @property
    def degree(self) -> int:
        return sum(m * a.degree for a, m in self.terms)

    def atoms(self) -> list[Atom]:
        return [a for a, _ in self.terms]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(str(a) if m == 1 else f"{m}*({a})" for a, m in self.terms)


def tensor_atoms(x: Atom, y: Atom, rel: RelationLattice | None = None) -> list[Atom]:
    """Decompose x (x) y slot by slot; raises on level overflow or opaque clash."""
    xo = [o for o, _ in x.opaque if o.rank > 1]
    yo = [o for o, _ in y.opaque if o.rank > 1]
    if xo and yo:
        raise OpaqueTensorUnsupported(f"no decomposition rule for {x} (x) {y}")
    lx, ly = x.levels, y.levels
    shared = sorted(set(lx) & set(ly))
    base: dict[str, int] = {s: j for s, j in lx.items() if s not in ly}
    base.update({s: j for s, j in ly.items() if s not in lx})
    opaque = x.opaque + y.opaque
    twist = x.twist * y.twist
    choices = []
    for s in shared:
        opts = []
        for m, e in slot_product(lx[s], ly[s]):
            if m > MAX_LEVEL:
                raise LevelOutOfRange(f"A^{lx[s]}({s}) (x) A^{ly[s]}({s}) needs level {m}")
            opts.append((s, m, e))
        choices.append(opts)
    out = []
    for combo in itertools.product(*choices):
        levels = dict(base)
        tw = twist
        for s, m, e in combo:
            if m:
                levels[s] = m
            tw = tw * CharacterExpr.gen(omega(s), e)
        a = Atom.make(levels, opaque, tw)
        out.append(rel.canonical_atom(a) if rel else a)
    return out


def tensor(a: VirtualRep, b: VirtualRep, rel: RelationLattice) -> VirtualRep:
    items = []
    for x, m in a.terms:
        for y, n in b.terms:
            for z in tensor_atoms(x, y, rel):
                items.append((z, m * n))
    return VirtualRep.of(items, rel)


def dual(a: VirtualRep, rel: RelationLattice) -> VirtualRep:
    return VirtualRep.of([(dual_atom(x), m) for x, m in a.terms], rel)


# --- equality ---------------------------------------------------------------

class Equality(enum.Enum):
    EQUAL = "Equal"
    DISTINCT = "Distinct"
    UNKNOWN = "Unknown"


def _same_base(a: Atom, b: Atom) -> bool:
    return a.gl2 == b.gl2 and a.opaque == b.opaque


def atoms_equal(a: Atom, b: Atom, rel: RelationLattice, case=None) -> Equality:
    """Tri-state comparison of two atoms as automorphic representations.

    ``case`` optionally supplies declared facts: ``distinct_pairs``,
    ``non_self_twists``, ``inequivalent(s, t)`` and ``tag(s)``.
    """
    if _same_base(a, b):
        ratio = rel.canonical(b.twist * a.twist.inverse())
        if ratio in rel.twist_group(a):
            return Equality.EQUAL
    if a.degree != b.degree:
        return Equality.DISTINCT
    ca, cb = central_character(a), central_character(b)
    if rel.provably_nontrivial(ca * cb.inverse()):
        return Equality.DISTINCT
    if case is not None and _declared_distinct(a, b, rel, case):
        return Equality.DISTINCT
    return Equality.UNKNOWN


def _declared_distinct(a: Atom, b: Atom, rel: RelationLattice, case) -> bool:
    for p, q in getattr(case, "distinct_pairs", ()):
        for pp, qq in ((p, q), (q, p), (dual_atom(p), dual_atom(q)), (dual_atom(q), dual_atom(p))):
            if _same_base(a, pp) and _same_base(b, qq):
                # P != Q implies P(x)xi != Q(x)xi for every xi
                shift_a = a.twist * pp.twist.inverse()
                shift_b = b.twist * qq.twist.inverse()
                if rel.equal(shift_a, shift_b):
                    return True
    # same base: a twist known not to fix the atom
    if _same_base(a, b):
        ratio = b.twist * a.twist.inverse()
        for base, xi in getattr(case, "non_self_twists", ()):
            if rel._applies(base, a) and (rel.equal(ratio, xi) or rel.equal(ratio, xi.inverse())):
                return True
    # one side has a self-twist the other is declared not to have
    for x, y in ((a, b), (b, a)):
        gx = rel.twist_group(x)
        for base, xi in getattr(case, "non_self_twists", ()):
            if rel._applies(base, y):
                if rel.canonical(xi) in gx or rel.canonical(xi.inverse()) in gx:
                    return True
    # single-slot comparisons across twist-inequivalent GL(2) slots
    if len(a.gl2) == 1 and len(b.gl2) == 1 and not a.opaque and not b.opaque:
        (s, j), (t, k) = a.gl2[0], b.gl2[0]
        if s != t and j == k and j in (1, 2):
            tags = (case.tag(s), case.tag(t))
            if case.inequivalent(s, t) and "dihedral" not in tags:
                return True
            if j == 1 and (tags[0] == "dihedral") != (tags[1] == "dihedral"):
                return True
    # a non-dihedral A^1 against a dihedral opaque piece
    for x, y in ((a, b), (b, a)):
        if len(x.gl2) == 1 and not x.opaque and x.gl2[0][1] == 1 and not y.gl2 and len(y.opaque) == 1:
            if y.opaque[0][0].dihedral and case.tag(x.gl2[0][0]) != "dihedral":
                return True
    return False
