"""Search over coefficient vectors c[j,k,r] for certificates that eliminate a target.

Each candidate Pi = sum c[j,k,r] A^j(s) A^k(t) chi^r gives D = L(Pi x dual Pi),
which is bilinear in c.  Per concrete scenario, the target count, the dual
count and the pole bound of every ordered pair of keys are tabulated once, so
a candidate costs a few dozen integer operations.  Every certificate yielded
is re-checked by ``certify.check``.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass
from typing import Iterator

from .certify import Certificate, LemmaD, Verdict, check
from .lfactors import LEMMA_D_KEYS, _pieces, class_rep, dual_factor, make_factor
from .poles import CaseAssumptions, UnsupportedCase, pairing_interval
from .repring import Atom, dual_atom
from .syntax import parse_character

OBJECTIVES = ("min-degree", "min-total-exponent")


@dataclass(frozen=True)
class SearchBounds:
    max_coeff: int = 2
    max_nonzero: int = 4
    max_degree: int = 30
    objective: str = "min-degree"

    def __post_init__(self):
        if self.max_coeff < 1 or self.max_degree < 1:
            raise ValueError("coefficient and degree bounds must be positive")
        if self.max_nonzero < 0:
            raise ValueError("max_nonzero must be nonnegative")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {', '.join(OBJECTIVES)}")


@dataclass(frozen=True)
class Candidate:
    vector: tuple[int, ...]
    l1: int
    l2: int
    k: int
    degree: int
    total_exponent: int

    def coefficients(self) -> dict[tuple[int, int, int], int]:
        return {key: n for key, n in zip(LEMMA_D_KEYS, self.vector) if n}


@dataclass
class _PairTable:
    t1: dict
    t2: dict
    hi: dict
    pieces: dict


class Problem:
    """Target, case and twist of a Lemma-D style search."""

    def __init__(self, template: Certificate):
        if not isinstance(template.construction, LemmaD):
            raise ValueError("search needs a coefficient-vector template")
        if template.rewrite or template.divisors:
            raise ValueError("search does not support rewrite or divisor fields")
        self.template = template
        self.slots = template.construction.slots
        self.chi_text = template.construction.chi
        base = template.case()
        self.scenarios = base.scenarios()
        chi = parse_character(self.chi_text)
        trivial_chi = base.rel.is_trivial(chi)
        self.keys = [key for key in LEMMA_D_KEYS if not (trivial_chi and key[2])]
        self.tables = [self._tabulate(case, chi) for case in self.scenarios]

    def _atom(self, key, chi, case) -> Atom:
        j, k, r = key
        s, t = self.slots
        return Atom.make({s: j, t: k}, (), case.rel.canonical(chi ** r))

    def _tabulate(self, case: CaseAssumptions, chi) -> _PairTable:
        rel = case.rel
        target = class_rep(self.template.factor(self.template.target, case), rel)
        dual = class_rep(dual_factor(target, rel), rel)
        same = target == dual
        t1, t2, hi, npieces = {}, {}, {}, {}
        atoms = {key: self._atom(key, chi, case) for key in self.keys}
        for a in self.keys:
            for b in self.keys:
                x = atoms[a]
                y = rel.canonical_atom(dual_atom(atoms[b]))
                pieces = _pieces(x, y, rel)
                reps = [class_rep(p, rel) for p in pieces]
                t1[a, b] = reps.count(target)
                t2[a, b] = 0 if same else reps.count(dual)
                npieces[a, b] = len(pieces)
                try:
                    hi[a, b] = pairing_interval(pieces, make_factor(x, y, rel), case).hi
                except UnsupportedCase:
                    hi[a, b] = None
        return _PairTable(t1, t2, hi, npieces)

    @staticmethod
    def degree_of(key) -> int:
        return (key[0] + 1) * (key[1] + 1)

    def evaluate(self, coeffs: dict) -> Candidate | None:
        """Counts for one vector; None when some pairing has no pole rule."""
        l1 = l2 = None
        k = 0
        items = list(coeffs.items())
        total = 0
        for tab in self.tables:
            a1 = a2 = h = 0
            total = 0
            for a, m in items:
                for b, n in items:
                    w = m * n
                    hv = tab.hi[a, b]
                    if hv is None:
                        return None
                    a1 += w * tab.t1[a, b]
                    a2 += w * tab.t2[a, b]
                    h += w * hv
                    total += w * tab.pieces[a, b]
            l1 = a1 if l1 is None else min(l1, a1)
            l2 = a2 if l2 is None else min(l2, a2)
            k = max(k, h)
        vector = tuple(coeffs.get(key, 0) for key in LEMMA_D_KEYS)
        degree = sum(m * self.degree_of(a) for a, m in items)
        return Candidate(vector, l1, l2, k, degree, total)

    def generates(self, support) -> bool:
        """Whether every scenario has a pair in ``support`` producing the target or its dual."""
        for tab in self.tables:
            if not any(tab.t1[a, b] or tab.t2[a, b] for a in support for b in support):
                return False
        return True

    def certificate(self, cand: Candidate, name: str | None = None) -> Certificate:
        con = LemmaD(tuple(sorted(cand.coefficients().items())), self.chi_text, self.slots)
        label = name or "search_" + "".join(str(n) for n in cand.vector)
        return dataclasses.replace(self.template, name=label, construction=con,
                                   expected=(cand.l1, cand.l2, cand.k), family=None,
                                   title=f"found by search for {self.template.target}")


def _vectors(keys, bounds: SearchBounds, problem: Problem | None):
    """Coefficient dicts with at most max_nonzero entries; pruned when ``problem`` is given."""
    values = range(1, bounds.max_coeff + 1)
    for size in range(1, bounds.max_nonzero + 1):
        for support in itertools.combinations(keys, size):
            if problem is not None:
                if sum(Problem.degree_of(a) for a in support) > bounds.max_degree:
                    continue
                if not problem.generates(support):
                    continue
            for vals in itertools.product(values, repeat=size):
                yield dict(zip(support, vals))


def _eliminating(problem: Problem, bounds: SearchBounds, prune: bool) -> list[Candidate]:
    out = []
    for coeffs in _vectors(problem.keys, bounds, problem if prune else None):
        cand = problem.evaluate(coeffs)
        if cand is None or cand.degree > bounds.max_degree:
            continue
        if cand.l1 + cand.l2 > cand.k:
            out.append(cand)
    out.sort(key=lambda c: c.vector)
    return out


def candidates(template: Certificate, bounds: SearchBounds = SearchBounds(),
               prune: bool = True) -> list[Candidate]:
    """All eliminating vectors within bounds, in lexicographic order."""
    return _eliminating(Problem(template), bounds, prune)


def brute_force(template: Certificate, bounds: SearchBounds = SearchBounds()) -> list[Candidate]:
    return candidates(template, bounds, prune=False)


def enumerate(template: Certificate, bounds: SearchBounds = SearchBounds(),
              recheck: bool = True) -> Iterator[Certificate]:
    """Certificates within bounds whose check verdict is Eliminated."""
    problem = Problem(template)
    for cand in _eliminating(problem, bounds, prune=True):
        cert = problem.certificate(cand)
        if recheck:
            _recheck(cert, cand)
        yield cert


def minimal(template: Certificate, bounds: SearchBounds = SearchBounds()) -> Certificate | None:
    problem = Problem(template)
    found = _eliminating(problem, bounds, prune=True)
    if not found:
        return None
    if bounds.objective == "min-degree":
        best = min(found, key=lambda c: (c.degree, c.vector))
    else:
        best = min(found, key=lambda c: (c.total_exponent, c.vector))
    cert = problem.certificate(best)
    _recheck(cert, best)
    return cert


def _recheck(cert: Certificate, cand: Candidate) -> None:
    rep = check(cert)
    if rep.verdict is not Verdict.ELIMINATED or (rep.l1, rep.l2, rep.pole.hi) != (cand.l1, cand.l2, cand.k):
        raise AssertionError(f"search and check disagree on {cand.vector}: "
                             f"{rep.verdict.value} {rep.l1},{rep.l2},{rep.pole.hi} "
                             f"vs {cand.l1},{cand.l2},{cand.k}")
