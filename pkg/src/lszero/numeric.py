"""Numeric oracle: Satake parameters, atom coefficients and the |trace|^2 identity.

Dirichlet coefficients of D = L(Pi x dual Pi) at unramified p^l are computed
two ways: from the symbolic factor multiset (a product of atom power sums per
factor) and directly as |sum of m * trace(Pi_p^l)|^2.  Any disagreement points
at a bug in the symbolic expansion.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

from .certify import Certificate
from .lattice import smith_with_transform
from .lfactors import FactorMultiset, FactorSymbol
from .poles import CaseAssumptions
from .repring import Atom, CharacterExpr, omega

FORMS = {"delta": 12, "e4delta": 16}
MAX_PRIME_BOUND = 500
DEFAULT_MAP = ("delta", "e4delta")


class NumericError(Exception):
    pass


class UnknownForm(NumericError):
    pass


class UnassignedSlot(NumericError):
    pass


class AssignmentConflict(NumericError):
    pass


# --- q-expansions -----------------------------------------------------------

def _sigma(n: int, k: int) -> int:
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def delta_coefficients(n: int) -> tuple[int, ...]:
    """tau(0..n) from prod (1-q^m)^24 via the logarithmic-derivative recurrence."""
    # b = prod (1-q^m)^24 satisfies  k b_k = -24 sum_{i=1..k} sigma_1(i) b_{k-i}
    b = [1] + [0] * n
    sig = [0] + [_sigma(i, 1) for i in range(1, n + 1)]
    for k in range(1, n + 1):
        acc = sum(sig[i] * b[k - i] for i in range(1, k + 1))
        b[k] = -24 * acc // k
    return tuple([0] + b[:n])


@lru_cache(maxsize=None)
def eisenstein4_coefficients(n: int) -> tuple[int, ...]:
    return tuple([1] + [240 * _sigma(i, 3) for i in range(1, n + 1)])


@lru_cache(maxsize=None)
def e4delta_coefficients(n: int) -> tuple[int, ...]:
    e, d = eisenstein4_coefficients(n), delta_coefficients(n)
    return tuple(sum(e[i] * d[k - i] for i in range(k + 1)) for k in range(n + 1))


def form_coefficients(form: str, n: int) -> tuple[int, ...]:
    if form == "delta":
        return delta_coefficients(n)
    if form == "e4delta":
        return e4delta_coefficients(n)
    raise UnknownForm(f"unknown form {form!r}; known: {', '.join(FORMS)}")


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(n ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i, v in enumerate(sieve) if v]


def first_primes(count: int) -> list[int]:
    bound = 2
    while len(primes_up_to(bound)) < count:
        bound *= 2
    return primes_up_to(bound)[:count]


@dataclass(frozen=True)
class EigenvalueTable:
    form: str
    weight: int
    eigenvalues: tuple[tuple[int, float], ...]
    raw: tuple[tuple[int, int], ...]

    def __getitem__(self, p: int) -> float:
        return dict(self.eigenvalues)[p]


def hecke_fixture(form: str, prime_bound: int) -> EigenvalueTable:
    if form not in FORMS:
        raise UnknownForm(f"unknown form {form!r}; known: {', '.join(FORMS)}")
    if prime_bound > MAX_PRIME_BOUND:
        raise ValueError(f"prime bound {prime_bound} exceeds {MAX_PRIME_BOUND}")
    k = FORMS[form]
    coeffs = form_coefficients(form, max(prime_bound, 1))
    raw, lam = [], []
    for p in primes_up_to(prime_bound):
        a = coeffs[p]
        x = a / p ** ((k - 1) / 2)
        if abs(x) > 2 + 1e-12:
            raise NumericError(f"{form}: |lambda_{p}| = {abs(x)} exceeds 2")
        raw.append((p, a))
        lam.append((p, x))
    return EigenvalueTable(form, k, tuple(lam), tuple(raw))


def check_multiplicativity(form: str, bound: int) -> list[tuple[int, int]]:
    """Pairs of primes p != q with p*q <= bound where a(p)a(q) != a(pq)."""
    c = form_coefficients(form, bound)
    ps = primes_up_to(bound)
    bad = []
    for i, p in enumerate(ps):
        for q in ps[i + 1:]:
            if p * q > bound:
                break
            if c[p] * c[q] != c[p * q]:
                bad.append((p, q))
    return bad


# --- Satake data ------------------------------------------------------------

@dataclass(frozen=True)
class SatakePair:
    alpha: complex
    beta: complex

    @classmethod
    def from_eigenvalue(cls, lam: float, w: complex = 1) -> "SatakePair":
        disc = cmath.sqrt(lam * lam - 4 * w)
        return cls((lam + disc) / 2, (lam - disc) / 2)

    @property
    def trace(self) -> complex:
        return self.alpha + self.beta

    @property
    def det(self) -> complex:
        return self.alpha * self.beta

    @property
    def params(self) -> tuple[complex, ...]:
        return (self.alpha, self.beta)


def character_value(c: CharacterExpr, values: Mapping[str, complex]) -> complex:
    out = 1 + 0j
    for g, e in c.exponents:
        if g not in values:
            raise UnassignedSlot(f"no value for character {g}")
        out *= values[g] ** e
    return out


def sym_power_params(pair: SatakePair, j: int) -> list[complex]:
    """Satake parameters of A^j: alpha^(j-i) beta^i omega^(-floor(j/2))."""
    w = pair.det ** (-(j // 2))
    return [pair.alpha ** (j - i) * pair.beta ** i * w for i in range(j + 1)]


def atom_coeff(a: Atom, p: int, ell: int, assignment: Mapping[str, object],
               char_values: Mapping[str, complex]) -> complex:
    """Power sum of l-th powers of the Satake parameters of ``a`` at p.

    ``assignment`` maps GL(2) slots to SatakePair and opaque slots to tuples
    of parameters; ``char_values`` maps character generators to their value
    at p.  ``p`` is carried for error messages only.
    """
    out = character_value(a.twist, char_values) ** ell
    for s, j in a.gl2:
        pair = assignment.get(s)
        if not isinstance(pair, SatakePair):
            raise UnassignedSlot(f"slot {s} has no Satake pair at p={p}")
        out *= sum(x ** ell for x in sym_power_params(pair, j))
    for o, conj in a.opaque:
        params = assignment.get(o.name)
        if params is None:
            raise UnassignedSlot(f"opaque slot {o.name} has no parameters at p={p}")
        if isinstance(params, SatakePair):
            params = params.params
        out *= sum((1 / x if conj else x) ** ell for x in params)
    return out


def factor_coeff(f: FactorSymbol, p: int, ell: int, assignment, char_values) -> complex:
    return (atom_coeff(f.left, p, ell, assignment, char_values)
            * atom_coeff(f.right, p, ell, assignment, char_values))


# --- sampling ---------------------------------------------------------------

def sample_characters(generators: tuple[str, ...], relations: list[CharacterExpr],
                      rng: random.Random) -> dict[str, complex]:
    """Unit values for the generators satisfying every relation exactly."""
    n = len(generators)
    index = {g: i for i, g in enumerate(generators)}
    rows = []
    for r in relations:
        v = [0] * n
        for g, e in r.exponents:
            v[index[g]] += e
        rows.append(v)
    diag, V = smith_with_transform(rows, n)
    phi = []
    for i in range(n):
        if i < len(diag):
            phi.append(rng.randrange(diag[i]) / diag[i])
        else:
            phi.append(rng.random())
    out = {}
    for g, i in index.items():
        theta = sum(V[i][k] * phi[k] for k in range(n)) % 1.0
        out[g] = cmath.exp(2j * math.pi * theta)
    return out


def _root_order(z: complex, cap: int = 64) -> int:
    for m in range(1, cap + 1):
        if abs(z ** m - 1) < 1e-9:
            return m
    raise AssignmentConflict(f"self-twist value {z} is not a root of unity of order <= {cap}")


def sample_params(rank: int, det: complex, zeta: complex, rng: random.Random) -> tuple[complex, ...]:
    """Unit parameters with product ``det`` stable under multiplication by ``zeta``."""
    m = _root_order(zeta)
    if rank % m:
        raise AssignmentConflict(f"self-twist of order {m} on a rank {rank} slot")
    orbits = rank // m
    bases = [cmath.exp(2j * math.pi * rng.random()) for _ in range(orbits - 1)]
    rest = det
    for b in bases:
        rest /= b ** m * zeta ** (m * (m - 1) // 2)
    rest /= zeta ** (m * (m - 1) // 2)
    last = cmath.exp(1j * cmath.phase(rest) / m)
    bases.append(last)
    return tuple(b * zeta ** k for b in bases for k in range(m))


# --- assignment -------------------------------------------------------------

@dataclass
class Assignment:
    forms: dict[str, str]
    tables: dict[str, EigenvalueTable]
    notes: list[str] = field(default_factory=list)


def _slot_twist(b: Atom) -> str | None:
    if b.twist.is_identity and b.ncomponents == 1:
        if b.gl2 and b.gl2[0][1] == 1:
            return b.gl2[0][0]
        if b.opaque:
            return b.opaque[0][0].name
    return None


def plan_assignment(cert: Certificate, case: CaseAssumptions, bound: int) -> Assignment:
    """Map GL(2) slots to fixture forms or to random Satake data."""
    overrides = dict(cert.numeric)
    for s, f in overrides.items():
        if f != "random" and f not in FORMS:
            raise UnknownForm(f"unknown form {f!r} for slot {s}")
    twisted = {_slot_twist(b) for b, _ in case.rel.self_twists} - {None}
    gl2 = [s.name for s in cert.slots if s.kind == "gl2"]
    forms: dict[str, str] = {}
    notes = []
    defaults = list(DEFAULT_MAP)
    for s in gl2:
        explicit = s in overrides
        form = overrides.get(s) or (defaults.pop(0) if defaults else "random")
        if form != "random":
            problem = _fixture_problem(s, case, twisted)
            if problem:
                if explicit:
                    raise AssignmentConflict(f"slot {s} cannot be the fixture {form}: {problem}")
                notes.append(f"{s}: random Satake data ({problem})")
                form = "random"
        forms[s] = form
    for i, s in enumerate(gl2):
        for t in gl2[i + 1:]:
            if forms[s] != "random" and forms[s] == forms[t] and case.inequivalent(s, t):
                raise AssignmentConflict(f"slots {s} and {t} are inequivalent but share {forms[s]}")
    tables = {f: hecke_fixture(f, bound) for f in set(forms.values()) if f != "random"}
    return Assignment(forms, tables, notes)


def _fixture_problem(s: str, case: CaseAssumptions, twisted: set[str]) -> str | None:
    if case.tags.get(s) == "dihedral":
        return "fixture forms are not dihedral"
    if s in twisted:
        return "fixture forms have no self-twist"
    probe = case.rel.extend(relations=[CharacterExpr.gen(omega(s))])
    for c in case.rel.nontrivial:
        if probe.is_trivial(c):
            return f"declared nontrivial {c} needs a nontrivial central character"
    return None


@dataclass(frozen=True)
class LocalData:
    slots: dict
    chars: dict


def local_data(case: CaseAssumptions, plan: Assignment, p: int, rng: random.Random) -> LocalData:
    rel = case.rel
    pinned = [CharacterExpr.gen(omega(s)) for s, f in plan.forms.items() if f != "random"]
    slot_twists: dict[str, list[CharacterExpr]] = {}
    for b, xi in rel.self_twists:
        s = _slot_twist(b)
        if s is None:
            pinned.append(xi)
        else:
            slot_twists.setdefault(s, []).append(xi)
    chars = sample_characters(rel.generators, list(rel.relations) + pinned, rng)
    slots: dict = {}
    for s, f in plan.forms.items():
        if f != "random":
            slots[s] = SatakePair.from_eigenvalue(plan.tables[f][p])
            continue
        slots[s] = _twisted_pair(s, 2, chars, slot_twists, rng)
    for name, o in case.opaque.items():
        slots[name] = _twisted_pair(name, o.rank, chars, slot_twists, rng, pair=False)
    return LocalData(slots, chars)


def _twisted_pair(s, rank, chars, slot_twists, rng, pair=True):
    xis = slot_twists.get(s, [])
    if len(xis) > 1:
        raise AssignmentConflict(f"slot {s} has several self-twists; sampling supports one")
    zeta = character_value(xis[0], chars) if xis else 1 + 0j
    params = sample_params(rank, chars[omega(s)], zeta, rng)
    return SatakePair(*params) if pair else params


# --- the check --------------------------------------------------------------

@dataclass
class Failure:
    scenario: str
    p: int
    ell: int
    symbolic: complex
    direct: complex
    reason: str

    def __str__(self) -> str:
        return (f"p={self.p} l={self.ell} [{self.scenario}]: {self.reason}; "
                f"symbolic {self.symbolic:.12g}, direct {self.direct:.12g}")


@dataclass
class NumericReport:
    name: str
    primes: int
    powers: int
    tol: float
    seed: int
    points: int = 0
    max_diff: float = 0.0
    min_real: float = math.inf
    failures: list[Failure] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    forms: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "schema": "lszero-numeric/1",
            "name": self.name,
            "ok": self.ok,
            "primes": self.primes,
            "powers": self.powers,
            "tol": self.tol,
            "seed": self.seed,
            "points": self.points,
            "max_diff": self.max_diff,
            "min_real": None if self.points == 0 else self.min_real,
            "forms": self.forms,
            "notes": self.notes,
            "failures": [{"scenario": f.scenario, "p": f.p, "l": f.ell, "reason": f.reason,
                          "symbolic": [f.symbolic.real, f.symbolic.imag],
                          "direct": [f.direct.real, f.direct.imag]} for f in self.failures],
        }


def _scenario_name(case: CaseAssumptions) -> str:
    return ",".join(f"{s}={t}" for s, t in sorted(case.tags.items())) or "-"


def compare(pi, d: FactorMultiset, data: LocalData, p: int, ell: int) -> tuple[complex, complex]:
    """(symbolic, direct) values of a_D(p^l)."""
    trace = sum(m * atom_coeff(a, p, ell, data.slots, data.chars) for a, m in pi.terms)
    direct = trace * trace.conjugate()
    symbolic = sum(e * factor_coeff(f, p, ell, data.slots, data.chars) for f, e in d.factors)
    return symbolic, direct


def positivity_check(cert: Certificate, primes: int = 25, powers: int = 3, tol: float = 1e-9,
                     seed: int = 0, perturb: tuple[int, int] | None = None,
                     stop_early: bool = False) -> NumericReport:
    """Dual-path check of a_D(p^l) over every concrete scenario of the case.

    ``perturb=(i, delta)`` adds ``delta`` to the exponent of the i-th factor
    of the multiset before comparing; used to show the check has teeth.
    """
    rep = NumericReport(cert.name, primes, powers, tol, seed)
    if primes <= 0:
        rep.notes.append("no primes requested; nothing tested")
        return rep
    ps = first_primes(primes)
    if ps[-1] > MAX_PRIME_BOUND:
        raise ValueError(f"at most {len(primes_up_to(MAX_PRIME_BOUND))} primes are available")
    for sc_index, case in enumerate(cert.case().scenarios()):
        plan = plan_assignment(cert, case, ps[-1])
        rep.forms = dict(plan.forms)
        for n in plan.notes:
            if n not in rep.notes:
                rep.notes.append(n)
        pi, d = cert.build(case)
        declared = cert.declared(case)
        if declared is not None:
            d = declared
        if perturb is not None:
            d = _perturbed(d, *perturb)
        name = _scenario_name(case)
        for p in ps:
            rng = random.Random(seed * 1_000_003 + p * 101 + sc_index)
            data = local_data(case, plan, p, rng)
            _check_satake(data, p, name, rep)
            for ell in range(1, powers + 1):
                sym, direct = compare(pi, d, data, p, ell)
                rep.points += 1
                diff = abs(sym - direct)
                rep.max_diff = max(rep.max_diff, diff)
                rep.min_real = min(rep.min_real, sym.real)
                scale = max(1.0, abs(direct))
                if diff > tol * scale:
                    rep.failures.append(Failure(name, p, ell, sym, direct, "dual paths disagree"))
                elif sym.real < -tol * scale or abs(sym.imag) > tol * scale:
                    rep.failures.append(Failure(name, p, ell, sym, direct, "not real-nonnegative"))
                if rep.failures and stop_early:
                    return rep
    return rep


def _check_satake(data: LocalData, p: int, scenario: str, rep: NumericReport) -> None:
    for s, v in data.slots.items():
        params = v.params if isinstance(v, SatakePair) else v
        if any(abs(abs(x) - 1) > 1e-9 for x in params):
            rep.failures.append(Failure(scenario, p, 0, 0j, 0j, f"non-unitary Satake data for {s}"))


def _perturbed(d: FactorMultiset, index: int, delta: int) -> FactorMultiset:
    items = list(d.factors)
    f, e = items[index]
    items[index] = (f, e + delta)
    return FactorMultiset(tuple(items), d.pairings)
