"""The six acceptance criteria, one test each, each printing a PASS/FAIL line."""

import cmath
import dataclasses
import random
import time

import pytest

from lszero import search
from lszero.certify import SUITE, Verdict, check, load_fixture
from lszero.lfactors import dual_factor, expand_pairing, total_degree
from lszero.numeric import positivity_check
from lszero.repring import (
    Atom,
    CharacterExpr,
    RelationLattice,
    VirtualRep,
    central_character,
    cg_tensor,
    dual,
    tensor,
)


@pytest.fixture
def verdict_line(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        assert ok, detail
    return emit


EXPECTED = {
    "d1_d2": (8, 0, 7), "gl3xgl3_2": (12, 0, 10), "gl4xgl3": (8, 0, 7), "gl5xgl2": (8, 0, 7),
    "gl2xgl2xgl2": (2, 2, 3), "gl2xgl2xgl3": (2, 2, 3), "gl2xgl3xgl3": (4, 4, 7),
    "gl2xgl3xgl3_2": (6, 6, 10), "gl4xgl2": (6, 6, 11), "gl5xgl3": (7, 0, 6),
    "gl5xgl3_2": (8, 0, 6),
}


def test_criterion_1_fixture_suite(verdict_line):
    t = time.perf_counter()
    reports = {n: check(load_fixture(n)) for n in SUITE}
    elapsed = time.perf_counter() - t
    bad = [n for n, want in EXPECTED.items() if (reports[n].l1, reports[n].l2, reports[n].k) != want]
    for n in ("sym4", "self_twist"):
        r = reports[n]
        if (r.l1 + r.l2, r.k) != (4, 3):
            bad.append(n)
    bad += [n for n, r in reports.items() if r.verdict is not Verdict.ELIMINATED]
    ok = not bad and elapsed < 5
    verdict_line(1, "fixture suite", ok, f"{len(SUITE) - len(set(bad))}/13 exact, {elapsed:.2f}s (< 5s)")


def test_criterion_2_degrees(verdict_line):
    degrees = [check(load_fixture(n)).target_degree for n in SUITE if load_fixture(n).family]
    ok = degrees == [9, 12, 10, 8, 12, 18, 8, 15] and all(8 <= d <= 18 for d in degrees)
    verdict_line(2, "target degrees", ok, f"{degrees}, range [{min(degrees)},{max(degrees)}]")


def test_criterion_3_negative_control(verdict_line):
    control = check(load_fixture("d1_d2_tetrahedral"))
    regrouped = check(load_fixture("gl3xgl3_2"))
    ok = (control.verdict is Verdict.FAIL and control.l1 + control.l2 == 8 and control.k == 10
          and regrouped.verdict is Verdict.ELIMINATED and regrouped.l1 == 12 and regrouped.k == 10)
    verdict_line(3, "tetrahedral control", ok,
                 f"plain vector {control.verdict.value} ({control.l1 + control.l2} <= {control.k}), "
                 f"regrouped {regrouped.verdict.value} ({regrouped.l1 + regrouped.l2} > {regrouped.k})")


def test_criterion_4_numeric_oracle(verdict_line):
    t = time.perf_counter()
    failed, points = [], 0
    for n in SUITE:
        rep = positivity_check(load_fixture(n), primes=25, powers=3, tol=1e-9, seed=0)
        points += rep.points
        if not rep.ok:
            failed.append(n)
    elapsed = time.perf_counter() - t
    undetected = []
    for n in SUITE:
        cert = load_fixture(n)
        _, d = cert.build(cert.case().scenarios()[0])
        for i in range(len(d.factors)):
            for delta in (1, -1):
                if d.factors[i][1] + delta < 0:
                    continue
                rep = positivity_check(cert, primes=25, powers=3, perturb=(i, delta), stop_early=True)
                if rep.ok:
                    undetected.append(f"{n}[{i}]{delta:+d}")
    ok = not failed and not undetected and elapsed < 30
    verdict_line(4, "numeric oracle", ok,
                 f"{points} points, failures {failed or 'none'}, {elapsed:.2f}s (< 30s); "
                 f"undetected perturbations {undetected or 'none'}")


def test_criterion_5_search_recovery(verdict_line):
    t = time.perf_counter()
    notes, ok = [], True
    for n in ("gl5xgl2", "d1_d2"):
        cert = load_fixture(n)
        pruned = search.candidates(cert)
        brute = search.brute_force(cert)
        found = dict(cert.construction.c) in [c.coefficients() for c in pruned]
        ok &= found and pruned == brute
        notes.append(f"{n}: recovered={found}, pruned==brute={pruned == brute} ({len(pruned)})")
    elapsed = time.perf_counter() - t
    ok &= elapsed < 60
    verdict_line(5, "search recovery", ok, "; ".join(notes) + f"; {elapsed:.2f}s (< 60s)")


CHI = CharacterExpr.gen("chi")
W = CharacterExpr.gen("omega_pi")
REL = RelationLattice.for_slots(["pi", "pi2"], ["chi"], relations=[CHI ** 2])


def _random_rep(rng, max_level=2):
    items = []
    for _ in range(rng.randint(1, 3)):
        levels = {"pi": rng.randint(0, max_level), "pi2": rng.randint(0, max_level)}
        tw = REL.canonical(CHI ** rng.randint(0, 1) * W ** rng.randint(-1, 1))
        items.append((Atom.make(levels, (), tw), rng.randint(1, 2)))
    return VirtualRep.of(items, REL)


def _level(v, slot):
    return max((a.levels.get(slot, 0) for a in v.atoms()), default=0)


def test_criterion_6_property_suites(verdict_line):
    fails = []
    if any(sum(m + 1 for m, _ in cg_tensor(j, k)) != (j + 1) * (k + 1) for j in range(9) for k in range(9)):
        fails.append("cg dimension")
    rng = random.Random(6)
    worst = 0.0
    for _ in range(200):
        a, b = (cmath.exp(2j * cmath.pi * rng.random()) for _ in range(2))
        j, k = rng.randrange(9), rng.randrange(9)
        tr = lambda m: sum(a ** (m - i) * b ** i for i in range(m + 1))
        worst = max(worst, abs(tr(j) * tr(k) - sum((a * b) ** r * tr(m) for m, r in cg_tensor(j, k))))
    if worst >= 1e-12:
        fails.append(f"cg trace {worst:.2g}")
    for _ in range(100):
        x, y, z = _random_rep(rng), _random_rep(rng), _random_rep(rng)
        xy = tensor(x, y, REL)
        if xy != tensor(y, x, REL) or xy.degree != x.degree * y.degree:
            fails.append("commutativity/degree")
        while any(_level(x, s) + _level(y, s) + _level(z, s) > 4 for s in ("pi", "pi2")):
            z = _random_rep(rng, max_level=0)
        if tensor(xy, z, REL) != tensor(x, tensor(y, z, REL), REL):
            fails.append("associativity")
        if dual(dual(x, REL), REL) != x or dual(xy, REL) != tensor(dual(x, REL), dual(y, REL), REL):
            fails.append("dual")
        d = expand_pairing(x, REL)
        if total_degree(d) != x.degree ** 2 or any(d.exponent(dual_factor(f, REL), REL) != e
                                                   for f, e in d.factors):
            fails.append("pairing")
    if not (central_character(Atom.A(2, "pi")).is_identity
            and central_character(Atom.A(4, "pi")).is_identity
            and central_character(Atom.A(3, "pi")) == W ** 2
            and central_character(Atom.A(4, "pi2", CHI)) == CHI ** 5):
        fails.append("central characters")
    fails = sorted(set(fails))
    verdict_line(6, "property suites", not fails,
                 f"cg 81 pairs, trace max err {worst:.1e}, 100 random reps; failures {fails or 'none'}")
