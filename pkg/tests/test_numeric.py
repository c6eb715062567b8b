import cmath
import dataclasses
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lszero import numeric
from lszero.certify import SUITE, load_fixture
from lszero.numeric import (
    AssignmentConflict,
    SatakePair,
    UnknownForm,
    atom_coeff,
    delta_coefficients,
    e4delta_coefficients,
    first_primes,
    hecke_fixture,
    local_data,
    plan_assignment,
    positivity_check,
    sample_characters,
    sample_params,
    sym_power_params,
)
from lszero.repring import Atom

from conftest import gen

N = 60


def _mul(a, b, n):
    out = [0] * n
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def naive_delta(n):
    """q * prod (1 - q^m)^24 by direct polynomial multiplication."""
    series = [1] + [0] * (n - 1)
    for m in range(1, n):
        factor = [0] * n
        factor[0], factor[m] = 1, -1
        for _ in range(24):
            series = _mul(series, factor, n)
    return [0] + series[: n - 1]


def naive_e4(n):
    return [1] + [240 * sum(d ** 3 for d in range(1, m + 1) if m % d == 0) for m in range(1, n)]


def test_delta_matches_product_expansion():
    assert list(delta_coefficients(N)[:N]) == naive_delta(N)


def test_e4delta_matches_product_expansion():
    assert list(e4delta_coefficients(N)[:N]) == _mul(naive_e4(N), naive_delta(N), N)


def test_known_tau_values():
    tau = delta_coefficients(8)
    assert tau[1:8] == (1, -24, 252, -1472, 4830, -6048, -16744)
    assert e4delta_coefficients(7)[1:7] == (1, 216, -3348, 13888, 52110, -723168)


def test_ramanujan_congruence():
    tau = delta_coefficients(200)
    for n in range(1, 200):
        sigma11 = sum(d ** 11 for d in range(1, n + 1) if n % d == 0)
        assert (tau[n] - sigma11) % 691 == 0


@pytest.mark.parametrize("form", ["delta", "e4delta"])
def test_hecke_multiplicativity(form):
    assert numeric.check_multiplicativity(form, 300) == []


@pytest.mark.parametrize("form", ["delta", "e4delta"])
def test_normalized_eigenvalues_within_ramanujan_bound(form):
    table = hecke_fixture(form, 500)
    assert all(abs(table[p]) <= 2 for p in first_primes(95))


def test_lambda_two():
    assert hecke_fixture("delta", 10)[2] == pytest.approx(-24 / 2 ** 5.5, abs=1e-12)
    assert hecke_fixture("delta", 10)[2] == pytest.approx(-0.53033, abs=1e-5)


def test_symmetric_square_at_two():
    pair = SatakePair.from_eigenvalue(hecke_fixture("delta", 10)[2])
    val = atom_coeff(Atom.A(2, "pi"), 2, 1, {"pi": pair}, {})
    assert val.real == pytest.approx((-24) ** 2 / 2 ** 11 - 1, abs=1e-12)
    assert val.real == pytest.approx(-0.71875, abs=1e-12)
    assert atom_coeff(Atom.unit(), 2, 1, {}, {}) == 1


@settings(max_examples=100, deadline=None)
@given(st.floats(-2, 2), st.integers(0, 6), st.integers(1, 4))
def test_power_sums_follow_newton_recursion(lam, j, ell):
    pair = SatakePair.from_eigenvalue(lam)
    params = sym_power_params(pair, j)
    direct = sum(x ** ell for x in params)
    # power sums of alpha^(j-i) beta^i are complete homogeneous sums in alpha^l, beta^l
    a, b = pair.alpha ** ell, pair.beta ** ell
    h = sum(a ** (j - i) * b ** i for i in range(j + 1))
    assert abs(direct - h) < 1e-9


@settings(max_examples=100, deadline=None)
@given(st.floats(-2, 2))
def test_satake_round_trip(lam):
    pair = SatakePair.from_eigenvalue(lam)
    assert abs(pair.trace - lam) < 1e-12
    assert abs(pair.det - 1) < 1e-12
    assert all(abs(abs(x) - 1) < 1e-12 for x in pair.params)


@pytest.mark.parametrize("name", SUITE)
def test_fixture_dual_paths_agree(name):
    rep = positivity_check(load_fixture(name), primes=25, powers=3, tol=1e-9)
    assert rep.ok, [str(f) for f in rep.failures[:3]]
    assert rep.points >= 75
    assert rep.max_diff < 1e-9 * 1e4


@pytest.mark.parametrize("name", ["gl5xgl2", "self_twist", "gl2xgl2xgl2"])
def test_perturbed_exponent_is_caught(name):
    rep = positivity_check(load_fixture(name), primes=10, powers=2, perturb=(1, 1), stop_early=True)
    assert not rep.ok


def test_trivial_construction_has_unit_coefficients():
    cert = load_fixture("gl5xgl2")
    con = cert.construction
    trivial = dataclasses.replace(cert, construction=dataclasses.replace(con, c=(((0, 0, 0), 1),)))
    case = trivial.case()
    plan = plan_assignment(trivial, case, 100)
    pi, d = trivial.build(case)
    for p in first_primes(10):
        data = local_data(case, plan, p, random.Random(p))
        sym, direct = numeric.compare(pi, d, data, p, 1)
        assert abs(sym - 1) < 1e-12 and abs(direct - 1) < 1e-12


def test_self_twist_parameters_are_stable():
    cert = load_fixture("self_twist")
    case = cert.case()
    plan = plan_assignment(cert, case, 200)
    seen_minus = 0
    for p in first_primes(40):
        data = local_data(case, plan, p, random.Random(p))
        psi = data.chars["psi"]
        assert abs(psi ** 2 - 1) < 1e-9
        params = sorted(data.slots["pi"], key=cmath.phase)
        twisted = sorted((psi * x for x in params), key=cmath.phase)
        assert all(abs(x - y) < 1e-9 for x, y in zip(params, twisted))
        seen_minus += abs(psi + 1) < 1e-9
    assert seen_minus > 0


def test_sampled_characters_satisfy_relations():
    rng = random.Random(1)
    rels = [gen("chi") ** 3, gen("chi") * gen("mu") ** -2]
    for _ in range(20):
        v = sample_characters(("chi", "mu"), rels, rng)
        assert abs(v["chi"] ** 3 - 1) < 1e-9
        assert abs(v["chi"] / v["mu"] ** 2 - 1) < 1e-9


def test_sample_params_has_requested_determinant():
    rng = random.Random(3)
    det = cmath.exp(0.7j)
    params = sample_params(4, det, -1, rng)
    assert abs(math.prod(params) - det) < 1e-9
    assert sorted(cmath.phase(-x) for x in params) == pytest.approx(sorted(cmath.phase(x) for x in params))
    with pytest.raises(AssignmentConflict):
        sample_params(3, 1, -1, rng)


def test_unknown_form_rejected():
    cert = dataclasses.replace(load_fixture("gl5xgl2"), numeric=(("pi", "sigma"),))
    with pytest.raises(UnknownForm):
        positivity_check(cert, primes=3)


def test_inequivalent_slots_cannot_share_a_form():
    cert = dataclasses.replace(load_fixture("gl5xgl2"), numeric=(("pi", "delta"), ("pi2", "delta")))
    with pytest.raises(AssignmentConflict):
        positivity_check(cert, primes=3)


def test_fixture_form_on_dihedral_slot_conflicts():
    cert = load_fixture("gl4xgl2")
    dihedral = [s.name for s in cert.slots if s.tag == "dihedral"][0]
    bad = dataclasses.replace(cert, numeric=((dihedral, "delta"),))
    with pytest.raises(AssignmentConflict):
        positivity_check(bad, primes=3)


def test_zero_primes_is_a_no_op():
    rep = positivity_check(load_fixture("gl5xgl2"), primes=0)
    assert rep.ok and rep.points == 0 and rep.notes


def test_too_many_primes():
    with pytest.raises(ValueError):
        positivity_check(load_fixture("gl5xgl2"), primes=1000)


def test_report_schema():
    d = positivity_check(load_fixture("sym4"), primes=3, powers=1).to_dict()
    assert d["schema"] == "lszero-numeric/1" and d["ok"] and d["points"] == 3
