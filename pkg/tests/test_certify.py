import json
import os
import random
from pathlib import Path

import pytest

from lszero.certify import (
    CONTROLS,
    SUITE,
    Certificate,
    Isobaric,
    LemmaD,
    MalformedCertificate,
    Verdict,
    check,
    explain,
    load_fixture,
)
import dataclasses

GOLDEN = Path(__file__).parent / "golden"

# (l1, l2, k, target degree) stated for each fixture
STATED = {
    "d1_d2": (8, 0, 7, 9),
    "gl3xgl3_2": (12, 0, 10, 9),
    "gl4xgl3": (8, 0, 7, 12),
    "gl5xgl2": (8, 0, 7, 10),
    "gl2xgl2xgl2": (2, 2, 3, 8),
    "gl2xgl2xgl3": (2, 2, 3, 12),
    "gl2xgl3xgl3": (4, 4, 7, 18),
    "gl2xgl3xgl3_2": (6, 6, 10, 18),
    "gl4xgl2": (6, 6, 11, 8),
    "gl5xgl3": (7, 0, 6, 15),
    "gl5xgl3_2": (8, 0, 6, 15),
    "sym4": (4, 0, 3, 5),
    "self_twist": (2, 2, 3, 6),
}


@pytest.fixture(scope="module")
def reports():
    return {n: check(load_fixture(n)) for n in SUITE + CONTROLS}


@pytest.mark.parametrize("name", SUITE)
def test_fixture_values(reports, name):
    r = reports[name]
    l1, l2, k, deg = STATED[name]
    assert r.verdict is Verdict.ELIMINATED
    assert (r.l1, r.l2, r.k) == (l1, l2, k)
    assert r.target_degree == deg
    assert not r.mismatches


def test_tetrahedral_control_fails(reports):
    r = reports["d1_d2_tetrahedral"]
    assert r.verdict is Verdict.FAIL
    assert (r.l1, r.l2, r.k) == (8, 0, 10)


@pytest.mark.parametrize("name", SUITE + CONTROLS)
def test_json_round_trip(name):
    cert = load_fixture(name)
    again = Certificate.from_json(cert.to_json())
    assert again == cert
    assert check(again).to_dict() == check(cert).to_dict()


@pytest.mark.parametrize("name", SUITE + CONTROLS)
def test_golden_report(reports, name):
    path = GOLDEN / f"{name}.json"
    got = reports[name].to_dict()
    if os.environ.get("LSZERO_REGEN_GOLDEN"):
        path.write_text(json.dumps(got, indent=2) + "\n")
    assert got == json.loads(path.read_text())


def test_explain_rows(reports):
    r = reports["gl3xgl3_2"]
    rows = {row.symbol: row for row in r.rows}
    assert rows["L(A2(pi) x A2(pi2) @chi)"].exponent == 12
    assert rows["L(1)"].exponent == 6 and rows["L(1)"].interval == "[1,1]"
    lines = explain(r).splitlines()
    assert len(lines) == len(r.rows)
    assert sum(row.exponent * row.degree for row in r.rows) == r.degree == 18 ** 2


def test_explain_line_count(reports):
    assert len(explain(reports["gl5xgl2"]).splitlines()) == 15


def test_zero_vector_is_malformed():
    cert = load_fixture("gl5xgl2")
    zero = dataclasses.replace(cert, construction=LemmaD(
        tuple((k, 0) for k, _ in cert.construction.c), cert.construction.chi, cert.construction.slots))
    with pytest.raises(MalformedCertificate):
        check(zero)


def test_empty_isobaric_is_malformed():
    cert = load_fixture("self_twist")
    with pytest.raises(MalformedCertificate):
        check(dataclasses.replace(cert, construction=dataclasses.replace(cert.construction, terms=())))


@pytest.mark.parametrize("text", [
    "", "[]", "{}", '{"schema": "other"}',
])
def test_malformed_json(text):
    with pytest.raises(MalformedCertificate):
        Certificate.from_json(text)


def test_unknown_field_rejected():
    d = load_fixture("gl5xgl2").to_dict()
    d["surprise"] = 1
    with pytest.raises(MalformedCertificate):
        Certificate.from_dict(d)


def test_bad_target_is_malformed():
    cert = dataclasses.replace(load_fixture("gl5xgl2"), target="A4(nosuch) x pi2")
    with pytest.raises(MalformedCertificate):
        check(cert)


@pytest.mark.parametrize("name", SUITE)
def test_soundness_gate(reports, name):
    r = reports[name]
    assert r.verdict is not Verdict.ELIMINATED or r.l1 + r.l2 > r.pole.hi


@pytest.mark.parametrize("name", ["self_twist", "gl2xgl2xgl2", "gl2xgl3xgl3"])
def test_term_order_does_not_matter(reports, name):
    cert = load_fixture(name)
    rng = random.Random(7)
    con = cert.construction
    for _ in range(3):
        if isinstance(con, Isobaric):
            terms = list(con.terms)
            rng.shuffle(terms)
            shuffled = dataclasses.replace(cert, construction=dataclasses.replace(con, terms=tuple(terms)))
        else:
            c = list(con.c)
            rng.shuffle(c)
            shuffled = dataclasses.replace(cert, construction=dataclasses.replace(con, c=tuple(c)))
        r = check(shuffled)
        assert (r.l1, r.l2, r.k, r.verdict) == (reports[name].l1, reports[name].l2,
                                                 reports[name].k, reports[name].verdict)


@pytest.mark.parametrize("name", ["gl4xgl2", "gl2xgl2xgl2", "self_twist"])
def test_dual_target_swaps_counts(reports, name):
    cert = load_fixture(name)
    case = cert.case()
    from lszero.lfactors import dual_factor
    dual = dual_factor(cert.factor(cert.target, case), case.rel)
    text = str(dual)[2:-1]
    r = check(dataclasses.replace(cert, target=text, expected=None))
    assert (r.l1, r.l2, r.k) == (reports[name].l2, reports[name].l1, reports[name].k)


def test_empty_report_has_empty_explain():
    from lszero.certify import Report
    assert explain(Report("empty", Verdict.FAIL)) == ""


@pytest.mark.parametrize("name", SUITE)
def test_written_out_factor_list_matches_expansion(name):
    cert = load_fixture(name).with_factor_list()
    assert Certificate.from_json(cert.to_json()) == cert
    assert check(cert).mismatches == ()
