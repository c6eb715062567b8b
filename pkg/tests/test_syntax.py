import pytest
from hypothesis import given
from hypothesis import strategies as st

from lszero.repring import Atom, CharacterExpr, Opaque
from lszero.syntax import SyntaxProblem, parse_atom, parse_character, parse_relation, split_factor

from conftest import gen

GL2 = ["pi", "pi2"]
OPAQUE = {"p0": Opaque("p0", 3)}


def atom(text):
    return parse_atom(text, GL2, OPAQUE)


@pytest.mark.parametrize("text,expected", [
    ("1", CharacterExpr()),
    ("", CharacterExpr()),
    ("chi", gen("chi")),
    ("~chi", gen("chi") ** -1),
    ("chi^2*~mu^3", gen("chi") ** 2 * gen("mu") ** -3),
    ("chi * chi", gen("chi") ** 2),
])
def test_characters(text, expected):
    assert parse_character(text) == expected


def test_relations():
    assert parse_relation("chi^2=1") == gen("chi") ** 2
    assert parse_relation("chi^2") == gen("chi") ** 2
    assert parse_relation("chi^2=mu") == gen("chi") ** 2 * gen("mu") ** -1


@pytest.mark.parametrize("text,expected", [
    ("pi", Atom.A(1, "pi")),
    ("A0(pi)", Atom.unit()),
    ("A4(pi) A1(pi2)@chi^2", Atom.make({"pi": 4, "pi2": 1}, (), gen("chi") ** 2)),
    ("~pi", Atom.A(1, "pi", gen("omega_pi") ** -1)),
    ("A3(~pi)", Atom.A(3, "pi", gen("omega_pi") ** -1)),
])
def test_atoms(text, expected):
    assert atom(text) == expected


@pytest.mark.parametrize("text", [
    "A4(pi) A1(pi2) @chi^2", "~pi", "pi pi2@~chi*mu", "p0 A2(pi)", "~p0", "1@chi", "A2(pi) A3(pi2)",
])
def test_format_parse_round_trip(text):
    a = atom(text)
    assert atom(str(a)) == a


@given(st.integers(0, 4), st.integers(0, 4), st.integers(-3, 3), st.integers(-3, 3), st.booleans())
def test_round_trip_property(j, k, r, s, with_opaque):
    a = Atom.make({"pi": j, "pi2": k}, (), gen("chi") ** r * gen("omega_pi") ** s)
    if with_opaque:
        a = a.merge(Atom.of_opaque(OPAQUE["p0"]))
    assert atom(str(a)) == a


@pytest.mark.parametrize("text", ["A2(pi9)", "sigma", "pi A2(pi)", "A2(pi)@chi^x", "A2(pi)@2chi"])
def test_atom_errors(text):
    with pytest.raises(SyntaxProblem):
        atom(text)


def test_split_factor():
    assert split_factor("A4(pi) x A1(pi2)") == ("A4(pi)", "A1(pi2)")
    assert split_factor("A4(pi)") == ("A4(pi)", None)
    with pytest.raises(SyntaxProblem):
        split_factor("pi x pi x pi")
