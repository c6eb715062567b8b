import pytest

from lszero.certify import SUITE, load_fixture
from lszero.repring import CharacterExpr, RelationLattice


def gen(name, power=1):
    return CharacterExpr.gen(name, power)


@pytest.fixture
def rel2():
    """Two GL(2) slots and a free twist character chi."""
    return RelationLattice.for_slots(["pi", "pi2"], ["chi"])


@pytest.fixture
def rel2_quadratic():
    return RelationLattice.for_slots(["pi", "pi2"], ["chi"], relations=[gen("chi", 2)],
                                     nontrivial=[gen("chi")])


@pytest.fixture(scope="session")
def suite_certs():
    return {name: load_fixture(name) for name in SUITE}
