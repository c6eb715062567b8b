from hypothesis import given, settings
from hypothesis import strategies as st

from lszero.lattice import hermite_rows, reduce_vector, smith_with_transform

small = st.integers(min_value=-6, max_value=6)


def matrix(nrows, ncols):
    return st.lists(st.lists(small, min_size=ncols, max_size=ncols), min_size=0, max_size=nrows)


def det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * det([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(n))


def test_hermite_of_quadratic_relation():
    assert hermite_rows([[2, 0]], 2) == [[2, 0]]
    assert reduce_vector([-1, 3], [[2, 0]]) == [1, 3]


def test_hermite_drops_dependent_rows():
    assert hermite_rows([[2, 4], [1, 2], [0, 0]], 2) == [[1, 2]]


@settings(max_examples=150, deadline=None)
@given(matrix(3, 3), st.lists(small, min_size=3, max_size=3),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_reduction_is_a_canonical_form(rows, vec, coeffs):
    basis = hermite_rows(rows, 3)
    r = reduce_vector(vec, basis)
    assert reduce_vector(r, basis) == r
    shifted = list(vec)
    for c, row in zip(coeffs, rows):
        shifted = [a + c * b for a, b in zip(shifted, row)]
    assert reduce_vector(shifted, basis) == r


@settings(max_examples=150, deadline=None)
@given(matrix(3, 3))
def test_smith_transform_is_unimodular_and_diagonalizes(rows):
    diag, v = smith_with_transform(rows, 3)
    assert abs(det(v)) == 1
    assert all(d > 0 for d in diag)
    assert all(diag[i + 1] % diag[i] == 0 for i in range(len(diag) - 1))
    # columns of R*V beyond the rank vanish, and the lattices have equal index
    rv = [[sum(r[k] * v[k][j] for k in range(3)) for j in range(3)] for r in rows]
    for row in rv:
        assert all(x == 0 for x in row[len(diag):])
    basis = hermite_rows(rows, 3)
    if len(basis) == 3:
        index = 1
        for i in range(3):
            index *= basis[i][i]
        prod = 1
        for d in diag:
            prod *= d
        assert prod == index
