from fractions import Fraction

import sympy as sp
from hypothesis import given, strategies as st

from gravgla import linalg

small = st.integers(-3, 3)
mats = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


@given(mats)
def test_rank_matches_sympy(rows):
    assert linalg.rank(rows) == sp.Matrix(rows).rank()


@given(mats)
def test_nullspace_is_kernel(rows):
    n = len(rows[0])
    ker = linalg.nullspace(rows, n)
    assert len(ker) == n - linalg.rank(rows)
    for v in ker:
        assert all(sum(Fraction(a) * b for a, b in zip(r, v)) == 0 for r in rows)


@given(mats)
def test_span_basis_and_membership(rows):
    n = len(rows[0])
    basis = linalg.span_basis(rows, n)
    assert len(basis) == linalg.rank(rows)
    if basis:
        assert linalg.span_equal(basis, rows, n)
        combo = [sum(Fraction(r[j]) * (i + 1) for i, r in enumerate(rows)) for j in range(n)]
        assert linalg.in_span(combo, basis, n)


def test_positive_definite_by_minors():
    assert linalg.is_positive_definite(linalg.matrix([[2, 1], [1, 2]]))
    assert not linalg.is_positive_definite(linalg.matrix([[1, 2], [2, 1]]))
    assert linalg.leading_minors(linalg.matrix([[2, 1], [1, 2]])) == [2, 3]


def test_solve_any():
    assert linalg.solve_any([[1, 1], [0, 1]], [3, 1]) == [2, 1]
    assert linalg.solve_any([[1, 1], [1, 1]], [1, 2]) is None
