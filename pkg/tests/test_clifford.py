from fractions import Fraction

from hypothesis import given, strategies as st

from gravgla.clifford import (MONOMIALS, ONE_CL, THETA, THETA_EXT, ExtElement, MultiVector, character,
                              check_free_module, clifford_group, direct_sum, half_module,
                              invariant_average, regular_module)


def mv(mask, c=1):
    return MultiVector({mask: c})


def test_relations():
    assert THETA[0] * THETA[0] == ONE_CL
    for i in (1, 2, 3):
        assert THETA[i] * THETA[i] == ONE_CL.scale(-1)
    assert THETA[1] * THETA[2] == mv(0b0110)
    assert THETA[2] * THETA[1] == mv(0b0110, -1)
    t01 = THETA[0] * THETA[1]
    assert t01 * t01 == ONE_CL


def test_transpose():
    assert (THETA[0] * THETA[1]).T == THETA[1] * THETA[0]
    assert (THETA[1] * THETA[2] * THETA[3]).T == (THETA[1] * THETA[2] * THETA[3]).scale(-1)
    assert ONE_CL.T == ONE_CL


def test_clifford_action_on_forms():
    e01 = THETA_EXT[0].wedge(THETA_EXT[1])
    assert e01.clifford_action((1, 0, 0, 0)) == THETA_EXT[1]
    assert ExtElement({0: 1}).clifford_action((0, 1, 0, 0)) == THETA_EXT[1]


def test_clifford_action_squares_to_norm():
    # c_w c_w = -<w, w> reproduces the algebra relation on the exterior algebra
    w = (2, 1, 0, 3)
    norm = -4 + 1 + 9
    f = ExtElement({0b0011: 1, 0b0100: Fraction(1, 2), 0: 5})
    assert f.clifford_action(w).clifford_action(w) == f.scale(-norm)


def test_finite_group():
    group = clifford_group()
    assert len(group) == 32
    e0 = next(f for f in group if f.monomial == 1 and f.sign == 1)
    e1 = next(f for f in group if f.monomial == 2 and f.sign == 1)
    assert character(0, e0) == 1
    assert character(0, e1) == -1


def test_invariant_average():
    pi = invariant_average().tensor()
    assert pi.parity() == 0
    assert pi.mul(pi) == pi
    assert pi.is_symmetric()
    from gravgla.clifford import TensorCl

    x = THETA[2]
    lhs = pi.mul(TensorCl.pure(x, ONE_CL))
    rhs = pi.mul(TensorCl.pure(ONE_CL, x))
    assert lhs == rhs


def test_freeness():
    reg = regular_module()
    r = check_free_module(*reg)
    assert r.free and r.rank == 1
    assert not check_free_module(*half_module()).free
    r2 = check_free_module(*direct_sum(reg, reg))
    assert r2.free and r2.rank == 2


masks = st.sampled_from(MONOMIALS)
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
multivectors = st.dictionaries(masks, coeffs, max_size=4).map(MultiVector)


@given(multivectors, multivectors, multivectors)
def test_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(multivectors, multivectors)
def test_transpose_is_anti_automorphism(a, b):
    assert (a * b).T == b.T * a.T
    assert a.T.T == a


@given(st.dictionaries(masks, coeffs, max_size=3).map(ExtElement),
       st.dictionaries(masks, coeffs, max_size=3).map(ExtElement))
def test_wedge_graded_commutative(a, b):
    for p in range(5):
        for q in range(5):
            x, y = a.part(p), b.part(q)
            sign = -1 if p * q % 2 else 1
            assert x.wedge(y) == y.wedge(x).scale(sign)
