import pytest
import sympy as sp

from gravgla import linalg
from gravgla.glaoid import coords, default_ideal
from gravgla.spinor import (END_BASIS, I_ONE, PAULI, SIGMA_V, SpinorModule, bracket_intertwined, derend_v_morphism,
                            gram, image_ranks, ideal_via_representation, is_proper_lorentz, lorentz_matrix,
                            n2_dimension, n_is_invariant, pairing, sigma_table_matches, spinor_to_frame)


def test_standard_frame_is_orthonormal():
    frame = spinor_to_frame(SpinorModule.standard())
    assert gram(frame) == sp.diag(-1, 1, 1, 1)
    assert [f for f in frame] == list(PAULI)


@pytest.mark.parametrize("A", [
    [[1, 1], [0, 1]],
    [[2, 0], [0, sp.Rational(1, 2)]],
    [[sp.I, 0], [0, -sp.I]],
    [[1, sp.I], [sp.I, 0]],
])
def test_unimodular_change_is_proper_lorentz(A):
    assert sp.Matrix(A).det() == 1
    frame = spinor_to_frame(SpinorModule.standard().basis_change(A))
    assert gram(frame) == sp.diag(-1, 1, 1, 1)
    assert is_proper_lorentz(lorentz_matrix(frame))


def test_scaling_is_conformal():
    frame = spinor_to_frame(SpinorModule.standard().basis_change(2 * sp.eye(2)))
    assert gram(frame) == 16 * sp.diag(-1, 1, 1, 1)


def test_pairing_is_symmetric():
    for Z in PAULI:
        for Y in PAULI:
            assert pairing(Z, Y) == pairing(Y, Z)


def test_sigma_table():
    assert all(sigma_table_matches().values())
    assert not any(derend_v_morphism(I_ONE))


def test_brackets_intertwined():
    for M1 in SIGMA_V:
        for M2 in SIGMA_V:
            assert bracket_intertwined(M1, M2)


def test_end_basis_spans_gl2c():
    real = sp.Matrix([[f(e) for e in M for f in (sp.re, sp.im)] for M in END_BASIS])
    assert real.rank() == 8


def test_n2():
    assert n2_dimension() == 4
    assert n_is_invariant()


def test_image_of_representation_kernel():
    assert image_ranks() == (0, 0, 10, 16, 6)
    ideal = default_ideal()
    for k in range(2, 5):
        assert linalg.span_equal(ideal_via_representation(k), ideal.rows[k], len(coords(k)))
