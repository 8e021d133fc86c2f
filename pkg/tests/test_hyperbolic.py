import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gravgla.gauge import default_gauge
from gravgla.glaoid import LElement, x_minkowski
from gravgla.hyperbolic import (CFLViolation, Degenerate, PositivityLost, assemble_symbol, burgers_error,
                                check_contraction_identity, check_global_hyperbolicity, contraction_operator,
                                convergence_ratios, discrete_homotopy, evolve_linear, evolve_ode,
                                evolve_quasilinear, first_order_defect, manufactured_errors, ode_oracle,
                                plane_wave, reduce_1d, smooth_source)
from gravgla.report import random_poly


def frame(rows):
    """x = sum_a theta_a (x) sum_mu rows[a][mu] d_mu."""
    return LElement({(1 << a, mu): c for a in range(4) for mu in range(4) if (c := rows[a][mu])})


@pytest.fixture(scope="module")
def gauge():
    return default_gauge()


@pytest.fixture(scope="module")
def symbols(gauge):
    return {k: assemble_symbol(gauge, x_minkowski(), k) for k in range(4)}


def test_symbol_sizes_and_positivity(symbols):
    assert [symbols[k].size for k in range(4)] == [11, 33, 23, 5]
    for s in symbols.values():
        assert s.is_constant()
        assert s.is_symmetric()
        assert s.a0_positive()


def test_scaled_frame_scales_symbol(gauge, symbols):
    s2 = assemble_symbol(gauge, x_minkowski().scale(2), 1)
    for mu in range(4):
        assert s2.A[mu] == [[2 * c for c in row] for row in symbols[1].A[mu]]
    assert s2.is_symmetric() and s2.a0_positive()


def test_degenerate_frame_rejected(gauge):
    with pytest.raises(Degenerate):
        assemble_symbol(gauge, LElement.term(1, 0), 1)


def test_lower_order_part_factors_through_contraction(gauge, symbols):
    # the zeroth order term does not vanish for x_mink; it is pinned down by the contraction identity
    for k in range(4):
        s = symbols[k]
        assert any(not c.is_zero() for row in s.C for c in row)
        assert check_contraction_identity(s, contraction_operator(gauge, x_minkowski(), k))


def test_first_order_property(gauge):
    rng = random.Random(3)
    x = x_minkowski()
    for _ in range(4):
        k = rng.randint(0, 2)
        f = random_poly(rng)
        j = rng.randrange(gauge.rank(k))
        assert all(c.is_zero() for c in first_order_defect(gauge, x, k, f, j))


def test_global_hyperbolicity():
    assert check_global_hyperbolicity(x_minkowski())
    c, s = Fraction(3, 5), Fraction(4, 5)
    rot = [[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1]]
    assert check_global_hyperbolicity(frame(rot))
    swap = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    assert not check_global_hyperbolicity(frame(swap))


def test_unit_time_scale_is_borderline():
    # with t = x^0 the unit directions make x_mink(t + n xi) null
    assert not check_global_hyperbolicity(x_minkowski(), time_scale=1)


@pytest.fixture(scope="module")
def reduced(symbols):
    return reduce_1d(symbols[1])


def test_zero_data_stays_zero(reduced):
    A0, As = reduced
    res = evolve_linear(A0, As, np.zeros((32, A0.shape[0])), 50)
    assert not np.any(res.u)
    h = discrete_homotopy(A0, As[0], lambda t, x: np.zeros((x.size, A0.shape[0])), 32)
    assert not np.any(h.u)


def test_energy_conservation(reduced):
    A0, As = reduced
    res = evolve_linear(A0, As, plane_wave(256, A0.shape[0]), 1000)
    assert res.relative_drift() <= 1e-10


def test_cfl_violation(reduced):
    A0, As = reduced
    with pytest.raises(CFLViolation):
        evolve_linear(A0, As, plane_wave(16, A0.shape[0]), 2, cfl=1.2)


def test_manufactured_convergence(reduced):
    A0, As = reduced
    ratios = convergence_ratios(manufactured_errors(A0, As[0]))
    assert all(abs(r - 4.0) <= 0.3 for r in ratios)


def test_burgers_against_characteristics():
    assert burgers_error(N=512) <= 1e-3


def test_quasilinear_zero_and_positivity():
    u = evolve_quasilinear(lambda x, u: (np.ones((x.size, 1, 1)), u[:, :, None]),
                           lambda x, u: np.zeros_like(u), np.zeros(64), 0.1)
    assert not np.any(u)

    def bad(x, u):
        return 1 - 10 * u[:, :, None] ** 2, np.ones((x.size, 1, 1))

    with pytest.raises(PositivityLost):
        evolve_quasilinear(bad, lambda x, u: np.zeros_like(u), 0.5 * np.ones(16), 0.1, max_speed=1.0)


def test_ode_case():
    A0 = lambda v: np.array([[2 + v[0] ** 2, 0.1], [0.1, 1 + v[1] ** 2]])  # noqa: E731
    b = lambda v: np.array([-v[1], v[0] - 0.5 * v[1]])  # noqa: E731
    u0 = [1.0, 0.3]
    assert np.max(np.abs(evolve_ode(A0, b, u0, 2.0) - ode_oracle(A0, b, u0, 2.0))) < 1e-9


def test_discrete_homotopy_convergence(reduced):
    A0, As = reduced
    r = smooth_source(A0.shape[0], seed=2)
    res = [discrete_homotopy(A0, As[0], r, N).residual for N in (64, 128, 256)]
    for a, b in zip(res, res[1:]):
        assert 3.5 <= a / b <= 4.5


sym_systems = st.integers(0, 10**6).map(lambda s: np.random.default_rng(s))


@given(sym_systems)
def test_leapfrog_conserves_energy_for_symmetric_systems(gen):
    m = 3
    M = gen.standard_normal((m, m))
    A0 = M @ M.T + m * np.eye(m)
    S = gen.standard_normal((m, m))
    A1 = S + S.T
    u0 = gen.standard_normal((32, m))
    res = evolve_linear(A0, [A1], u0, 200)
    assert res.relative_drift() <= 1e-10
