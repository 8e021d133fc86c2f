import numpy as np
import pytest
from hypothesis import given, strategies as st

from gravgla.clifford import THETA_EXT, ExtElement
from gravgla.frames import (BOOSTS, GEN_NAMES, ROTATIONS, SO_W, VERT, CDer, FrameVector, NotARepresentation,
                            bracket_cder, check_representation, isotypic_decompose, label, matrix_to_sigma,
                            rep_adjoint, rep_on_wedge, sigma_bracket, sigma_matrix, so_w_basis, trace)
from gravgla.scalars import X, Scalar

S = {name: g for g, name in enumerate(GEN_NAMES)}


def act(g, b):
    """sigma_g(theta_b) as a coefficient vector."""
    m = sigma_matrix(g)
    return [m[a][b] for a in range(4)]


def test_boost_action():
    assert act(S["s1"], 0) == [0, 1, 0, 0]
    assert act(S["s1"], 2) == [0, 0, 0, 0]
    assert act(S["s3"], 3) == [1, 0, 0, 0]


def test_rotation_action_follows_index_rule():
    # sigma_ij(theta_k) = delta_jk theta_i - delta_ik theta_j
    for g, (i, j) in zip(ROTATIONS, ((2, 3), (3, 1), (1, 2))):
        for k in range(4):
            want = [0] * 4
            if k == j:
                want[i] += 1
            if k == i:
                want[j] -= 1
            assert act(g, k) == want
    assert act(S["s23"], 3) == [0, 0, 1, 0]
    assert act(S["s23"], 2) == [0, 0, 0, -1]


def test_brackets_against_matrix_commutator():
    mats = {g: np.array(sigma_matrix(g)) for g in VERT}
    for g in VERT:
        for h in VERT:
            comm = mats[g] @ mats[h] - mats[h] @ mats[g]
            want = {k: int(v) for k, v in zip(VERT, matrix_to_sigma(comm.tolist())) if v}
            assert sigma_bracket(g, h) == want


def test_bracket_golden():
    assert sigma_bracket(S["s1"], S["s2"]) == {S["s12"]: 1}
    assert sigma_bracket(S["s23"], S["s31"]) == {S["s12"]: -1}


def test_traces_and_dimension():
    assert trace(S["s0"]) == 4
    assert all(trace(g) == 0 for g in SO_W)
    assert len(so_w_basis()) == 6 and len(BOOSTS) == len(ROTATIONS) == 3


def test_lifted_vector_field():
    d0 = CDer.gen(0)
    w = THETA_EXT[1].scale(X[0])
    assert d0.on_ext(w) == THETA_EXT[1]
    assert bracket_cder(d0, CDer.gen(S["s1"], X[0])) == CDer.gen(S["s1"])


def test_conformal_factor():
    assert CDer.gen(S["s0"]).conformal_factor() == Scalar(-2)
    for g in SO_W:
        assert CDer.gen(g).conformal_factor() == 0


def test_isotypic_components():
    comps = isotypic_decompose(rep_on_wedge(1))
    assert [c[0] for c in comps] == [label("1/2", "1/2")]
    comps = isotypic_decompose(rep_on_wedge(2))
    assert [c[0] for c in comps] == [label(1, 0)] and comps[0][0].dimension == 6
    assert [c[0] for c in isotypic_decompose(rep_adjoint())] == [label(1, 0)]


def test_representation_check_rejects_garbage():
    bad = [np.eye(2, dtype=int).tolist()] * 6
    with pytest.raises(NotARepresentation):
        check_representation(bad)


polys = st.builds(lambda a, b, c: Scalar(a) + Scalar(b) * X[1] + Scalar(c) * X[0] * X[2],
                  st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
cders = st.lists(polys, min_size=11, max_size=11).map(CDer)


@given(cders, cders, cders)
def test_jacobi(a, b, c):
    lhs = bracket_cder(a, bracket_cder(b, c))
    rhs = bracket_cder(bracket_cder(a, b), c) + bracket_cder(b, bracket_cder(a, c))
    assert lhs == rhs


@given(cders, st.integers(0, 15), st.integers(0, 15))
def test_lambda_is_a_derivation(d, m1, m2):
    a, b = ExtElement({m1: X[2]}), ExtElement({m2: 1 + X[0]})
    assert d.on_ext(a.wedge(b)) == d.on_ext(a).wedge(b) + a.wedge(d.on_ext(b))


@given(cders, cders)
def test_bracket_is_commutator_on_frames(a, b):
    w = FrameVector([X[0], 1, X[3], 2])
    ab = bracket_cder(a, b).on_frame(w)
    comm = [x - y for x, y in zip(a.on_frame(b.on_frame(w)).components, b.on_frame(a.on_frame(w)).components)]
    assert list(ab.components) == comm
