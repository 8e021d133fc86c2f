import random

import pytest
from hypothesis import given, strategies as st

from gravgla import linalg
from gravgla.clifford import MONOS_OF_DEGREE, THETA_EXT, ExtElement, degree, mask_of
from gravgla.frames import GEN_NAMES, CDer, bracket_cder, label
from gravgla.glaoid import (LElement, anchor, anchor_kernel, coords, default_ideal, graded_commutator_apply,
                            ideal_basis_explicit, ideal_basis_isotypic, l_bracket, m_isotypic_components,
                            mc_defect, rank_table, reduce_mod_ideal, x_minkowski)
from gravgla.report import random_l_element, random_poly
from gravgla.scalars import X

S = {name: g for g, name in enumerate(GEN_NAMES)}


def T(mask, g, c=1):
    return LElement.term(mask, g, c)


def oracle_bracket(a: LElement, b: LElement) -> LElement:
    """[aX, bY] = ab[X,Y] + a X(b) Y - (-1)^{pq} b Y(a) X, term by term."""
    out = LElement()
    for (ma, ga), ca in a.terms.items():
        for (mb, gb), cb in b.terms.items():
            alpha, beta = ExtElement({ma: ca}), ExtElement({mb: cb})
            Xd, Yd = CDer.gen(ga), CDer.gen(gb)
            p, q = degree(ma), degree(mb)
            sign = -1 if p * q % 2 else 1
            parts = [(alpha.wedge(beta), bracket_cder(Xd, Yd)),
                     (alpha.wedge(Xd.on_ext(beta)), Yd),
                     (beta.wedge(Yd.on_ext(alpha)).scale(-sign), Xd)]
            for w, d in parts:
                for m, f in w.coeffs.items():
                    for g, c in enumerate(d.c):
                        if not c.is_zero():
                            out = out + T(m, g, f * c)
    return out


def test_worked_brackets():
    d0 = T(1, S["d0"])
    assert l_bracket(d0, d0).is_zero()
    # sigma_23(theta_2) = -theta_3 in the index convention used throughout
    got = l_bracket(T(0, S["s23"]), T(mask_of((2,)), S["d0"]))
    assert got == T(mask_of((3,)), S["d0"], -1)


def test_anchor_examples():
    assert anchor(T(0, S["d0"]))(X[0]) == ExtElement({0: 1})
    assert anchor(T(mask_of((1,)), S["s23"]))(THETA_EXT[2]) == THETA_EXT[1].wedge(THETA_EXT[3]).scale(-1)


def test_explicit_ideal_element():
    first = ideal_basis_explicit()[0]
    want = (T(mask_of((0, 1)), S["s1"]) - T(mask_of((2, 3)), S["s23"]) - T(mask_of((0, 2)), S["s2"])
            - T(mask_of((1, 3)), S["s31"]))
    assert first == want


def test_explicit_basis_in_anchor_kernel():
    basis = ideal_basis_explicit()
    assert len(basis) == 10
    assert linalg.rank([b.vector(2) for b in basis]) == 10
    for b in basis:
        for mu in range(4):
            assert anchor(b)(X[mu]).is_zero()
        for t in THETA_EXT:
            assert anchor(b)(t).is_zero()


def test_isotypic_component_matches_explicit_basis():
    iso = ideal_basis_isotypic()
    assert len(iso) == 10
    n = len(coords(2))
    assert linalg.span_equal([b.vector(2) for b in iso], [b.vector(2) for b in ideal_basis_explicit()], n)
    ideal = default_ideal()
    for lab, rows in m_isotypic_components(2):
        if lab != label(2, 0):
            assert not all(ideal.contains_vector(2, r) for r in rows)


def test_ideal_inside_anchor_kernel():
    ideal = default_ideal()
    for k in (2, 3, 4):
        assert linalg.span_contains(list(anchor_kernel(k)), ideal.rows[k], len(coords(k)))


def test_rank_table():
    t = rank_table()
    assert t["I"] == [0, 0, 10, 16, 6]
    assert t["L"] == [11, 44, 66, 44, 11]
    assert t["E"] == [11, 44, 56, 28, 5]


def test_mc_defect():
    assert mc_defect(x_minkowski()).is_zero()
    bad = x_minkowski() + T(mask_of((1,)), S["s0"], X[0])
    assert not mc_defect(bad).is_zero()
    with pytest.raises(ValueError):
        mc_defect(T(0, S["d0"]))


def test_reduction_idempotent(rng):
    ideal = default_ideal()
    for _ in range(20):
        a = random_l_element(rng, rng.randint(2, 4), 4)
        r = reduce_mod_ideal(a)
        assert reduce_mod_ideal(r) == r
        assert ideal.contains(a - r)


def test_bracket_matches_oracle(rng):
    for _ in range(60):
        p, q = rng.randint(0, 2), rng.randint(0, 2)
        a, b = random_l_element(rng, p, 2), random_l_element(rng, q, 2)
        assert l_bracket(a, b) == oracle_bracket(a, b)


seeds = st.integers(0, 10**6)


@given(seeds)
def test_graded_antisymmetry(seed):
    r = random.Random(seed)
    p, q = r.randint(0, 2), r.randint(0, 2)
    a, b = random_l_element(r, p, 2), random_l_element(r, q, 2)
    sign = -1 if p * q % 2 else 1
    assert l_bracket(a, b) == l_bracket(b, a).scale(-sign)


@given(seeds)
def test_jacobi(seed):
    r = random.Random(seed)
    p, q, s = r.randint(0, 1), r.randint(0, 2), r.randint(0, 1)
    a, b, c = (random_l_element(r, g, 2) for g in (p, q, s))
    sign = -1 if p * q % 2 else 1
    assert l_bracket(a, l_bracket(b, c)) == l_bracket(l_bracket(a, b), c) + l_bracket(b, l_bracket(a, c)).scale(sign)


@given(seeds)
def test_anchor_morphism(seed):
    r = random.Random(seed)
    p, q = r.randint(0, 2), r.randint(0, 1)
    a, b = random_l_element(r, p, 2), random_l_element(r, q, 2)
    w = ExtElement({r.choice(MONOS_OF_DEGREE[r.randint(0, 4 - p - q)]): random_poly(r)})
    assert anchor(l_bracket(a, b))(w) == graded_commutator_apply(a, b, w)


@given(seeds)
def test_leibniz(seed):
    r = random.Random(seed)
    p, q = r.randint(0, 2), r.randint(0, 2)
    a, b = random_l_element(r, p, 2), random_l_element(r, q, 2)
    f = random_poly(r)
    rho_f = anchor(a)(f)
    # rho(a)(f) has degree p; wedge it into b
    fb = LElement()
    for m, c in rho_f.coeffs.items():
        fb = fb + b.wedge_left(ExtElement({m: c}))
    assert l_bracket(a, b.scale(f)) == fb + l_bracket(a, b).scale(f)


@given(seeds)
def test_ideal_closed_under_bracket(seed):
    r = random.Random(seed)
    ideal = default_ideal()
    b = r.choice(ideal.elements(2)).scale(random_poly(r))
    a = random_l_element(r, r.randint(0, 2), 3)
    assert ideal.contains(l_bracket(a, b))
