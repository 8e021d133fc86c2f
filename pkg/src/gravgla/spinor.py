"""The spinor functor at a point: V = C^2, W_V = Hermitian 2x2 matrices.

Elements of V (x) conj(V) are 2x2 complex matrices Z = sum Z[a][b] e_a (x) conj(e_b),
so v (x) conj(x) is the matrix v x^H. Complex arithmetic is exact (sympy Gaussian
rationals).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import sympy as sp

from . import linalg
from .clifford import DIM, MONOS_OF_DEGREE, wedge_sign
from .frames import GEN_NAMES, NGEN, VERT, matrix_to_sigma
from .glaoid import anchor_matrix, coords

I_ = sp.I
PAULI = (sp.eye(2), sp.Matrix([[0, 1], [1, 0]]), sp.Matrix([[0, -I_], [I_, 0]]), sp.Matrix([[1, 0], [0, -1]]))
HALF = sp.Rational(1, 2)

# the seven sigma endomorphisms of V, in the order of VERT, and the kernel direction i*1
SIGMA_V = (
    HALF * sp.eye(2),
    HALF * sp.Matrix([[0, 1], [1, 0]]),
    HALF * sp.Matrix([[0, -I_], [I_, 0]]),
    HALF * sp.Matrix([[1, 0], [0, -1]]),
    HALF * sp.Matrix([[0, I_], [I_, 0]]),
    HALF * sp.Matrix([[0, 1], [-1, 0]]),
    HALF * sp.Matrix([[I_, 0], [0, -I_]]),
)
I_ONE = I_ * sp.eye(2)
END_BASIS = SIGMA_V + (I_ONE,)  # real basis of End_C(V)
NVGEN = 4 + len(END_BASIS)  # 12


def outer(v, x):
    """v (x) conj(x) as a matrix."""
    v, x = sp.Matrix(v), sp.Matrix(x)
    return v * x.H


@dataclass
class SpinorModule:
    v: sp.Matrix
    w: sp.Matrix

    @classmethod
    def standard(cls) -> SpinorModule:
        return cls(sp.Matrix([1, 0]), sp.Matrix([0, 1]))

    def basis_change(self, A) -> SpinorModule:
        A = sp.Matrix(A)
        return SpinorModule(A * self.v, A * self.w)


def spinor_to_frame(s: SpinorModule) -> list:
    v, w = s.v, s.w
    return [
        outer(v, v) + outer(w, w),
        outer(v, w) + outer(w, v),
        I_ * outer(w, v) - I_ * outer(v, w),
        outer(v, v) - outer(w, w),
    ]


def pairing(Z, Y):
    """-1/2 times the canonical S^2(V (x) conj V) -> C, i.e. the polarization of -det."""
    return sp.expand(-HALF * ((Z + Y).det() - Z.det() - Y.det()))


def gram(frame) -> sp.Matrix:
    return sp.Matrix(4, 4, lambda a, b: pairing(frame[a], frame[b]))


def pauli_coords(Z) -> list:
    """z_a with Z = sum z_a P_a."""
    return [sp.nsimplify(sp.expand((PAULI[a] * Z).trace() / 2)) for a in range(DIM)]


def lorentz_matrix(frame) -> sp.Matrix:
    """Lam with frame[b] = sum_a Lam[a, b] P_a."""
    return sp.Matrix(4, 4, lambda a, b: pauli_coords(frame[b])[a])


def is_proper_lorentz(Lam) -> bool:
    eta = sp.diag(-1, 1, 1, 1)
    return sp.simplify(Lam.T * eta * Lam - eta) == sp.zeros(4, 4) and sp.simplify(Lam.det()) == 1 \
        and Lam[0, 0] > 0


# --- the morphism DerEnd(V) -> CDerEnd(W_V) -----------------------------------------
def delta_w(M, Z):
    """Induced action on V (x) conj V: x (x) conj y -> Mx (x) conj y + x (x) conj(My)."""
    return M * Z + Z * M.H


def derend_v_matrix(M) -> list:
    """4x4 matrix m[a][b] = theta_a coefficient of delta(theta_b)."""
    cols = [pauli_coords(delta_w(sp.Matrix(M), PAULI[b])) for b in range(DIM)]
    return [[cols[b][a] for b in range(DIM)] for a in range(DIM)]


def derend_v_morphism(M, vector_field=(0, 0, 0, 0)) -> list:
    """Coefficients of the CDer (d0..d3, s0..s12) of (vector field, M)."""
    m = derend_v_matrix(M)
    for row in m:
        for e in row:
            if sp.im(e) != 0:
                raise ValueError("induced map does not preserve W_V")
    vert = matrix_to_sigma([[Fraction(str(sp.re(e))) for e in row] for row in m])
    return [Fraction(str(c)) for c in vector_field] + list(vert)


def sigma_table_matches() -> dict:
    """For each named sigma: does its image equal the generator of the same name?"""
    out = {}
    for k, g in enumerate(VERT):
        img = derend_v_morphism(SIGMA_V[k])
        expect = [Fraction(int(i == g)) for i in range(NGEN)]
        out[GEN_NAMES[g]] = img == expect
    return out


def bracket_intertwined(M1, M2) -> bool:
    """The image of the commutator is the sigma-bracket of the images."""
    A = sp.Matrix(derend_v_matrix(M1))
    B = sp.Matrix(derend_v_matrix(M2))
    C = sp.Matrix(derend_v_matrix(M1 * M2 - M2 * M1))
    return sp.simplify(A * B - B * A - C) == sp.zeros(4, 4)


# --- the ideal via the representation -------------------------------------------------
def _wedge2_coords(Z1, Z2) -> dict:
    """theta-coordinates of Z1 ^ Z2 in the exterior square of W_C, keyed by mask."""
    z1, z2 = pauli_coords(Z1), pauli_coords(Z2)
    out = {}
    for a, b in itertools.combinations(range(DIM), 2):
        c = sp.expand(z1[a] * z2[b] - z1[b] * z2[a])
        if c != 0:
            out[(1 << a) | (1 << b)] = c
    return out


SAMPLE_SPINORS = ((1, 0), (0, 1), (1, 1), (1, 2), (1, I_), (2, -I_), (1, 3))


def n2_generators(samples=SAMPLE_SPINORS) -> list:
    """(v conj(e0) ^ v conj(e1)) (x) v as dicts (mask, alpha) -> complex."""
    gens = []
    e0, e1 = sp.Matrix([1, 0]), sp.Matrix([0, 1])
    for v in samples:
        v = sp.Matrix(v)
        w2 = _wedge2_coords(outer(v, e0), outer(v, e1))
        gens.append({(m, al): sp.expand(c * v[al]) for m, c in w2.items() for al in range(2)})
    return gens


def m1_coords(k: int) -> list:
    return [(m, al) for m in MONOS_OF_DEGREE[k] for al in range(2)]


def n_space(k: int) -> list:
    """Complex spanning vectors of N^k = (wedge W) N^2 inside the degree-k part of M_1."""
    if k < 2:
        return []
    cs = m1_coords(k)
    ci = {c: i for i, c in enumerate(cs)}
    out = []
    for g in n2_generators():
        for J in MONOS_OF_DEGREE[k - 2]:
            vec = [0] * len(cs)
            for (m, al), c in g.items():
                s = wedge_sign(J, m)
                if s:
                    vec[ci[(J | m, al)]] += s * c
            out.append(vec)
    return out


def _complex_rank(vectors) -> int:
    return sp.Matrix(vectors).rank() if vectors else 0


def n2_dimension() -> int:
    return _complex_rank(n_space(2))


def derivation_on_m1(M, gen: list) -> list:
    """A degree-0 element (endomorphism M) applied to a degree-2 element of M_1."""
    dW = derend_v_matrix(M)  # action on theta's
    out = {}
    for (mask, al), c in gen.items():
        # derivation on the exterior part
        idx = [a for a in range(DIM) if mask >> a & 1]
        for pos, a in enumerate(idx):
            rest = mask & ~(1 << a)
            for b in range(DIM):
                coef = dW[b][a]
                if coef == 0 or (rest >> b & 1):
                    continue
                # theta_a sits at position pos; replace in place then reorder
                sign = (-1) ** pos * wedge_sign(1 << b, rest)
                key = (rest | (1 << b), al)
                out[key] = out.get(key, 0) + sign * coef * c
        for be in range(2):
            if M[be, al] != 0:
                key = (mask, be)
                out[key] = out.get(key, 0) + M[be, al] * c
    return out


def n_is_invariant() -> bool:
    cs = m1_coords(2)
    base = n_space(2)
    r = _complex_rank(base)
    for M in END_BASIS:
        for g in n2_generators():
            img = derivation_on_m1(M, g)
            vec = [sp.expand(img.get(c, 0)) for c in cs]
            if _complex_rank(base + [vec]) != r:
                return False
    return True


def _annihilator(k: int):
    """Rows of a complex matrix whose kernel is N^k."""
    n = len(m1_coords(k))
    N = n_space(k)
    if not N:
        return sp.eye(n)
    ns = sp.Matrix(N).nullspace()  # vectors q with N q = 0, i.e. q^T annihilates rows of N
    return sp.Matrix.hstack(*ns).T if ns else sp.zeros(0, n)


def lv_coords(k: int) -> list:
    return [(m, g) for m in MONOS_OF_DEGREE[k] for g in range(NVGEN)]


def _re_im(z):
    z = sp.expand(z)
    return Fraction(str(sp.re(z))), Fraction(str(sp.im(z)))


def to_l(k: int, vec) -> list:
    """Image in L (coords(k)) of a real L_V vector in lv_coords(k)."""
    ci = {c: i for i, c in enumerate(coords(k))}
    out = [Fraction(0)] * len(ci)
    for (m, g), c in zip(lv_coords(k), vec):
        if not c:
            continue
        if g < 4:
            out[ci[(m, g)]] += c
        elif g - 4 < len(VERT):
            out[ci[(m, VERT[g - 4])]] += c
    return out


def representation_kernel(k: int) -> list:
    """Real basis of I_V in degree k."""
    lc = lv_coords(k)
    nvar = len(lc)
    rows = []
    # M_0: the anchor of the image in L vanishes
    A = anchor_matrix(k)
    img = [to_l(k, [Fraction(int(i == j)) for i in range(nvar)]) for j in range(nvar)]
    for r in linalg.to_rows(A) if not isinstance(A, list) else A:
        rows.append([sum((r[i] * img[j][i] for i in range(len(r)) if r[i]), Fraction(0)) for j in range(nvar)])
    # M_2: traces
    for m in MONOS_OF_DEGREE[k]:
        re_row, im_row = [Fraction(0)] * nvar, [Fraction(0)] * nvar
        for j, (mm, g) in enumerate(lc):
            if mm == m and g >= 4:
                re_, im_ = _re_im(END_BASIS[g - 4].trace())
                re_row[j], im_row[j] = re_, im_
        rows += [re_row, im_row]
    # M_1 / N: y e_alpha lands in N^k
    Q = _annihilator(k)
    cs = m1_coords(k)
    ci = {c: i for i, c in enumerate(cs)}
    for al in range(2):
        cols = []
        for (m, g) in lc:
            vec = [0] * len(cs)
            if g >= 4:
                M = END_BASIS[g - 4]
                for be in range(2):
                    if M[be, al] != 0:
                        vec[ci[(m, be)]] += M[be, al]
            cols.append(Q * sp.Matrix(vec) if Q.rows else sp.zeros(0, 1))
        for q in range(Q.rows):
            parts = [_re_im(c[q]) for c in cols]
            rows.append([p[0] for p in parts])
            rows.append([p[1] for p in parts])
    return linalg.nullspace(rows, nvar) if rows else [[Fraction(int(i == j)) for i in range(nvar)]
                                                     for j in range(nvar)]


def ideal_via_representation(k: int | None = None):
    """Image of I_V in L: a list of coordinate vectors per degree (or for one degree)."""
    if k is not None:
        n = len(coords(k))
        imgs = [to_l(k, v) for v in representation_kernel(k)]
        return linalg.span_basis(imgs, n) if imgs else []
    return {kk: ideal_via_representation(kk) for kk in range(DIM + 1)}


def image_ranks() -> tuple:
    return tuple(len(ideal_via_representation(k)) for k in range(DIM + 1))
