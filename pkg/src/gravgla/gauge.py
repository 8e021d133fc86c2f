"""Gauges from Hermitian forms.

The Clifford module E-slash is handled in two coordinate systems:

* A-coordinates: the free basis theta_I (x) a_j of Cl (x) A, index 9*INDEX[I] + j;
* C-coordinates: the canonical filtered complement of the kernel of f, where
  every level is a coordinate subspace and p^k is a coordinate projection.

Forms are built in A-coordinates and transported to C-coordinates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import flint

from . import linalg
from .clifford import (DIM, INDEX, MONOMIALS, NMON, MultiVector, cl_sign, degree, mask_of,
                       transpose_sign)
from .glaoid import LElement, default_ideal
from .scalars import CScalar
from .slashed import (A_GENERATORS, LCOORDS, LINDEX, NL, complement_indices,
                      left_mult_slashed, projection_to_complement)

NA = len(A_GENERATORS)
NE = NMON * NA  # 144
NH = 2 * NA  # 18


# --- the hash map -----------------------------------------------------------------
# 2x2 complex matrices as ((re, im) ...) integer pairs, row-major.
_PAULI = (
    (((1, 0), (0, 0)), ((0, 0), (1, 0))),
    (((0, 0), (1, 0)), ((1, 0), (0, 0))),
    (((0, 0), (0, -1)), ((0, 1), (0, 0))),
    (((1, 0), (0, 0)), ((0, 0), (-1, 0))),
)


def _times_minus_i(m):
    # -i (a + ib) = b - ia
    return tuple(tuple((e[1], -e[0]) for e in row) for row in m)


def _neg(m):
    return tuple(tuple((-e[0], -e[1]) for e in row) for row in m)


_HASH: dict[int, tuple] = {1 << i: _PAULI[i] for i in range(DIM)}
_HASH[mask_of((1, 2, 3))] = _times_minus_i(_PAULI[0])
_HASH[mask_of((0, 2, 3))] = _times_minus_i(_PAULI[1])
# theta_0 theta_3 theta_1 = -theta_0 theta_1 theta_3
_HASH[mask_of((0, 1, 3))] = _neg(_times_minus_i(_PAULI[2]))
_HASH[mask_of((0, 1, 2))] = _times_minus_i(_PAULI[3])
_ZERO2 = (((0, 0), (0, 0)), ((0, 0), (0, 0)))


def hash_monomial(mask: int):
    return _HASH.get(mask, _ZERO2)


def hash_map(x: MultiVector) -> list[list[CScalar]]:
    """<x>_#: linear, zero on even degrees, Pauli matrices on W."""
    out = [[CScalar(0, 0), CScalar(0, 0)], [CScalar(0, 0), CScalar(0, 0)]]
    for mask, c in x.coeffs.items():
        m = hash_monomial(mask)
        for a in range(2):
            for b in range(2):
                re, im = m[a][b]
                if re or im:
                    out[a][b] = out[a][b] + CScalar(re, im) * c
    return out


@lru_cache(maxsize=None)
def _pair_table():
    """<theta_I^T theta_J>_# for all monomial pairs, as integer (re, im) 2x2 matrices."""
    tab = {}
    for I in MONOMIALS:
        for J in MONOMIALS:
            s = transpose_sign(I) * cl_sign(I, J)
            m = hash_monomial(I ^ J)
            tab[(I, J)] = tuple(tuple((s * e[0], s * e[1]) for e in row) for row in m)
    return tab


# --- Hermitian forms -----------------------------------------------------------------
class NotHermitian(ValueError):
    pass


@dataclass
class HermForm:
    """18x18 Hermitian matrix indexed by (spinor alpha, A-index j) -> 9*alpha + j."""

    re: list
    im: list

    def __post_init__(self):
        self.re = [[Fraction(x) for x in r] for r in self.re]
        self.im = [[Fraction(x) for x in r] for r in self.im]
        n = len(self.re)
        for i in range(n):
            for j in range(n):
                if self.re[i][j] != self.re[j][i] or self.im[i][j] != -self.im[j][i]:
                    raise NotHermitian(f"entry ({i},{j}) breaks Hermitian symmetry")

    @classmethod
    def identity(cls, n: int = NH) -> HermForm:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], [[0] * n for _ in range(n)])

    @classmethod
    def random_positive(cls, seed: int, n: int = NH) -> HermForm:
        """M^H M + 1 for a seeded small-integer complex M."""
        rng = random.Random(seed)
        mr = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        mi = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        re = [[int(i == j) + sum(mr[k][i] * mr[k][j] + mi[k][i] * mi[k][j] for k in range(n))
               for j in range(n)] for i in range(n)]
        im = [[sum(mr[k][i] * mi[k][j] - mi[k][i] * mr[k][j] for k in range(n))
               for j in range(n)] for i in range(n)]
        return cls(re, im)

    def is_positive_definite(self) -> bool:
        return linalg.is_positive_definite(linalg.matrix(linalg.realify(self.re, self.im)))

    def to_json(self):
        return {"re": [[str(x) for x in r] for r in self.re], "im": [[str(x) for x in r] for r in self.im]}

    @classmethod
    def from_json(cls, data) -> HermForm:
        return cls([[Fraction(x) for x in r] for r in data["re"]],
                   [[Fraction(x) for x in r] for r in data["im"]])


def herm_basis(n: int = NH) -> list[HermForm]:
    """Real basis of Herm(n): diagonal units, symmetric real units, antisymmetric imaginary units."""
    out = []
    z = lambda: [[0] * n for _ in range(n)]  # noqa: E731
    for i in range(n):
        re = z()
        re[i][i] = 1
        out.append(HermForm(re, z()))
    for i in range(n):
        for j in range(i + 1, n):
            re = z()
            re[i][j] = re[j][i] = 1
            out.append(HermForm(re, z()))
    for i in range(n):
        for j in range(i + 1, n):
            im = z()
            im[i][j], im[j][i] = 1, -1
            out.append(HermForm(z(), im))
    return out


def a_index(mask: int, j: int) -> int:
    return NA * INDEX[mask] + j


def a_parity(i: int) -> int:
    return degree(MONOMIALS[i // NA]) % 2


def build_b(h: HermForm) -> flint.fmpq_mat:
    """b_h(x a, x' a') = Re( h(- (x) a, - (x) a') <x^T x'>_# ) in A-coordinates."""
    tab = _pair_table()
    B = flint.fmpq_mat(NE, NE)
    for I in MONOMIALS:
        for J in MONOMIALS:
            if (degree(I) + degree(J)) % 2 == 0:
                continue
            m = tab[(I, J)]
            for j in range(NA):
                for jp in range(NA):
                    v = Fraction(0)
                    for al in range(2):
                        for be in range(2):
                            mre, mim = m[al][be]
                            if not (mre or mim):
                                continue
                            hr = h.re[NA * al + j][NA * be + jp]
                            hi = h.im[NA * al + j][NA * be + jp]
                            v += hr * mre - hi * mim
                    if v:
                        B[a_index(I, j), a_index(J, jp)] = linalg.to_fmpq(v)
    return B


@lru_cache(maxsize=None)
def cl_action_A(mask: int) -> flint.fmpq_mat:
    """Left multiplication by theta_mask on Cl (x) A."""
    M = flint.fmpq_mat(NE, NE)
    for J in MONOMIALS:
        s = cl_sign(mask, J)
        for j in range(NA):
            M[a_index(mask ^ J, j), a_index(J, j)] = s
    return M


def w_action_A(w) -> flint.fmpq_mat:
    out = flint.fmpq_mat(NE, NE)
    for a in range(DIM):
        if w[a]:
            out = out + cl_action_A(1 << a) * linalg.to_fmpq(w[a])
    return out


def is_odd_form(B) -> bool:
    for i in range(NE):
        for j in range(NE):
            if a_parity(i) == a_parity(j) and B[i, j] != 0:
                return False
    return True


def satisfies_i(B) -> bool:
    """b(-, w -) symmetric for w = theta_0..theta_3 (hence all of W)."""
    if B != B.transpose():
        return False
    for a in range(DIM):
        G = B * cl_action_A(1 << a)
        if G != G.transpose():
            return False
    return True


def theta0_form(B) -> flint.fmpq_mat:
    return B * cl_action_A(1)


def _herm_param(p: int, q: int, imaginary: bool):
    """(index, sign) of entry (p, q) of a Hermitian matrix in the herm_basis coordinates."""
    n = NH
    if not imaginary:
        if p == q:
            return p, 1
        a, b = min(p, q), max(p, q)
        return n + a * n - a * (a + 1) // 2 + (b - a - 1), 1
    if p == q:
        return None, 0
    a, b = min(p, q), max(p, q)
    off = n + n * (n - 1) // 2
    return off + a * n - a * (a + 1) // 2 + (b - a - 1), (1 if p < q else -1)


def herm_to_b_matrix() -> list[list[Fraction]]:
    """Matrix of h -> b_h (even, odd block) in the herm_basis coordinates, built entrywise."""
    tab = _pair_table()
    even = [i for i in range(NE) if a_parity(i) == 0]
    odd = [i for i in range(NE) if a_parity(i) == 1]
    nparam = NH * NH
    rows = []
    for x in even:
        I, j = MONOMIALS[x // NA], x % NA
        for y in odd:
            J, jp = MONOMIALS[y // NA], y % NA
            row = [0] * nparam
            m = tab[(I, J)]
            for al in range(2):
                for be in range(2):
                    mre, mim = m[al][be]
                    p, q = NA * al + j, NA * be + jp
                    if mre:
                        k, s = _herm_param(p, q, False)
                        row[k] += s * mre
                    if mim:
                        k, s = _herm_param(p, q, True)
                        if k is not None:
                            row[k] -= s * mim
            rows.append(row)
    return rows


def herm_to_b_rank() -> int:
    """Rank of h -> b_h on Herm(18), read on the (even, odd) block."""
    return linalg.rank(herm_to_b_matrix(), NH * NH)


def condition_i_dimension() -> int:
    """Dimension of the space of odd symmetric b satisfying (i), via signed union-find.

    Unknowns are b(x, y) for basis x even, y odd. Each condition
    b(x, theta_a y) = b(y, theta_a x) identifies two unknowns up to sign.
    """
    parent: dict = {}
    sign_to_parent: dict = {}
    bad: set = set()

    def find(u):
        if parent.setdefault(u, u) == u:
            sign_to_parent.setdefault(u, 1)
            return u, 1
        r, s = find(parent[u])
        parent[u] = r
        sign_to_parent[u] = sign_to_parent[u] * s
        return r, sign_to_parent[u]

    def union(u, v, s):
        # impose U[u] = s * U[v]
        ru, su = find(u)
        rv, sv = find(v)
        if ru == rv:
            if su != s * sv:
                bad.add(ru)
            return
        parent[ru] = rv
        sign_to_parent[ru] = s * sv * su
        if ru in bad:
            bad.discard(ru)
            bad.add(rv)

    def unknown(x, y):
        """Key and sign for b(x, y) with basis indices x, y of opposite parity."""
        if a_parity(x) == 0:
            return (x, y)
        return (y, x)

    act = [cl_action_A(1 << a) for a in range(DIM)]

    def image(Ma, y):
        for i in range(NE):
            if Ma[i, y] != 0:
                return i, int(Ma[i, y])
        raise AssertionError

    for Ma in act:
        for x in range(NE):
            for y in range(x, NE):
                if a_parity(x) != a_parity(y):
                    continue
                ty, s1 = image(Ma, y)
                tx, s2 = image(Ma, x)
                union(unknown(x, ty), unknown(y, tx), s2 * s1)
    for x in range(NE):
        for y in range(NE):
            if a_parity(x) == 0 and a_parity(y) == 1:
                find((x, y))
    roots = {find(u)[0] for u in parent}
    bad_roots = {find(b)[0] for b in bad}
    return len(roots - bad_roots)


# --- the averaging projection ----------------------------------------------------------
def chi0(mask: int) -> int:
    return -1 if degree(mask & ~1) % 2 else 1


def average_project(B) -> flint.fmpq_mat:
    """b = b' o Pi: b(x, y) = 1/16 sum_I chi_0(theta_I) b'(theta_I x, theta_I y)."""
    out = flint.fmpq_mat(NE, NE)
    for I in MONOMIALS:
        L = cl_action_A(I)
        out = out + (L.transpose() * B * L) * chi0(I)
    return out * flint.fmpq(1, 16)


def lift_even_form(G) -> flint.fmpq_mat:
    """b'(x, y) = b'(y, x) = b''(x, theta_0 y) for x even, y odd, from b'' on the even part.

    ``G`` is indexed by the even A-coordinates in increasing order.
    """
    even = [i for i in range(NE) if a_parity(i) == 0]
    pos = {e: k for k, e in enumerate(even)}
    T0 = cl_action_A(1)
    B = flint.fmpq_mat(NE, NE)
    for x in even:
        for y in range(NE):
            if a_parity(y) == 1:
                v = flint.fmpq(0)
                for z in even:
                    t = T0[z, y]
                    if t != 0:
                        v += G[pos[x], pos[z]] * t
                B[x, y] = v
                B[y, x] = v
    return B


def random_even_form(seed: int) -> flint.fmpq_mat:
    """A seeded positive definite symmetric form on the 72-dimensional even part."""
    rng = random.Random(seed)
    n = NE // 2
    M = linalg.matrix([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
    return M.transpose() * M + linalg.identity(n)


# --- transport to C-coordinates -----------------------------------------------------------
@lru_cache(maxsize=None)
def transport() -> tuple:
    """(T, T^{-1}) with T mapping A-coordinates to C-coordinates."""
    P = projection_to_complement()
    T = flint.fmpq_mat(NE, NE)
    for I in MONOMIALS:
        for j, g in enumerate(A_GENERATORS):
            col = LINDEX[(I, g)]
            for r in range(NE):
                T[r, a_index(I, j)] = P[r, col]
    return T, T.inv()


@lru_cache(maxsize=None)
def c_coords() -> tuple:
    """LCOORDS entries of the C-coordinates, in order."""
    return tuple(LCOORDS[i] for i in complement_indices())


def c_level(k: int) -> list[int]:
    return [i for i, (m, g) in enumerate(c_coords()) if degree(m) <= k and degree(m) % 2 == k % 2]


def c_degree(k: int) -> list[int]:
    return [i for i, (m, g) in enumerate(c_coords()) if degree(m) == k]


@lru_cache(maxsize=None)
def cl_action_C(mask: int) -> flint.fmpq_mat:
    P = projection_to_complement()
    L = left_mult_slashed(mask)
    comp = complement_indices()
    J = flint.fmpq_mat(NL, NE)
    for j, i in enumerate(comp):
        J[i, j] = 1
    return P * L * J


def w_action_C(w) -> flint.fmpq_mat:
    out = flint.fmpq_mat(NE, NE)
    for a in range(DIM):
        if w[a]:
            out = out + cl_action_C(1 << a) * linalg.to_fmpq(w[a])
    return out


def to_c(B_A) -> flint.fmpq_mat:
    _, Tinv = transport()
    return Tinv.transpose() * B_A * Tinv


# --- the exterior-algebra action on E ------------------------------------------------------
@lru_cache(maxsize=None)
def wedge_action_E(a: int, k: int) -> flint.fmpq_mat:
    """theta_a wedge - : E^k -> E^{k+1} in canonical complement coordinates."""
    ideal = default_ideal()
    src = ideal.complement_coords(k)
    tgt = ideal.complement_coords(k + 1) if k < DIM else []
    tidx = {c: i for i, c in enumerate(tgt)}
    M = flint.fmpq_mat(len(tgt), len(src))
    from .clifford import ExtElement

    for j, c in enumerate(src):
        y = ideal.reduce(LElement({c: 1}).wedge_left(ExtElement.gen(a)))
        for key, v in y.terms.items():
            M[tidx[key], j] = linalg.to_fmpq(v.to_fraction())
    return M


def wedge_action_E_w(w, k: int) -> flint.fmpq_mat:
    out = None
    for a in range(DIM):
        if w[a]:
            t = wedge_action_E(a, k) * linalg.to_fmpq(w[a])
            out = t if out is None else out + t
    return out


# --- gauges --------------------------------------------------------------------------------
class NotPositive(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class SplittingFailed(RuntimeError):
    pass


DEFAULT_WITNESSES = (
    (1, 0, 0, 0),
    (Fraction(5, 4), Fraction(3, 4), 0, 0),
    (Fraction(3, 2), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)),
)


def sample_w_plus(seed: int, count: int = 2) -> list[tuple]:
    """Seeded rational future timelike vectors."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        v = [Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(3)]
        w0 = sum(abs(x) for x in v) + Fraction(rng.randint(1, 4), 3)
        out.append((w0, *v))
    return out


def witnesses(seed: int = 0) -> list[tuple]:
    return list(DEFAULT_WITNESSES) + sample_w_plus(seed)


def in_w_plus(w) -> bool:
    return w[0] > 0 and w[0] ** 2 - w[1] ** 2 - w[2] ** 2 - w[3] ** 2 > 0


@dataclass
class GaugeData:
    slashed_basis: dict  # k -> columns (C-coordinates) spanning the slashed E_G^k
    basis: dict  # k -> fmpq_mat, columns span E_G^k in E^k complement coordinates
    B: dict  # k -> fmpq_mat, rows E_G^k basis, columns E^{k+1} coordinates
    b_C: flint.fmpq_mat = field(repr=False)

    def rank(self, k: int) -> int:
        return self.basis[k].ncols()

    def ranks(self) -> tuple:
        return tuple(self.rank(k) for k in range(DIM + 1))

    def elements(self, k: int) -> list[LElement]:
        cs = default_ideal().complement_coords(k)
        G = self.basis[k]
        out = []
        for j in range(G.ncols()):
            out.append(LElement({cs[i]: linalg.from_fmpq(G[i, j]) for i in range(G.nrows())
                                 if G[i, j] != 0}))
        return out

    def symmetric_form(self, k: int, w) -> flint.fmpq_mat:
        """Matrix of B^k(-, w -) on E_G^k."""
        W = wedge_action_E_w(w, k)
        return self.B[k] * W * self.basis[k]

    def to_json(self) -> dict:
        def mat(m):
            return [[str(m[i, j]) for j in range(m.ncols())] for i in range(m.nrows())]

        return {"ranks": list(self.ranks()),
                "bases": {str(k): mat(self.basis[k].transpose()) for k in self.basis},
                "B": {str(k): mat(self.B[k]) for k in self.B}}


def _columns(rows, n):
    M = flint.fmpq_mat(n, len(rows))
    for j, r in enumerate(rows):
        for i, x in enumerate(r):
            if x:
                M[i, j] = linalg.to_fmpq(x)
    return M


def build_gauge(b_A, check_witnesses=None) -> GaugeData:
    """E-slash_G^k = { x in level k : b(x, level k-1) = 0 }, projected to E^k."""
    bC = to_c(b_A)
    slashed, basis, Bk = {}, {}, {}
    for k in range(DIM + 1):
        lk = c_level(k)
        lprev = c_level(k - 1) if k >= 1 else []
        if lprev:
            sub = flint.fmpq_mat(len(lprev), len(lk))
            for i, r in enumerate(lprev):
                for j, c in enumerate(lk):
                    sub[i, j] = bC[r, c]
            ker = linalg.nullspace(sub)
        else:
            ker = [[Fraction(int(i == j)) for i in range(len(lk))] for j in range(len(lk))]
        cols = []
        for v in ker:
            full = [Fraction(0)] * NE
            for x, c in zip(v, lk):
                full[c] = x
            cols.append(full)
        slashed[k] = _columns(cols, NE)
        deg = c_degree(k)
        proj = [[col[c] for c in deg] for col in cols]
        basis[k] = _columns(proj, len(deg))
        if linalg.rank(proj, len(deg)) != len(proj):
            raise SplittingFailed(f"p^{k} is not injective on the gauge subspace")
    for k in range(DIM + 1):
        nxt = c_degree(k + 1) if k < DIM else []
        M = flint.fmpq_mat(slashed[k].ncols(), len(nxt))
        if nxt:
            Xt = slashed[k].transpose() * bC
            for i in range(Xt.nrows()):
                for j, c in enumerate(nxt):
                    M[i, j] = Xt[i, c]
        Bk[k] = M
    g = GaugeData(slashed, basis, Bk, bC)
    for w in check_witnesses or []:
        for k in range(DIM):
            if g.rank(k) == 0:
                continue
            S = g.symmetric_form(k, w)
            if not linalg.is_positive_definite(S):
                raise NotPositive(f"B^{k}(-, w-) not positive definite", witness=w)
    return g


@lru_cache(maxsize=None)
def default_gauge() -> GaugeData:
    return build_gauge(build_b(HermForm.identity()))


# --- verification helpers -----------------------------------------------------------------
def check_splitting_slashed(g: GaugeData, w) -> bool:
    """level k = E-slash_G^k (+) w level(k-1), and E-slash_G^k meets level k-2 trivially."""
    Wc = w_action_C(w)
    for k in range(DIM + 1):
        lk = c_level(k)
        G = [[g.slashed_basis[k][i, j] for i in range(NE)] for j in range(g.slashed_basis[k].ncols())]
        wl = []
        for c in (c_level(k - 1) if k >= 1 else []):
            wl.append([Wc[i, c] for i in range(NE)])
        if linalg.rank(G + wl, NE) != len(lk) or len(G) + len(wl) != len(lk):
            return False
        if any(any(v[i] != 0 for i in range(NE) if i not in set(lk)) for v in G + wl):
            return False
        low = [[Fraction(int(i == c)) for i in range(NE)] for c in (c_level(k - 2) if k >= 2 else [])]
        if low and linalg.intersection_dim(G, low, NE) != 0:
            return False
    return True


def check_splitting_E(g: GaugeData, w) -> bool:
    """E^k = E_G^k (+) w E_G^{k-1} in every degree, and w is injective on E_G."""
    ideal = default_ideal()
    for k in range(DIM + 1):
        n = len(ideal.complement_coords(k))
        G = [[g.basis[k][i, j] for i in range(n)] for j in range(g.rank(k))]
        wl = []
        if k >= 1 and g.rank(k - 1):
            img = wedge_action_E_w(w, k - 1) * g.basis[k - 1]
            wl = [[img[i, j] for i in range(n)] for j in range(img.ncols())]
            if linalg.rank(wl, n) != g.rank(k - 1):
                return False
        if len(G) + len(wl) != n or linalg.rank(G + wl, n) != n:
            return False
    return True


def check_condition_a(g: GaugeData) -> bool:
    for k in range(DIM):
        if g.rank(k) == 0:
            continue
        for a in range(DIM):
            w = [int(i == a) for i in range(DIM)]
            S = g.symmetric_form(k, w)
            if S != S.transpose():
                return False
    return True


def check_condition_b(g: GaugeData, ws) -> list:
    """List of (k, w) pairs where positivity fails."""
    bad = []
    for w in ws:
        for k in range(DIM):
            if g.rank(k) and not linalg.is_positive_definite(g.symmetric_form(k, w)):
                bad.append((k, w))
    return bad


def check_condition_c(g: GaugeData) -> bool:
    ideal = default_ideal()
    for k in range(DIM):
        n = len(ideal.complement_coords(k + 1))
        ker = linalg.nullspace(g.B[k]) if g.rank(k) else [[Fraction(int(i == j)) for i in range(n)]
                                                            for j in range(n)]
        G = [[g.basis[k + 1][i, j] for i in range(n)] for j in range(g.rank(k + 1))]
        if not ker and not G:
            continue
        if not linalg.span_equal(ker, G, n) if (ker and G) else (ker or G):
            return False
    return True


def check_pipeline(g: GaugeData, w) -> bool:
    """B^k(p x, w p y) = b(x, w y) for x, y in E-slash_G^k."""
    Wc = w_action_C(w)
    for k in range(DIM):
        if g.rank(k) == 0:
            continue
        X = g.slashed_basis[k]
        lhs = g.symmetric_form(k, w)
        rhs = X.transpose() * g.b_C * Wc * X
        if lhs != rhs:
            return False
    return True
