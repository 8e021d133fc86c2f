"""Conformal module derivations of W and isotypic decompositions.

A ``CDer`` is stored as 11 scalars over the generators

    0..3   lifted coordinate vector fields d^_0..d^_3 (annihilate the frame)
    4..10  sigma_0, sigma_1, sigma_2, sigma_3, sigma_23, sigma_31, sigma_12

Matrices acting on W follow the convention M[a][b] = theta_a-coefficient of
sigma(theta_b).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import flint

from . import linalg
from .clifford import DIM, ETA, ExtElement, indices
from .scalars import ZERO, Scalar

NGEN = 11
VERT = tuple(range(4, 11))
GEN_NAMES = ("d0", "d1", "d2", "d3", "s0", "s1", "s2", "s3", "s23", "s31", "s12")
SO_W = (5, 6, 7, 8, 9, 10)  # sigma_1, sigma_2, sigma_3, sigma_23, sigma_31, sigma_12
ROTATIONS = (8, 9, 10)
BOOSTS = (5, 6, 7)
_PAIRS = {8: (2, 3), 9: (3, 1), 10: (1, 2)}


@lru_cache(maxsize=None)
def sigma_matrix(g: int) -> tuple[tuple[int, ...], ...]:
    """4x4 integer matrix of a vertical generator."""
    m = [[0] * DIM for _ in range(DIM)]
    if g == 4:
        for a in range(DIM):
            m[a][a] = 1
    elif g in (5, 6, 7):
        i = g - 4
        m[i][0] = 1
        m[0][i] = 1
    elif g in _PAIRS:
        i, j = _PAIRS[g]
        m[i][j] = 1
        m[j][i] = -1
    else:
        raise ValueError(f"generator {g} is not vertical")
    return tuple(tuple(r) for r in m)


def matrix_to_sigma(m) -> list:
    """Coordinates over (sigma_0..sigma_12) of a conformal 4x4 matrix; ValueError if not conformal."""
    c = [m[0][0], m[1][0], m[2][0], m[3][0], m[2][3], m[3][1], m[1][2]]
    rebuilt = [[0] * DIM for _ in range(DIM)]
    for k, g in enumerate(VERT):
        sm = sigma_matrix(g)
        for a in range(DIM):
            for b in range(DIM):
                if sm[a][b]:
                    rebuilt[a][b] = rebuilt[a][b] + sm[a][b] * c[k]
    for a in range(DIM):
        for b in range(DIM):
            if rebuilt[a][b] != m[a][b]:
                raise ValueError("matrix is not in the span of the sigma basis")
    return c


@lru_cache(maxsize=None)
def sigma_bracket(g: int, h: int) -> dict[int, int]:
    """[sigma_g, sigma_h] as integer combination of vertical generators (matrix commutator)."""
    a, b = sigma_matrix(g), sigma_matrix(h)
    comm = [[sum(a[i][k] * b[k][j] - b[i][k] * a[k][j] for k in range(DIM)) for j in range(DIM)]
            for i in range(DIM)]
    c = matrix_to_sigma(comm)
    return {VERT[k]: v for k, v in enumerate(c) if v}


@lru_cache(maxsize=None)
def lam_on_mono(g: int, mask: int) -> dict[int, int]:
    """lambda(sigma_g) as a degree-0 derivation on the monomial theta_mask."""
    m = sigma_matrix(g)
    out: dict[int, int] = {}
    idx = indices(mask)
    for j in idx:
        rest = [i for i in idx if i != j]
        for a in range(DIM):
            c = m[a][j]
            if not c or a in rest:
                continue
            # replace theta_j by theta_a in place and re-sort
            word = [a if i == j else i for i in idx]
            sign = _sort_sign(word)
            new = mask & ~(1 << j) | (1 << a)
            out[new] = out.get(new, 0) + sign * c
    return {k: v for k, v in out.items() if v}


def _sort_sign(word) -> int:
    s = 1
    w = list(word)
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if w[j] > w[j + 1]:
                w[j], w[j + 1] = w[j + 1], w[j]
                s = -s
    return s


def trace(g: int) -> int:
    m = sigma_matrix(g)
    return sum(m[a][a] for a in range(DIM))


# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class FrameVector:
    """Element w_0 theta_0 + ... + w_3 theta_3 of W."""

    components: tuple

    def __init__(self, components):
        object.__setattr__(self, "components", tuple(Scalar(c) for c in components))

    def __getitem__(self, i):
        return self.components[i]

    def inner(self, other: FrameVector) -> Scalar:
        return sum((ETA[a] * self[a] * other[a] for a in range(DIM)), ZERO)

    def in_W_plus(self, points=((0, 0, 0, 0),)) -> bool:
        """w_0 > 0 and w_0^2 - |w|^2 > 0 at each sample point."""
        for p in points:
            v = [c.evaluate(p) for c in self.components]
            if not (v[0] > 0 and v[0] ** 2 - v[1] ** 2 - v[2] ** 2 - v[3] ** 2 > 0):
                return False
        return True

    def as_ext(self) -> ExtElement:
        return ExtElement({1 << a: self[a] for a in range(DIM)})


class CDer:
    """Conformal module derivation: lifted vector field plus vertical sigma part."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        if coeffs is None:
            coeffs = [ZERO] * NGEN
        if isinstance(coeffs, dict):
            full = [ZERO] * NGEN
            for k, v in coeffs.items():
                full[k] = Scalar(v)
            coeffs = full
        if len(coeffs) != NGEN:
            raise ValueError("CDer needs 11 coefficients")
        self.c = tuple(Scalar(v) for v in coeffs)

    @classmethod
    def gen(cls, g: int, coeff=1) -> CDer:
        c = [ZERO] * NGEN
        c[g] = Scalar(coeff)
        return cls(c)

    @classmethod
    def from_parts(cls, vector_field, vertical) -> CDer:
        return cls(list(vector_field) + list(vertical))

    @property
    def vector_field(self):
        return self.c[:4]

    @property
    def vertical(self):
        return self.c[4:]

    def vertical_matrix(self):
        m = [[ZERO] * DIM for _ in range(DIM)]
        for k, g in enumerate(VERT):
            coef = self.c[g]
            if coef.is_zero():
                continue
            sm = sigma_matrix(g)
            for a in range(DIM):
                for b in range(DIM):
                    if sm[a][b]:
                        m[a][b] = m[a][b] + sm[a][b] * coef
        return m

    def __add__(self, other):
        return CDer([a + b for a, b in zip(self.c, other.c)])

    def __sub__(self, other):
        return CDer([a - b for a, b in zip(self.c, other.c)])

    def __neg__(self):
        return CDer([-a for a in self.c])

    def scale(self, s):
        return CDer([s * a for a in self.c])

    __rmul__ = scale

    def __eq__(self, other):
        return isinstance(other, CDer) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def is_zero(self):
        return all(a.is_zero() for a in self.c)

    def is_vertical(self):
        return all(a.is_zero() for a in self.c[:4])

    def trace(self) -> Scalar:
        m = self.vertical_matrix()
        return sum((m[a][a] for a in range(DIM)), ZERO)

    # -- action ------------------------------------------------------------
    def on_scalar(self, f) -> Scalar:
        f = Scalar(f)
        return sum((self.c[mu] * f.diff(mu) for mu in range(4) if not self.c[mu].is_zero()), ZERO)

    def on_frame(self, w: FrameVector) -> FrameVector:
        m = self.vertical_matrix()
        out = []
        for a in range(DIM):
            v = self.on_scalar(w[a])
            for b in range(DIM):
                if not m[a][b].is_zero():
                    v = v + m[a][b] * w[b]
            out.append(v)
        return FrameVector(out)

    def on_ext(self, w: ExtElement) -> ExtElement:
        """lambda(self): the degree-0 derivation of the exterior algebra."""
        out: dict = {}
        for mask, f in w.coeffs.items():
            df = self.on_scalar(f)
            if not df.is_zero():
                out[mask] = out.get(mask, ZERO) + df
            for g in VERT:
                coef = self.c[g]
                if coef.is_zero():
                    continue
                for new, s in lam_on_mono(g, mask).items():
                    out[new] = out.get(new, ZERO) + s * coef * f
        return ExtElement(out)

    def apply(self, target):
        if isinstance(target, FrameVector):
            return self.on_frame(target)
        if isinstance(target, ExtElement):
            return self.on_ext(target)
        return self.on_scalar(target)

    def conformal_factor(self) -> Scalar:
        """The f with d<x,y> = <dx,y> + <x,dy> + f<x,y>; ValueError if none exists."""
        m = self.vertical_matrix()
        # <theta_a, theta_b> = eta_a delta_ab is constant, so the condition reads
        # 0 = eta_a m[a][b] + eta_b m[b][a] + f eta_a delta_ab
        f = -2 * m[0][0]
        for a in range(DIM):
            for b in range(DIM):
                lhs = ETA[a] * m[a][b] + ETA[b] * m[b][a]
                rhs = -f * ETA[a] if a == b else ZERO
                if lhs != rhs:
                    raise ValueError("not a conformal derivation")
        return f

    def __repr__(self):
        terms = [f"({v}){GEN_NAMES[g]}" for g, v in enumerate(self.c) if not v.is_zero()]
        return "CDer(" + (" + ".join(terms) or "0") + ")"


def cder_apply(d: CDer, target):
    return d.apply(target)


def bracket_cder(a: CDer, b: CDer) -> CDer:
    """Commutator of conformal derivations."""
    vf = []
    for mu in range(4):
        v = ZERO
        for nu in range(4):
            if not a.c[nu].is_zero():
                v = v + a.c[nu] * b.c[mu].diff(nu)
            if not b.c[nu].is_zero():
                v = v - b.c[nu] * a.c[mu].diff(nu)
        vf.append(v)
    vert = [ZERO] * 7
    for k, g in enumerate(VERT):
        vert[k] = a.on_scalar(b.c[g]) - b.on_scalar(a.c[g])
    for g in VERT:
        if a.c[g].is_zero():
            continue
        for h in VERT:
            if b.c[h].is_zero():
                continue
            for k, s in sigma_bracket(g, h).items():
                vert[k - 4] = vert[k - 4] + s * a.c[g] * b.c[h]
    return CDer(vf + vert)


def so_w_basis() -> list[CDer]:
    return [CDer.gen(g) for g in SO_W]


# --- isotypic decomposition --------------------------------------------------
class NotARepresentation(ValueError):
    pass


@dataclass(frozen=True)
class IsotypicLabel:
    p: Fraction
    q: Fraction

    @property
    def paired(self) -> bool:
        return self.p != self.q

    @property
    def dimension(self) -> int:
        d = int((2 * self.p + 1) * (2 * self.q + 1))
        return 2 * d if self.paired else d

    def __str__(self):
        def h(x):
            return str(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        if self.paired:
            return f"({h(self.p)},{h(self.q)})+({h(self.q)},{h(self.p)})"
        return f"({h(self.p)},{h(self.p)})"


def label(p, q) -> IsotypicLabel:
    p, q = Fraction(p), Fraction(q)
    return IsotypicLabel(max(p, q), min(p, q))


def _as_mats(rep):
    return [m if isinstance(m, flint.fmpq_mat) else linalg.matrix(m) for m in rep]


def check_representation(rep) -> None:
    mats = dict(zip(SO_W, _as_mats(rep)))
    n = mats[SO_W[0]].nrows()
    for g in SO_W:
        for h in SO_W:
            lhs = mats[g] * mats[h] - mats[h] * mats[g]
            rhs = flint.fmpq_mat(n, n)
            for k, s in sigma_bracket(g, h).items():
                rhs = rhs + mats[k] * s
            if lhs != rhs:
                raise NotARepresentation(f"commutator [{GEN_NAMES[g]},{GEN_NAMES[h]}] fails")


def _casimirs(rep, orientation: int = 1):
    """Real and imaginary parts of the two su(2) Casimirs, normalized to p(p+1)."""
    mats = dict(zip(SO_W, _as_mats(rep)))
    M = [mats[g] for g in ROTATIONS]
    N = [mats[g] for g in BOOSTS]
    # structure constant of the rotations: [M1, M2] = c M3
    c = sigma_bracket(ROTATIONS[0], ROTATIONS[1]).get(ROTATIONS[2], 0)
    assert c in (1, -1)
    half = flint.fmpq(1, 2)

    def cas(sign):
        # A_k = (M_k + sign*i N_k)/2 ; Casimir -sum A_k^2  (c^2 = 1)
        re = None
        im = None
        for Mk, Nk in zip(M, N):
            P, Q = Mk * half, Nk * (half * sign)
            r = -(P * P - Q * Q)
            i = -(P * Q + Q * P)
            re = r if re is None else re + r
            im = i if im is None else im + i
        return re, im

    return cas(orientation), cas(-orientation)


def _mat_rows(m):
    return [[m[i, j] for j in range(m.ncols())] for i in range(m.nrows())]


def isotypic_decompose(rep, orientation: int = 1, max_spin: Fraction = Fraction(3)):
    """Decompose a finite representation of so(W) into real isotypic components.

    ``rep`` lists the matrices of (sigma_1, sigma_2, sigma_3, sigma_23, sigma_31,
    sigma_12). Returns a list of (IsotypicLabel, basis rows) whose bases together
    span the space.
    """
    check_representation(rep)
    mats = _as_mats(rep)
    n = mats[0].nrows()
    (ar, ai), (br, bi) = _casimirs(rep, orientation)
    # commuting check for the two halves
    h = flint.fmpq(1, 2)
    A = [(mats[3 + k] * h, mats[k] * (h * orientation)) for k in range(3)]
    B = [(mats[3 + k] * h, mats[k] * (-h * orientation)) for k in range(3)]
    for (p1, q1) in A:
        for (p2, q2) in B:
            re = p1 * p2 - q1 * q2 - (p2 * p1 - q2 * q1)
            im = p1 * q2 + q1 * p2 - (p2 * q1 + q2 * p1)
            if re != flint.fmpq_mat(n, n) or im != flint.fmpq_mat(n, n):
                raise NotARepresentation("the two su(2) halves do not commute")
    spins = [Fraction(k, 2) for k in range(int(2 * max_spin) + 1)]
    complex_parts = {}
    found = 0
    for p in spins:
        for q in spins:
            ep, eq = linalg.to_fmpq(p * (p + 1)), linalg.to_fmpq(q * (q + 1))
            re_rows = _mat_rows(ar - linalg.identity(n) * ep) + _mat_rows(br - linalg.identity(n) * eq)
            im_rows = _mat_rows(ai) + _mat_rows(bi)
            vecs = linalg.complex_nullspace(re_rows, im_rows, n)
            if vecs:
                complex_parts[(p, q)] = vecs
                found += len(vecs)
    if found != n:
        raise NotARepresentation(f"eigenspaces cover {found} of {n} dimensions")
    out = []
    done = set()
    for (p, q) in sorted(complex_parts):
        key = (max(p, q), min(p, q))
        if key in done:
            continue
        done.add(key)
        vecs = list(complex_parts[(p, q)])
        if p != q:
            vecs += complex_parts.get((q, p), [])
        rows = [list(re) for re, im in vecs] + [list(im) for re, im in vecs]
        basis = linalg.span_basis(rows, n)
        out.append((label(p, q), basis))
    return out


def isotypic_projectors(components, n: int):
    """Projection matrices onto each component along the others."""
    allrows = [r for _, b in components for r in b]
    if len(allrows) != n:
        raise NotARepresentation("components do not form a direct sum")
    P = linalg.matrix(allrows).transpose()  # columns = basis vectors
    Pinv = P.inv()
    projs = []
    off = 0
    for lab, b in components:
        D = flint.fmpq_mat(n, n)
        for i in range(off, off + len(b)):
            D[i, i] = 1
        projs.append((lab, P * D * Pinv))
        off += len(b)
    return projs


def rep_on_wedge(k: int):
    """so(W) action on the degree-k part of the exterior algebra (constant fiber)."""
    from .clifford import MONOS_OF_DEGREE

    monos = MONOS_OF_DEGREE[k]
    idx = {m: i for i, m in enumerate(monos)}
    mats = []
    for g in SO_W:
        m = [[0] * len(monos) for _ in monos]
        for j, mask in enumerate(monos):
            for new, s in lam_on_mono(g, mask).items():
                m[idx[new]][j] += s
        mats.append(m)
    return mats


def rep_adjoint():
    """Adjoint action of so(W) on itself."""
    idx = {g: i for i, g in enumerate(SO_W)}
    mats = []
    for g in SO_W:
        m = [[0] * 6 for _ in range(6)]
        for j, h in enumerate(SO_W):
            for k, s in sigma_bracket(g, h).items():
                m[idx[k]][j] += s
        mats.append(m)
    return mats
