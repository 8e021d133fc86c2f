"""Exterior and Clifford algebras on the frame theta_0..theta_3.

Monomials are bitmasks over {0,1,2,3}. The inner product is diag(-1,1,1,1) and
the Clifford relation is vw + wv = -2<v,w>, hence theta_0^2 = 1 and
theta_i^2 = -1 for i >= 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import flint

from . import linalg
from .scalars import ZERO, CScalar, Scalar

DIM = 4
ETA = (-1, 1, 1, 1)
# theta_k * theta_k in Cl
CL_SQUARE = tuple(-e for e in ETA)


def _mono_key(mask: int):
    bits = [i for i in range(DIM) if mask >> i & 1]
    return (len(bits), bits)


MONOMIALS: tuple[int, ...] = tuple(sorted(range(1 << DIM), key=_mono_key))
INDEX = {m: i for i, m in enumerate(MONOMIALS)}
NMON = len(MONOMIALS)


def degree(mask: int) -> int:
    return bin(mask).count("1")


def indices(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(DIM) if mask >> i & 1)


def mask_of(idx) -> int:
    m = 0
    for i in idx:
        m |= 1 << i
    return m


def mono_name(mask: int) -> str:
    if mask == 0:
        return "1"
    return "θ" + "".join(str(i) for i in indices(mask))


MONOS_OF_DEGREE = {k: [m for m in MONOMIALS if degree(m) == k] for k in range(DIM + 1)}


def _reorder_sign(a: int, b: int) -> int:
    """Sign from moving the generators of b past those of a (pairs i in a, j in b, i > j)."""
    s = 0
    for j in indices(b):
        s += degree(a >> (j + 1))
    return -1 if s & 1 else 1


@lru_cache(maxsize=None)
def wedge_sign(a: int, b: int) -> int:
    if a & b:
        return 0
    return _reorder_sign(a, b)


@lru_cache(maxsize=None)
def cl_sign(a: int, b: int) -> int:
    s = _reorder_sign(a, b)
    for k in indices(a & b):
        s *= CL_SQUARE[k]
    return s


def transpose_sign(mask: int) -> int:
    k = degree(mask)
    return -1 if (k * (k - 1) // 2) & 1 else 1


# ---------------------------------------------------------------------------
class _Graded:
    """Shared storage: sparse map mask -> coefficient."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for m, v in coeffs.items():
                v = _as_coeff(v)
                if not _is_zero(v):
                    c[m] = v
        self.coeffs = c

    @classmethod
    def monomial(cls, mask: int, coeff=1):
        return cls({mask: coeff})

    @classmethod
    def gen(cls, i: int, coeff=1):
        return cls({1 << i: coeff})

    def __getitem__(self, mask):
        return self.coeffs.get(mask, ZERO)

    def _combine(self, other, sign):
        c = dict(self.coeffs)
        for m, v in other.coeffs.items():
            c[m] = c[m] + sign * v if m in c else sign * v
        return type(self)(c)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return type(self)({m: -v for m, v in self.coeffs.items()})

    def scale(self, s):
        return type(self)({m: s * v for m, v in self.coeffs.items()})

    def __rmul__(self, s):
        return self.scale(s)

    def __eq__(self, other):
        if not isinstance(other, _Graded):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def degrees(self) -> set[int]:
        return {degree(m) for m in self.coeffs}

    def parity(self) -> int | None:
        ps = {degree(m) % 2 for m in self.coeffs}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def filtration(self) -> int:
        return max((degree(m) for m in self.coeffs), default=0)

    def part(self, k: int):
        return type(self)({m: v for m, v in self.coeffs.items() if degree(m) == k})

    def vector(self) -> list:
        return [self[m] for m in MONOMIALS]

    def to_json(self) -> list:
        return [[mono_name(m), str(self.coeffs[m])] for m in MONOMIALS if m in self.coeffs]

    @classmethod
    def from_json(cls, data):
        names = {mono_name(m): m for m in MONOMIALS}
        return cls({names[n]: Scalar(c) for n, c in data})

    def __repr__(self):
        if not self.coeffs:
            return f"{type(self).__name__}(0)"
        terms = " + ".join(f"({self.coeffs[m]}){mono_name(m)}" for m in MONOMIALS if m in self.coeffs)
        return f"{type(self).__name__}({terms})"


def _as_coeff(v):
    if isinstance(v, (Scalar, CScalar)):
        return v
    return Scalar(v)


def _is_zero(v) -> bool:
    return v.is_zero()


class ExtElement(_Graded):
    """Element of the exterior algebra."""

    __slots__ = ()

    def wedge(self, other: ExtElement) -> ExtElement:
        out: dict = {}
        for a, x in self.coeffs.items():
            for b, y in other.coeffs.items():
                s = wedge_sign(a, b)
                if s:
                    v = x * y if s > 0 else -(x * y)
                    out[a | b] = out[a | b] + v if (a | b) in out else v
        return ExtElement(out)

    __xor__ = wedge

    def interior(self, w) -> ExtElement:
        """i_w with i_w(v) = -<v, w>; w given by 4 coefficients over theta."""
        out: dict = {}
        for a, x in self.coeffs.items():
            idx = indices(a)
            for pos, j in enumerate(idx):
                c = w[j] * ETA[j]
                if isinstance(c, int) and c == 0:
                    continue
                sign = -1 if pos & 1 else 1
                rest = a & ~(1 << j)
                v = -sign * (x * c)
                out[rest] = out[rest] + v if rest in out else v
        return ExtElement(out)

    def clifford_action(self, w) -> ExtElement:
        """c_w = e_w + i_w."""
        wv = ExtElement({1 << j: w[j] for j in range(DIM) if not _zero_like(w[j])})
        return wv.wedge(self) + self.interior(w)


def _zero_like(c) -> bool:
    if isinstance(c, (Scalar, CScalar)):
        return c.is_zero()
    return c == 0


class MultiVector(_Graded):
    """Element of Cl(W)."""

    __slots__ = ()

    def __mul__(self, other):
        if not isinstance(other, MultiVector):
            return self.scale(other)
        out: dict = {}
        for a, x in self.coeffs.items():
            for b, y in other.coeffs.items():
                s = cl_sign(a, b)
                v = x * y if s > 0 else -(x * y)
                m = a ^ b
                out[m] = out[m] + v if m in out else v
        return MultiVector(out)

    def transpose(self) -> MultiVector:
        return MultiVector({m: v if transpose_sign(m) > 0 else -v for m, v in self.coeffs.items()})

    T = property(transpose)

    def even(self) -> MultiVector:
        return MultiVector({m: v for m, v in self.coeffs.items() if degree(m) % 2 == 0})

    def odd(self) -> MultiVector:
        return MultiVector({m: v for m, v in self.coeffs.items() if degree(m) % 2 == 1})

    def level(self) -> int:
        """Filtration level: smallest k with self in Cl^{<|k} (needs homogeneous parity)."""
        f = self.filtration()
        p = self.parity()
        if p is None:
            raise ValueError("mixed parity element has no single level")
        return f if f % 2 == p else f + 1


def clifford_mul(a: MultiVector, b: MultiVector) -> MultiVector:
    return a * b


def transpose(a: MultiVector) -> MultiVector:
    return a.transpose()


def cl_to_ext(a: MultiVector) -> ExtElement:
    return ExtElement(a.coeffs)


def ext_to_cl(a: ExtElement) -> MultiVector:
    return MultiVector(a.coeffs)


ONE_CL = MultiVector({0: 1})
THETA = tuple(MultiVector.gen(i) for i in range(DIM))
THETA_EXT = tuple(ExtElement.gen(i) for i in range(DIM))


# --- constant tables used by the heavy linear algebra -----------------------
@lru_cache(maxsize=None)
def left_mult_matrix(mask: int) -> tuple[tuple[int, ...], ...]:
    """Integer matrix of x -> theta_mask * x in the MONOMIALS basis (column = input)."""
    m = [[0] * NMON for _ in range(NMON)]
    for j, b in enumerate(MONOMIALS):
        m[INDEX[mask ^ b]][j] = cl_sign(mask, b)
    return tuple(tuple(r) for r in m)


@lru_cache(maxsize=None)
def right_mult_matrix(mask: int) -> tuple[tuple[int, ...], ...]:
    m = [[0] * NMON for _ in range(NMON)]
    for j, b in enumerate(MONOMIALS):
        m[INDEX[b ^ mask]][j] = cl_sign(b, mask)
    return tuple(tuple(r) for r in m)


# --- finite Clifford group ---------------------------------------------------
@dataclass(frozen=True, order=True)
class CliffordGroupElt:
    sign: int
    monomial: int

    def __mul__(self, other: CliffordGroupElt) -> CliffordGroupElt:
        return CliffordGroupElt(self.sign * other.sign * cl_sign(self.monomial, other.monomial),
                                self.monomial ^ other.monomial)

    def parity(self) -> int:
        return degree(self.monomial) % 2

    def as_multivector(self) -> MultiVector:
        return MultiVector({self.monomial: self.sign})


def clifford_group() -> list[CliffordGroupElt]:
    """Closure of {+-1, theta_i} under multiplication."""
    gens = [CliffordGroupElt(-1, 0)] + [CliffordGroupElt(1, 1 << i) for i in range(DIM)]
    seen = {CliffordGroupElt(1, 0)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for f in frontier:
            for g in gens:
                h = f * g
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return sorted(seen, key=lambda e: (INDEX[e.monomial], -e.sign))


def character(i: int, f: CliffordGroupElt) -> int:
    """chi_i(f) defined by f theta_i = chi_i(f) theta_i f."""
    e = CliffordGroupElt(1, 1 << i)
    lhs, rhs = f * e, e * f
    assert lhs.monomial == rhs.monomial
    return lhs.sign * rhs.sign


# --- S^2 Cl and the invariant average ----------------------------------------
class TensorCl:
    """Element of Cl (x) Cl as a dense 16x16 array of coefficients.

    ``graded`` selects the multiplication rule: (a(x)b)(c(x)d) = +-(ac)(x)(bd) with
    the Koszul sign when graded, without it otherwise.
    """

    def __init__(self, coeffs=None):
        self.c: dict[tuple[int, int], object] = {}
        for k, v in (coeffs or {}).items():
            if not _zero_like(v):
                self.c[k] = v

    @classmethod
    def pure(cls, a: MultiVector, b: MultiVector, w=1):
        out = {}
        for ma, x in a.coeffs.items():
            for mb, y in b.coeffs.items():
                out[(ma, mb)] = out.get((ma, mb), 0) + w * x * y
        return cls(out)

    def __add__(self, other):
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out[k] + v if k in out else v
        return TensorCl(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s):
        return TensorCl({k: s * v for k, v in self.c.items()})

    def mul(self, other: TensorCl, graded: bool = False) -> TensorCl:
        out: dict = {}
        for (a, b), x in self.c.items():
            for (c, d), y in other.c.items():
                s = cl_sign(a, c) * cl_sign(b, d)
                if graded and (degree(b) & 1) and (degree(c) & 1):
                    s = -s
                k = (a ^ c, b ^ d)
                v = s * (x * y)
                out[k] = out[k] + v if k in out else v
        return TensorCl(out)

    def swap(self) -> TensorCl:
        return TensorCl({(b, a): v for (a, b), v in self.c.items()})

    def is_symmetric(self) -> bool:
        return self == self.swap()

    def parity(self) -> int | None:
        ps = {(degree(a) + degree(b)) % 2 for (a, b) in self.c}
        return ps.pop() if len(ps) == 1 else (0 if not ps else None)

    def __eq__(self, other):
        return isinstance(other, TensorCl) and self.c == other.c

    def is_zero(self) -> bool:
        return not self.c

    def __repr__(self):
        return f"TensorCl({len(self.c)} terms)"


@dataclass
class AverageElt:
    terms: list  # (weight, left MultiVector, right MultiVector)

    def tensor(self) -> TensorCl:
        t = TensorCl()
        for w, a, b in self.terms:
            t = t + TensorCl.pure(a, b, w)
        return t


def group_from_generators(gens: list[MultiVector]) -> list[MultiVector]:
    """Finite group generated by -1 and the given (orthonormal) vectors, as multivectors."""
    start = [ONE_CL]
    seen = {ONE_CL}
    frontier = list(start)
    pool = [ONE_CL.scale(-1)] + list(gens)
    while frontier:
        nxt = []
        for f in frontier:
            for g in pool:
                h = f * g
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return list(seen)


def invariant_average(generators: list[MultiVector] | None = None) -> AverageElt:
    """pi = (1/|F|) sum_f chi_0(f) f (x) f for the group F of the given frame."""
    gens = list(generators) if generators is not None else list(THETA)
    group = group_from_generators(gens)
    e0 = gens[0]
    terms = []
    n = len(group)
    for f in group:
        # chi_0(f) from f e0 = chi e0 f
        lhs, rhs = f * e0, e0 * f
        chi = 1 if lhs == rhs else -1
        assert chi == 1 or lhs == -rhs
        terms.append((Fraction(chi, n), f, f))
    return AverageElt(terms)


# --- Z2-graded modules and freeness ------------------------------------------
class NotAModule(ValueError):
    pass


@dataclass
class FreenessResult:
    free: bool
    rank: int
    basis: list  # even generators of a free basis (empty when not free)
    t_valid: bool | None


def _mat(m):
    return m if isinstance(m, flint.fmpq_mat) else linalg.matrix(m)


def _check_module(gens, parity):
    n = gens[0].nrows()
    one = linalg.identity(n)
    for i in range(DIM):
        for j in range(DIM):
            anti = gens[i] * gens[j] + gens[j] * gens[i]
            target = one * (-2 * ETA[i]) if i == j else flint.fmpq_mat(n, n)
            if anti != target:
                raise NotAModule(f"relation fails for generators {i},{j}")
        if gens[i] * parity != -(parity * gens[i]):
            raise NotAModule(f"generator {i} is not odd")
    if parity * parity != one:
        raise NotAModule("grading operator does not square to 1")


def _word_action(gens, mask):
    n = gens[0].nrows()
    out = linalg.identity(n)
    for i in indices(mask):
        out = out * gens[i]
    return out


def check_free_module(generators, parity, T=None, seed: int = 0) -> FreenessResult:
    """Decide whether a Z2-graded Cl-module is free, constructively.

    ``generators`` are the matrices of theta_0..theta_3, ``parity`` the grading
    operator (+1 on even, -1 on odd). A free basis is searched for among
    even vectors: m generates a free summand iff Cl^even m has dimension 8.
    When ``T`` is given, the relations T even, T^2 = 1, T m T = P(m) are
    checked and reported in ``t_valid``.
    """
    import random

    gens = [_mat(g) for g in generators]
    par = _mat(parity)
    _check_module(gens, par)
    n = par.nrows()
    one = linalg.identity(n)
    t_valid = None
    if T is not None:
        Tm = _mat(T)
        t_valid = Tm * par == par * Tm and Tm * Tm == one
        for i in range(DIM):
            want = gens[i] if i == 0 else -gens[i]
            t_valid = t_valid and Tm * gens[i] * Tm == want
    even_basis = linalg.nullspace(par - one)
    even_words = [_word_action(gens, m) for m in MONOMIALS if degree(m) % 2 == 0]
    if len(even_basis) % 8 != 0 or 2 * len(even_basis) != n:
        return FreenessResult(False, 0, [], t_valid)
    rng = random.Random(seed)
    chosen_span: list = []
    basis = []
    attempts = 0
    while len(chosen_span) < len(even_basis) and attempts < 200:
        attempts += 1
        v = [sum(rng.randint(-3, 3) * b[i] for b in even_basis) for i in range(n)]
        col = linalg.matrix([[x] for x in v])
        orbit = [linalg.to_rows((w * col).transpose())[0] for w in even_words]
        if linalg.rank(orbit, n) != 8:
            continue
        if linalg.rank(chosen_span + orbit, n) == len(chosen_span) + 8:
            chosen_span += orbit
            basis.append(v)
    free = len(chosen_span) == len(even_basis)
    return FreenessResult(free, len(basis) if free else 0, basis if free else [], t_valid)


def regular_module():
    """Cl acting on itself by left multiplication, with parity and conjugation by theta_0."""
    gens = [linalg.matrix(left_mult_matrix(1 << i)) for i in range(DIM)]
    parity = linalg.matrix([[(1 if degree(MONOMIALS[i]) % 2 == 0 else -1) if i == j else 0
                             for j in range(NMON)] for i in range(NMON)])
    e0 = 1
    L, R = linalg.matrix(left_mult_matrix(e0)), linalg.matrix(right_mult_matrix(e0))
    T = L * R
    return gens, parity, T


def direct_sum(*mods):
    """Block direct sum of (gens, parity, T) module triples."""
    def block(ms):
        n = sum(m.nrows() for m in ms)
        out = flint.fmpq_mat(n, n)
        off = 0
        for m in ms:
            for i in range(m.nrows()):
                for j in range(m.ncols()):
                    out[off + i, off + j] = m[i, j]
            off += m.nrows()
        return out
    gens = [block([m[0][i] for m in mods]) for i in range(DIM)]
    parity = block([m[1] for m in mods])
    Ts = [m[2] for m in mods]
    T = block(Ts) if all(t is not None for t in Ts) else None
    return gens, parity, T


def half_module():
    """The left ideal Cl*e for the even idempotent e = (1 + theta_0 theta_1)/2.

    A Z2-graded submodule of Cl of real dimension 8; its even part has
    dimension 4, so it is not free.
    """
    u = MultiVector({mask_of((0, 1)): 1})
    assert u * u == ONE_CL
    e = (ONE_CL + u).scale(Fraction(1, 2))
    # right ideal action: the left module Cl*e
    rows = []
    for m in MONOMIALS:
        v = MultiVector({m: 1}) * e
        rows.append([v[mm].to_fraction() for mm in MONOMIALS])
    basis = linalg.span_basis(rows, NMON)
    k = len(basis)
    B = linalg.matrix(basis).transpose()  # columns span the submodule

    def restrict(op):
        # op * B = B * X, solve X by least squares on the pivot rows
        img = op * B
        X = flint.fmpq_mat(k, k)
        _, piv = linalg.rref(linalg.matrix(basis))
        for c in range(k):
            for r, p in enumerate(piv):
                X[r, c] = img[p, c]
        assert B * X == img
        return X

    gens_full, parity_full, _ = regular_module()
    gens = [restrict(g) for g in gens_full]
    parity = restrict(parity_full)
    return gens, parity, None
