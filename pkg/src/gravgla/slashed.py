"""Filtered Clifford modules: Cl (x) CDerEnd(W), the module P, the morphism f and its kernel.

Everything here lives on the constant fiber. A slashed element is a vector of
176 = 16 * 11 rationals indexed by (Clifford monomial, generator) in the order
``LCOORDS``. Level <|k consists of monomials of degree <= k with the parity of k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import flint

from . import linalg
from .clifford import (DIM, INDEX, MONOMIALS, NMON, cl_sign, degree, left_mult_matrix,
                       wedge_sign)
from .frames import NGEN, SO_W, sigma_matrix, trace
from .glaoid import coords, default_ideal, ideal_basis_explicit

LCOORDS = tuple((m, g) for m in MONOMIALS for g in range(NGEN))
LINDEX = {c: i for i, c in enumerate(LCOORDS)}
NL = len(LCOORDS)
A_GENERATORS = (0, 1, 2, 3, 4, 5, 6, 7, 8)  # d^_0..d^_3, sigma_0..sigma_3, sigma_23


def in_level(mask: int, k: int) -> bool:
    return degree(mask) <= k and degree(mask) % 2 == k % 2


def cl_level(k: int) -> list[int]:
    return [m for m in MONOMIALS if in_level(m, k)]


def level_coords(k: int) -> list[int]:
    """Indices into LCOORDS spanning the level <|k subspace."""
    return [i for i, (m, g) in enumerate(LCOORDS) if in_level(m, k)]


# --- the module P --------------------------------------------------------------
# coordinates: ("C", mu, mask) value of delta on x^mu; ("W", a, mask) value on theta_a;
# ("O", mask) value on the volume form.
PCOORDS = tuple([("C", mu, m) for mu in range(4) for m in MONOMIALS]
                + [("W", a, m) for a in range(DIM) for m in MONOMIALS]
                + [("O", m) for m in MONOMIALS])
PINDEX = {c: i for i, c in enumerate(PCOORDS)}
NP = len(PCOORDS)


def p_level_coords(k: int) -> list[int]:
    out = []
    for i, c in enumerate(PCOORDS):
        if c[0] == "W":
            ok = in_level(c[2], k + 1)
        else:
            ok = in_level(c[-1], k)
        if ok:
            out.append(i)
    return out


@lru_cache(maxsize=None)
def f_matrix(graded: bool = False) -> flint.fmpq_mat:
    """Matrix of f (columns: LCOORDS, rows: PCOORDS).

    With ``graded`` the Clifford product is replaced by the wedge product, which
    gives Gr f.
    """
    M = flint.fmpq_mat(NP, NL)
    prod = wedge_sign if graded else cl_sign
    for j, (w, g) in enumerate(LCOORDS):
        if g < 4:
            M[PINDEX[("C", g, w)], j] = 1
            continue
        sm = sigma_matrix(g)
        for a in range(DIM):
            for b in range(DIM):
                if sm[b][a]:
                    s = prod(w, 1 << b)
                    if s:
                        M[PINDEX[("W", a, w ^ (1 << b))], j] += s * sm[b][a]
        tr = trace(g)
        if tr:
            M[PINDEX[("O", w)], j] += tr
    return M


def _submatrix(M, rows, cols):
    out = flint.fmpq_mat(len(rows), len(cols))
    for i, r in enumerate(rows):
        for j, c in enumerate(cols):
            out[i, j] = M[r, c]
    return out


def f_morphism(v) -> list[Fraction]:
    """Apply f to a slashed element given as a 176-vector."""
    col = linalg.matrix([[x] for x in v])
    return [linalg.from_fmpq(x) for x in (f_matrix() * col).entries()]


def rank_tables() -> dict:
    F = f_matrix()
    out = {"Lslash": [], "Pslash": [], "image": [], "Islash": []}
    for k in range(5):
        lc, pc = level_coords(k), p_level_coords(k)
        sub = _submatrix(F, list(range(NP)), lc)
        img = linalg.rank(sub)
        # image lands inside P^{<|k}
        outside = [i for i in range(NP) if i not in set(pc)]
        assert all(x == 0 for x in _submatrix(F, outside, lc).entries())
        out["Lslash"].append(len(lc))
        out["Pslash"].append(len(pc))
        out["image"].append(img)
        out["Islash"].append(len(lc) - img)
    out["Islash_total"] = NL - linalg.rank(F)
    out["f_rank"] = linalg.rank(F)
    return out


def auxiliary_table() -> dict:
    """Ranks of Cl^{<|k} (x) so(W) -> Hom(W, Cl^{<|k+1}), w -> omega delta(w)."""
    left, right, image = [], [], []
    for k in range(5):
        src = [(m, g) for m in cl_level(k) for g in SO_W]
        tgt = [(a, m) for a in range(DIM) for m in cl_level(k + 1)]
        tidx = {t: i for i, t in enumerate(tgt)}
        M = [[0] * len(src) for _ in tgt]
        for j, (w, g) in enumerate(src):
            sm = sigma_matrix(g)
            for a in range(DIM):
                for b in range(DIM):
                    if sm[b][a]:
                        M[tidx[(a, w ^ (1 << b))]][j] += cl_sign(w, 1 << b) * sm[b][a]
        left.append(len(src))
        right.append(len(tgt))
        image.append(linalg.rank(M, len(src)))
    return {"left": left, "right": right, "image": image,
            "surjective": [i == r for i, r in zip(image, right)]}


# --- the kernel of f ---------------------------------------------------------------
@lru_cache(maxsize=None)
def _islash_level(k: int) -> tuple:
    lc = level_coords(k)
    sub = _submatrix(f_matrix(), list(range(NP)), lc)
    ker = linalg.nullspace(sub)
    rows = []
    for v in ker:
        full = [Fraction(0)] * NL
        for x, i in zip(v, lc):
            full[i] = x
        rows.append(tuple(full))
    return tuple(rows)


def slashed_ideal(k: int | None = None) -> list[list[Fraction]]:
    """Basis of the kernel of f at level <|k, or of the whole kernel when k is None."""
    if k is None:
        return linalg.nullspace(f_matrix())
    return [list(r) for r in _islash_level(k)]


def explicit_basis_slashed() -> list[list[Fraction]]:
    """The degree-2 ideal generators read inside level <|2."""
    out = []
    for el in ideal_basis_explicit():
        v = [Fraction(0)] * NL
        for (m, g), c in el.terms.items():
            v[LINDEX[(m, g)]] = c.to_fraction()
        out.append(v)
    return out


def left_mult_slashed(mask: int) -> flint.fmpq_mat:
    """theta_mask acting on the Cl factor of Cl (x) CDerEnd(W)."""
    L = left_mult_matrix(mask)
    M = flint.fmpq_mat(NL, NL)
    for j, (b, g) in enumerate(LCOORDS):
        for i in range(NMON):
            if L[i][INDEX[b]]:
                M[LINDEX[(MONOMIALS[i], g)], j] = L[i][INDEX[b]]
    return M


def cl_span(rows) -> list[list[Fraction]]:
    """Clifford submodule generated by the given slashed vectors."""
    gen = []
    for mask in MONOMIALS:
        Lm = left_mult_slashed(mask)
        for r in rows:
            col = linalg.matrix([[x] for x in r])
            gen.append([linalg.from_fmpq(x) for x in (Lm * col).entries()])
    return linalg.span_basis(gen, NL)


# --- Gr ---------------------------------------------------------------------------
def top_part(v, k: int) -> list[Fraction]:
    """Projection of a level-k vector onto the degree-k coordinates, as an L^k vector."""
    return [v[LINDEX[c]] for c in coords(k)]


def gr_islash(k: int) -> list[list[Fraction]]:
    rows = [top_part(r, k) for r in _islash_level(k)]
    return linalg.span_basis(rows, len(coords(k))) if rows else []


def gr_f_ranks() -> dict:
    """Rank of Gr f on each L^k against the rank of P^k."""
    F = f_matrix(graded=True)
    out = {"L": [], "P": [], "image": []}
    for k in range(5):
        cols = [LINDEX[c] for c in coords(k)]
        rows = [i for i, c in enumerate(PCOORDS)
                if (degree(c[2]) == k + 1 if c[0] == "W" else degree(c[-1]) == k)]
        out["L"].append(len(cols))
        out["P"].append(len(rows))
        out["image"].append(linalg.rank(_submatrix(F, rows, cols)))
    return out


# --- freeness ---------------------------------------------------------------------
class DecompositionFailed(RuntimeError):
    pass


@dataclass
class Freeness:
    A: list  # 9 slashed vectors at level 0
    B: list  # 2 slashed vectors inside the kernel at level 2
    cl_A: list
    cl_B: list


def a_elements() -> list[list[Fraction]]:
    out = []
    for g in A_GENERATORS:
        v = [Fraction(0)] * NL
        v[LINDEX[(0, g)]] = Fraction(1)
        out.append(v)
    return out


@lru_cache(maxsize=None)
def _freeness(seed: int = 0):
    A = a_elements()
    clA = cl_span(A)
    if len(clA) != 16 * len(A):
        raise DecompositionFailed("Cl (x) A is not free of rank 9")
    I2 = slashed_ideal(2)
    rng = random.Random(seed)
    candidates = [(I2[i], I2[j]) for i in range(len(I2)) for j in range(i + 1, len(I2))]
    for _ in range(50):
        candidates.append(tuple([sum(rng.randint(-2, 2) * x for x in col) for col in zip(*I2)]
                                for _ in range(2)))
    for b1, b2 in candidates:
        clB = cl_span([list(b1), list(b2)])
        if len(clB) != 32:
            continue
        if linalg.rank(clA + clB, NL) == NL:
            return A, [list(b1), list(b2)], clA, clB
    raise DecompositionFailed("no pair in the level-2 kernel generates a free complement")


def freeness_decomposition(seed: int = 0) -> Freeness:
    A, B, clA, clB = _freeness(seed)
    return Freeness(A, B, clA, clB)


def parity_split(rows) -> tuple[int, int]:
    """(even, odd) dimensions of a span that is a sum of parity-homogeneous pieces."""
    even = [[x if degree(LCOORDS[i][0]) % 2 == 0 else 0 for i, x in enumerate(r)] for r in rows]
    odd = [[x if degree(LCOORDS[i][0]) % 2 == 1 else 0 for i, x in enumerate(r)] for r in rows]
    return linalg.rank(even, NL), linalg.rank(odd, NL)


def module_matrices(rows):
    """Clifford generators and parity operator restricted to the span of ``rows``."""
    basis = linalg.span_basis(rows, NL)
    B = linalg.matrix(basis).transpose()
    _, piv = linalg.rref(linalg.matrix(basis))
    k = len(basis)

    def restrict(op):
        img = op * B
        X = flint.fmpq_mat(k, k)
        for c in range(k):
            for r, p in enumerate(piv):
                X[r, c] = img[p, c]
        if B * X != img:
            raise ValueError("span is not invariant")
        return X

    gens = [restrict(left_mult_slashed(1 << a)) for a in range(DIM)]
    par = flint.fmpq_mat(NL, NL)
    for i, (m, g) in enumerate(LCOORDS):
        par[i, i] = 1 if degree(m) % 2 == 0 else -1
    return gens, restrict(par)


# --- canonical filtered complement and E-slash coordinates -------------------------
@lru_cache(maxsize=None)
def complement_indices() -> tuple[int, ...]:
    """LCOORDS indices of the filtered complement: non-pivot top coordinates of each degree."""
    ideal = default_ideal()
    out = []
    for k in range(5):
        for c in ideal.complement_coords(k):
            out.append(LINDEX[c])
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def projection_to_complement() -> flint.fmpq_mat:
    """Matrix (144 x 176) of the projection onto the complement along the kernel of f."""
    comp = complement_indices()
    ker = slashed_ideal()
    n = NL
    basis = flint.fmpq_mat(n, n)
    for j, i in enumerate(comp):
        basis[i, j] = 1
    for j, v in enumerate(ker):
        for i, x in enumerate(v):
            if x:
                basis[i, len(comp) + j] = linalg.to_fmpq(x)
    inv = basis.inv()
    P = flint.fmpq_mat(len(comp), n)
    for i in range(len(comp)):
        for j in range(n):
            P[i, j] = inv[i, j]
    return P
