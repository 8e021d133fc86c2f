"""Exact linear algebra over Q (and Q(i) via realification).

Thin helpers around ``flint.fmpq_mat``. Vectors are lists of Fractions (or
anything flint accepts); subspaces are given by lists of spanning rows.
"""

from __future__ import annotations

from fractions import Fraction

import flint


def to_fmpq(x) -> flint.fmpq:
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, int):
        return flint.fmpq(x)
    x = Fraction(x)
    return flint.fmpq(x.numerator, x.denominator)


def from_fmpq(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


def matrix(rows, ncols: int | None = None) -> flint.fmpq_mat:
    rows = list(rows)
    if not rows:
        return flint.fmpq_mat(0, ncols or 0)
    n = len(rows[0]) if ncols is None else ncols
    flat = [to_fmpq(v) for r in rows for v in r]
    return flint.fmpq_mat(len(rows), n, flat)


def to_rows(m: flint.fmpq_mat) -> list[list[Fraction]]:
    return [[from_fmpq(m[i, j]) for j in range(m.ncols())] for i in range(m.nrows())]


def rank(rows, ncols: int | None = None) -> int:
    m = rows if isinstance(rows, flint.fmpq_mat) else matrix(rows, ncols)
    if m.nrows() == 0 or m.ncols() == 0:
        return 0
    return m.rank()


def rref(rows, ncols: int | None = None):
    """Return (nonzero rows of the RREF as fmpq_mat, pivot column list)."""
    m = rows if isinstance(rows, flint.fmpq_mat) else matrix(rows, ncols)
    if m.nrows() == 0:
        return flint.fmpq_mat(0, m.ncols()), []
    r, rk = m.rref()
    pivots = []
    for i in range(rk):
        for j in range(m.ncols()):
            if r[i, j] != 0:
                pivots.append(j)
                break
    out = flint.fmpq_mat(rk, m.ncols())
    for i in range(rk):
        for j in range(m.ncols()):
            out[i, j] = r[i, j]
    return out, pivots


def nullspace(rows, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {v : M v = 0} (right kernel), in the standard RREF form."""
    m = rows if isinstance(rows, flint.fmpq_mat) else matrix(rows, ncols)
    n = m.ncols()
    r, piv = rref(m)
    free = [j for j in range(n) if j not in set(piv)]
    basis = []
    for fj in free:
        v = [Fraction(0)] * n
        v[fj] = Fraction(1)
        for i, pj in enumerate(piv):
            v[pj] = -from_fmpq(r[i, fj])
        basis.append(v)
    return basis


def left_nullspace(rows, ncols: int | None = None) -> list[list[Fraction]]:
    m = rows if isinstance(rows, flint.fmpq_mat) else matrix(rows, ncols)
    return nullspace(m.transpose())


def span_basis(rows, ncols: int | None = None) -> list[list[Fraction]]:
    r, _ = rref(rows, ncols)
    return to_rows(r)


def in_span(v, rows, ncols: int | None = None) -> bool:
    rows = list(rows)
    if not rows:
        return all(Fraction(x) == 0 for x in v)
    return rank(rows + [list(v)], ncols) == rank(rows, ncols)


def span_equal(a, b, ncols: int) -> bool:
    ra, rb = rank(a, ncols), rank(b, ncols)
    return ra == rb and rank(list(a) + list(b), ncols) == ra


def span_contains(big, small, ncols: int) -> bool:
    rb = rank(big, ncols)
    return rank(list(big) + list(small), ncols) == rb


def intersection_dim(a, b, ncols: int) -> int:
    return rank(a, ncols) + rank(b, ncols) - rank(list(a) + list(b), ncols)


def solve(a, b):
    """Solve a x = b for square invertible a; b a column list or matrix."""
    am = a if isinstance(a, flint.fmpq_mat) else matrix(a)
    if isinstance(b, flint.fmpq_mat):
        bm = b
    else:
        bm = matrix([[x] for x in b])
    return am.solve(bm)


def solve_any(a, b) -> list[Fraction] | None:
    """Some solution of a x = b (a arbitrary), or None if inconsistent."""
    am = a if isinstance(a, flint.fmpq_mat) else matrix(a)
    m, n = am.nrows(), am.ncols()
    aug = flint.fmpq_mat(m, n + 1)
    for i in range(m):
        for j in range(n):
            aug[i, j] = am[i, j]
        aug[i, n] = to_fmpq(b[i])
    r, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, pj in enumerate(piv):
        x[pj] = from_fmpq(r[i, n])
    return x


def mat_mul(a, b) -> flint.fmpq_mat:
    return (a if isinstance(a, flint.fmpq_mat) else matrix(a)) * (
        b if isinstance(b, flint.fmpq_mat) else matrix(b)
    )


def identity(n: int) -> flint.fmpq_mat:
    m = flint.fmpq_mat(n, n)
    for i in range(n):
        m[i, i] = 1
    return m


def is_symmetric(m: flint.fmpq_mat) -> bool:
    return m == m.transpose()


def leading_minors(m: flint.fmpq_mat) -> list[Fraction]:
    """All leading principal minors via fraction-free elimination pivots."""
    n = m.nrows()
    # Gaussian elimination without pivoting; minors are products of pivots.
    a = [[m[i, j] for j in range(n)] for i in range(n)]
    minors = []
    prod = flint.fmpq(1)
    for k in range(n):
        piv = a[k][k]
        if piv == 0:
            # degenerate: fall back to explicit determinants from here on
            for kk in range(k, n):
                sub = flint.fmpq_mat(kk + 1, kk + 1)
                for i in range(kk + 1):
                    for j in range(kk + 1):
                        sub[i, j] = m[i, j]
                minors.append(from_fmpq(sub.det()))
            return minors
        prod *= piv
        minors.append(from_fmpq(prod))
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f != 0:
                row_i, row_k = a[i], a[k]
                for j in range(k, n):
                    row_i[j] -= f * row_k[j]
    return minors


def is_positive_definite(m: flint.fmpq_mat) -> bool:
    if not is_symmetric(m):
        return False
    return all(d > 0 for d in leading_minors(m))


def realify(re_rows, im_rows):
    """Complex matrix A + iB acting on C^n as the real block matrix [[A,-B],[B,A]]."""
    top = [list(ra) + [-x for x in rb] for ra, rb in zip(re_rows, im_rows)]
    bot = [list(rb) + list(ra) for ra, rb in zip(re_rows, im_rows)]
    return top + bot


def complex_nullspace(re_rows, im_rows, ncols: int):
    """Kernel of A + iB over Q(i); returns list of (re, im) vectors spanning it over Q(i).

    The real kernel of the realification is a Q(i)-space (stable under
    multiplication by i), so a Q(i)-basis is extracted greedily.
    """
    real = nullspace(realify(re_rows, im_rows), 2 * ncols)
    chosen: list[list[Fraction]] = []
    out = []
    for v in real:
        if chosen and in_span(v, chosen, 2 * ncols):
            continue
        re, im = v[:ncols], v[ncols:]
        iv = [-x for x in im] + list(re)  # i*(re + i im)
        chosen += [v, iv]
        out.append((re, im))
    return out
