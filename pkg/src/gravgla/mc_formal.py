"""Formal Maurer-Cartan theory for graded Lie algebras free over Q[[s]].

A FreeSeriesGLa stores a finite graded basis of the real gLa a together with
bracket structure constants that may insert powers of s:
    [e^p_i, e^q_j] = sum_t s^t sum_l c e^{p+q}_l.
Series elements are dicts power -> coefficient vector, truncated at a fixed order.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import linalg

HALF = Fraction(1, 2)


class NotMC(ValueError):
    pass


class Obstructed(ValueError):
    pass


class ClauseFailed(AssertionError):
    pass


class NotAFiltration(ValueError):
    pass


def _vadd(a, b, s=1):
    return [x + s * y for x, y in zip(a, b)]


def _vscale(a, s):
    return [s * x for x in a]


class FreeSeriesGLa:
    """Bracket table with s-insertions, optionally filled lazily by ``rule(p, i, q, j)``."""

    def __init__(self, dims: dict, table: dict | None = None, rule=None, order: int = 8, names=None):
        self.dims = {k: v for k, v in dims.items() if v}
        self._table: dict = {}
        self.rule = rule
        self.order = order
        self.names = names or {}
        for (p, i, q, j), val in (table or {}).items():
            self._table[(p, i, q, j)] = {k: Fraction(v) for k, v in val.items() if v}

    def dim(self, p: int) -> int:
        return self.dims.get(p, 0)

    def degrees(self):
        return sorted(self.dims)

    def basis_bracket(self, p, i, q, j) -> dict:
        """{(t, l): c} for [e^p_i, e^q_j]."""
        key = (p, i, q, j)
        if key not in self._table:
            if self.rule is not None and self.dim(p + q):
                self._table[key] = {k: Fraction(v) for k, v in self.rule(p, i, q, j).items() if v}
            else:
                self._table[key] = {}
        return self._table[key]

    def zero(self, p):
        return [Fraction(0)] * self.dim(p)

    def unit(self, p, i):
        v = self.zero(p)
        v[i] = Fraction(1)
        return v

    def bracket_vec(self, p, u, q, v) -> dict:
        """[u, v] for u in a^p, v in a^q, as a series {t: vector in a^{p+q}}."""
        out: dict = {}
        n = self.dim(p + q)
        if not n:
            return out
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                for (t, l), c in self.basis_bracket(p, i, q, j).items():
                    vec = out.setdefault(t, [Fraction(0)] * n)
                    vec[l] += a * b * c
        return out

    def bracket0(self, p, u, q, v):
        """The s^0 bracket of a."""
        return self.bracket_vec(p, u, q, v).get(0, self.zero(p + q))

    def bracket(self, p, A: dict, q, B: dict, order: int | None = None) -> dict:
        """Bracket of series A in p^p and B in p^q, truncated at s^order."""
        order = self.order if order is None else order
        out: dict = {}
        n = self.dim(p + q)
        for m, u in A.items():
            for k, v in B.items():
                if m + k > order:
                    continue
                for t, w in self.bracket_vec(p, u, q, v).items():
                    if m + k + t <= order:
                        acc = out.setdefault(m + k + t, [Fraction(0)] * n)
                        for l, x in enumerate(w):
                            if x:
                                acc[l] += x
        return {k: v for k, v in out.items() if any(v)}

    # --- axioms ---
    def _basis_series(self, p, i):
        return {0: self.unit(p, i)}

    def check_antisymmetry(self) -> bool:
        for p, q in itertools.product(self.degrees(), repeat=2):
            if not self.dim(p + q):
                continue
            s = -1 if (p * q) % 2 == 0 else 1
            for i in range(self.dim(p)):
                for j in range(self.dim(q)):
                    a = self.bracket(p, self._basis_series(p, i), q, self._basis_series(q, j))
                    b = self.bracket(q, self._basis_series(q, j), p, self._basis_series(p, i))
                    if _series_sub(a, _series_scale(b, s)):
                        return False
        return True

    def check_jacobi(self, samples: int | None = None, seed: int = 0) -> bool:
        """[a,[b,c]] = [[a,b],c] + (-1)^{pq}[b,[a,c]] on basis triples (or a seeded sample)."""
        triples = [(p, i, q, j, r, k)
                   for p, q, r in itertools.product(self.degrees(), repeat=3) if self.dim(p + q + r)
                   for i in range(self.dim(p)) for j in range(self.dim(q)) for k in range(self.dim(r))]
        if samples is not None and len(triples) > samples:
            triples = random.Random(seed).sample(triples, samples)
        for p, i, q, j, r, k in triples:
            a, b, c = self._basis_series(p, i), self._basis_series(q, j), self._basis_series(r, k)
            lhs = self.bracket(p, a, q + r, self.bracket(q, b, r, c))
            t1 = self.bracket(p + q, self.bracket(p, a, q, b), r, c)
            t2 = self.bracket(q, b, p + r, self.bracket(p, a, r, c))
            sgn = -1 if (p * q) % 2 else 1
            if _series_sub(lhs, _series_add(t1, _series_scale(t2, sgn))):
                return False
        return True


def _series_add(a, b):
    out = {k: list(v) for k, v in a.items()}
    for k, v in b.items():
        out[k] = _vadd(out[k], v) if k in out else list(v)
    return {k: v for k, v in out.items() if any(v)}


def _series_scale(a, s):
    return {k: _vscale(v, s) for k, v in a.items() if s}


def _series_sub(a, b):
    return _series_add(a, _series_scale(b, -1))


def truncate(a: dict, order: int) -> dict:
    return {k: v for k, v in a.items() if k <= order}


def valuation(a: dict):
    """Smallest power with a nonzero coefficient, or None for zero."""
    ks = [k for k, v in a.items() if any(v)]
    return min(ks) if ks else None


# --- homology ----------------------------------------------------------------------
@dataclass
class Homology:
    dims: dict
    n1: int
    d: dict  # degree -> fmpq_mat of d: a^k -> a^{k+1}
    reps: list  # basis vectors of a^1 representing a basis of H^1
    h: object  # callable a^2 -> a^1

    def r(self, xi) -> list:
        out = [Fraction(0)] * self.n1
        for c, v in zip(xi, self.reps):
            out = _vadd(out, v, Fraction(c))
        return out

    def apply_d(self, k, v):
        D = self.d[k]
        if D.nrows() == 0:
            return []
        return [linalg.from_fmpq(sum((D[i, j] * linalg.to_fmpq(v[j]) for j in range(D.ncols()) if v[j]),
                                     linalg.to_fmpq(0))) for i in range(D.nrows())]

    def cls(self, z) -> list:
        """H^1 coordinates of a 1-cocycle z."""
        im = linalg.to_rows(self.d[0].transpose()) if 0 in self.d else []
        rows = list(self.reps) + [r for r in im]
        M = linalg.matrix(rows, len(z)).transpose()
        sol = linalg.solve_any(linalg.to_rows(M), list(z))
        if sol is None:
            raise ValueError("not a cocycle representative")
        return sol[:len(self.reps)]


def d_matrix(gla: FreeSeriesGLa, x0, k: int):
    n, m = gla.dim(k + 1), gla.dim(k)
    import flint

    D = flint.fmpq_mat(n, m)
    for j in range(m):
        col = gla.bracket0(1, x0, k, gla.unit(k, j))
        for i, c in enumerate(col):
            if c:
                D[i, j] = linalg.to_fmpq(c)
    return D


def is_mc0(gla: FreeSeriesGLa, x0) -> bool:
    return not any(gla.bracket0(1, x0, 1, x0))


def homology(gla: FreeSeriesGLa, x0, degrees=None) -> Homology:
    if not is_mc0(gla, x0):
        raise NotMC("[x0, x0] is not zero in a")
    degs = degrees or range(min(gla.degrees() + [0]) - 1, max(gla.degrees() + [0]) + 1)
    d = {k: d_matrix(gla, x0, k) for k in degs}
    for k in degs:
        if k + 1 in d and d[k].ncols() and d[k + 1].nrows():
            if any(x != 0 for x in (d[k + 1] * d[k]).entries()):
                raise NotMC("d^2 is not zero")
    dims = {}
    for k in degs:
        rk = linalg.rank(d[k]) if d[k].nrows() and d[k].ncols() else 0
        rk_in = linalg.rank(d[k - 1]) if (k - 1) in d and d[k - 1].nrows() and d[k - 1].ncols() else 0
        dims[k] = gla.dim(k) - rk - rk_in
    # representatives for H^1: complement of im d^0 inside ker d^1
    n1 = gla.dim(1)
    ker = linalg.nullspace(d[1]) if d[1].nrows() else [gla.unit(1, i) for i in range(n1)]
    im = linalg.to_rows(d[0].transpose()) if d[0].nrows() and d[0].ncols() else []
    reps, cur = [], linalg.span_basis(im, n1) if im else []
    for v in ker:
        if not linalg.in_span(v, cur, n1) if cur else any(v):
            reps.append(v)
            cur = cur + [v]
    # homotopy h: a^2 -> a^1 built from an invertible pivot block of d^1
    D = d[1]
    if D.nrows() and D.ncols():
        _, cols = linalg.rref(D)
        _, rows = linalg.rref(D.transpose())
        import flint

        sub = flint.fmpq_mat(len(rows), len(cols))
        for a, r in enumerate(rows):
            for b, c in enumerate(cols):
                sub[a, b] = D[r, c]
        inv = sub.inv() if cols else sub
    else:
        rows, cols, inv = [], [], None

    def h(y):
        out = [Fraction(0)] * n1
        if not cols:
            return out
        for b, c in enumerate(cols):
            out[c] = sum((linalg.from_fmpq(inv[b, a]) * y[r] for a, r in enumerate(rows)), Fraction(0))
        return out

    return Homology(dims, n1, d, reps, h)


# --- the recursion -------------------------------------------------------------------------
@dataclass
class MCSolution:
    coeffs: list  # c_0 .. c_K as vectors in a^1
    xi: list
    homology: Homology = field(repr=False)
    residuals: list = field(default_factory=list)  # valuation of e_K for each K

    def series(self) -> dict:
        return {k: c for k, c in enumerate(self.coeffs) if any(c)}


def _p_coeff(series: dict, power: int, n: int):
    return series.get(power, [Fraction(0)] * n)


def mc_recursion(gla: FreeSeriesGLa, x0, xi, K: int, check: bool = True) -> MCSolution:
    """c_0 = x0, c_1 = -1/2 h p(e_0/s) + r xi, c_{K+1} = -1/2 h p(e_K/s^{K+1})."""
    H = homology(gla, x0)
    if H.dims.get(2, 0):
        raise Obstructed(f"H^2 has dimension {H.dims[2]}")
    n2 = gla.dim(2)
    order = K + 1
    coeffs = [list(map(Fraction, x0))]
    residuals = []
    for k in range(K + 1):
        Xi = {m: c for m, c in enumerate(coeffs) if any(c)}
        e = gla.bracket(1, Xi, 1, Xi, order=order + 1)
        # A_k: e_k in s^{k+1} p^2
        low = [m for m in e if m <= k]
        if check and low:
            raise ClauseFailed(f"A_{k}: e_{k} has a nonzero s^{min(low)} coefficient")
        top = _p_coeff(e, k + 1, n2)
        if check and gla.dim(3):
            if any(H.apply_d(2, top)):
                raise ClauseFailed(f"B_{k}: d p(e_{k}/s^{k+1}) is not zero")
        c = _vscale(H.h(top), -HALF)
        if k == 0:
            c = _vadd(c, H.r(xi))
        if check and any(_vadd(H.apply_d(1, c), _vscale(top, HALF))):
            raise ClauseFailed(f"C_{k}: d p c_{k + 1} differs from -1/2 p(e_{k}/s^{k + 1})")
        coeffs.append(c)
        residuals.append(valuation(e))
    return MCSolution(coeffs[:K + 1], list(xi), H, residuals)


def mc_residual(gla: FreeSeriesGLa, sol: MCSolution, K: int) -> dict:
    """[Xi_{<=K}, Xi_{<=K}] truncated at s^K (should vanish)."""
    Xi = {m: c for m, c in enumerate(sol.coeffs[:K + 1]) if any(c)}
    return gla.bracket(1, Xi, 1, Xi, order=K)


def is_mc_mod(gla: FreeSeriesGLa, series: dict, K: int) -> bool:
    return not gla.bracket(1, series, 1, series, order=K)


def phi_linear(gla: FreeSeriesGLa, x0, xi) -> list:
    """The part of c_1 linear in xi."""
    return _vadd(mc_recursion(gla, x0, xi, 1).coeffs[1],
                 mc_recursion(gla, x0, [0] * len(xi), 1).coeffs[1], -1)


def exp_ad(gla: FreeSeriesGLa, y: dict, X: dict, order: int) -> dict:
    """exp(ad y) X for y in p^0 with positive s-valuation, truncated at s^order."""
    out = truncate(X, order)
    term = truncate(X, order)
    n = 1
    while term:
        term = _series_scale(gla.bracket(0, y, 1, term, order=order), Fraction(1, n))
        out = _series_add(out, term)
        n += 1
    return out


# --- examples --------------------------------------------------------------------------------
def abelian_gla(dims=None, order: int = 8) -> FreeSeriesGLa:
    return FreeSeriesGLa(dims or {0: 1, 1: 3}, order=order)


def endomorphism_gla(space: list[int], order: int = 8) -> FreeSeriesGLa:
    """Graded endomorphisms of V = V^0 + V^1 + ..., bracket the graded commutator."""
    deg_of = [d for d, n in enumerate(space) for _ in range(n)]
    N = len(deg_of)
    units: dict = {}
    for r in range(N):
        for c in range(N):
            units.setdefault(deg_of[r] - deg_of[c], []).append((r, c))
    index = {k: {rc: i for i, rc in enumerate(v)} for k, v in units.items()}
    dims = {k: len(v) for k, v in units.items()}

    def rule(p, i, q, j):
        (r1, c1), (r2, c2) = units[p][i], units[q][j]
        out = {}
        if c1 == r2:
            out[(0, index[p + q][(r1, c2)])] = out.get((0, index[p + q][(r1, c2)]), 0) + 1
        if c2 == r1:
            key = (0, index[p + q][(r2, c1)])
            out[key] = out.get(key, 0) - (-1) ** (p * q)
        return out

    g = FreeSeriesGLa(dims, rule=rule, order=order)
    g.units = units
    g.unit_index = index
    return g


def endomorphism_example(order: int = 8):
    """V = Q + Q^3 + Q^2 with x0 = b: V^1 -> V^2 onto and killing the first basis vector."""
    g = endomorphism_gla([1, 3, 2], order=order)
    x0 = g.zero(1)
    idx = g.unit_index[1]
    # basis of V: 0 | 1 2 3 | 4 5
    for rc in ((4, 2), (5, 3)):
        x0[idx[rc]] = Fraction(1)
    return g, x0


def endomorphism_identity_example(order: int = 8):
    """V = Q + Q with x0 the degree-one identity; a^2 = 0."""
    g = endomorphism_gla([1, 1], order=order)
    x0 = g.zero(1)
    x0[g.unit_index[1][(1, 0)]] = Fraction(1)
    return g, x0


def two_step_gla() -> FreeSeriesGLa:
    """u, v, x, y in degree 1, z in degree 2; [u,v] = [x,y] = z (symmetric)."""
    table = {}
    for a, b in ((0, 1), (2, 3)):
        table[(1, a, 1, b)] = {(0, 0): 1}
        table[(1, b, 1, a)] = {(0, 0): 1}
    return FreeSeriesGLa({1: 4, 2: 1}, table, names={1: "uvxy", 2: "z"})


def _check_filtration(g: FreeSeriesGLa, filt: list[dict]):
    top = len(filt) - 1
    for p in range(top):
        for k in g.degrees():
            lo, hi = filt[p].get(k, []), filt[p + 1].get(k, [])
            if lo and not linalg.span_contains(hi, lo, g.dim(k)):
                raise NotAFiltration(f"F_{p} is not contained in F_{p + 1} in degree {k}")
    for k in g.degrees():
        if linalg.rank(filt[top].get(k, []), g.dim(k)) != g.dim(k):
            raise NotAFiltration("the last filtration step is not everything")
    for p, q in itertools.product(range(top + 1), repeat=2):
        target = filt[min(p + q, top)]
        for k, l in itertools.product(g.degrees(), repeat=2):
            if not g.dim(k + l):
                continue
            for u in filt[p].get(k, []):
                for v in filt[q].get(l, []):
                    w = g.bracket0(k, u, l, v)
                    if any(w) and not linalg.in_span(w, target.get(k + l, []), g.dim(k + l)):
                        raise NotAFiltration(f"[F_{p}, F_{q}] is not inside F_{p + q}")


def _adapted_basis(g: FreeSeriesGLa, filt: list[dict]):
    """Per degree: list of (level, vector) extending F_0 to F_1 to ..."""
    out = {}
    for k in g.degrees():
        n = g.dim(k)
        chosen = []
        for p, F in enumerate(filt):
            for v in linalg.span_basis(F.get(k, []), n) if F.get(k) else []:
                if not chosen or not linalg.in_span(v, [c for _, c in chosen], n):
                    chosen.append((p, list(v)))
        out[k] = chosen
    return out


def rees_algebra(g: FreeSeriesGLa, filt: list[dict], order: int = 8) -> FreeSeriesGLa:
    """p = { sum x_p s^p : x_p in F_p } with the adapted basis b s^{level(b)}."""
    _check_filtration(g, filt)
    basis = _adapted_basis(g, filt)
    table = {}
    for k, l in itertools.product(g.degrees(), repeat=2):
        if not g.dim(k + l):
            continue
        tgt = basis[k + l]
        M = linalg.matrix([v for _, v in tgt], g.dim(k + l)).transpose()
        for i, (p, u) in enumerate(basis[k]):
            for j, (q, v) in enumerate(basis[l]):
                w = g.bracket0(k, u, l, v)
                if not any(w):
                    continue
                sol = linalg.solve(M, w)
                coef = [linalg.from_fmpq(sol[m, 0]) for m in range(sol.nrows())]
                entry = {}
                for m, c in enumerate(coef):
                    if c:
                        lev = tgt[m][0]
                        entry[(p + q - lev, m)] = c
                table[(k, i, l, j)] = entry
    r = FreeSeriesGLa({k: len(v) for k, v in basis.items()}, table, order=order)
    r.adapted = basis
    return r


def associated_graded(g: FreeSeriesGLa, filt: list[dict]) -> dict:
    """Structure constants of Gr computed from quotients F_p / F_{p-1}.

    Returns {(k, i, l, j): {m: c}} in the adapted basis, counting only the
    component of [b_i, b_j] in Gr_{p+q}.
    """
    basis = _adapted_basis(g, filt)
    out = {}
    for k, l in itertools.product(g.degrees(), repeat=2):
        if not g.dim(k + l):
            continue
        for i, (p, u) in enumerate(basis[k]):
            for j, (q, v) in enumerate(basis[l]):
                w = g.bracket0(k, u, l, v)
                lev = min(p + q, len(filt) - 1)
                lower = filt[lev - 1].get(k + l, []) if lev >= 1 else []
                tgt = [(m, vec) for m, (pp, vec) in enumerate(basis[k + l]) if pp == lev]
                # solve w = sum c_m vec_m + (element of F_{lev-1})
                rows = [vec for _, vec in tgt] + list(lower)
                if not rows:
                    continue
                M = linalg.matrix(rows, g.dim(k + l)).transpose()
                sol = linalg.solve_any(linalg.to_rows(M), w) if any(w) else None
                entry = {}
                if sol is not None:
                    for (m, _), c in zip(tgt, sol):
                        if c:
                            entry[m] = c
                out[(k, i, l, j)] = entry
    return out


def rees_example(order: int = 8):
    """The two-step gLa with F_0 = span{u, v, z}, F_1 = everything; x0 = u."""
    g = two_step_gla()
    e = lambda i, n: [Fraction(int(t == i)) for t in range(n)]  # noqa: E731
    F0 = {1: [e(0, 4), e(1, 4)], 2: [e(0, 1)]}
    F1 = {1: [e(i, 4) for i in range(4)], 2: [e(0, 1)]}
    r = rees_algebra(g, [F0, F1], order=order)
    x0 = r.zero(1)
    x0[0] = Fraction(1)
    return r, x0


@lru_cache(maxsize=None)
def gravity_fiber(order: int = 8) -> FreeSeriesGLa:
    """Constant sections of E with the constant-coefficient bracket, lazily tabulated."""
    from .glaoid import LElement, default_ideal, l_bracket

    ideal = default_ideal()
    cc = {k: ideal.complement_coords(k) for k in range(5)}
    ci = {k: {c: i for i, c in enumerate(v)} for k, v in cc.items()}

    def rule(p, i, q, j):
        if p + q > 4:
            return {}
        y = ideal.reduce(l_bracket(LElement({cc[p][i]: 1}), LElement({cc[q][j]: 1})))
        return {(0, ci[p + q][key]): v.to_fraction() for key, v in y.terms.items()}

    g = FreeSeriesGLa({k: len(v) for k, v in cc.items()}, rule=rule, order=order)
    g.coords = cc
    return g


def gravity_fiber_example(order: int = 8):
    """x0 = theta_0 (x) sigma_0 in the gravity fiber."""
    g = gravity_fiber(order)
    x0 = g.zero(1)
    x0[g.coords[1].index((1, 4))] = Fraction(1)
    return g, x0


EXAMPLES = {
    "abelian": lambda order=8: (abelian_gla(order=order), [Fraction(0)] * 3),
    "endo": endomorphism_example,
    "rees": rees_example,
    "gravity-fiber": gravity_fiber_example,
}


def random_xi(h: Homology, seed: int = 0, bound: int = 3) -> list:
    rng = random.Random(seed)
    return [Fraction(rng.randint(-bound, bound)) for _ in h.reps]
