"""The graded Lie algebroid L = (exterior algebra) (x) CDerEnd(W), its ideal I and E = L/I.

Elements are sparse maps (mask, generator) -> Scalar, meaning
sum c * theta_mask (x) e_generator. Rank computations happen on the constant
fiber, where an element of degree k is a vector indexed by the pairs
(monomial of degree k, generator) in the order of ``coords(k)``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from . import linalg
from .clifford import DIM, MONOMIALS, MONOS_OF_DEGREE, ExtElement, degree, mask_of, wedge_sign
from .frames import (CDer, NGEN, SO_W, VERT, isotypic_decompose, label, lam_on_mono,
                     sigma_bracket)
from .scalars import Scalar


def _add(out: dict, key, val):
    if key in out:
        s = out[key] + val
        if s.is_zero():
            del out[key]
        else:
            out[key] = s
    elif not val.is_zero():
        out[key] = val


class LElement:
    """Element of L as a sparse map (mask, generator) -> Scalar."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        for k, v in (terms or {}).items():
            v = Scalar(v)
            if not v.is_zero():
                t[k] = v
        self.terms = t

    @classmethod
    def term(cls, mask: int, g: int, coeff=1) -> LElement:
        return cls({(mask, g): coeff})

    @classmethod
    def from_blocks(cls, blocks: dict) -> LElement:
        """From a map mask -> CDer."""
        t = {}
        for mask, d in blocks.items():
            for g, c in enumerate(d.c):
                if not c.is_zero():
                    t[(mask, g)] = c
        return cls(t)

    def blocks(self) -> dict[int, CDer]:
        out: dict[int, dict] = {}
        for (mask, g), c in self.terms.items():
            out.setdefault(mask, {})[g] = c
        return {m: CDer(v) for m, v in out.items()}

    def grades(self) -> set[int]:
        return {degree(m) for m, _ in self.terms}

    def grade(self) -> int:
        gs = self.grades()
        if len(gs) > 1:
            raise ValueError("element is not homogeneous")
        return gs.pop() if gs else 0

    def part(self, k: int) -> LElement:
        return LElement({key: v for key, v in self.terms.items() if degree(key[0]) == k})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add(out, k, v)
        return LElement(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LElement({k: -v for k, v in self.terms.items()})

    def scale(self, s) -> LElement:
        s = Scalar(s)
        return LElement({k: s * v for k, v in self.terms.items()})

    __rmul__ = scale

    def wedge_left(self, w: ExtElement) -> LElement:
        """w * self with w in the exterior algebra acting on the left."""
        out: dict = {}
        for a, f in w.coeffs.items():
            for (mask, g), c in self.terms.items():
                s = wedge_sign(a, mask)
                if s:
                    _add(out, (a | mask, g), s * f * c)
        return LElement(out)

    def __eq__(self, other):
        return isinstance(other, LElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def vector(self, k: int | None = None) -> list[Fraction]:
        """Constant-fiber coordinates in degree k (all coefficients must be constants)."""
        if k is None:
            k = self.grade()
        cidx = coord_index(k)
        v = [Fraction(0)] * len(cidx)
        for key, c in self.terms.items():
            if degree(key[0]) != k:
                raise ValueError("element has components outside degree k")
            v[cidx[key]] = c.to_fraction()
        return v

    @classmethod
    def from_vector(cls, k: int, v) -> LElement:
        cs = coords(k)
        return cls({cs[i]: Scalar(x) for i, x in enumerate(v) if x != 0})

    def __repr__(self):
        from .frames import GEN_NAMES
        from .clifford import mono_name

        if not self.terms:
            return "LElement(0)"
        keys = sorted(self.terms, key=lambda k: (MONOMIALS.index(k[0]), k[1]))
        return "LElement(" + " + ".join(
            f"({self.terms[k]}){mono_name(k[0])}⊗{GEN_NAMES[k[1]]}" for k in keys) + ")"


@lru_cache(maxsize=None)
def coords(k: int) -> tuple:
    return tuple((m, g) for m in MONOS_OF_DEGREE[k] for g in range(NGEN))


@lru_cache(maxsize=None)
def coord_index(k: int) -> dict:
    return {c: i for i, c in enumerate(coords(k))}


def _lam_term(g: int, f: Scalar, mask: int):
    """lambda(e_g)(f theta_mask) as a list of (mask, Scalar)."""
    out = []
    if g < 4:
        d = f.diff(g)
        if not d.is_zero():
            out.append((mask, d))
    else:
        for new, s in lam_on_mono(g, mask).items():
            out.append((new, s * f))
    return out


def l_bracket(a: LElement, b: LElement) -> LElement:
    """[b y, b' y'] = b b'[y,y'] + (b lambda(y)(b')) y' - (lambda(y')(b) b') y."""
    out: dict = {}
    for (I, g), c in a.terms.items():
        for (J, h), c2 in b.terms.items():
            if g >= 4 and h >= 4:
                s = wedge_sign(I, J)
                if s:
                    for k, v in sigma_bracket(g, h).items():
                        _add(out, (I | J, k), (s * v) * c * c2)
            for new, f in _lam_term(g, c2, J):
                s = wedge_sign(I, new)
                if s:
                    _add(out, (I | new, h), s * c * f)
            for new, f in _lam_term(h, c, I):
                s = wedge_sign(new, J)
                if s:
                    _add(out, (new | J, g), -s * f * c2)
    return LElement(out)


class Anchor:
    """The derivation rho(a) of the exterior algebra, b y -> (b' -> b lambda(y)(b'))."""

    def __init__(self, a: LElement):
        self.a = a

    def __call__(self, w) -> ExtElement:
        if not isinstance(w, ExtElement):
            w = ExtElement({0: Scalar(w)})
        out: dict = {}
        for (I, g), c in self.a.terms.items():
            for mask, f in w.coeffs.items():
                for new, v in _lam_term(g, f, mask):
                    s = wedge_sign(I, new)
                    if s:
                        _add(out, I | new, s * c * v)
        return ExtElement(out)

    def on_coordinate(self, mu: int) -> ExtElement:
        return self(ExtElement({0: Scalar.var(mu)}))


def anchor(a: LElement) -> Anchor:
    return Anchor(a)


def graded_commutator_apply(a: LElement, b: LElement, w: ExtElement) -> ExtElement:
    """[rho(a), rho(b)](w) with the Koszul sign."""
    da, db = a.grade(), b.grade()
    sign = -1 if (da * db) % 2 else 1
    ra, rb = Anchor(a), Anchor(b)
    return ra(rb(w)) - rb(ra(w)).scale(sign)


# --- constant-fiber linear maps ---------------------------------------------
@lru_cache(maxsize=None)
def anchor_matrix(k: int):
    """Rows: values on x^mu (in degree k) and on theta_a (in degree k+1); columns: L^k coords."""
    cs = coords(k)
    rows_idx = {}
    for mu in range(4):
        for m in MONOS_OF_DEGREE[k]:
            rows_idx[("x", mu, m)] = len(rows_idx)
    if k + 1 <= DIM:
        for a in range(DIM):
            for m in MONOS_OF_DEGREE[k + 1]:
                rows_idx[("t", a, m)] = len(rows_idx)
    M = [[0] * len(cs) for _ in rows_idx]
    for j, (I, g) in enumerate(cs):
        if g < 4:
            M[rows_idx[("x", g, I)]][j] += 1
        else:
            for a in range(DIM):
                for new, s in lam_on_mono(g, 1 << a).items():
                    ws = wedge_sign(I, new)
                    if ws:
                        M[rows_idx[("t", a, I | new)]][j] += ws * s
    return M


@lru_cache(maxsize=None)
def anchor_kernel(k: int) -> tuple:
    """Basis of m^k = ker(anchor) in L^k (constant fiber)."""
    return tuple(tuple(r) for r in linalg.nullspace(anchor_matrix(k), len(coords(k))))


def so_action_matrices(basis_rows, k: int):
    """Matrices of ad(1 (x) sigma) for sigma in so(W) on span(basis_rows) inside L^k."""
    n = len(coords(k))
    B = linalg.matrix(basis_rows)
    Bt = B.transpose()
    mats = []
    for g in SO_W:
        sig = LElement.term(0, g)
        cols = []
        for r in basis_rows:
            img = l_bracket(sig, LElement.from_vector(k, r)).vector(k) if any(r) else [0] * n
            cols.append(img)
        # express images in the basis: B^T X = images^T
        img_m = linalg.matrix(cols).transpose()
        X = _solve_in_basis(Bt, img_m)
        mats.append(X)
    return mats


def _solve_in_basis(Bt, img):
    """Solve Bt * X = img exactly for a full-column-rank Bt."""
    import flint

    n, r = Bt.nrows(), Bt.ncols()
    aug = flint.fmpq_mat(n, r + img.ncols())
    for i in range(n):
        for j in range(r):
            aug[i, j] = Bt[i, j]
        for j in range(img.ncols()):
            aug[i, r + j] = img[i, j]
    R, piv = linalg.rref(aug)
    if any(p >= r for p in piv):
        raise ValueError("image leaves the subspace")
    X = flint.fmpq_mat(r, img.ncols())
    for i, p in enumerate(piv):
        for j in range(img.ncols()):
            X[p, j] = R[i, r + j]
    return X


# --- the ideal ---------------------------------------------------------------
def _theta2(i, j) -> tuple[int, int]:
    """theta_i wedge theta_j as (sign, mask)."""
    m = mask_of((i, j))
    return (1 if i < j else -1), m


_U = (((0, 1), (2, 3)), ((0, 2), (3, 1)), ((0, 3), (1, 2)))  # (Re, Im) pairs of u
_V = ((5, 8), (6, 9), (7, 10))  # (Re, Im) generators of v

S_BASIS = (
    ((1, 0, 0), (0, -1, 0), (0, 0, 0)),
    ((0, 0, 0), (0, 1, 0), (0, 0, -1)),
    ((0, 1, 0), (1, 0, 0), (0, 0, 0)),
    ((0, 0, 1), (0, 0, 0), (1, 0, 0)),
    ((0, 0, 0), (0, 0, 1), (0, 1, 0)),
)


def _mi2_element(S, imaginary: bool) -> LElement:
    """Re[u^T S v] for S real, or Re[u^T (iS) v]."""
    t: dict = {}

    def add(pair, g, coef):
        s, m = _theta2(*pair)
        key = (m, g)
        t[key] = t.get(key, 0) + s * coef

    for a in range(3):
        for b in range(3):
            sab = S[a][b]
            if not sab:
                continue
            ure, uim = _U[a]
            vre, vim = _V[b]
            if not imaginary:
                add(ure, vre, sab)
                add(uim, vim, -sab)
            else:
                add(ure, vim, -sab)
                add(uim, vre, -sab)
    return LElement({k: v for k, v in t.items() if v})


def ideal_basis_explicit() -> list[LElement]:
    return [_mi2_element(S, False) for S in S_BASIS] + [_mi2_element(S, True) for S in S_BASIS]


@lru_cache(maxsize=None)
def _m_decomposition(k: int):
    basis = [list(r) for r in anchor_kernel(k)]
    mats = so_action_matrices(basis, k)
    comps = isotypic_decompose(mats)
    out = []
    n = len(coords(k))
    for lab, cb in comps:
        # map component (coords in the m^k basis) back to L^k coordinates
        rows = []
        for c in cb:
            v = [Fraction(0)] * n
            for coef, b in zip(c, basis):
                if coef:
                    for i, x in enumerate(b):
                        if x:
                            v[i] += coef * x
            rows.append(v)
        out.append((lab, rows))
    return out


def m_isotypic_components(k: int):
    """Isotypic decomposition of m^k = ker(anchor) in degree k, rows in L^k coordinates."""
    return [(lab, [list(r) for r in rows]) for lab, rows in _m_decomposition(k)]


class ComponentNotFound(LookupError):
    pass


def ideal_basis_isotypic(component=(2, 0), k: int = 2) -> list[LElement]:
    want = label(*component)
    for lab, rows in _m_decomposition(k):
        if lab == want:
            return [LElement.from_vector(k, r) for r in rows]
    raise ComponentNotFound(f"no component {want} in m^{k}")


class IdealBasis:
    """Per-degree constant bases of I, with RREF data for reduction."""

    def __init__(self, basis2):
        self.rows = {k: [] for k in range(DIM + 1)}
        self.rows[2] = linalg.span_basis([b.vector(2) for b in basis2], len(coords(2)))
        for k in (3, 4):
            gen = []
            for r in self.rows[k - 1]:
                el = LElement.from_vector(k - 1, r)
                for a in range(DIM):
                    gen.append(el.wedge_left(ExtElement.gen(a)).vector(k))
            self.rows[k] = linalg.span_basis(gen, len(coords(k))) if gen else []
        self._rref = {}
        for k in range(DIM + 1):
            n = len(coords(k))
            if self.rows[k]:
                R, piv = linalg.rref(self.rows[k], n)
                self._rref[k] = (linalg.to_rows(R), piv)
            else:
                self._rref[k] = ([], [])

    def rank(self, k: int) -> int:
        return len(self.rows[k])

    def ranks(self) -> tuple:
        return tuple(self.rank(k) for k in range(DIM + 1))

    @property
    def basis2(self):
        return [LElement.from_vector(2, r) for r in self.rows[2]]

    @property
    def basis3(self):
        return [LElement.from_vector(3, r) for r in self.rows[3]]

    @property
    def basis4(self):
        return [LElement.from_vector(4, r) for r in self.rows[4]]

    def elements(self, k: int) -> list[LElement]:
        return [LElement.from_vector(k, r) for r in self.rows[k]]

    def pivots(self, k: int) -> list:
        return self._rref[k][1]

    def complement_coords(self, k: int) -> list:
        """Coordinates (mask, generator) spanning the canonical complement of I^k."""
        piv = set(self.pivots(k))
        return [c for i, c in enumerate(coords(k)) if i not in piv]

    def reduce(self, a: LElement) -> LElement:
        """Canonical representative of a + I: all pivot coordinates cleared."""
        out = dict(a.terms)
        for k in range(DIM + 1):
            R, piv = self._rref[k]
            cs = coords(k)
            for row, p in zip(R, piv):
                c = out.get(cs[p])
                if c is None:
                    continue
                for i, x in enumerate(row):
                    if x:
                        _add(out, cs[i], -(c * x))
        return LElement(out)

    def contains(self, a: LElement) -> bool:
        return self.reduce(a).is_zero()

    def contains_vector(self, k: int, v) -> bool:
        return linalg.in_span(v, self.rows[k], len(coords(k))) if self.rows[k] else not any(v)


def ideal_saturate(basis2) -> IdealBasis:
    return IdealBasis(basis2)


@lru_cache(maxsize=None)
def default_ideal() -> IdealBasis:
    return IdealBasis(ideal_basis_explicit())


class EElement(LElement):
    """Element of E = L/I in canonical form (reduced against the default ideal)."""

    __slots__ = ()


def reduce_mod_ideal(a: LElement, ideal: IdealBasis | None = None) -> EElement:
    ideal = ideal or default_ideal()
    return EElement(ideal.reduce(a).terms)


def mc_defect(x: LElement, ideal: IdealBasis | None = None) -> EElement:
    if x.grades() - {1}:
        raise ValueError("mc_defect needs a degree-1 element")
    return reduce_mod_ideal(l_bracket(x, x), ideal)


def rank_table(ideal: IdealBasis | None = None) -> dict:
    ideal = ideal or default_ideal()
    L = [len(coords(k)) for k in range(DIM + 1)]
    I = list(ideal.ranks())
    return {"L": L, "I": I, "E": [a - b for a, b in zip(L, I)]}


# --- standard elements ---------------------------------------------------------
def x_minkowski() -> LElement:
    return LElement({(1 << mu, mu): 1 for mu in range(4)})


def frame_element(tetrad, connection=None) -> LElement:
    """sum_a theta_a (x) (e_a + V_a) with e_a = tetrad[a] (4 Scalars) and V_a over sigma_0..sigma_12."""
    t: dict = {}
    for a in range(DIM):
        for mu in range(4):
            c = Scalar(tetrad[a][mu])
            if not c.is_zero():
                t[(1 << a, mu)] = c
        if connection is not None:
            for k, g in enumerate(VERT):
                c = Scalar(connection[a][k])
                if not c.is_zero():
                    t[(1 << a, g)] = c
    return LElement(t)
