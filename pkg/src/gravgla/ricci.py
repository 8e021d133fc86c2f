"""From a nondegenerate degree-one element to an affine connection, its metric and Ricci tensor.

Index conventions: E[a][mu] are the frame vector fields e_a = E[a][mu] d_mu read
off x, Om[a][mu] the dual coframe omega^a = Om[a][mu] dx^mu, and
Gamma[nu][mu][lam] the coefficients with nabla_mu dx^nu = -Gamma^nu_{mu lam} dx^lam
(equivalently nabla_mu d_lam = Gamma^nu_{mu lam} d_nu).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy as sp

from .clifford import DIM, ETA
from .frames import matrix_to_sigma
from .glaoid import LElement, frame_element
from .hyperbolic import Degenerate, det, frame_matrix
from .scalars import ONE, ZERO, Scalar, parse_scalar

R4 = range(DIM)


class NotExact(ValueError):
    pass


class NotConformal(ValueError):
    pass


def inverse(M):
    """Inverse of a 4x4 Scalar matrix by cofactors."""
    d = det(M)
    if d.is_zero():
        raise Degenerate("singular frame")
    n = len(M)
    out = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(M) if k != i]
            c = det(minor)
            out[j][i] = c / d if (i + j) % 2 == 0 else -(c / d)
    return out


def vertical_parts(x: LElement):
    """V[a] = 4x4 matrix of the vertical component of x at theta_a."""
    blocks = x.blocks()
    out = []
    for a in R4:
        d = blocks.get(1 << a)
        out.append(d.vertical_matrix() if d is not None else [[ZERO] * DIM for _ in R4])
    return out


@dataclass
class AffineData:
    E: list
    Om: list
    V: list = field(repr=False)
    Gamma: list = field(repr=False)
    g: list

    def christoffel(self, nu, mu, lam) -> Scalar:
        return self.Gamma[nu][mu][lam]


def to_connection(x: LElement) -> AffineData:
    X = frame_matrix(x)
    if det(X).is_zero():
        raise Degenerate("x is degenerate")
    E = X
    Et = [[E[b][a] for b in R4] for a in R4]
    Om = inverse(Et)  # Om E^T = 1
    V = vertical_parts(x)
    # Om[b][nu] Gamma^nu_{mu lam} = d_mu Om[b][lam] - sum_{a,c} Om[a][mu] V_a[c][b] Om[c][lam]
    T = [[[ZERO] * DIM for _ in R4] for _ in R4]  # T[b][mu][lam]
    for b in R4:
        for mu in R4:
            for lam in R4:
                t = Om[b][lam].diff(mu)
                for a in R4:
                    if Om[a][mu].is_zero():
                        continue
                    for c in R4:
                        v = V[a][c][b]
                        if not v.is_zero() and not Om[c][lam].is_zero():
                            t = t - Om[a][mu] * v * Om[c][lam]
                T[b][mu][lam] = t
    Gamma = [[[sum((E[b][nu] * T[b][mu][lam] for b in R4), ZERO) for lam in R4] for mu in R4] for nu in R4]
    g = [[sum((Om[a][mu] * Om[a][nu] * ETA[a] for a in R4), ZERO) for nu in R4] for mu in R4]
    return AffineData(E, Om, V, Gamma, g)


def torsion(c: AffineData):
    """T^nu_{mu lam} = Gamma^nu_{mu lam} - Gamma^nu_{lam mu}."""
    return [[[c.Gamma[nu][mu][lam] - c.Gamma[nu][lam][mu] for lam in R4] for mu in R4] for nu in R4]


def is_zero_tensor(t) -> bool:
    if isinstance(t, Scalar):
        return t.is_zero()
    return all(is_zero_tensor(s) for s in t)


def nabla_metric(c: AffineData, g=None):
    """(nabla_rho g)_{mu nu}."""
    g = g or c.g
    out = [[[ZERO] * DIM for _ in R4] for _ in R4]
    for rho in R4:
        for mu in R4:
            for nu in R4:
                t = g[mu][nu].diff(rho)
                for lam in R4:
                    t = t - c.Gamma[lam][rho][mu] * g[lam][nu] - c.Gamma[lam][rho][nu] * g[mu][lam]
                out[rho][mu][nu] = t
    return out


def conformal_one_form(c: AffineData):
    """phi with nabla g = phi (x) g; NotConformal if none exists."""
    ng = nabla_metric(c)
    mu0, nu0 = next((m, n) for m in R4 for n in R4 if not c.g[m][n].is_zero())
    phi = [ng[rho][mu0][nu0] / c.g[mu0][nu0] for rho in R4]
    for rho in R4:
        for mu in R4:
            for nu in R4:
                if ng[rho][mu][nu] != phi[rho] * c.g[mu][nu]:
                    raise NotConformal("nabla g is not proportional to g")
    return phi


def _to_sympy(s: Scalar):
    return sp.sympify(str(s).replace("^", "**"), locals={f"x{i}": sp.Symbol(f"x{i}") for i in R4})


SYMS = sp.symbols("x0:4")


def _from_sympy(e) -> Scalar:
    e = sp.cancel(sp.together(e))
    return parse_scalar(str(e))


def parallel_metric(c: AffineData, origin=(0, 0, 0, 0)):
    """Phi g with nabla(Phi g) = 0 and Phi(origin) = 1; NotExact if -phi has no rational potential."""
    phi = conformal_one_form(c)
    for a in R4:
        for b in range(a):
            if phi[a].diff(b) != phi[b].diff(a):
                raise NotExact("phi is not closed")
    ph = [_to_sympy(p) for p in phi]
    F = 0
    rest = list(ph)
    for mu in R4:
        term = sp.integrate(rest[mu], SYMS[mu])
        F = F + term
        rest = [sp.simplify(r - sp.diff(term, SYMS[nu])) for nu, r in enumerate(rest)]
    if any(sp.simplify(r) != 0 for r in rest):
        raise NotExact("could not integrate phi")
    Phi = sp.simplify(sp.exp(-F))
    Phi = sp.simplify(Phi / Phi.subs(dict(zip(SYMS, origin))))
    if not Phi.is_rational_function(*SYMS):
        raise NotExact(f"the conformal factor {Phi} is not rational")
    P = _from_sympy(Phi)
    g = [[P * c.g[m][n] for n in R4] for m in R4]
    if not is_zero_tensor(nabla_metric(c, g)):
        raise NotExact("integrated factor does not make g parallel")
    return g


def riemann(c: AffineData):
    """R^rho_{sigma mu nu} = d_mu G^rho_{nu sigma} - d_nu G^rho_{mu sigma} + G G - G G."""
    G = c.Gamma
    R = [[[[ZERO] * DIM for _ in R4] for _ in R4] for _ in R4]
    for rho in R4:
        for sg in R4:
            for mu in R4:
                for nu in range(mu + 1, DIM):
                    t = G[rho][nu][sg].diff(mu) - G[rho][mu][sg].diff(nu)
                    for lam in R4:
                        t = t + G[rho][mu][lam] * G[lam][nu][sg] - G[rho][nu][lam] * G[lam][mu][sg]
                    R[rho][sg][mu][nu] = t
                    R[rho][sg][nu][mu] = -t
    return R


def ricci(c: AffineData):
    R = riemann(c)
    return [[sum((R[rho][sg][rho][nu] for rho in R4), ZERO) for nu in R4] for sg in R4]


# --- backgrounds ----------------------------------------------------------------------
def minkowski_element() -> LElement:
    return frame_element([[ONE if a == m else ZERO for m in R4] for a in R4])


def ppwave_coframe(H: Scalar):
    """omega^0 = ((1-H)/2) dx0 - dx3, omega^3 = ((1+H)/2) dx0 + dx3, omega^i = dx^i."""
    half = Scalar(1) / Scalar(2)
    Om = [[ZERO] * DIM for _ in R4]
    Om[0][0], Om[0][3] = (ONE - H) * half, -ONE
    Om[3][0], Om[3][3] = (ONE + H) * half, ONE
    Om[1][1] = ONE
    Om[2][2] = ONE
    return Om


def ppwave_metric(H: Scalar):
    g = [[ZERO] * DIM for _ in R4]
    g[0][0] = H
    g[0][3] = g[3][0] = ONE
    g[1][1] = g[2][2] = ONE
    return g


def koszul_frame_connection(Om):
    """Levi-Civita connection of g = eta omega omega, as V_a[c][b] = (nabla_{e_a} omega^b)(e_c).

    Computed with sympy from the coordinate Christoffel symbols of g, independently
    of the algebroid machinery.
    """
    Oms = sp.Matrix(4, 4, lambda a, m: _to_sympy(Om[a][m]))
    eta = sp.diag(*ETA)
    g = sp.simplify(Oms.T * eta * Oms)
    gi = sp.simplify(g.inv())
    Es = sp.simplify(Oms.inv().T)  # rows: e_a components
    X = SYMS
    Gam = [[[sp.simplify(sum(gi[l, s] * (sp.diff(g[s, n], X[m]) + sp.diff(g[s, m], X[n]) - sp.diff(g[m, n], X[s]))
                              for s in R4) / 2) for n in R4] for m in R4] for l in R4]
    V = []
    for a in R4:
        Va = [[0] * DIM for _ in R4]
        for b in R4:
            # (nabla_mu omega^b)_nu = d_mu Om[b][nu] - Gamma^lam_{mu nu} Om[b][lam]
            cov = [[sp.diff(Oms[b, n], X[m]) - sum(Gam[l][m][n] * Oms[b, l] for l in R4) for n in R4] for m in R4]
            for cc in R4:
                val = sum(Es[a, m] * Es[cc, n] * cov[m][n] for m in R4 for n in R4)
                Va[cc][b] = sp.simplify(val)
        V.append(Va)
    return Es, V


def element_from_coframe(Om, V=None) -> LElement:
    """frame_element with tetrad dual to Om and vertical parts from V (default: Koszul)."""
    Es, Vs = koszul_frame_connection(Om) if V is None else (None, V)
    if Es is None:
        Es = sp.Matrix(4, 4, lambda a, m: _to_sympy(Om[a][m])).inv().T
    tetrad = [[_from_sympy(Es[a, m]) for m in R4] for a in R4]
    conn = []
    for a in R4:
        M = [[_from_sympy(Vs[a][c][b]) for b in R4] for c in R4]
        try:
            conn.append(matrix_to_sigma(M))
        except ValueError as exc:
            raise NotConformal(f"connection at e_{a} is not conformal") from exc
    return frame_element(tetrad, conn)


def ppwave_element(H) -> LElement:
    if isinstance(H, str):
        H = parse_scalar(H)
    return element_from_coframe(ppwave_coframe(H))


def conformal_minkowski_element(Omega) -> LElement:
    """e_a = Omega d_a with vertical parts -(d_a Omega) sigma_0."""
    if isinstance(Omega, str):
        Omega = parse_scalar(Omega)
    tetrad = [[Omega if a == m else ZERO for m in R4] for a in R4]
    conn = [[-Omega.diff(a)] + [ZERO] * 6 for a in R4]
    return frame_element(tetrad, conn)


def oracle_ricci(g):
    """Ricci tensor of a metric given as Scalars, via sympy (Levi-Civita)."""
    X = SYMS
    gs = sp.Matrix(4, 4, lambda m, n: _to_sympy(g[m][n]))
    gi = sp.simplify(gs.inv())
    Gam = [[[sp.simplify(sum(gi[l, s] * (sp.diff(gs[s, n], X[m]) + sp.diff(gs[s, m], X[n]) - sp.diff(gs[m, n], X[s]))
                              for s in R4) / 2) for n in R4] for m in R4] for l in R4]
    Ric = sp.zeros(4, 4)
    for s_ in R4:
        for n in R4:
            t = 0
            for r in R4:
                t += sp.diff(Gam[r][n][s_], X[r]) - sp.diff(Gam[r][r][s_], X[n])
                for l in R4:
                    t += Gam[r][r][l] * Gam[l][n][s_] - Gam[r][n][l] * Gam[l][r][s_]
            Ric[s_, n] = sp.simplify(t)
    return Ric


def oracle_christoffel(g):
    X = SYMS
    gs = sp.Matrix(4, 4, lambda m, n: _to_sympy(g[m][n]))
    gi = sp.simplify(gs.inv())
    return [[[sp.simplify(sum(gi[l, s] * (sp.diff(gs[s, n], X[m]) + sp.diff(gs[s, m], X[n]) - sp.diff(gs[m, n], X[s]))
                              for s in R4) / 2) for n in R4] for m in R4] for l in R4]


@dataclass
class BridgeReport:
    mc_defect_zero: bool
    torsion_zero: bool
    parallel: bool
    ricci_zero: bool
    g: list = field(repr=False, default=None)
    ricci: list = field(repr=False, default=None)


def bridge(x: LElement) -> BridgeReport:
    from .glaoid import mc_defect

    mc0 = mc_defect(x).is_zero()
    c = to_connection(x)
    T = torsion(c)
    try:
        g = parallel_metric(c)
        par = True
    except (NotExact, NotConformal):
        g, par = None, False
    Ric = ricci(c)
    return BridgeReport(mc0, is_zero_tensor(T), par, is_zero_tensor(Ric), g, Ric)
