"""Gauge-fixed symbols and toy symmetric hyperbolic solvers.

Symbol assembly is exact (Scalar entries). The grid solvers work in double
precision on periodic grids of the unit torus.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import flint
import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import linalg
from .clifford import DIM, ExtElement
from .gauge import GaugeData, in_w_plus, wedge_action_E
from .glaoid import LElement, anchor, default_ideal, l_bracket
from .scalars import ZERO, Scalar


class Degenerate(ValueError):
    pass


class CFLViolation(ValueError):
    pass


class PositivityLost(RuntimeError):
    def __init__(self, msg, time=None):
        super().__init__(msg)
        self.time = time


# --- frames -----------------------------------------------------------------------
def frame_matrix(x: LElement) -> list[list[Scalar]]:
    """X[a][mu]: the theta_a coefficient of x applied to the coordinate x^mu."""
    a = anchor(x)
    out = [[ZERO] * DIM for _ in range(DIM)]
    for mu in range(DIM):
        w = a.on_coordinate(mu)
        for mask, c in w.coeffs.items():
            out[mask.bit_length() - 1][mu] = c
    return out


def det(M) -> Scalar:
    n = len(M)
    if n == 1:
        return M[0][0]
    total = ZERO
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def is_nondegenerate(x: LElement) -> bool:
    return not det(frame_matrix(x)).is_zero()


def _direction_samples():
    yield (0, 0, 0)
    for i in range(3):
        for s in (1, -1):
            n = [0, 0, 0]
            n[i] = s
            yield tuple(n)
    # corners scaled into the unit ball by a rational factor
    c = Fraction(4, 7)
    for signs in itertools.product((1, -1), repeat=3):
        yield tuple(c * s for s in signs)


def sample_points(radius: int = 1, step: Fraction = Fraction(1, 2)):
    vals = []
    v = Fraction(-radius)
    while v <= radius:
        vals.append(v)
        v += step
    return itertools.product(vals, repeat=DIM)


def check_global_hyperbolicity(x: LElement, points=None, time_scale=2) -> bool:
    """x(t + sum n^i xi_i) in W_+ for the sampled directions n and sample points.

    The coordinate system is t = time_scale * x^0, xi_i = x^i. With time_scale = 1
    the unit directions make x_mink(t + n xi) null, so the default rescales time.
    """
    X = frame_matrix(x)
    X = [[row[0] * time_scale] + row[1:] for row in X]
    pts = list(points) if points is not None else list(sample_points())
    for p in pts:
        Xp = [[c.evaluate(p) for c in row] for row in X]
        for n in _direction_samples():
            w = [Xp[a][0] + sum(n[i] * Xp[a][i + 1] for i in range(3)) for a in range(DIM)]
            if not in_w_plus(w):
                return False
    return True


# --- symbols ------------------------------------------------------------------------
def _pairing(g: GaugeData, k: int, y: LElement) -> list[Scalar]:
    """B^k(e_i, y) for the gauge basis e_i, with y in degree k+1 (reduced mod I)."""
    ideal = default_ideal()
    y = ideal.reduce(y)
    cs = ideal.complement_coords(k + 1)
    ci = {c: i for i, c in enumerate(cs)}
    M = g.B[k]
    out = [ZERO] * M.nrows()
    for key, c in y.terms.items():
        j = ci[key]
        for i in range(M.nrows()):
            b = M[i, j]
            if b != 0:
                out[i] = out[i] + c * Scalar(linalg.from_fmpq(b))
    return out


def _columns_to_matrix(cols, n):
    return [[cols[j][i] for j in range(len(cols))] for i in range(n)]


@dataclass
class SymbolSystem:
    """sum_mu A^mu d_mu u + C u for u in the gauge basis of degree k."""

    k: int
    A: list  # four n x n lists of Scalar
    C: list
    basis: list = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.basis)

    def is_constant(self) -> bool:
        return all(c.is_constant() for M in self.A + [self.C] for row in M for c in row)

    def exact_at(self, point=None):
        """(A^0..A^3, C) as fmpq matrices at a point (constants need no point)."""
        def ev(M):
            n = len(M)
            if point is None:
                return linalg.matrix([[c.to_fraction() for c in row] for row in M], n)
            return linalg.matrix([[c.evaluate(point) for c in row] for row in M], n)

        return [ev(M) for M in self.A], ev(self.C)

    def at(self, point=None):
        A, C = self.exact_at(point)
        conv = lambda m: np.array([[float(linalg.from_fmpq(m[i, j])) for j in range(m.ncols())]  # noqa: E731
                                   for i in range(m.nrows())])
        return [conv(a) for a in A], conv(C)

    def is_symmetric(self) -> bool:
        return all(M[i][j] == M[j][i] for M in self.A for i in range(self.size) for j in range(i))

    def a0_positive(self, point=None) -> bool:
        A, _ = self.exact_at(point)
        return linalg.is_positive_definite(A[0])


def assemble_symbol(g: GaugeData, x: LElement, k: int) -> SymbolSystem:
    if not is_nondegenerate(x):
        raise Degenerate("the frame part of x is not invertible")
    basis = g.elements(k)
    n = len(basis)
    a = anchor(x)
    A = []
    for mu in range(DIM):
        w = a.on_coordinate(mu)
        A.append(_columns_to_matrix([_pairing(g, k, e.wedge_left(w)) for e in basis], n))
    C = _columns_to_matrix([_pairing(g, k, l_bracket(x, e)) for e in basis], n)
    return SymbolSystem(k, A, C, basis)


def apply_L(g: GaugeData, x: LElement, k: int, u: LElement) -> list[Scalar]:
    """L^k(u) = B^k(-, [x, u])."""
    return _pairing(g, k, l_bracket(x, u))


def first_order_defect(g: GaugeData, x: LElement, k: int, f: Scalar, j: int) -> list[Scalar]:
    """L(f e_j) - f L(e_j) - B(-, a(f) e_j); zero for a first order operator with that symbol."""
    e = g.elements(k)[j]
    lhs = apply_L(g, x, k, e.scale(f))
    base = apply_L(g, x, k, e)
    jf = _pairing(g, k, e.wedge_left(anchor(x)(ExtElement({0: f}))))
    return [l - f * b - c for l, b, c in zip(lhs, base, jf)]


# --- contraction ---------------------------------------------------------------------
@dataclass
class ContractionSymbol:
    """K^mu and K^C in coordinates of E^{k+1}/E_G^{k+1} = theta_0 E_G^k."""

    k: int
    K: list
    KC: list
    Bhat: flint.fmpq_mat


def _quotient_map(g: GaugeData, k: int) -> flint.fmpq_mat:
    """Rows: coordinates along theta_0 E_G^k in E^{k+1} = E_G^{k+1} (+) theta_0 E_G^k."""
    G1 = g.basis[k + 1]
    T0 = wedge_action_E(0, k) * g.basis[k]
    n = T0.nrows()
    Q = flint.fmpq_mat(n, n)
    for j in range(G1.ncols()):
        for i in range(n):
            Q[i, j] = G1[i, j]
    for j in range(T0.ncols()):
        for i in range(n):
            Q[i, G1.ncols() + j] = T0[i, j]
    Qi = Q.inv()
    out = flint.fmpq_mat(T0.ncols(), n)
    for i in range(T0.ncols()):
        for j in range(n):
            out[i, j] = Qi[G1.ncols() + i, j]
    return out


def _quotient_coords(P, k: int, y: LElement) -> list[Scalar]:
    ideal = default_ideal()
    y = ideal.reduce(y)
    ci = {c: i for i, c in enumerate(ideal.complement_coords(k + 1))}
    out = [ZERO] * P.nrows()
    for key, c in y.terms.items():
        j = ci[key]
        for i in range(P.nrows()):
            if P[i, j] != 0:
                out[i] = out[i] + c * Scalar(linalg.from_fmpq(P[i, j]))
    return out


def contraction_operator(g: GaugeData, x: LElement, k: int) -> ContractionSymbol:
    """K = (quotient map) o [x, -] o (inclusion), split into principal and zeroth order parts."""
    P = _quotient_map(g, k)
    basis = g.elements(k)
    n = len(basis)
    a = anchor(x)
    K = [_columns_to_matrix([_quotient_coords(P, k, e.wedge_left(a.on_coordinate(mu))) for e in basis], n)
         for mu in range(DIM)]
    KC = _columns_to_matrix([_quotient_coords(P, k, l_bracket(x, e)) for e in basis], n)
    Bhat = g.B[k] * wedge_action_E(0, k) * g.basis[k]
    return ContractionSymbol(k, K, KC, Bhat)


def _scalar_matmul(F, M):
    """fmpq_mat F times a list-of-lists Scalar matrix M."""
    n, m = F.nrows(), len(M[0]) if M else 0
    out = [[ZERO] * m for _ in range(n)]
    for i in range(n):
        for l in range(F.ncols()):
            f = F[i, l]
            if f == 0:
                continue
            fs = Scalar(linalg.from_fmpq(f))
            for j in range(m):
                if not M[l][j].is_zero():
                    out[i][j] = out[i][j] + fs * M[l][j]
    return out


def check_contraction_identity(sym: SymbolSystem, kc: ContractionSymbol) -> bool:
    """B^k(-, K u) reproduces L^k exactly: A^mu = Bhat K^mu and C = Bhat K^C."""
    if linalg.rank(kc.Bhat) != sym.size:
        return False
    for mu in range(DIM):
        if _scalar_matmul(kc.Bhat, kc.K[mu]) != sym.A[mu]:
            return False
    return _scalar_matmul(kc.Bhat, kc.KC) == sym.C


# --- grid solvers ------------------------------------------------------------------------
def _ddx(u, dx, axis):
    return (np.roll(u, -1, axis=axis) - np.roll(u, 1, axis=axis)) / (2 * dx)


def spectral_radius(A0, As) -> float:
    A0inv = np.linalg.inv(A0)
    return sum(max(abs(np.linalg.eigvals(A0inv @ A))) for A in As)


@dataclass
class LeapfrogResult:
    u: np.ndarray
    u_prev: np.ndarray
    dt: float
    energy: list

    def relative_drift(self) -> float:
        e = np.array(self.energy)
        return float(np.max(np.abs(e - e[0])) / abs(e[0])) if e[0] else float(np.max(np.abs(e)))


def _energy(A0, u_new, u_old, cell):
    return float(np.sum(u_new * (u_old @ A0.T))) * cell


def evolve_linear(A0, As, u0, steps: int, cfl: float = 0.4, C=None, source=None,
                  u1=None, length: float = 1.0) -> LeapfrogResult:
    """Leapfrog / centered differences for A0 u_t + sum_i A_i d_i u + C u = source(t, grid).

    ``u0`` has shape (N,)*d + (m,), d = len(As). The first step is Heun unless
    ``u1`` (the state at t = dt) is supplied.
    """
    A0 = np.asarray(A0, dtype=float)
    As = [np.asarray(A, dtype=float) for A in As]
    d = len(As)
    N = u0.shape[0]
    dx = length / N
    rho = spectral_radius(A0, As)
    if cfl >= 1:
        raise CFLViolation(f"leapfrog needs cfl < 1, got {cfl}")
    dt = cfl * dx / rho if rho else cfl * dx
    A0inv = np.linalg.inv(A0)
    grid = [np.arange(N) * dx for _ in range(d)]
    mesh = np.meshgrid(*grid, indexing="ij")

    def rhs(t, u):
        f = -sum(np.einsum("ij,...j->...i", A, _ddx(u, dx, ax)) for ax, A in enumerate(As))
        if C is not None:
            f = f - np.einsum("ij,...j->...i", C, u)
        if source is not None:
            f = f + source(t, *mesh)
        return np.einsum("ij,...j->...i", A0inv, f)

    cell = dx ** d
    prev = np.array(u0, dtype=float)
    if u1 is None:
        k1 = rhs(0.0, prev)
        k2 = rhs(dt, prev + dt * k1)
        cur = prev + dt / 2 * (k1 + k2)
    else:
        cur = np.array(u1, dtype=float)
    energy = [_energy(A0, cur, prev, cell)]
    t = dt
    for _ in range(steps - 1):
        nxt = prev + 2 * dt * rhs(t, cur)
        prev, cur = cur, nxt
        t += dt
        energy.append(_energy(A0, cur, prev, cell))
    return LeapfrogResult(cur, prev, dt, energy)


def reduce_1d(sym: SymbolSystem, axis: int = 1, point=None):
    """(A0, [A_axis]) of the principal part for solutions depending on t and x^axis only."""
    A, _ = sym.at(point)
    return A[0], [A[axis]]


def reduce_dims(sym: SymbolSystem, dims: int, point=None):
    A, C = sym.at(point)
    return A[0], A[1:1 + dims], C


def plane_wave(N: int, m: int, mode: int = 1, seed: int = 0, dims: int = 1):
    rng = np.random.default_rng(seed)
    amp = rng.standard_normal(m)
    x = np.arange(N) / N
    mesh = np.meshgrid(*([x] * dims), indexing="ij")
    phase = 2 * np.pi * mode * sum(mesh)
    return np.sin(phase)[..., None] * amp


def manufactured_errors(A0, A1, Ns=(64, 128, 256), t_end: float = 0.5, cfl: float = 0.4):
    """L2 errors of leapfrog against u(t,x) = sin(2 pi (x - t)) c + cos(2 pi x) sin(t) c'."""
    A0 = np.asarray(A0, float)
    A1 = np.asarray(A1, float)
    m = A0.shape[0]
    rng = np.random.default_rng(7)
    c1, c2 = rng.standard_normal(m), rng.standard_normal(m)

    def exact(t, x):
        return np.sin(2 * np.pi * (x - t))[..., None] * c1 + (np.cos(2 * np.pi * x) * np.sin(t))[..., None] * c2

    def dt_exact(t, x):
        return (-2 * np.pi * np.cos(2 * np.pi * (x - t)))[..., None] * c1 + \
            (np.cos(2 * np.pi * x) * np.cos(t))[..., None] * c2

    def dx_exact(t, x):
        return (2 * np.pi * np.cos(2 * np.pi * (x - t)))[..., None] * c1 - \
            (2 * np.pi * np.sin(2 * np.pi * x) * np.sin(t))[..., None] * c2

    def source(t, x):
        return np.einsum("ij,...j->...i", A0, dt_exact(t, x)) + np.einsum("ij,...j->...i", A1, dx_exact(t, x))

    errors = []
    rho = spectral_radius(A0, [A1])
    for N in Ns:
        dx = 1.0 / N
        x = np.arange(N) * dx
        dt0 = cfl * dx / rho
        steps = int(round(t_end / dt0))
        # adjust cfl so that steps * dt = t_end exactly
        q = t_end / steps * rho / dx
        res = evolve_linear(A0, [A1], exact(0.0, x), steps, cfl=q, source=source, u1=exact(t_end / steps, x))
        err = res.u - exact(t_end, x)
        errors.append(float(np.sqrt(dx * np.sum(err ** 2))))
    return errors


def convergence_ratios(errors) -> list[float]:
    return [errors[i] / errors[i + 1] for i in range(len(errors) - 1)]


# --- quasilinear -------------------------------------------------------------------------
def evolve_quasilinear(coeffs, b, u0, t_end: float, cfl: float = 0.4, length: float = 1.0,
                       floor: float = 1e-8, max_speed=None):
    """RK4 in time, centered differences in space, coefficients frozen per stage.

    ``coeffs(x, u)`` returns (A0, A1) with shapes (N, m, m); ``b(x, u)`` has shape (N, m).
    Raises PositivityLost when the smallest eigenvalue of A0 drops below ``floor``.
    """
    u = np.array(u0, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    N = u.shape[0]
    dx = length / N
    x = np.arange(N) * dx

    def rhs(t, v):
        A0, A1 = coeffs(x, v)
        lo = np.linalg.eigvalsh(A0).min()
        if lo < floor:
            raise PositivityLost(f"A0 eigenvalue {lo:.3e} below floor", time=t)
        f = b(x, v) - np.einsum("nij,nj->ni", A1, _ddx(v, dx, 0))
        return np.linalg.solve(A0, f[..., None])[..., 0]

    speed = max_speed if max_speed is not None else max(1e-12, float(np.max(np.abs(u))))
    steps = max(1, int(np.ceil(t_end / (cfl * dx / speed))))
    dt = t_end / steps
    t = 0.0
    for _ in range(steps):
        k1 = rhs(t, u)
        k2 = rhs(t + dt / 2, u + dt / 2 * k1)
        k3 = rhs(t + dt / 2, u + dt / 2 * k2)
        k4 = rhs(t + dt, u + dt * k3)
        u = u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
    return u


def burgers_coeffs(x, u):
    n = u.shape[0]
    return np.ones((n, 1, 1)), u[:, :, None]


def burgers_zero_source(x, u):
    return np.zeros_like(u)


def burgers_oracle(x, t: float, eps: float):
    """u = eps sin(2 pi xi) with x = xi + t eps sin(2 pi xi), before breaking."""
    out = np.empty_like(x)
    for i, xv in enumerate(x):
        g = lambda xi: xi + t * eps * np.sin(2 * np.pi * xi) - xv  # noqa: E731
        xi = brentq(g, xv - abs(eps * t) - 1e-12, xv + abs(eps * t) + 1e-12, xtol=1e-15)
        out[i] = eps * np.sin(2 * np.pi * xi)
    return out


def breaking_time(eps: float) -> float:
    return 1.0 / (2 * np.pi * eps)


def burgers_error(N: int = 512, eps: float = 0.1, frac: float = 0.5) -> float:
    t = frac * breaking_time(eps)
    x = np.arange(N) / N
    u = evolve_quasilinear(burgers_coeffs, burgers_zero_source, eps * np.sin(2 * np.pi * x), t,
                           max_speed=eps)
    return float(np.max(np.abs(u[:, 0] - burgers_oracle(x, t, eps))))


def evolve_ode(A0, b, u0, t_end: float, steps: int = 2000):
    """A0(u) u' = b(u) by RK4."""
    u = np.array(u0, dtype=float)
    dt = t_end / steps

    def f(v):
        return np.linalg.solve(A0(v), b(v))

    for _ in range(steps):
        k1 = f(u)
        k2 = f(u + dt / 2 * k1)
        k3 = f(u + dt / 2 * k2)
        k4 = f(u + dt * k3)
        u = u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return u


def ode_oracle(A0, b, u0, t_end: float):
    sol = solve_ivp(lambda t, v: np.linalg.solve(A0(v), b(v)), (0, t_end), np.asarray(u0, float),
                    method="DOP853", rtol=1e-12, atol=1e-14)
    return sol.y[:, -1]


# --- discrete homotopy -----------------------------------------------------------------
def smooth_source(m: int, seed: int = 0, modes: int = 3):
    """A seeded smooth periodic r(t, x) with values in R^m."""
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal((modes, 2, m))

    def r(t, x):
        out = 0
        for j in range(modes):
            ph = 2 * np.pi * (j + 1) * x
            out = out + (np.cos(ph) * np.cos((j + 1) * t))[..., None] * coef[j, 0] + \
                (np.sin(ph) * np.sin(t))[..., None] * coef[j, 1]
        return out

    return r


@dataclass
class HomotopyResult:
    u: np.ndarray
    history: np.ndarray = field(repr=False)
    dt: float
    residual: float


def _spectral_dx(u, length: float = 1.0):
    N = u.shape[0]
    k = 2j * np.pi * np.fft.fftfreq(N, d=length / N)
    return np.real(np.fft.ifft(k[:, None] * np.fft.fft(u, axis=0), axis=0))


def discrete_homotopy(A0, A1, r, N: int, t_end: float = 0.5, cfl: float = 0.4) -> HomotopyResult:
    """Solve A0 u_t + A1 u_x = r with u(0) = 0; residual measured with independent operators.

    The residual uses a fourth-order time stencil and spectral space derivatives,
    evaluated at the middle time level.
    """
    A0 = np.asarray(A0, float)
    A1 = np.asarray(A1, float)
    m = A0.shape[0]
    dx = 1.0 / N
    rho = spectral_radius(A0, [A1])
    steps = int(np.ceil(t_end / (cfl * dx / rho)))
    q = t_end / steps * rho / dx
    dt = t_end / steps
    A0inv = np.linalg.inv(A0)
    x = np.arange(N) * dx
    hist = [np.zeros((N, m))]

    def rhs(t, u):
        f = r(t, x) - np.einsum("ij,nj->ni", A1, _ddx(u, dx, 0))
        return np.einsum("ij,nj->ni", A0inv, f)

    k1 = rhs(0.0, hist[0])
    k2 = rhs(dt, hist[0] + dt * k1)
    hist.append(hist[0] + dt / 2 * (k1 + k2))
    for n in range(1, steps):
        hist.append(hist[n - 1] + 2 * dt * rhs(n * dt, hist[n]))
    H = np.array(hist)
    assert q < 1
    n = steps // 2
    ut = (-H[n + 2] + 8 * H[n + 1] - 8 * H[n - 1] + H[n - 2]) / (12 * dt)
    res = np.einsum("ij,nj->ni", A0, ut) + np.einsum("ij,nj->ni", A1, _spectral_dx(H[n])) - r(n * dt, x)
    return HomotopyResult(H[-1], H, dt, float(np.sqrt(dx * np.sum(res ** 2))))
