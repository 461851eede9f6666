"""Radial reduction of the Kähler-Einstein Monge-Ampère problem on Y_I(N,m,n;K).

With X = |W|^2 det(I - Z Z^*)^{-1/K}, the potential
g = log[G(X) det(I - Z Z^*)^{-(m+n+N/K)}] / (M+1) solves the complex
Monge-Ampère equation exactly when G solves the ODE

    (M+1)^{-M} [X G'/K + (m+n+N/K) G]^{mn} [G G' + (G G'' - G'^2) X]
        (G')^{N-1} / G^{M+1} = G,        G(0) = K^{-mn},

where M = N + mn. For K = (mn+1)/(m+n) the solution is
G = ((m+n)/(mn+1))^{mn} (1-X)^{-(M+1)}.

The residual helpers are written with plain arithmetic, so they accept
``mpmath.mpf`` arguments for high-precision checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np
from scipy.integrate import solve_ivp as _scipy_solve_ivp

from .errors import DomainError, IntegrationError
from .kernel import coefficient_table

SPECIAL_TOL = 1e-12
DEFAULT_EPS = 1e-6


@dataclass(frozen=True)
class MAParams:
    N: int
    m: int
    n: int
    K: float

    def __post_init__(self):
        for name in ("N", "m", "n"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer")
        if not self.K > 0:
            raise ValueError("K must be positive")

    @property
    def M(self) -> int:
        return self.N + self.m * self.n

    @property
    def special_K(self) -> Fraction:
        return Fraction(self.m * self.n + 1, self.m + self.n)

    @property
    def is_special(self) -> bool:
        return abs(self.K - self.special_K) < SPECIAL_TOL

    @classmethod
    def special(cls, N: int, m: int, n: int) -> "MAParams":
        return cls(N, m, n, float(Fraction(m * n + 1, m + n)))


@dataclass(frozen=True)
class ODEState:
    X: float
    G: float
    Gp: float
    Gpp: float = 0.0


def _bracket1(X, G, Gp, p: MAParams, K):
    return X / K * Gp + (p.m + p.n + p.N / K) * G


def ode_lhs(state: ODEState, params: MAParams, K=None):
    """Left-hand side of the ODE at ``state``.

    ``K`` overrides ``params.K`` (e.g. with an exact mpf value).
    """
    X, G, Gp, Gpp = state.X, state.G, state.Gp, state.Gpp
    p = params
    K = p.K if K is None else K
    M = p.M
    b1 = _bracket1(X, G, Gp, p, K)
    b2 = G * Gp + (G * Gpp - Gp * Gp) * X
    return b1 ** (p.m * p.n) * b2 * Gp ** (p.N - 1) / (G ** (M + 1) * (M + 1) ** M)


def ode_residual(state: ODEState, params: MAParams, K=None):
    """LHS - G."""
    if not state.G > 0:
        raise DomainError("G must be positive")
    return ode_lhs(state, params, K) - state.G


def relative_residual(state: ODEState, params: MAParams, K=None):
    return ode_residual(state, params, K) / state.G


def initial_slope(params: MAParams) -> float:
    """G'(0) forced by the ODE at the singular point X = 0, with G(0) = K^{-mn}.

    At X = 0 the G'' term drops out and the equation reads
    (M+1)^{-M} (c G)^{mn} G G'^N / G^{M+1} = G with c = m+n+N/K, so
    G'(0)^N = (M+1)^M c^{-mn} G(0)^{N+1}.
    """
    return slope_from_value(params, params.K ** (-params.m * params.n))


def second_derivative(X: float, G: float, Gp: float, params: MAParams) -> float:
    """G'' solved from the ODE (the second bracket is linear in G'')."""
    p = params
    b1 = _bracket1(X, G, Gp, p, p.K)
    b2 = G ** (p.M + 2) * (p.M + 1) ** p.M * b1 ** (-p.m * p.n) * Gp ** (1 - p.N)
    return (b2 - G * Gp + X * Gp * Gp) / (X * G)


# ---------------------------------------------------------------------------
# explicit solution


@dataclass(frozen=True)
class SpecialSolution:
    params: MAParams

    @property
    def coefficient(self) -> float:
        p = self.params
        return ((p.m + p.n) / (p.m * p.n + 1)) ** (p.m * p.n)

    def G(self, X):
        return self.coefficient * (1 - X) ** (-(self.params.M + 1))

    def dG(self, X):
        M = self.params.M
        return self.coefficient * (M + 1) * (1 - X) ** (-(M + 2))

    def d2G(self, X):
        M = self.params.M
        return self.coefficient * (M + 1) * (M + 2) * (1 - X) ** (-(M + 3))

    def state(self, X) -> ODEState:
        return ODEState(X, self.G(X), self.dG(X), self.d2G(X))

    def g(self, W, Z) -> float:
        """Kähler-Einstein potential at (W, Z); W in C^N, Z an m x n matrix."""
        p = self.params
        W = np.asarray(W, dtype=complex).reshape(-1)
        Z = np.asarray(Z, dtype=complex).reshape(p.m, p.n)
        det = np.linalg.det(np.eye(p.m) - Z @ Z.conj().T).real
        if det <= 0:
            raise DomainError("Z outside R_I(m, n)")
        X = float(np.sum(np.abs(W) ** 2)) * det ** (-1.0 / p.K)
        if X >= 1:
            raise DomainError("(W, Z) outside the domain")
        r = (p.m + p.n) / (p.m * p.n + 1)
        return (-math.log1p(-X) - r * math.log(det)
                + p.m * p.n / (p.M + 1) * math.log(r))


def special_solution(params: MAParams) -> SpecialSolution:
    """Closed-form solution; requires K = (mn+1)/(m+n)."""
    if not params.is_special:
        raise ValueError(f"K={params.K} is not (mn+1)/(m+n)={float(params.special_K)}")
    return SpecialSolution(params)


def special_residual(params: MAParams, grid=None, dps: int = 50) -> float:
    """max |LHS - G| of the closed-form solution over ``grid`` (default [0, 0.95]).

    Evaluated in ``dps``-digit arithmetic: G reaches ~1e9 near X = 0.95, so
    a double-precision residual cannot resolve an absolute 1e-9.
    """
    if not params.is_special:
        raise ValueError(f"K={params.K} is not (mn+1)/(m+n)={float(params.special_K)}")
    if grid is None:
        grid = np.linspace(0.0, 0.95, 96)
    p = params
    K = p.special_K
    worst = mpmath.mpf(0)
    with mpmath.workdps(dps):
        Km = mpmath.mpf(K.numerator) / K.denominator
        c = (mpmath.mpf(p.m + p.n) / (p.m * p.n + 1)) ** (p.m * p.n)
        e = p.M + 1
        for X in grid:
            X = mpmath.mpf(X)
            u = 1 - X
            state = ODEState(X, c * u**-e, c * e * u ** (-e - 1), c * e * (e + 1) * u ** (-e - 2))
            worst = max(worst, abs(ode_residual(state, p, Km)))
    return float(worst)


# ---------------------------------------------------------------------------
# initial value problem


@dataclass(frozen=True)
class ODETrace:
    params: MAParams
    grid: np.ndarray
    G: np.ndarray
    Gp: np.ndarray
    error: np.ndarray
    sol: Callable = field(repr=False, compare=False, default=None)

    def __call__(self, X):
        """Interpolated (G, G') from the dense output."""
        if np.any(np.asarray(X) < self.grid[1]):
            raise ValueError("dense output starts at the bootstrap point")
        return self.sol(X)

    def _step(self, X: float, h: float) -> float:
        # G varies on the scale 1 - X near the pole; shrink the stencil with it
        return h * min(1.0, 10.0 * (1.0 - X))

    def residuals(self, h: float = 1e-5) -> np.ndarray:
        """Relative ODE residual of the interpolant at the interior grid points.

        G'' comes from a central difference of the interpolated G', so this
        checks the integrated curve rather than the right-hand side.
        """
        out = []
        for X in self.grid:
            hx = self._step(X, h)
            if X - hx < self.grid[1] or X + hx > self.grid[-1]:
                continue
            G, Gp = self.sol(X)
            Gpp = (self.sol(X + hx)[1] - self.sol(X - hx)[1]) / (2 * hx)
            out.append(relative_residual(ODEState(X, G, Gp, Gpp), self.params))
        return np.asarray(out)

    def pointwise_residuals(self, h: float = 1e-5) -> np.ndarray:
        """Relative residual at every grid point, one-sided differences at the ends.

        At X = 0 the G'' term drops out, so the stored (G, G') decide it.
        """
        lo, hi = self.grid[1], self.grid[-1]
        out = []
        for X, G0, Gp0 in zip(self.grid, self.G, self.Gp):
            if X == 0.0:
                out.append(relative_residual(ODEState(X, G0, Gp0), self.params))
                continue
            hx = self._step(X, h)
            f = lambda x: self.sol(x)[1]
            if X - hx < lo:
                Gpp = (-3 * f(X) + 4 * f(X + hx) - f(X + 2 * hx)) / (2 * hx)
            elif X + hx > hi:
                Gpp = (3 * f(X) - 4 * f(X - hx) + f(X - 2 * hx)) / (2 * hx)
            else:
                Gpp = (f(X + hx) - f(X - hx)) / (2 * hx)
            G, Gp = self.sol(X)
            out.append(relative_residual(ODEState(X, G, Gp, Gpp), self.params))
        return np.asarray(out)

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.G) > 0) and np.all(self.Gp > 0))

    def growth_ratio(self) -> float:
        """G(X_max) / G(0.5); large values indicate blow-up toward X = 1."""
        return float(self.G[-1] / self.sol(0.5)[0])


def slope_from_value(params: MAParams, G0: float) -> float:
    """G'(0) for an arbitrary starting value G(0) = G0 (same constraint as above)."""
    p = params
    c = p.m + p.n + p.N / p.K
    return ((p.M + 1) ** p.M * c ** (-p.m * p.n) * G0 ** (p.N + 1)) ** (1.0 / p.N)


def _rhs(params: MAParams):
    def rhs(X, y):
        G, Gp = y
        return [Gp, second_derivative(X, G, Gp, params)]
    return rhs


BLOWUP_CAP = 1e40


class PrematureBlowUp(IntegrationError):
    """G diverges before X_max: G(0) lies above the separatrix."""

    def __init__(self, X: float):
        super().__init__(f"G exceeds {BLOWUP_CAP:g} at X={X:.6g}; "
                         "the starting value lies above the separatrix")
        self.X = X


def _integrate(params: MAParams, X_max: float, tol: float, eps: float, grid: np.ndarray,
               G0: float):
    s0 = slope_from_value(params, G0)

    def slope_event(X, y):
        return y[1]

    slope_event.terminal = True
    slope_event.direction = -1

    def blowup_event(X, y):
        return y[0] - BLOWUP_CAP

    blowup_event.terminal = True

    with np.errstate(over="ignore", invalid="ignore"):
        res = _scipy_solve_ivp(_rhs(params), (eps, X_max), [G0 + s0 * eps, s0],
                               method="DOP853", rtol=max(tol, 1e-13), atol=tol * 1e-3,
                               dense_output=True, events=(slope_event, blowup_event))
    if res.status == 1 and res.t_events[0].size:
        raise IntegrationError("G' reached zero; the trajectory left the admissible branch")
    # a step-size failure with a huge G is the same blow-up caught a little early
    if res.status == 1 or (res.status == -1 and not res.y[0, -1] < 1e20):
        raise PrematureBlowUp(float(res.t[-1]))
    if res.status != 0:
        raise IntegrationError(res.message)
    vals = res.sol(grid[1:])
    G = np.concatenate([[G0], vals[0]])
    Gp = np.concatenate([[s0], vals[1]])
    return res.sol, G, Gp


def solve_ivp(params: MAParams, X_max: float = 0.9, tol: float = 1e-9,
              eps: float = DEFAULT_EPS, points: int = 181, G0: float | None = None) -> ODETrace:
    """Integrate the ODE from the singular point X = 0 up to ``X_max``.

    ``G0`` defaults to the boundary value K^{-mn}. The start X = eps uses the
    first-order series G(0) + G'(0) eps with G'(eps) = G'(0); from there an
    embedded 8th-order Runge-Kutta scheme (scipy DOP853) runs with relative
    tolerance ``tol``. The reported error is the difference against a second
    run at ``tol / 100``.
    """
    if not X_max <= 1 - 1e-4:
        raise ValueError("X_max must be <= 1 - 1e-4")
    if not X_max > eps:
        raise ValueError("X_max must exceed the bootstrap point")
    if G0 is None:
        G0 = params.K ** (-params.m * params.n)
    grid = np.linspace(0.0, X_max, points)
    grid[1] = max(grid[1], eps)
    sol, G, Gp = _integrate(params, X_max, tol, eps, grid, G0)
    _, G_ref, _ = _integrate(params, X_max, tol / 100.0, eps, grid, G0)
    if np.any(Gp <= 0):
        raise IntegrationError("G' <= 0 on the trace")
    return ODETrace(params, grid, G, Gp, np.abs(G - G_ref), sol)


def blows_up_before(params: MAParams, G0: float, X_end: float, cap: float = 1e40,
                    eps: float = DEFAULT_EPS) -> bool:
    """Whether the solution started from G(0) = G0 exceeds ``cap`` before ``X_end``."""
    s0 = slope_from_value(params, G0)

    def too_big(X, y):
        return y[0] - cap

    too_big.terminal = True
    res = _scipy_solve_ivp(_rhs(params), (eps, X_end), [G0 + s0 * eps, s0], method="DOP853",
                           rtol=1e-10, atol=1e-14, events=too_big)
    return res.status != 0


def shoot_initial_value(params: MAParams, X_end: float = 1 - 1e-6, iterations: int = 60) -> float:
    """G(0) whose solution blows up exactly as X -> 1, by bisection.

    Larger starting values blow up before X = 1, smaller ones stay bounded;
    the separatrix between the two is located to within the resolution
    that ``X_end`` allows.
    """
    lo = hi = params.K ** (-params.m * params.n)
    while blows_up_before(params, lo, X_end):
        lo /= 2.0
    while not blows_up_before(params, hi, X_end):
        hi *= 2.0
    for _ in range(iterations):
        mid = math.sqrt(lo * hi)
        if blows_up_before(params, mid, X_end):
            hi = mid
        else:
            lo = mid
        if hi / lo - 1.0 < 1e-13:
            break
    return math.sqrt(lo * hi)


# ---------------------------------------------------------------------------
# homogeneity criterion


@dataclass(frozen=True)
class BergmanProfile:
    """Normalized radial Bergman profile of Y_I(N,1,n;K), scaled so G(0) = K^{-n}."""

    n: int
    K: float
    N: int = 1

    def __post_init__(self):
        if self.N != 1:
            raise ValueError("kernel coefficients are only available for N = 1")

    @property
    def params(self) -> MAParams:
        return MAParams(self.N, 1, self.n, self.K)

    def _terms(self):
        table = coefficient_table(self.n, self.K)
        return [(table.b[i] * math.factorial(self.N + i - 1), self.N + i)
                for i in range(self.n + 2) if table.b[i] != 0]

    @property
    def scale(self) -> float:
        total = sum(c for c, _ in self._terms())
        return float(self.K) ** (-self.n) / total

    def state(self, X: float) -> ODEState:
        s, u = self.scale, 1.0 - X
        G = s * sum(c * u ** (-a) for c, a in self._terms())
        Gp = s * sum(c * a * u ** (-a - 1) for c, a in self._terms())
        Gpp = s * sum(c * a * (a + 1) * u ** (-a - 2) for c, a in self._terms())
        return ODEState(X, G, Gp, Gpp)


def homogeneity_residual(n: int, K, N: int = 1, grid=None) -> float:
    """max |ODE residual| of the normalized Bergman profile over X in [0, 0.9]."""
    profile = BergmanProfile(n, K, N)
    params = profile.params
    if grid is None:
        grid = np.linspace(0.0, 0.9, 91)
    return float(max(abs(ode_residual(profile.state(X), params)) for X in grid))
