"""Kähler metrics as complex Hessians of log-potentials.

Coordinates on Y_I(N, m, n; K) are ordered ``(W_1..W_N, Z_11..Z_mn)`` with Z
flattened row-major. A metric at a point is a :class:`HermitianForm` ``T``
with ``T[i, j] = d^2 phi / dz_i d conj(z_j)``; the squared length of a
tangent vector v is ``sum_ij T[i, j] v_i conj(v_j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .domains import CartanSpec, CHSpec, ch_contains
from .errors import DegenerateMetric, DomainError
from .kernel import coefficient_table, diagonal_kernel, eval_kernel

# relative to the distance to the boundary; see the decisions on FD steps
DEFAULT_REL_STEP = 5e-3


@dataclass(frozen=True)
class HermitianForm:
    matrix: np.ndarray
    error: float = 0.0
    asymmetry: float = 0.0

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def length(self, v) -> float:
        v = np.asarray(v, dtype=complex)
        q = np.real(v @ self.matrix @ v.conj())
        return math.sqrt(max(q, 0.0))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def is_positive_definite(self) -> bool:
        return self.min_eigenvalue() > 0


def _real_hessian(f: Callable[[np.ndarray], float], x: np.ndarray, h: float) -> np.ndarray:
    n = x.size
    H = np.empty((n, n))
    f0 = f(x)
    for a in range(n):
        ea = np.zeros(n)
        ea[a] = h
        H[a, a] = (f(x + ea) - 2.0 * f0 + f(x - ea)) / h**2
        for b in range(a + 1, n):
            eb = np.zeros(n)
            eb[b] = h
            H[a, b] = H[b, a] = (f(x + ea + eb) - f(x + ea - eb)
                                 - f(x - ea + eb) + f(x - ea - eb)) / (4.0 * h * h)
    return H


def _wirtinger(H: np.ndarray, M: int) -> np.ndarray:
    xx, xy = H[:M, :M], H[:M, M:]
    yx, yy = H[M:, :M], H[M:, M:]
    return 0.25 * (xx + yy + 1j * (xy - yx))


def complex_hessian(potential: Callable[[np.ndarray], float], point, step: float,
                    richardson: bool = True) -> HermitianForm:
    """Matrix of d^2 potential / dz_i d conj(z_j) by central differences.

    The real 2M x 2M Hessian is taken in (Re z, Im z) with step ``step`` and,
    when ``richardson`` is set, combined with the half-step estimate to
    cancel the h^2 error term. The result is symmetrized; ``error`` is the
    max-norm difference between the two step levels and ``asymmetry`` the
    Hermitian defect before symmetrization.
    """
    z = np.asarray(point, dtype=complex).reshape(-1)
    M = z.size
    x = np.concatenate([z.real, z.imag])

    def f(xr):
        return float(potential(xr[:M] + 1j * xr[M:]))

    coarse = _wirtinger(_real_hessian(f, x, step), M)
    if richardson:
        fine = _wirtinger(_real_hessian(f, x, step / 2.0), M)
        T = (4.0 * fine - coarse) / 3.0
        err = float(np.max(np.abs(fine - coarse))) / 3.0
    else:
        T, err = coarse, float("nan")
    asym = float(np.max(np.abs(T - T.conj().T)))
    T = 0.5 * (T + T.conj().T)
    return HermitianForm(T, error=err, asymmetry=asym)


# ---------------------------------------------------------------------------
# Y_I(1,1,n;K): Bergman metric


def _split(point, N: int):
    p = np.asarray(point, dtype=complex).reshape(-1)
    return p[:N], p[N:]


def ch_type_i_spec(n: int, K, N: int = 1, m: int = 1) -> CHSpec:
    return CHSpec(CartanSpec("I", m=m, n=n), fiber_dim=N, K=float(K))


def boundary_distance_estimate(spec: CHSpec, point) -> float:
    """Distance from ``point`` to the boundary along the worst coordinate ray.

    Found by bisection on the membership predicate in each of the 2M real
    coordinate directions; used only to scale finite-difference steps.
    """
    p = np.asarray(point, dtype=complex).reshape(-1)
    N = spec.fiber_dim

    def inside(q):
        W, Z = _split(q, N)
        return ch_contains(spec, W, Z.reshape(spec.base.shape))

    if not inside(p):
        raise DomainError("point outside the domain")
    best = 1.0
    for k in range(p.size):
        for unit in (1.0, -1.0, 1j, -1j):
            e = np.zeros(p.size, dtype=complex)
            e[k] = unit
            lo, hi = 0.0, 2.0
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if inside(p + mid * e):
                    lo = mid
                else:
                    hi = mid
            best = min(best, lo)
    return best


def bergman_potential(n: int, K):
    """log K((W, Z); (W, Z)) for Y_I(1,1,n;K) as a function of (W, z_1..z_n)."""
    table = coefficient_table(n, K)

    def phi(p):
        p = np.asarray(p, dtype=complex)
        return math.log(eval_kernel(p[0], p[1:], p[0], p[1:], n, K, table, check=False).real)

    return phi


def bergman_metric(n: int, K, point, rel_step: float = DEFAULT_REL_STEP) -> HermitianForm:
    """Bergman metric of Y_I(1,1,n;K) at ``point = (W, z_1, .., z_n)``."""
    spec = ch_type_i_spec(n, K)
    h = rel_step * boundary_distance_estimate(spec, point)
    return complex_hessian(bergman_potential(n, K), point, h)


# ---------------------------------------------------------------------------
# G_lambda potential and the metric Y(I lambda)


def _fiber_invariant(spec: CHSpec, W, Z) -> tuple[float, float]:
    Zm = np.asarray(Z, dtype=complex).reshape(spec.base.shape)
    det = np.linalg.det(np.eye(Zm.shape[0]) - Zm @ Zm.conj().T).real
    X = float(np.sum(np.abs(W) ** 2)) * det ** (-1.0 / spec.K)
    return X, det


def _check_type_i(spec: CHSpec):
    if spec.base.kind != "I":
        raise ValueError("G_lambda is defined here for type I Cartan-Hartogs domains only")


def g_lambda_potential(Z, W, lam: float, spec: CHSpec) -> float:
    """G_lambda = Y^lambda det(I - Z Z^*)^{-(m+n+N/K)} with Y = 1/(1-X)."""
    _check_type_i(spec)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    W = np.asarray(W, dtype=complex).reshape(-1)
    if not ch_contains(spec, W, np.asarray(Z, dtype=complex).reshape(spec.base.shape)):
        raise DomainError("(W, Z) outside the domain")
    X, det = _fiber_invariant(spec, W, Z)
    m, n, N = spec.base.m, spec.base.n, spec.fiber_dim
    return (1.0 - X) ** (-lam) * det ** (-(m + n + N / spec.K))


def log_g_lambda(lam: float, spec: CHSpec):
    """log G_lambda as a function of the packed coordinates (W, Z)."""
    _check_type_i(spec)
    m, n, N = spec.base.m, spec.base.n, spec.fiber_dim
    expo = m + n + N / spec.K

    def phi(p):
        W, Z = _split(p, N)
        X, det = _fiber_invariant(spec, W, Z)
        return -lam * math.log1p(-X) - expo * math.log(det)

    return phi


def y_lambda_metric(Z, W, lam: float, spec: CHSpec,
                    rel_step: float = DEFAULT_REL_STEP) -> HermitianForm:
    """Complex Hessian of log G_lambda, in (W, Z) coordinates."""
    _check_type_i(spec)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    point = np.concatenate([np.ravel(np.asarray(W, dtype=complex)),
                            np.ravel(np.asarray(Z, dtype=complex))])
    h = rel_step * boundary_distance_estimate(spec, point)
    return complex_hessian(log_g_lambda(lam, spec), point, h)


# ---------------------------------------------------------------------------
# unit ball reference metrics


def ball_bergman_form(z) -> HermitianForm:
    """Closed-form Bergman metric of the unit ball B^M at z."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    s = 1.0 - float(np.vdot(z, z).real)
    if s <= 0:
        raise DomainError("z outside the unit ball")
    M = z.size
    T = (M + 1) * (np.eye(M) / s + np.outer(z.conj(), z) / s**2)
    return HermitianForm(T)


def ball_caratheodory_length(z, v) -> float:
    """Carathéodory length of v at z in the unit ball."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)
    s = 1.0 - float(np.vdot(z, z).real)
    if s <= 0:
        raise DomainError("z outside the unit ball")
    q = float(np.vdot(v, v).real) / s + abs(np.vdot(z, v)) ** 2 / s**2
    return math.sqrt(q)


def ball_metrics(M: int, z, v) -> tuple[float, float]:
    """(Bergman length, Carathéodory length) of v at z in B^M."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)
    if z.size != M or v.size != M:
        raise ValueError(f"z and v must have {M} entries")
    return ball_bergman_form(z).length(v), ball_caratheodory_length(z, v)


def _sample_ball(M: int, rng: np.random.Generator, rmax: float = 0.99):
    d = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    return d / np.linalg.norm(d) * rmax * rng.uniform() ** (1.0 / (2 * M))


def lu_constant_ball(M: int, samples: int = 2000, seed: int = 0) -> float:
    """sup of Carathéodory / Bergman length over sampled (z, v) in B^M."""
    if M < 1:
        raise ValueError("M must be >= 1")
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(samples):
        z = _sample_ball(M, rng)
        v = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        b, c = ball_metrics(M, z, v)
        best = max(best, c / b)
    return best


# ---------------------------------------------------------------------------
# equivalence ratios


@dataclass(frozen=True)
class RatioReport:
    min_ratio: float
    max_ratio: float
    sample_count: int

    def contains(self, value: float) -> bool:
        return self.min_ratio <= value <= self.max_ratio


def metric_ratio_bounds(A: HermitianForm, B: HermitianForm) -> tuple[float, float]:
    """Extreme values of len_A(v) / len_B(v) over all nonzero v.

    These are square roots of the generalized eigenvalues of (A, B).
    """
    for form in (A, B):
        if not form.is_positive_definite():
            raise DegenerateMetric("metric is not positive definite at a sample point")
    w = scipy.linalg.eigh(A.matrix, B.matrix, eigvals_only=True)
    return math.sqrt(w[0]), math.sqrt(w[-1])


def sample_ch_points(spec: CHSpec, count: int, rng: np.random.Generator,
                     rmax: float = 0.9, include_origin: bool = True) -> list[np.ndarray]:
    """Points of a Cartan-Hartogs domain in packed (W, Z) coordinates.

    A direction is drawn uniformly on the unit sphere of C^M, the exit
    radius along it is found by bisection, and the point is placed at a
    uniform fraction in [0, rmax) of that radius. The origin is the first
    sample when ``include_origin`` is set.
    """
    N = spec.fiber_dim
    M = spec.dim

    def inside(q):
        W, Z = _split(q, N)
        return ch_contains(spec, W, Z.reshape(spec.base.shape))

    out = [np.zeros(M, dtype=complex)] if include_origin and count > 0 else []
    while len(out) < count:
        d = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        d /= np.linalg.norm(d)
        lo, hi = 0.0, 1.0
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            if inside(mid * d):
                lo = mid
            else:
                hi = mid
        out.append(d * lo * rmax * rng.uniform())
    return out


def equivalence_ratio(metric_a: Callable[[np.ndarray], HermitianForm],
                      metric_b: Callable[[np.ndarray], HermitianForm],
                      spec: CHSpec, samples: int, seed: int = 0) -> RatioReport:
    """min / max of len_A / len_B over sampled points and all directions."""
    rng = np.random.default_rng(seed)
    lo, hi = math.inf, 0.0
    points = sample_ch_points(spec, samples, rng)
    for p in points:
        a, b = metric_ratio_bounds(metric_a(p), metric_b(p))
        lo, hi = min(lo, a), max(hi, b)
    return RatioReport(lo, hi, len(points))


def bergman_vs_y_lambda(n: int, K, lam: float | None = None, samples: int = 500,
                        seed: int = 0) -> RatioReport:
    """Equivalence ratio of the Bergman metric and Y(I lambda) on Y_I(1,1,n;K).

    ``lam`` defaults to the fiber dimension N = 1.
    """
    spec = ch_type_i_spec(n, K)
    lam = float(spec.fiber_dim if lam is None else lam)

    def berg(p):
        return bergman_metric(n, K, p)

    def ylam(p):
        return y_lambda_metric(p[1:], p[:1], lam, spec)

    return equivalence_ratio(berg, ylam, spec, samples, seed)
