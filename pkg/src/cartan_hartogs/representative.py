"""Bergman representative coordinates and Lu's representative centres.

A :class:`KernelOracle` evaluates ``K(z, conj(w))`` on a domain in C^d.
The representative coordinates based at t0 are

    f(z) = s0 + [d/d conj(t) log(K(z, t) / K(t, t))]_{t=t0} T(t0, t0)^{-1} A,

with ``T(z, t)[i, j] = d^2 log K(z, t) / dz_i d conj(t_j)``. They send t0 to
s0 and have Jacobian A at t0.

Disk and ball oracles differentiate in closed form; every other oracle goes
through central differences with one Richardson level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .domains import CartanSpec, CHSpec, ch_contains
from .errors import DomainError, KernelZeroError
from .kernel import coefficient_table, eval_kernel

FD_STEP = 1e-5
JACOBIAN_STEP = 1e-3
ZERO_TOL = 1e-12


def _richardson(D: Callable[[float], np.ndarray], h: float) -> np.ndarray:
    return (4.0 * D(h / 2.0) - D(h)) / 3.0


def _wirtinger(fun: Callable[[np.ndarray], complex | np.ndarray], x: np.ndarray,
               conj: bool, step: float) -> np.ndarray:
    """Gradient d/dx_k (conj=False) or d/d conj(x_k) (conj=True) of a complex function.

    Returns an array of shape ``(len(x),) + shape(fun(x))``.
    """
    sign = 1.0 if conj else -1.0

    def D(h):
        cols = []
        for k in range(x.size):
            e = np.zeros(x.size, dtype=complex)
            e[k] = h
            dx = (np.asarray(fun(x + e)) - np.asarray(fun(x - e))) / (2 * h)
            dy = (np.asarray(fun(x + 1j * e)) - np.asarray(fun(x - 1j * e))) / (2 * h)
            cols.append(0.5 * (dx + sign * 1j * dy))
        return np.array(cols)

    return _richardson(D, step)


class KernelOracle:
    """Bergman kernel evaluator ``(z, w) -> K(z, conj w)``.

    Subclasses provide ``__call__`` and ``contains``; analytic subclasses
    also override :meth:`dbar_log` and :meth:`mixed_hessian`.
    """

    dim: int
    analytic = False
    step = FD_STEP

    def __call__(self, z, w) -> complex:
        raise NotImplementedError

    def contains(self, z) -> bool:
        raise NotImplementedError

    def dbar_log(self, z, w) -> np.ndarray:
        """Vector d/d conj(w_j) log K(z, w)."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        k0 = self(z, w)
        return _wirtinger(lambda u: self(z, u), w, True, self.step) / k0

    def dbar_log_diag(self, w) -> np.ndarray:
        """Vector d/d conj(w_j) log K(w, w)."""
        w = np.asarray(w, dtype=complex)
        k0 = self(w, w)
        return _wirtinger(lambda u: self(u, u), w, True, self.step) / k0

    def mixed_hessian(self, z, w) -> np.ndarray:
        """T(z, w)[i, j] = d^2 log K(z, w) / dz_i d conj(w_j)."""
        z = np.asarray(z, dtype=complex).reshape(-1)
        w = np.asarray(w, dtype=complex).reshape(-1)
        k0 = self(z, w)
        d = z.size
        # d/dz = (d/dx - i d/dy)/2 and d/d conj(w) = (d/du + i d/dv)/2
        zdirs, wdirs = (1.0, -1j), (1.0, 1j)

        def L(dz, dw):
            return np.log(self(z + dz, w + dw) / k0)

        def D(h):
            T = np.zeros((d, d), dtype=complex)
            for i in range(d):
                for j in range(d):
                    for a, ca in zip((1.0, 1j), zdirs):
                        for b, cb in zip((1.0, 1j), wdirs):
                            ei = np.zeros(d, dtype=complex)
                            ej = np.zeros(d, dtype=complex)
                            ei[i], ej[j] = a * h, b * h
                            cross = L(ei, ej) - L(ei, -ej) - L(-ei, ej) + L(-ei, -ej)
                            T[i, j] += 0.25 * ca * cb * cross / (4 * h * h)
            return T

        return _richardson(D, JACOBIAN_STEP)


@dataclass
class BallOracle(KernelOracle):
    """Unit ball of C^M: K(z, w) = M! / pi^M (1 - <z, w>)^{-(M+1)}."""

    M: int = 1
    analytic = True

    @property
    def dim(self) -> int:
        return self.M

    def _inner(self, z, w) -> complex:
        return complex(np.vdot(np.ravel(w), np.ravel(z)))

    def __call__(self, z, w) -> complex:
        return math.factorial(self.M) / math.pi**self.M * (1 - self._inner(z, w)) ** (-(self.M + 1))

    def contains(self, z) -> bool:
        return float(np.vdot(z, z).real) < 1.0

    def dbar_log(self, z, w) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1)
        return (self.M + 1) * z / (1 - self._inner(z, w))

    def dbar_log_diag(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex).reshape(-1)
        return (self.M + 1) * w / (1 - float(np.vdot(w, w).real))

    def mixed_hessian(self, z, w) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1)
        w = np.asarray(w, dtype=complex).reshape(-1)
        s = 1 - self._inner(z, w)
        return (self.M + 1) * (np.eye(self.M) / s + np.outer(w.conj(), z) / s**2)


def disk_oracle() -> BallOracle:
    return BallOracle(M=1)


@dataclass
class NumericBallOracle(BallOracle):
    """Ball kernel, but differentiated by finite differences like any other oracle."""

    analytic = False

    dbar_log = KernelOracle.dbar_log
    dbar_log_diag = KernelOracle.dbar_log_diag
    mixed_hessian = KernelOracle.mixed_hessian


@dataclass
class CartanHartogsOracle(KernelOracle):
    """Kernel of Y_I(1,1,n;K) in packed coordinates (W, z_1, .., z_n)."""

    n: int = 1
    K: float = 1.0

    def __post_init__(self):
        self._table = coefficient_table(self.n, self.K)
        self._spec = CHSpec(CartanSpec("I", m=1, n=self.n), 1, float(self.K))

    @property
    def dim(self) -> int:
        return self.n + 1

    def __call__(self, z, w) -> complex:
        z = np.asarray(z, dtype=complex).reshape(-1)
        w = np.asarray(w, dtype=complex).reshape(-1)
        return eval_kernel(z[0], z[1:], w[0], w[1:], self.n, self.K, self._table, check=False)

    def contains(self, z) -> bool:
        z = np.asarray(z, dtype=complex).reshape(-1)
        return ch_contains(self._spec, z[:1], z[1:])


@dataclass
class PullbackOracle(KernelOracle):
    """Kernel of a planar domain D' mapped onto the domain of ``base`` by ``phi``.

    K'(z, w) = phi'(z) K(phi(z), phi(w)) conj(phi'(w)).
    """

    base: KernelOracle = field(default_factory=disk_oracle)
    phi: Callable[[complex], complex] = None
    dphi: Callable[[complex], complex] = None
    domain: Callable[[complex], bool] = None

    @property
    def dim(self) -> int:
        return 1

    def __call__(self, z, w) -> complex:
        z = complex(np.ravel(z)[0])
        w = complex(np.ravel(w)[0])
        return self.dphi(z) * self.base([self.phi(z)], [self.phi(w)]) * np.conj(self.dphi(w))

    def contains(self, z) -> bool:
        return bool(self.domain(complex(np.ravel(z)[0])))


def cayley_half_plane_oracle() -> PullbackOracle:
    """Upper half-plane realized through the Cayley map (z - i)/(z + i) onto the disk."""
    return PullbackOracle(
        base=disk_oracle(),
        phi=lambda z: (z - 1j) / (z + 1j),
        dphi=lambda z: 2j / (z + 1j) ** 2,
        domain=lambda z: z.imag > 0,
    )


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RepBase:
    t0: np.ndarray
    T: np.ndarray
    A: np.ndarray
    s0: np.ndarray


def make_base(oracle: KernelOracle, t0, A=None, s0=None) -> RepBase:
    """Base data at t0; T is the mixed Hessian T(t0, t0)."""
    t0 = np.asarray(t0, dtype=complex).reshape(-1)
    if t0.size != oracle.dim:
        raise ValueError(f"t0 must have {oracle.dim} entries")
    if not oracle.contains(t0):
        raise DomainError("base point outside the domain")
    T = np.asarray(oracle.mixed_hessian(t0, t0), dtype=complex)
    T = 0.5 * (T + T.conj().T)
    if np.linalg.eigvalsh(T)[0] <= 0:
        raise DomainError("metric tensor at the base point is not positive definite")
    d = oracle.dim
    A = np.eye(d, dtype=complex) if A is None else np.asarray(A, dtype=complex)
    s0 = np.zeros(d, dtype=complex) if s0 is None else np.asarray(s0, dtype=complex)
    return RepBase(t0, T, A, s0)


def _check_nonzero(oracle: KernelOracle, z, t0):
    k = oracle(z, t0)
    scale = math.sqrt(abs(oracle(z, z)) * abs(oracle(t0, t0)))
    if abs(k) <= ZERO_TOL * scale:
        raise KernelZeroError(f"K(z, t0) vanishes at z={z}")


def rep_coordinates(oracle: KernelOracle, base: RepBase, z) -> np.ndarray:
    """Image of z under the representative coordinates based at ``base.t0``."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    if not oracle.contains(z):
        raise DomainError("z outside the domain")
    _check_nonzero(oracle, z, base.t0)
    grad = oracle.dbar_log(z, base.t0) - oracle.dbar_log_diag(base.t0)
    return base.s0 + grad @ np.linalg.solve(base.T, base.A)


def rep_jacobian(oracle: KernelOracle, base: RepBase, z, method: str = "auto") -> np.ndarray:
    """Complex Jacobian ``J[i, k] = d f_i / d z_k`` of the representative coordinates.

    Coordinates are row vectors (f = s0 + grad T^{-1} A), so at t0 this
    returns ``A.T``; with the default A = I the distinction vanishes.

    ``method="analytic"`` uses d/dz_k of the gradient term, which is the
    mixed Hessian T(z, t0); ``"fd"`` differentiates :func:`rep_coordinates`
    numerically. ``"auto"`` picks analytic for closed-form oracles.
    """
    z = np.asarray(z, dtype=complex).reshape(-1)
    if method == "auto":
        method = "analytic" if oracle.analytic else "fd"
    if method == "analytic":
        Tz = np.asarray(oracle.mixed_hessian(z, base.t0))
        return (Tz @ np.linalg.solve(base.T, base.A)).T
    if method == "fd":
        grad = _wirtinger(lambda u: rep_coordinates(oracle, base, u), z, False, JACOBIAN_STEP)
        return grad.T
    raise ValueError(f"unknown method {method!r}")


def rep_jacobian_at_base(oracle: KernelOracle, base: RepBase, method: str = "auto") -> np.ndarray:
    return rep_jacobian(oracle, base, base.t0, method)


def centre_defect(oracle: KernelOracle, t, sample_zs: Iterable) -> float:
    """max_z ||T(z, t) - T(t, t)|| (spectral norm) over the samples."""
    t = np.asarray(t, dtype=complex).reshape(-1)
    Tt = np.asarray(oracle.mixed_hessian(t, t))
    worst = 0.0
    for z in sample_zs:
        Tz = np.asarray(oracle.mixed_hessian(np.asarray(z, dtype=complex).reshape(-1), t))
        worst = max(worst, float(np.linalg.norm(Tz - Tt, 2)))
    return worst


def is_representative_centre(oracle: KernelOracle, t, sample_zs: Iterable, tol: float = 1e-6) -> bool:
    """Whether T(z, t) is constant in z across the samples (Lu's centre condition)."""
    return centre_defect(oracle, t, sample_zs) < tol


def default_samples(oracle: KernelOracle, count: int = 32, seed: int = 0,
                    rmax: float = 0.7) -> list[np.ndarray]:
    """Interior sample points for centre tests, drawn from a ball of radius ``rmax``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        d = rng.standard_normal(oracle.dim) + 1j * rng.standard_normal(oracle.dim)
        z = d / np.linalg.norm(d) * rmax * rng.uniform()
        if oracle.contains(z):
            out.append(z)
    return out


def corollary2_map(oracle: KernelOracle, t0, sample_zs: Iterable | None = None,
                   tol: float = 1e-6) -> Callable[[np.ndarray], np.ndarray]:
    """z -> [d/d conj(t) log(K(z,t)/K(t,t))]_{t=t0} T(t0, t0)^{-1}.

    The domain must have the origin as representative centre; this is
    checked on ``sample_zs`` before the map is built. The returned map sends
    t0 to 0 with unit Jacobian there. Whether it is an automorphism of the
    domain is not claimed.
    """
    if sample_zs is None:
        sample_zs = default_samples(oracle)
    origin = np.zeros(oracle.dim, dtype=complex)
    if not oracle.contains(origin):
        raise DomainError("the origin is not in the domain")
    if not is_representative_centre(oracle, origin, sample_zs, tol):
        raise DomainError("the origin is not a representative centre of this domain")
    base = make_base(oracle, t0)

    def f(z):
        return rep_coordinates(oracle, base, z)

    return f


def centre_scan(oracle: KernelOracle, ts: Iterable, sample_zs: Iterable | None = None,
                tol: float = 1e-6) -> list[tuple[np.ndarray, bool, float]]:
    """(t, is_centre, defect) for each candidate t."""
    samples = list(default_samples(oracle) if sample_zs is None else sample_zs)
    rows = []
    for t in ts:
        t = np.asarray(t, dtype=complex).reshape(-1)
        d = centre_defect(oracle, t, samples)
        rows.append((t, d < tol, d))
    return rows
