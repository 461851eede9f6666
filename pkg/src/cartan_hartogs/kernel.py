"""Bergman kernel of the Cartan-Hartogs domain Y_I(1,1,n;K).

The domain is ``{(W, Z) in C x C^n : |W|^{2K} + |Z|^2 < 1}`` and its kernel is

    K^{-n} pi^{-(n+1)} F(Y) (1 - <Z, xi>)^{-(1+n+1/K)},
    F(Y) = sum_i b_i i! Y^{i+1},  Y = 1/(1-X),
    X = W conj(zeta) (1 - <Z, xi>)^{-1/K}.

The coefficients b_0..b_{n+1} are produced in exact rational arithmetic
whenever K is given as an int, float, Fraction or decimal string; an
``mpmath.mpf`` K falls back to 50-digit floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Number

import mpmath
import numpy as np

from .domains import CartanSpec, CHSpec, ch_contains
from .errors import BranchError, DomainError

MP_DPS = 50


def _exact(K):
    """Exact (Fraction) or extended-precision (mpf) version of K."""
    if isinstance(K, mpmath.mpf):
        return mpmath.mpf(K)
    if isinstance(K, (Fraction, int, str)):
        return Fraction(K)
    if isinstance(K, float):
        return Fraction(K)
    if isinstance(K, Number):
        return Fraction(float(K))
    raise TypeError(f"cannot interpret K={K!r}")


def _check_params(n, K):
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not K > 0:
        raise ValueError(f"K must be positive, got {K!r}")


def poly_P(x, n: int, K):
    """P(x) = (x+1) (x+1+K)(x+1+2K)...(x+1+nK).

    Works for any numeric type closed under + and * (float, Fraction, mpf).
    """
    out = x + 1
    for k in range(1, n + 1):
        out = out * (x + 1 + K * k)
    return out


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients b_0..b_{n+1} of F for a given (n, K).

    ``b`` holds doubles for evaluation; ``exact`` keeps the values the table
    was computed in (Fractions, or mpf when K was irrational).
    """

    n: int
    K: float
    b: tuple[float, ...]
    exact: tuple = ()

    def __post_init__(self):
        if len(self.b) != self.n + 2:
            raise ValueError(f"table for n={self.n} needs {self.n + 2} entries")
        if self.b[0] != 0:
            raise ValueError("b_0 must be zero")

    def to_dict(self) -> dict:
        K = self.K
        if isinstance(K, Fraction):
            K = int(K) if K.denominator == 1 else float(K)
        return {"n": self.n, "K": K, "b": list(self.b)}

    @classmethod
    def from_dict(cls, d: dict) -> "CoefficientTable":
        return cls(n=int(d["n"]), K=d["K"], b=tuple(float(v) for v in d["b"]))


def _finish(n, K, values) -> CoefficientTable:
    return CoefficientTable(n=n, K=K, b=tuple(float(v) for v in values), exact=tuple(values))


def coeffs_recurrence(n: int, K) -> CoefficientTable:
    """b_i from the triangular recurrence, solved left to right."""
    _check_params(n, K)
    k_ex = _exact(K)
    with mpmath.workdps(MP_DPS):
        b = [k_ex * 0]
        for i in range(1, n + 2):
            acc = poly_P(k_ex * 0 - i - 1, n, k_ex)
            for k in range(i):
                acc -= b[k] * (-1) ** k * (math.factorial(i) // math.factorial(i - k))
            b.append(acc / ((-1) ** i * math.factorial(i)))
        return _finish(n, K, b)


def coeffs_closed_form(n: int, K) -> CoefficientTable:
    """b_i = sum_{j=1}^{i} (-1)^j P(-j-1) / (j! (i-j)!)."""
    _check_params(n, K)
    k_ex = _exact(K)
    with mpmath.workdps(MP_DPS):
        b = [k_ex * 0]
        for i in range(1, n + 2):
            acc = k_ex * 0
            for j in range(1, i + 1):
                acc += (-1) ** j * poly_P(k_ex * 0 - j - 1, n, k_ex) / (
                    math.factorial(j) * math.factorial(i - j))
            b.append(acc)
        return _finish(n, K, b)


@lru_cache(maxsize=256)
def _cached_table(n: int, K) -> CoefficientTable:
    return coeffs_closed_form(n, K)


def coefficient_table(n: int, K) -> CoefficientTable:
    """Cached closed-form table; the default used by evaluators."""
    return _cached_table(int(n), K)


def eval_F(Yval, table: CoefficientTable):
    """F(Y) = sum_{i=0}^{n+1} b_i i! Y^{i+1} (Horner form)."""
    acc = 0.0
    for i in range(table.n + 1, -1, -1):
        acc = acc * Yval + table.b[i] * math.factorial(i)
    return acc * Yval


def eval_F_prime(Yval, table: CoefficientTable):
    """dF/dY."""
    acc = 0.0
    for i in range(table.n + 1, -1, -1):
        acc = acc * Yval + table.b[i] * math.factorial(i) * (i + 1)
    return acc


def bergman_G(X: float, table: CoefficientTable, N: int = 1) -> float:
    """sum_i b_i Gamma(N+i) (1-X)^{-(N+i)}.

    With N = 1 this is F((1-X)^{-1}); other N only make sense once a
    coefficient table for the N-dimensional fiber is available.
    """
    if not X < 1:
        raise DomainError(f"X must be < 1, got {X}")
    Yv = 1.0 / (1.0 - X)
    return sum(table.b[i] * math.factorial(N + i - 1) * Yv ** (N + i)
               for i in range(table.n + 2))


def _domain_spec(n, K) -> CHSpec:
    return CHSpec(CartanSpec("I", m=1, n=n), fiber_dim=1, K=float(K))


def polarized_det(Z, xi) -> complex:
    """det(I - Z conj(xi)^t) for 1 x n matrices, i.e. 1 - <Z, xi>."""
    return complex(1.0 - np.vdot(np.ravel(xi), np.ravel(Z)))


def polarized_X(W, Z, zeta, xi, K) -> complex:
    """X = W conj(zeta) det(I - Z conj(xi)^t)^{-1/K} on the principal branch."""
    d = polarized_det(Z, xi)
    if d.real <= 0:
        raise BranchError(f"polarized determinant {d} has non-positive real part")
    return complex(W) * np.conj(complex(zeta)) * d ** (-1.0 / float(K))


def eval_kernel(W, Z, zeta, xi, n: int, K, table: CoefficientTable | None = None,
                check: bool = True) -> complex:
    """Bergman kernel K((W, Z); (zeta, xi)) of Y_I(1,1,n;K)."""
    Z = np.asarray(Z, dtype=complex).reshape(-1)
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    W = complex(np.ravel(W)[0]) if np.ndim(W) else complex(W)
    zeta = complex(np.ravel(zeta)[0]) if np.ndim(zeta) else complex(zeta)
    if Z.size != n or xi.size != n:
        raise DomainError(f"Z and xi must have {n} entries")
    if check:
        spec = _domain_spec(n, K)
        if not ch_contains(spec, [W], Z) or not ch_contains(spec, [zeta], xi):
            raise DomainError("kernel arguments must lie in Y_I(1,1,n;K)")
    if table is None:
        table = coefficient_table(n, K)
    d = polarized_det(Z, xi)
    if d.real <= 0:
        raise BranchError(f"polarized determinant {d} has non-positive real part")
    Kf = float(K)
    X = W * np.conj(zeta) * d ** (-1.0 / Kf)
    Yv = 1.0 / (1.0 - X)
    prefactor = Kf ** (-n) * math.pi ** (-(n + 1))
    return complex(prefactor * eval_F(Yv, table) * d ** (-(1 + n + 1.0 / Kf)))


def diagonal_kernel(W, Z, n: int, K, table: CoefficientTable | None = None) -> float:
    """K((W, Z); (W, Z)), real and positive."""
    return eval_kernel(W, Z, W, Z, n, K, table).real
