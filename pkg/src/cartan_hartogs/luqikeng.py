"""Zero-freeness of the Bergman kernel of Y_I(1,1,n;K).

Up to automorphisms the kernel vanishes exactly where F(y) does, with
y = 1/(1-t) and |t| < 1. Writing F(y) = (1-t)^{-(n+2)} G(t) turns this into
locating the zeros of the real polynomial G inside the unit disk; the
equivalent half-plane problem uses q(y) = F(y) / y^2 on Re y > 1/2.

Roots come from companion-matrix eigenvalues and every verdict is
cross-checked against an argument-principle count on |t| = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import IllConditionedError, MethodDisagreement
from .kernel import CoefficientTable, coefficient_table

ROOT_RESIDUAL_TOL = 1e-8
BOUNDARY_BAND = 1e-9
SETTLE_TOL = 1e-6


class IllConditionedWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class RealPolynomial:
    """Real polynomial, coefficients in ascending degree.

    Vanishing top coefficients are stripped on construction; how many were
    removed is kept in ``stripped``.
    """

    coeffs: tuple[float, ...]
    stripped: int = 0

    def __post_init__(self):
        c = [float(v) for v in self.coeffs]
        removed = 0
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
            removed += 1
        object.__setattr__(self, "coeffs", tuple(c))
        object.__setattr__(self, "stripped", self.stripped + removed)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def derivative(self) -> "RealPolynomial":
        c = self.coeffs
        return RealPolynomial(tuple(k * c[k] for k in range(1, len(c))) or (0.0,))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


def _binomial_expand_one_minus_t(power: int):
    """Ascending coefficients of (1 - t)^power."""
    return [(-1) ** k * math.comb(power, k) for k in range(power + 1)]


def _table_values(table: CoefficientTable):
    return table.exact if table.exact else tuple(Fraction(v) for v in table.b)


def disk_polynomial(table: CoefficientTable) -> RealPolynomial:
    """G(t) = sum_i b_i i! (1-t)^{n+1-i}, expanded in powers of t.

    The expansion runs in the table's exact arithmetic so that cancellation
    between binomial terms does not cost precision.
    """
    n = table.n
    b = _table_values(table)
    out = [b[0] * 0] * (n + 2)
    for i in range(n + 2):
        weight = b[i] * math.factorial(i)
        for k, c in enumerate(_binomial_expand_one_minus_t(n + 1 - i)):
            out[k] += weight * c
    return RealPolynomial(tuple(float(v) for v in out))


def halfplane_polynomial(table: CoefficientTable) -> RealPolynomial:
    """q(y) = sum_{i>=1} b_i i! y^{i-1}, i.e. F(y) with the y^2 factor removed."""
    b = _table_values(table)
    return RealPolynomial(tuple(float(b[i] * math.factorial(i)) for i in range(1, table.n + 2)))


def companion_matrix(p: RealPolynomial) -> np.ndarray:
    c = np.asarray(p.coeffs, dtype=float)
    d = p.degree
    C = np.zeros((d, d))
    C[1:, :-1] = np.eye(d - 1)
    C[:, -1] = -c[:-1] / c[-1]
    return C


def backward_residual(p: RealPolynomial, r: complex) -> float:
    """|p(r)| / sum_k |c_k| |r|^k, the relative backward error of a root."""
    with np.errstate(over="ignore", invalid="ignore"):
        scale = np.polynomial.polynomial.polyval(abs(r), np.abs(p.coeffs))
        res = abs(p(r)) / scale if scale > 0 else 0.0
    return float(res) if np.isfinite(res) else np.inf


def roots(p: RealPolynomial, strict: bool = False) -> list[complex]:
    """All complex roots (with multiplicity) from companion-matrix eigenvalues.

    Each root must satisfy ``backward_residual < 1e-8``; clusters that miss
    the bound trigger an :class:`IllConditionedWarning`, or an
    :class:`IllConditionedError` when ``strict`` is set.
    """
    if p.degree < 1:
        return []
    eig = np.linalg.eigvals(companion_matrix(p))
    out = sorted((complex(z) for z in eig), key=lambda z: (abs(z), z.real, z.imag))
    bad = [z for z in out if backward_residual(p, z) >= ROOT_RESIDUAL_TOL]
    if bad:
        msg = f"{len(bad)} root(s) miss the residual bound, e.g. {bad[0]}"
        if strict:
            raise IllConditionedError(msg)
        warnings.warn(msg, IllConditionedWarning, stacklevel=2)
    return out


def _winding(p: RealPolynomial, dp: RealPolynomial, center: complex, radius: float,
             nodes: int) -> tuple[float, float]:
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    u = radius * np.exp(1j * theta)
    z = center + u
    pv = p(z)
    scale = np.polynomial.polynomial.polyval(np.abs(z), np.abs(p.coeffs))
    smallest = float(np.min(np.abs(pv) / scale))
    integrand = u * dp(z) / pv
    return float(np.mean(integrand).real), smallest


def count_zeros_in_disk(p: RealPolynomial, radius: float = 1.0, center: complex = 0.0,
                        max_nodes: int = 1 << 20) -> int:
    """Number of zeros of p in |t - center| < radius by the argument principle.

    The contour integral of (t - center) p'(t)/p(t) over the circle is
    evaluated with the trapezoidal rule, doubling the node count until the
    value sits within 0.25 of an integer and has moved by less than 1e-6
    since the previous level. The rule converges geometrically, so coarse
    levels that merely happen to round alike are not accepted.

    A root on the contour makes the count ill-posed. When |p| drops to
    rounding level at a node, or the rule fails to settle within
    ``max_nodes``, :class:`IllConditionedError` is raised.
    """
    if p.degree < 1:
        if p.coeffs[0] == 0.0:
            raise ValueError("zero polynomial")
        return 0
    dp = p.derivative()
    nodes = max(64, 16 * (p.degree + 1))
    prev = None
    while nodes <= max_nodes:
        value, smallest = _winding(p, dp, center, radius, nodes)
        if smallest < 1e-13:
            raise IllConditionedError(f"root on or next to |t - {center}| = {radius}")
        k = round(value)
        if abs(value - k) < 0.25 and prev is not None and abs(value - prev) < SETTLE_TOL:
            return int(k)
        prev = value
        nodes *= 2
    raise IllConditionedError(f"argument principle did not settle on |t - {center}| = {radius}")


def shifted_disk_polynomial(table: CoefficientTable) -> RealPolynomial:
    """G as a polynomial in s = 1 - t: S(s) = sum_i b_i i! s^{n+1-i}.

    Same zeros as G under t = 1 - s, but the coefficients are the plain
    products b_i i!, so nothing cancels near t = 1 where clusters of roots
    appear for large K.
    """
    b = _table_values(table)
    n = table.n
    return RealPolynomial(tuple(float(b[n + 1 - k] * math.factorial(n + 1 - k))
                                for k in range(n + 2)))


@dataclass(frozen=True)
class ZeroReport:
    n: int
    K: float
    verdict: str
    roots_in_disk: tuple[complex, ...]
    all_roots: tuple[complex, ...]
    oracle_count: int
    boundary_roots: tuple[complex, ...] = ()

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "verdict": self.verdict,
            "roots": [_root_json(z) for z in self.all_roots],
            "roots_in_disk": [_root_json(z) for z in self.roots_in_disk],
            "oracle_count": self.oracle_count,
            "boundary_roots": [_root_json(z) for z in self.boundary_roots],
        }


def _root_json(z: complex):
    return z.real if z.imag == 0 else [z.real, z.imag]


def is_lu_qikeng(n: int, K, table: CoefficientTable | None = None) -> ZeroReport:
    """Decide whether the kernel of Y_I(1,1,n;K) is zero-free.

    Roots are the companion eigenvalues of G written in s = 1 - t; the count
    inside |t| < 1 is checked against the argument principle on the same
    circle (|s - 1| = 1). Roots within 1e-9 of the circle are listed in
    ``boundary_roots`` and left out of the verdict; in that case the oracle
    is run on circles just inside and just outside, and both counts must
    match. Any mismatch raises :class:`MethodDisagreement`.
    """
    if table is None:
        table = coefficient_table(n, K)
    S = shifted_disk_polynomial(table)
    all_roots = tuple(sorted((1.0 - s for s in roots(S)), key=lambda z: (abs(z), z.real, z.imag)))
    inside = tuple(z for z in all_roots if abs(z) < 1.0 - BOUNDARY_BAND)
    boundary = tuple(z for z in all_roots if abs(abs(z) - 1.0) <= BOUNDARY_BAND)
    if boundary:
        gap = min(abs(abs(z) - 1.0) for z in all_roots if z not in boundary) if len(boundary) < len(all_roots) else 1.0
        delta = min(1e-3, 0.5 * gap)
        oracle = count_zeros_in_disk(S, 1.0 - delta, center=1.0)
        outer = count_zeros_in_disk(S, 1.0 + delta, center=1.0)
        if outer - oracle != len(boundary):
            raise MethodDisagreement(
                f"{len(boundary)} boundary root(s) but the oracle sees {outer - oracle} (n={n}, K={K})")
    else:
        oracle = count_zeros_in_disk(S, 1.0, center=1.0)
    if oracle != len(inside):
        raise MethodDisagreement(
            f"companion roots give {len(inside)} zeros in the disk, "
            f"argument principle gives {oracle} (n={n}, K={K})")
    verdict = "zero_free" if not inside else "has_zero"
    return ZeroReport(n=n, K=K, verdict=verdict, roots_in_disk=inside,
                      all_roots=all_roots, oracle_count=oracle, boundary_roots=boundary)


@dataclass(frozen=True)
class ScanRow:
    n: int
    K: float
    report: ZeroReport | None = None
    error: str | None = None


def scan(n: int, K_grid: Iterable) -> list[ScanRow]:
    """One row per K, in input order; failures are kept in the row."""
    rows = []
    for K in K_grid:
        try:
            rows.append(ScanRow(n, K, report=is_lu_qikeng(n, K)))
        except (ArithmeticError, ValueError) as exc:
            rows.append(ScanRow(n, K, error=f"{type(exc).__name__}: {exc}"))
    return rows


def mobius_t_from_y(y: complex) -> complex:
    """t = 1 - 1/y, mapping Re y > 1/2 onto |t| < 1."""
    return 1.0 - 1.0 / y


def disk_roots_via_halfplane(table: CoefficientTable) -> list[complex]:
    """Roots of q in Re y > 1/2, pushed to the t-disk."""
    return [mobius_t_from_y(y) for y in roots(halfplane_polynomial(table)) if y.real > 0.5]


def match_root_sets(a: Sequence[complex], b: Sequence[complex], tol: float) -> bool:
    """True when the multisets agree pairwise to relative ``tol``."""
    if len(a) != len(b):
        return False
    remaining = list(b)
    for z in a:
        best = min(range(len(remaining)), key=lambda k: abs(remaining[k] - z))
        if abs(remaining[best] - z) > tol * max(1.0, abs(z)):
            return False
        remaining.pop(best)
    return True
