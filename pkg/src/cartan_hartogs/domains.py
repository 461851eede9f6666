"""Classical Cartan domains, Cartan-Hartogs domains and their generalizations.

Points of a Cartan domain are numpy arrays:

* type I   ``(m, n)`` complex matrix,
* type II  ``(p, p)`` complex symmetric matrix,
* type III ``(q, q)`` complex skew-symmetric matrix,
* type IV  ``(n,)`` complex vector.

All membership predicates are strict and deterministic; ``distance_to_boundary``
exposes the underlying margin so callers can see how close a point sits to the
boundary.

For type IV, ``Z Z^t`` always means the bilinear sum ``sum(z_k**2)`` and
``Z conj(Z)^t`` the Hermitian square norm.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import ShapeError, SymmetryError

KINDS = ("I", "II", "III", "IV")

PIVOT_TOL = 1e-12
HERMITIAN_DET_TOL = 1e-10


@dataclass(frozen=True)
class CartanSpec:
    """One of the four classical domains R_I(m, n), R_II(p), R_III(q), R_IV(n)."""

    kind: str
    m: int = 1
    n: int = 1
    p: int = 1
    q: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown Cartan kind {self.kind!r}")
        for name in ("m", "n", "p", "q"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if self.kind == "III" and self.q < 2:
            raise ValueError("type III needs q >= 2")

    @property
    def shape(self) -> tuple[int, ...]:
        if self.kind == "I":
            return (self.m, self.n)
        if self.kind == "II":
            return (self.p, self.p)
        if self.kind == "III":
            return (self.q, self.q)
        return (self.n,)

    @property
    def dim(self) -> int:
        """Complex dimension (number of free coordinates)."""
        if self.kind == "I":
            return self.m * self.n
        if self.kind == "II":
            return self.p * (self.p + 1) // 2
        if self.kind == "III":
            return self.q * (self.q - 1) // 2
        return self.n

    def zero(self) -> np.ndarray:
        return np.zeros(self.shape, dtype=complex)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"kind": self.kind}
        if self.kind == "I":
            d.update(m=self.m, n=self.n)
        elif self.kind == "II":
            d["p"] = self.p
        elif self.kind == "III":
            d["q"] = self.q
        else:
            d["n"] = self.n
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CartanSpec":
        kw = {k: int(d[k]) for k in ("m", "n", "p", "q") if k in d}
        return cls(kind=str(d["kind"]), **kw)


@dataclass(frozen=True)
class CHSpec:
    """Cartan-Hartogs domain ``{|W|^{2K} < N_j(Z, Z)}`` with W in C^fiber_dim."""

    base: CartanSpec
    fiber_dim: int = 1
    K: float = 1.0

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError("K must be positive")
        if int(self.fiber_dim) != self.fiber_dim or self.fiber_dim < 1:
            raise ValueError("fiber_dim must be a positive integer")

    @property
    def dim(self) -> int:
        return self.fiber_dim + self.base.dim

    def to_dict(self) -> dict:
        d = {"family": "ch", **self.base.to_dict(), "N": self.fiber_dim, "K": self.K}
        return d


@dataclass(frozen=True)
class HuaSpec:
    """Hua domain: ``sum_j ||W_j||^{2 p_j} / N_s(Z, Z)^{K_j} < 1``.

    ``blocks`` holds one ``(N_j, p_j, K_j)`` triple per fiber vector.
    """

    base: CartanSpec
    blocks: tuple[tuple[int, float, float], ...] = field(default=((1, 1.0, 1.0),))

    def __post_init__(self):
        blocks = tuple((int(N), float(p), float(K)) for N, p, K in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        for N, p, K in blocks:
            if N < 1 or not p > 0 or not K > 0:
                raise ValueError(f"invalid Hua block {(N, p, K)}")

    def to_dict(self) -> dict:
        return {
            "family": "hua",
            **self.base.to_dict(),
            "blocks": [{"N": N, "p": p, "K": K} for N, p, K in self.blocks],
        }


@dataclass(frozen=True)
class GCHSpec:
    """Generalized Cartan-Hartogs domain R_i^{R_j}.

    ``(w, z)`` belongs to it when z is in the base domain R_i and
    ``w / N_i(z, z)^{1/(2K)}`` is in the fiber domain R_j.
    """

    base: CartanSpec
    fiber: CartanSpec
    K: float = 1.0

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError("K must be positive")

    @property
    def name(self) -> str:
        return f"Y({self.base.kind},{self.fiber.kind})"

    def to_dict(self) -> dict:
        return {
            "family": "gch",
            **self.base.to_dict(),
            "fiber": self.fiber.to_dict(),
            "K": self.K,
        }


DomainSpec = CartanSpec | CHSpec | HuaSpec | GCHSpec


def spec_from_dict(d: dict) -> DomainSpec:
    """Inverse of the ``to_dict`` methods; the ``family`` key selects the class."""
    family = d.get("family", "cartan")
    base = CartanSpec.from_dict(d)
    if family == "cartan":
        return base
    if family == "ch":
        return CHSpec(base, int(d.get("N", 1)), float(d.get("K", 1.0)))
    if family == "hua":
        blocks = tuple((b["N"], b["p"], b["K"]) for b in d["blocks"])
        return HuaSpec(base, blocks)
    if family == "gch":
        return GCHSpec(base, CartanSpec.from_dict(d["fiber"]), float(d.get("K", 1.0)))
    raise ValueError(f"unknown domain family {family!r}")


def spec_from_json(text: str) -> DomainSpec:
    return spec_from_dict(json.loads(text))


def spec_to_json(spec: DomainSpec) -> str:
    d = spec.to_dict()
    if isinstance(spec, CartanSpec):
        d = {"family": "cartan", **d}
    return json.dumps(d, sort_keys=True)


def listed_gch_specs(K: float = 1.0, m: int = 1, n: int = 2, p: int = 2,
                     q: int = 2, dim_iv: int = 2) -> list[GCHSpec]:
    """The sixteen domains Y(i, j) = R_i^{R_j}, i, j in I..IV."""
    cartans = {
        "I": CartanSpec("I", m=m, n=n),
        "II": CartanSpec("II", p=p),
        "III": CartanSpec("III", q=q),
        "IV": CartanSpec("IV", n=dim_iv),
    }
    return [GCHSpec(cartans[i], cartans[j], K) for i in KINDS for j in KINDS]


# ---------------------------------------------------------------------------
# point handling


def as_point(spec: CartanSpec, Z) -> np.ndarray:
    """Validate ``Z`` against ``spec`` and return it as a complex array."""
    Z = np.asarray(Z, dtype=complex)
    if spec.kind == "IV":
        Z = Z.reshape(-1) if Z.ndim == 2 and 1 in Z.shape else Z
    elif spec.kind == "I" and Z.ndim == 1 and spec.m == 1:
        Z = Z.reshape(1, -1)
    if Z.shape != spec.shape:
        raise ShapeError(f"type {spec.kind} point must have shape {spec.shape}, got {Z.shape}")
    if spec.kind == "II" and not np.array_equal(Z, Z.T):
        raise SymmetryError("type II point must be symmetric")
    if spec.kind == "III" and not np.array_equal(Z, -Z.T):
        raise SymmetryError("type III point must be skew-symmetric")
    return Z


def reshape_coeffs(spec: CartanSpec, w) -> np.ndarray:
    """Embed a coefficient vector of length ``spec.dim`` as a point of ``spec``.

    Row-major fill; type II fills the upper triangle (diagonal included) and
    mirrors it, type III fills the strict upper triangle and antisymmetrizes.
    """
    w = np.asarray(w, dtype=complex).reshape(-1)
    if w.size != spec.dim:
        raise ShapeError(f"expected {spec.dim} coefficients for type {spec.kind}, got {w.size}")
    if spec.kind == "I":
        return w.reshape(spec.m, spec.n).copy()
    if spec.kind == "IV":
        return w.copy()
    size = spec.shape[0]
    k = 0 if spec.kind == "II" else 1
    iu = np.triu_indices(size, k=k)
    Z = np.zeros((size, size), dtype=complex)
    Z[iu] = w
    if spec.kind == "II":
        return Z + np.triu(Z, 1).T
    return Z - Z.T


def flatten_point(spec: CartanSpec, Z) -> np.ndarray:
    """Coefficient vector of a point; inverse of :func:`reshape_coeffs`."""
    Z = as_point(spec, Z)
    if spec.kind in ("I", "IV"):
        return Z.reshape(-1).copy()
    k = 0 if spec.kind == "II" else 1
    return Z[np.triu_indices(Z.shape[0], k=k)].copy()


# ---------------------------------------------------------------------------
# generic norms and membership


def _defect_matrix(Z: np.ndarray) -> np.ndarray:
    A = np.eye(Z.shape[0], dtype=complex) - Z @ Z.conj().T
    return 0.5 * (A + A.conj().T)


def _type_iv_terms(Z: np.ndarray) -> tuple[float, float]:
    bilinear = abs(np.sum(Z * Z)) ** 2
    herm = float(np.sum(np.abs(Z) ** 2))
    return 1.0 + bilinear - 2.0 * herm, 1.0 - bilinear


def generic_norm(spec: CartanSpec, Z) -> float:
    """N_j(Z, conj Z): ``det(I - Z Z^*)`` for types I-III, ``1 + |ZZ^t|^2 - 2 Z Z^*`` for IV."""
    Z = as_point(spec, Z)
    if spec.kind == "IV":
        return _type_iv_terms(Z)[0]
    d = np.linalg.det(np.eye(Z.shape[0], dtype=complex) - Z @ Z.conj().T)
    if abs(d.imag) > HERMITIAN_DET_TOL:
        raise SymmetryError(f"determinant has imaginary part {d.imag:.3e}")
    return float(d.real)


def is_positive_definite(A: np.ndarray, pivot_tol: float = PIVOT_TOL) -> bool:
    """Cholesky test; every pivot L_kk^2 must exceed ``pivot_tol``."""
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        return False
    return bool(np.all(np.abs(np.diag(L)) ** 2 > pivot_tol))


def cartan_contains(spec: CartanSpec, Z) -> bool:
    Z = as_point(spec, Z)
    if spec.kind == "IV":
        nz, other = _type_iv_terms(Z)
        return nz > 0 and other > 0
    return is_positive_definite(_defect_matrix(Z))


def _cartan_margin(spec: CartanSpec, Z: np.ndarray) -> float:
    if spec.kind == "IV":
        return min(_type_iv_terms(Z))
    return float(np.linalg.eigvalsh(_defect_matrix(Z))[0])


def ch_contains(spec: CHSpec, W, Z) -> bool:
    W = np.asarray(W, dtype=complex).reshape(-1)
    if W.size != spec.fiber_dim:
        raise ShapeError(f"W must have {spec.fiber_dim} entries, got {W.size}")
    if not cartan_contains(spec.base, Z):
        return False
    return np.linalg.norm(W) ** (2 * spec.K) < generic_norm(spec.base, Z)


def hua_contains(spec: HuaSpec, Ws: Sequence, Z) -> bool:
    if len(Ws) != len(spec.blocks):
        raise ShapeError(f"expected {len(spec.blocks)} fiber vectors, got {len(Ws)}")
    vecs = []
    for W, (N, _, _) in zip(Ws, spec.blocks):
        W = np.asarray(W, dtype=complex).reshape(-1)
        if W.size != N:
            raise ShapeError(f"fiber block needs {N} entries, got {W.size}")
        vecs.append(W)
    if not cartan_contains(spec.base, Z):
        return False
    nz = generic_norm(spec.base, Z)
    total = sum(np.linalg.norm(W) ** (2 * p) / nz**K for W, (_, p, K) in zip(vecs, spec.blocks))
    return total < 1.0


def gch_scaled_fiber(spec: GCHSpec, w, z) -> np.ndarray:
    """``w / rho(z)`` reshaped as a point of the fiber domain; z must be in the base."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    if w.size != spec.fiber.dim:
        raise ShapeError(f"w must have {spec.fiber.dim} entries, got {w.size}")
    rho = generic_norm(spec.base, z) ** (1.0 / (2.0 * spec.K))
    return reshape_coeffs(spec.fiber, w / rho)


def gch_contains(spec: GCHSpec, w, z) -> bool:
    w = np.asarray(w, dtype=complex).reshape(-1)
    if w.size != spec.fiber.dim:
        raise ShapeError(f"w must have {spec.fiber.dim} entries, got {w.size}")
    if not cartan_contains(spec.base, z):
        return False
    return cartan_contains(spec.fiber, gch_scaled_fiber(spec, w, z))


def distance_to_boundary(spec: DomainSpec, *point) -> float:
    """Signed margin of the tightest defining inequality.

    Positive inside, non-positive outside. For Cartan domains of types I-III
    this is the smallest eigenvalue of ``I - Z Z^*``; for fibered domains it
    is the smaller of the base margin and the fiber slack. It is a
    diagnostic for near-boundary points, not a Euclidean distance.
    """
    if isinstance(spec, CartanSpec):
        (Z,) = point
        return _cartan_margin(spec, as_point(spec, Z))
    if isinstance(spec, CHSpec):
        W, Z = point
        Z = as_point(spec.base, Z)
        base = _cartan_margin(spec.base, Z)
        slack = generic_norm(spec.base, Z) - np.linalg.norm(np.ravel(W)) ** (2 * spec.K)
        return min(base, slack)
    if isinstance(spec, HuaSpec):
        Ws, Z = point
        Z = as_point(spec.base, Z)
        nz = generic_norm(spec.base, Z)
        total = sum(np.linalg.norm(np.ravel(W)) ** (2 * p) / nz**K
                    for W, (_, p, K) in zip(Ws, spec.blocks)) if nz > 0 else np.inf
        return min(_cartan_margin(spec.base, Z), 1.0 - total)
    if isinstance(spec, GCHSpec):
        w, z = point
        z = as_point(spec.base, z)
        base = _cartan_margin(spec.base, z)
        if base <= 0:
            return base
        return min(base, _cartan_margin(spec.fiber, gch_scaled_fiber(spec, w, z)))
    raise TypeError(f"unsupported spec {type(spec).__name__}")


def contains(spec: DomainSpec, *point) -> bool:
    """Dispatch to the membership predicate of ``spec``'s family."""
    if isinstance(spec, CartanSpec):
        return cartan_contains(spec, *point)
    if isinstance(spec, CHSpec):
        return ch_contains(spec, *point)
    if isinstance(spec, HuaSpec):
        return hua_contains(spec, *point)
    if isinstance(spec, GCHSpec):
        return gch_contains(spec, *point)
    raise TypeError(f"unsupported spec {type(spec).__name__}")


# ---------------------------------------------------------------------------
# sampling


def random_cartan_point(spec: CartanSpec, rng: np.random.Generator,
                        radius: float = 1.0) -> np.ndarray:
    """Random point with operator-norm style size about ``radius``.

    Points are drawn from a complex Gaussian direction and rescaled so that
    ``radius < 1`` keeps them inside the domain; ``radius >= 1`` produces
    points straddling the boundary, which is what the membership tests want.
    """
    coeffs = rng.standard_normal(spec.dim) + 1j * rng.standard_normal(spec.dim)
    Z = reshape_coeffs(spec, coeffs)
    if spec.kind == "IV":
        # the type IV domain contains the ball of radius 1/sqrt(2)
        Z = Z / np.linalg.norm(Z) / np.sqrt(2.0)
    else:
        Z = Z / np.linalg.norm(Z, 2)
    return Z * radius * rng.uniform(0.0, 1.0)
