"""
Polynomial basis families on the canonical domain [-1, 1].

Provides point evaluation through the numpy.polynomial three-term
recurrences, raw-x derivatives, and the basis multiplication coefficients
Q_j Q_k = sum_l c_l Q_l used to lift moment vectors into matrices.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, Tuple, Union

import numpy as np
from numpy.polynomial import chebyshev, legendre, polynomial

from .errors import ConfigurationError, ContractError, InputError, InsufficientDataError


class BasisFamily(str, Enum):
    """Supported polynomial families."""

    CHEBYSHEV = "chebyshev"
    LEGENDRE = "legendre"
    MONOMIAL = "monomial"

    @classmethod
    def parse(cls, value: Union[str, "BasisFamily"]) -> "BasisFamily":
        """Accept an enum member or its (case-insensitive) name."""
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            choices = ", ".join(member.value for member in cls)
            raise ConfigurationError(f"Unknown basis '{value}'. Supported: {choices}") from None


# (vandermonde, derivative-of-series) per family
_FAMILY_OPS: Dict[BasisFamily, Tuple[Callable, Callable]] = {
    BasisFamily.CHEBYSHEV: (chebyshev.chebvander, chebyshev.chebder),
    BasisFamily.LEGENDRE: (legendre.legvander, legendre.legder),
    BasisFamily.MONOMIAL: (polynomial.polyvander, polynomial.polyder),
}


@dataclass(frozen=True)
class DomainMap:
    """Affine map t = scale * x + offset from raw x to the canonical domain."""

    scale: float
    offset: float

    def __post_init__(self):
        if not (np.isfinite(self.scale) and np.isfinite(self.offset)):
            raise ConfigurationError("Domain map must be finite")
        if self.scale <= 0:
            raise ConfigurationError(f"Domain map scale must be positive, got {self.scale}")

    @classmethod
    def identity(cls) -> "DomainMap":
        return cls(1.0, 0.0)

    @classmethod
    def from_interval(cls, x_min: float, x_max: float) -> "DomainMap":
        """Map [x_min, x_max] onto [-1, 1]."""
        width = float(x_max) - float(x_min)
        if not width > 0:
            raise InsufficientDataError(
                f"Sample spans no x range ([{x_min}, {x_max}]); cannot build a basis"
            )
        return cls(2.0 / width, -(float(x_max) + float(x_min)) / width)

    def to_canonical(self, x):
        return self.scale * np.asarray(x, dtype=float) + self.offset

    def to_raw(self, t):
        return (np.asarray(t, dtype=float) - self.offset) / self.scale


@dataclass(frozen=True)
class BasisSpec:
    """Basis family, dimension n and the raw-to-canonical domain map."""

    family: BasisFamily
    n: int
    domain_map: DomainMap = field(default_factory=DomainMap.identity)

    def __post_init__(self):
        object.__setattr__(self, "family", BasisFamily.parse(self.family))
        if int(self.n) != self.n or self.n < 1:
            raise ConfigurationError(f"Basis dimension n must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def for_sample(cls, family, n: int, xs) -> "BasisSpec":
        xs = np.asarray(xs, dtype=float)
        return cls(family, n, DomainMap.from_interval(xs.min(), xs.max()))

    @property
    def n_moments(self) -> int:
        """Number of moments needed for n x n matrices: 2n - 1."""
        return 2 * self.n - 1

    def with_dimension(self, n: int) -> "BasisSpec":
        return BasisSpec(self.family, n, self.domain_map)


@dataclass(frozen=True)
class ProductExpansion:
    """Coefficients of Q_j(t) Q_k(t) = sum_l coeffs[l] Q_l(t), l = 0..j+k."""

    j: int
    k: int
    coeffs: np.ndarray

    def evaluate(self, spec: BasisSpec, t) -> np.ndarray:
        """Evaluate the expansion at canonical points t."""
        values = _FAMILY_OPS[spec.family][0](np.asarray(t, dtype=float), self.j + self.k)
        return values @ self.coeffs


def vander(spec: BasisSpec, x, deg: int = None) -> np.ndarray:
    """
    Evaluate Q_0..Q_deg at raw points x.

    Returns an array of shape x.shape + (deg + 1,). Chebyshev and Legendre
    values come from the three-term recurrence.
    """
    if deg is None:
        deg = spec.n_moments - 1
    t = spec.domain_map.to_canonical(x)
    if not np.all(np.isfinite(t)):
        raise InputError("Basis evaluation requires finite x")
    return _FAMILY_OPS[spec.family][0](t, deg)


def vander_derivative(spec: BasisSpec, x, deg: int = None) -> np.ndarray:
    """Evaluate dQ_k/dx (raw x units) for k = 0..deg at raw points x."""
    if deg is None:
        deg = spec.n_moments - 1
    vander_fn, der_fn = _FAMILY_OPS[spec.family]
    t = spec.domain_map.to_canonical(x)
    if not np.all(np.isfinite(t)):
        raise InputError("Basis evaluation requires finite x")
    values = vander_fn(t, deg)
    if deg == 0:
        return np.zeros_like(values)
    # column k holds the series coefficients of Q_k'
    der = der_fn(np.eye(deg + 1), axis=0)
    return spec.domain_map.scale * (values[..., :deg] @ der)


def eval_basis(spec: BasisSpec, k: int, x: float) -> float:
    """Q_k at the canonical image of raw x."""
    if not 0 <= k < spec.n_moments:
        raise ContractError(f"Basis index {k} outside [0, {spec.n_moments})")
    if not np.isfinite(x):
        raise InputError(f"Basis evaluation requires finite x, got {x}")
    return float(vander(spec, float(x), k)[k])


_TO_POWER: Dict[BasisFamily, Callable] = {
    BasisFamily.CHEBYSHEV: chebyshev.cheb2poly,
    BasisFamily.LEGENDRE: legendre.leg2poly,
    BasisFamily.MONOMIAL: lambda c: c,
}


@lru_cache(maxsize=None)
def _power_coeffs(family: BasisFamily, deg: int) -> np.ndarray:
    """Row k holds the monomial coefficients of Q_k, padded to deg + 1."""
    coeffs = np.zeros((deg + 1, deg + 1))
    for k in range(deg + 1):
        unit = np.zeros(k + 1)
        unit[k] = 1.0
        power = np.asarray(_TO_POWER[family](unit), dtype=float)
        coeffs[k, : power.shape[0]] = power
    coeffs.setflags(write=False)
    return coeffs


def _direct_limit(deg: int) -> float:
    # (2|t|)^deg bounds |Q_k(t)| for every family; keep it below 1e280
    return 0.5 * 10.0 ** (280.0 / max(deg, 1))


def normalized_vander(spec: BasisSpec, x, deg: int = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Q_0..Q_deg at raw points x with every row scaled to unit max magnitude.

    Returns (rows, scale) with Q(x) = scale[..., None] * rows. Far outside
    [-1, 1] the rows come from the reversed power form sum_j c_kj t^(j - deg),
    which stays finite where Q_k(t) itself overflows; scale may then be inf.
    """
    if deg is None:
        deg = spec.n_moments - 1
    t = np.atleast_1d(spec.domain_map.to_canonical(x))
    if not np.all(np.isfinite(t)):
        raise InputError("Basis evaluation requires finite x")
    rows = np.empty(t.shape + (deg + 1,))
    lead = np.ones(t.shape)
    near = np.abs(t) <= _direct_limit(deg)
    rows[near] = _FAMILY_OPS[spec.family][0](t[near], deg)
    if not np.all(near):
        far = t[~near]
        # column j holds t^(j - deg)
        powers = polynomial.polyvander(1.0 / far, deg)[..., ::-1]
        rows[~near] = powers @ _power_coeffs(spec.family, deg).T
        with np.errstate(over="ignore"):
            lead[~near] = far**deg
    peak = np.max(np.abs(rows), axis=-1)
    rows /= peak[..., None]
    with np.errstate(over="ignore"):
        return rows, lead * peak


@lru_cache(maxsize=None)
def _legendre_a(count: int) -> np.ndarray:
    """A_m = (2m-1)!! / m! for m < count."""
    a = np.ones(max(count, 1))
    for m in range(1, count):
        a[m] = a[m - 1] * (2 * m - 1) / m
    a.setflags(write=False)
    return a


def _product_coeffs(family: BasisFamily, j: int, k: int) -> np.ndarray:
    coeffs = np.zeros(j + k + 1)
    if family is BasisFamily.CHEBYSHEV:
        coeffs[j + k] += 0.5
        coeffs[abs(j - k)] += 0.5
    elif family is BasisFamily.MONOMIAL:
        coeffs[j + k] = 1.0
    else:
        a = _legendre_a(j + k + 1)
        for r in range(min(j, k) + 1):
            level = j + k - 2 * r
            coeffs[level] = (
                a[j - r] * a[r] * a[k - r] / a[j + k - r]
                * (2 * level + 1) / (2 * (j + k - r) + 1)
            )
    return coeffs


def product_coeffs(spec: BasisSpec, j: int, k: int) -> ProductExpansion:
    """Exact expansion of Q_j Q_k in the basis, for j + k <= 2n - 2."""
    if j < 0 or k < 0:
        raise ContractError(f"Basis indices must be non-negative, got ({j}, {k})")
    if j + k > spec.n_moments - 1:
        raise ContractError(
            f"Product Q_{j} Q_{k} needs moment {j + k}, only {spec.n_moments} available"
        )
    return ProductExpansion(j, k, _product_coeffs(spec.family, j, k))


def lift_moments(family: BasisFamily, moments, n: int) -> np.ndarray:
    """
    Build M[j, k] = sum_l c_l^{jk} moments[l] for j, k < n.

    Args:
        family: Basis family the moments are expressed in
        moments: Moment vector of length >= 2n - 1
        n: Matrix dimension

    Returns:
        Symmetric n x n matrix
    """
    moments = np.asarray(moments, dtype=float)
    if moments.shape[0] < 2 * n - 1:
        raise ContractError(
            f"Lifting to {n}x{n} needs {2 * n - 1} moments, got {moments.shape[0]}"
        )
    j, k = np.indices((n, n))
    if family is BasisFamily.CHEBYSHEV:
        matrix = 0.5 * (moments[j + k] + moments[np.abs(j - k)])
    elif family is BasisFamily.MONOMIAL:
        matrix = moments[j + k].copy()
    else:
        a = _legendre_a(2 * n - 1)
        matrix = np.zeros((n, n))
        low = np.minimum(j, k)
        for r in range(n):
            mask = low >= r
            jr = np.where(mask, j - r, 0)
            kr = np.where(mask, k - r, 0)
            level = np.where(mask, j + k - 2 * r, 0)
            coeff = (
                a[jr] * a[r] * a[kr] / a[np.where(mask, j + k - r, 0)]
                * (2 * level + 1) / (2 * (j + k - r) + 1)
            )
            matrix += np.where(mask, coeff * moments[level], 0.0)
    return 0.5 * (matrix + matrix.T)


def multiply_by_first(family: BasisFamily, moments) -> np.ndarray:
    """
    Moments of Q_1 Q_k: v[k] = sum_l c_l^{1k} moments[l] for k < len(moments) - 1.
    """
    m = np.asarray(moments, dtype=float)
    k = np.arange(m.shape[0] - 1)
    if family is BasisFamily.MONOMIAL:
        return m[k + 1].copy()
    below = m[np.abs(k - 1)]
    if family is BasisFamily.CHEBYSHEV:
        return 0.5 * (m[k + 1] + below)
    # (2k+1) t P_k = (k+1) P_{k+1} + k P_{k-1}
    return ((k + 1) * m[k + 1] + k * below) / (2 * k + 1)


def canonical_integrals(family: BasisFamily, count: int) -> np.ndarray:
    """Closed-form integrals of Q_k over [-1, 1] for k < count."""
    k = np.arange(count)
    even = k % 2 == 0
    if family is BasisFamily.CHEBYSHEV:
        with np.errstate(divide="ignore"):
            return np.where(even, 2.0 / (1.0 - k.astype(float) ** 2), 0.0)
    if family is BasisFamily.LEGENDRE:
        return np.where(k == 0, 2.0, 0.0)
    return np.where(even, 2.0 / (k + 1.0), 0.0)
