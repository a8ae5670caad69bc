"""
Interpolators, Christoffel function, quadratures and spectrum statistics
built on top of moments and generalized spectra.

All y arguments are raw x values; scalars give scalars, arrays give arrays.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg as sla

from .errors import ContractError, DefectiveMatrixError, DegenerateDistributionError
from .linalg import DEFAULT_JACOBI_MAX_N, DEFAULT_PIVOT_RTOL, Spectrum, cholesky, solve_gep
from .moments import MatrixKind, MomentSet, OperatorLabel, OperatorPair, build_matrix
from .orthopoly import BasisSpec, lift_moments, normalized_vander, vander

logger = logging.getLogger(__name__)

# relative spread below which a 2x2 pencil counts as a single value
_DEGENERATE_RTOL = 10.0 * np.sqrt(np.finfo(float).eps)


@dataclass(frozen=True)
class InterpolationResult:
    """Interpolated f and df/dx at one point, by both methods."""

    x: float
    f_rn: float
    f_ls: float
    df_rn: float
    df_ls: float
    df_rn_byparts: float
    df_ls_byparts: float

    def as_row(self) -> Tuple[float, ...]:
        return (
            self.x, self.f_rn, self.f_ls, self.df_rn, self.df_ls,
            self.df_rn_byparts, self.df_ls_byparts,
        )


@dataclass(frozen=True, eq=False)
class LebesgueQuadrature:
    """Value-nodes g_i = lambda^[i], weights w_i = <psi^[i]>^2 and per-state x estimates."""

    value_nodes: np.ndarray
    weights: np.ndarray
    x_estimates: np.ndarray

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    @property
    def integral(self) -> float:
        """sum_i g_i w_i, the quadrature estimate of <g>."""
        return float(np.sum(self.value_nodes * self.weights))


@dataclass(frozen=True, eq=False)
class GaussQuadrature:
    """n-point Gauss quadrature of the sample measure, nodes in raw x units."""

    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> float:
        """sum_i w_i h(node_i) for h given as a callable or as values at the nodes."""
        if callable(values):
            values = values(self.nodes)
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))


@dataclass(frozen=True)
class SpectrumSummary:
    """Extremes, means and spread of a spectrum."""

    minimum: float
    maximum: float
    mean: float
    weighted_mean: float
    spread: float


def _basis_rows(spec: BasisSpec, y, n: int) -> np.ndarray:
    return vander(spec, np.atleast_1d(np.asarray(y, dtype=float)).ravel(), n - 1)


def _scaled_rows(spec: BasisSpec, y, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Q(y) rows of unit max magnitude and their scales s, with Q(y) = s R."""
    return normalized_vander(spec, np.atleast_1d(np.asarray(y, dtype=float)).ravel(), n - 1)


def _shape_like(y, values: np.ndarray):
    if np.ndim(y) == 0:
        return float(values[0])
    return values.reshape(np.shape(y))


def _factor(gram: np.ndarray) -> np.ndarray:
    factor = cholesky(gram)
    if factor is None:
        raise DefectiveMatrixError("Gram matrix is not positive definite")
    return factor


def _localized(
    gram: np.ndarray, spec: BasisSpec, y
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Scaled rows R (m x n), G^-1 R (m x n) and scales s with Q(y) = s R."""
    gram = np.asarray(gram, dtype=float)
    rows, scale = _scaled_rows(spec, y, gram.shape[0])
    coeffs = sla.cho_solve((_factor(gram), True), rows.T, check_finite=False).T
    return rows, coeffs, scale


def psi_localized(gram: np.ndarray, spec: BasisSpec, y) -> np.ndarray:
    """
    Coefficients of psi_y(x) = sum_ij Q_i(x) (G^-1)_ij Q_j(y).

    1 / psi_y(y) is the Christoffel function at y.
    """
    _, coeffs, scale = _localized(gram, spec, y)
    with np.errstate(over="ignore", invalid="ignore"):
        coeffs = coeffs * scale[:, None]
    return coeffs[0] if np.ndim(y) == 0 else coeffs


def christoffel_direct(gram: np.ndarray, spec: BasisSpec, y):
    """1 / (Q(y) G^-1 Q(y))."""
    rows, coeffs, scale = _localized(gram, spec, y)
    with np.errstate(over="ignore"):
        kernel = scale**2 * np.sum(rows * coeffs, axis=1)
    return _shape_like(y, 1.0 / kernel)


def _psi_values(spectrum: Spectrum, spec: BasisSpec, y) -> Tuple[np.ndarray, np.ndarray]:
    """psi^[i](y) / s for every state i, shape (m, n), and the row scales s."""
    rows, scale = _scaled_rows(spec, y, spectrum.n)
    return rows @ spectrum.alphas.T, scale


def christoffel_function(spectrum: Spectrum, spec: BasisSpec, y):
    """1 / sum_i (psi^[i](y))^2 for a spectrum whose right matrix is the Gram matrix."""
    if spectrum.defective:
        return _shape_like(y, np.full(np.size(y), np.nan))
    psi, scale = _psi_values(spectrum, spec, y)
    with np.errstate(over="ignore"):
        kernel = scale**2 * np.sum(psi**2, axis=1)
    return _shape_like(y, 1.0 / kernel)


def rn_interpolate(g_matrix: np.ndarray, gram: np.ndarray, spec: BasisSpec, y):
    """
    Radon-Nikodym interpolation: <psi_y g psi_y> / <psi_y psi_y>.

    The value is an average of g under the positive density psi_y^2, so it
    stays inside the spectrum range of (g_matrix; gram) for every y.
    """
    g_matrix = np.asarray(g_matrix, dtype=float)
    rows, coeffs, _ = _localized(gram, spec, y)
    numerator = np.einsum("mi,ij,mj->m", coeffs, g_matrix, coeffs)
    denominator = np.sum(rows * coeffs, axis=1)
    return _shape_like(y, numerator / denominator)


def ls_interpolate(g_moments: np.ndarray, gram: np.ndarray, spec: BasisSpec, y):
    """Least squares interpolation sum_ij Q_i(y) (G^-1)_ij <g Q_j>."""
    gram = np.asarray(gram, dtype=float)
    n = gram.shape[0]
    g_moments = np.asarray(g_moments, dtype=float)
    if g_moments.shape[0] < n:
        raise ContractError(f"Need {n} moments, got {g_moments.shape[0]}")
    coeffs = sla.cho_solve((_factor(gram), True), g_moments[:n], check_finite=False)
    return _shape_like(y, _basis_rows(spec, y, n) @ coeffs)


def spectrum_rn_interpolate(spectrum: Spectrum, spec: BasisSpec, y):
    """Eigenbasis form sum_i lambda_i psi_i(y)^2 / sum_i psi_i(y)^2."""
    if spectrum.defective:
        return _shape_like(y, np.full(np.size(y), np.nan))
    psi, _ = _psi_values(spectrum, spec, y)
    psi2 = psi**2
    return _shape_like(y, (psi2 @ spectrum.lambdas) / np.sum(psi2, axis=1))


def spectrum_ls_interpolate(spectrum: Spectrum, q: np.ndarray, spec: BasisSpec, y):
    """Eigenbasis form sum_i lambda_i psi_i(y) <psi_i>."""
    if spectrum.defective:
        return _shape_like(y, np.full(np.size(y), np.nan))
    averages = spectrum.alphas @ np.asarray(q, dtype=float)[: spectrum.n]
    psi = _basis_rows(spec, y, spectrum.n) @ spectrum.alphas.T
    return _shape_like(y, psi @ (spectrum.lambdas * averages))


def lebesgue_quadrature(
    spectrum: Spectrum, q: np.ndarray, x_matrix: np.ndarray, gram: np.ndarray
) -> LebesgueQuadrature:
    """
    Value-nodes, weights <psi^[i]>^2 and x estimates <psi^2 x>/<psi^2> per state.

    Args:
        spectrum: Generalized spectrum of any menu pair
        q: <Q_k> moments
        x_matrix: <Q_j x Q_k>
        gram: <Q_j Q_k>
    """
    n = spectrum.n
    if spectrum.defective:
        nan = np.full(n, np.nan)
        return LebesgueQuadrature(nan, nan.copy(), nan.copy())
    alphas = spectrum.alphas
    weights = (alphas @ np.asarray(q, dtype=float)[:n]) ** 2
    x_num = np.einsum("ij,jk,ik->i", alphas, np.asarray(x_matrix, dtype=float), alphas)
    x_den = np.einsum("ij,jk,ik->i", alphas, np.asarray(gram, dtype=float), alphas)
    return LebesgueQuadrature(spectrum.lambdas.copy(), weights, x_num / x_den)


def gauss_quadrature(
    x_matrix: np.ndarray,
    gram: np.ndarray,
    q: np.ndarray,
    pivot_rtol: float = DEFAULT_PIVOT_RTOL,
    jacobi_max_n: int = DEFAULT_JACOBI_MAX_N,
) -> GaussQuadrature:
    """
    Gauss quadrature of the measure behind `gram`: nodes are the spectrum of
    (<Q_j x Q_k>; <Q_j Q_k>), weights the Lebesgue weights of that pair.
    """
    pair = OperatorPair(x_matrix, gram, OperatorLabel.POSITION)
    spectrum = solve_gep(pair, pivot_rtol, jacobi_max_n)
    if spectrum.defective:
        raise DefectiveMatrixError("Gram matrix is not positive definite")
    weights = (spectrum.alphas @ np.asarray(q, dtype=float)[: spectrum.n]) ** 2
    return GaussQuadrature(spectrum.lambdas.copy(), weights)


def skewness_estimator(q: np.ndarray, gq: np.ndarray, spec: BasisSpec) -> float:
    """
    Generalized skewness (2 g_avg - l_min - l_max) / (l_min - l_max) from six moments.

    Uses <Q_0..Q_2> and <g Q_0..Q_2>; the 2x2 pencil is solved through its
    quadratic characteristic equation.
    """
    q = np.asarray(q, dtype=float)
    gq = np.asarray(gq, dtype=float)
    if q.shape[0] < 3 or gq.shape[0] < 3:
        raise ContractError("Skewness estimator needs the first 3 moments of both vectors")
    if not (np.all(np.isfinite(q[:3])) and np.all(np.isfinite(gq[:3]))):
        raise ContractError("Skewness estimator moments must be finite")
    gram = lift_moments(spec.family, q[:3], 2)
    g_matrix = lift_moments(spec.family, gq[:3], 2)

    a = gram[0, 0] * gram[1, 1] - gram[0, 1] ** 2
    if not (gram[0, 0] > 0 and a > 0):
        raise DefectiveMatrixError("2x2 Gram matrix is not positive definite")
    b = -(g_matrix[0, 0] * gram[1, 1] + g_matrix[1, 1] * gram[0, 0]
          - 2.0 * g_matrix[0, 1] * gram[0, 1])
    c = g_matrix[0, 0] * g_matrix[1, 1] - g_matrix[0, 1] ** 2
    centre = -b / (2.0 * a)
    half_width = np.sqrt(max(b * b - 4.0 * a * c, 0.0)) / (2.0 * a)
    lam_min, lam_max = centre - half_width, centre + half_width

    if half_width <= _DEGENERATE_RTOL * max(abs(lam_min), abs(lam_max), np.finfo(float).tiny):
        raise DegenerateDistributionError(
            "Observable has no spread (lambda_min == lambda_max); skewness undefined"
        )
    g_avg = gq[0] / q[0]
    return float((2.0 * g_avg - lam_min - lam_max) / (lam_min - lam_max))


def spectrum_summary(spectrum: Spectrum, weights: Optional[np.ndarray] = None) -> SpectrumSummary:
    """min, max, equal-weight mean, weighted mean and spread lambda_max - lambda_min."""
    if spectrum.defective or spectrum.n == 0:
        return SpectrumSummary(np.nan, np.nan, np.nan, np.nan, np.nan)
    lambdas = spectrum.lambdas
    mean = float(np.mean(lambdas))
    weighted = mean
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        total = float(np.sum(weights))
        weighted = float(np.dot(weights, lambdas) / total) if total > 0 else np.nan
    return SpectrumSummary(
        float(lambdas[0]), float(lambdas[-1]), mean, weighted, float(lambdas[-1] - lambdas[0])
    )


def spectrum_distribution(
    spectrum: Spectrum, weights: np.ndarray, bins: int = 20, value_range=None
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Histogram the eigenvalues with equal weights and with Lebesgue weights.

    Returns:
        (bin centers, equal-weight fractions, Lebesgue-weight fractions)
    """
    if bins < 1:
        raise ContractError(f"bins must be positive, got {bins}")
    if spectrum.defective:
        nan = np.full(bins, np.nan)
        return nan, nan.copy(), nan.copy()
    lambdas = spectrum.lambdas
    if value_range is None:
        low, high = float(lambdas[0]), float(lambdas[-1])
        if high <= low:
            pad = max(abs(low), 1.0) * 1e-6
            low, high = low - pad, high + pad
        value_range = (low, high)
    counts, edges = np.histogram(lambdas, bins=bins, range=value_range)
    mass, _ = np.histogram(lambdas, bins=edges, weights=np.asarray(weights, dtype=float))
    total = float(np.sum(weights))
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, counts / spectrum.n, mass / total if total > 0 else mass * np.nan


def interpolate(moments: MomentSet, ys) -> List[InterpolationResult]:
    """Direct least squares and Radon-Nikodym interpolation of f and df/dx at ys."""
    spec = moments.spec
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    gram = build_matrix(moments, MatrixKind.Q)
    rows, coeffs, _ = _localized(gram, spec, ys)
    plain = _basis_rows(spec, ys, spec.n)
    denominator = np.sum(rows * coeffs, axis=1)
    factor = _factor(gram)

    def rn(kind: MatrixKind) -> np.ndarray:
        g_matrix = build_matrix(moments, kind)
        return np.einsum("mi,ij,mj->m", coeffs, g_matrix, coeffs) / denominator

    def ls(vector: np.ndarray) -> np.ndarray:
        return plain @ sla.cho_solve((factor, True), vector[: spec.n], check_finite=False)

    columns = (
        rn(MatrixKind.FQ), ls(moments.fq),
        rn(MatrixKind.DFQ), ls(moments.dfq),
        rn(MatrixKind.DFQ_BYPARTS), ls(moments.dfq_byparts),
    )
    return [
        InterpolationResult(float(y), *(float(column[i]) for column in columns))
        for i, y in enumerate(ys)
    ]


def interpolate_eigenbasis(
    moments: MomentSet,
    value: Spectrum,
    derivative: Spectrum,
    derivative_byparts: Spectrum,
    ys,
) -> List[InterpolationResult]:
    """Same quantities as `interpolate`, through the spectra of the Gram-based pairs."""
    spec = moments.spec
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    columns = []
    for spectrum in (value, derivative, derivative_byparts):
        columns.append(spectrum_rn_interpolate(spectrum, spec, ys))
        columns.append(spectrum_ls_interpolate(spectrum, moments.q, spec, ys))
    return [
        InterpolationResult(float(y), *(float(column[i]) for column in columns))
        for i, y in enumerate(ys)
    ]
