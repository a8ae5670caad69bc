"""
Dense symmetric linear algebra for the generalized eigenproblem

    M^L alpha = lambda M^R alpha

reduced through the Cholesky factor of M^R to a standard symmetric problem.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg as sla

from .errors import ContractError, DefectiveMatrixError
from .moments import OperatorPair

logger = logging.getLogger(__name__)

DEFAULT_PIVOT_RTOL = 1e-13
DEFAULT_JACOBI_MAX_N = 64

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class Spectrum:
    """
    Generalized eigenvalues in ascending order and eigenvector coefficients.

    Row i of `alphas` holds the coefficients of psi^[i] in the Q basis,
    normalized so that alpha M^R alpha^T = I. A defective spectrum (M^R not
    positive definite) has every lambda and alpha set to NaN.
    """

    lambdas: np.ndarray
    alphas: np.ndarray
    defective: bool = False

    @classmethod
    def defective_of(cls, n: int) -> "Spectrum":
        return cls(np.full(n, np.nan), np.full((n, n), np.nan), True)

    @property
    def n(self) -> int:
        return self.lambdas.shape[0]


def _check_square(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractError(f"{name} must be a square matrix, got shape {m.shape}")
    return m


def cholesky(m: np.ndarray, pivot_rtol: float = DEFAULT_PIVOT_RTOL) -> Optional[np.ndarray]:
    """
    Lower-triangular L with L L^T = m, or None when m is not positive definite.

    A pivot L_ii^2 at or below pivot_rtol * max(diag(m)) counts as failure.
    """
    m = _check_square(m, "Cholesky input")
    if not np.all(np.isfinite(m)):
        return None
    diag_max = float(np.max(np.diag(m))) if m.size else 0.0
    if not diag_max > 0:
        return None
    try:
        factor = sla.cholesky(m, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        return None
    pivots = np.diag(factor) ** 2
    if np.min(pivots) <= pivot_rtol * diag_max:
        logger.debug("Cholesky pivot ratio %.3e below tolerance", np.min(pivots) / diag_max)
        return None
    return factor


def solve_gram(
    gram: np.ndarray, rhs: np.ndarray, pivot_rtol: float = DEFAULT_PIVOT_RTOL
) -> np.ndarray:
    """Solve gram @ y = rhs through the Cholesky factor."""
    factor = cholesky(gram, pivot_rtol)
    if factor is None:
        raise DefectiveMatrixError("Gram matrix is not positive definite")
    return sla.cho_solve((factor, True), np.asarray(rhs, dtype=float), check_finite=False)


def jacobi_eigh(a: np.ndarray, max_sweeps: int = 100) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi diagonalization of a symmetric matrix.

    Returns:
        (eigenvalues, eigenvectors as columns), unsorted
    """
    a = np.array(_check_square(a, "Jacobi input"), dtype=float)
    n = a.shape[0]
    vectors = np.eye(n)
    if n < 2:
        return np.diag(a).copy(), vectors

    for sweep in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= _EPS * np.linalg.norm(a):
            logger.debug("Jacobi converged after %d sweeps (n=%d)", sweep, n)
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app, aqq = a[p, p], a[q, q]
                # after a few sweeps drop elements below the diagonal resolution
                if sweep > 3 and abs(apq) * 100.0 <= _EPS * min(abs(app), abs(aqq)):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p = vectors[:, p].copy()
                vec_q = vectors[:, q]
                vectors[:, p] = c * vec_p - s * vec_q
                vectors[:, q] = s * vec_p + c * vec_q
    else:
        logger.warning("Jacobi did not converge in %d sweeps (n=%d)", max_sweeps, n)

    return np.diag(a).copy(), vectors


def symmetric_eigh(
    a: np.ndarray, jacobi_max_n: int = DEFAULT_JACOBI_MAX_N
) -> Tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix: Jacobi for small n, tridiagonal QR above."""
    a = _check_square(a, "Eigensolver input")
    if a.shape[0] <= jacobi_max_n:
        return jacobi_eigh(a)
    return sla.eigh(a, driver="ev", check_finite=False)


def solve_gep(
    pair: OperatorPair,
    pivot_rtol: float = DEFAULT_PIVOT_RTOL,
    jacobi_max_n: int = DEFAULT_JACOBI_MAX_N,
) -> Spectrum:
    """
    Diagonalize M^L and M^R simultaneously.

    Returns a defective all-NaN Spectrum when M^R is not positive definite.
    """
    m_left = _check_square(pair.m_left, "M^L")
    m_right = _check_square(pair.m_right, "M^R")
    if m_left.shape != m_right.shape:
        raise ContractError(f"Dimension mismatch: M^L {m_left.shape} vs M^R {m_right.shape}")
    n = m_left.shape[0]

    factor = cholesky(m_right, pivot_rtol)
    if factor is None:
        logger.warning("M^R of the %s pair is not positive definite; spectrum set to NaN",
                       pair.label.value)
        return Spectrum.defective_of(n)

    # L^-1 M^L L^-T
    reduced = sla.solve_triangular(factor, m_left, lower=True, check_finite=False)
    reduced = sla.solve_triangular(factor, reduced.T, lower=True, check_finite=False)
    reduced = 0.5 * (reduced + reduced.T)

    values, vectors = symmetric_eigh(reduced, jacobi_max_n)
    alphas = sla.solve_triangular(factor.T, vectors, lower=False, check_finite=False)

    norms = np.sqrt(np.einsum("ji,jk,ki->i", alphas, m_right, alphas))
    alphas = alphas / norms

    order = np.argsort(values, kind="stable")
    values = values[order]
    alphas = alphas[:, order].T

    # largest-magnitude coefficient positive
    lead = np.argmax(np.abs(alphas), axis=1)
    signs = np.sign(alphas[np.arange(n), lead])
    signs[signs == 0] = 1.0
    alphas = alphas * signs[:, None]

    return Spectrum(values, alphas, False)


def rayleigh_quotient(pair: OperatorPair, alpha: np.ndarray) -> float:
    """(alpha M^L alpha) / (alpha M^R alpha)."""
    alpha = np.asarray(alpha, dtype=float)
    return float(alpha @ pair.m_left @ alpha) / float(alpha @ pair.m_right @ alpha)
