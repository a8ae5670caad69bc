"""
Sample moments of a timeserie and their lift into Gram-type matrices.

Moment sums start at l = 2 (0-based index 1): the l = 1 term would need
x_0, f_0, which a sampled series does not have.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import ConfigurationError, ContractError, InputError, InsufficientDataError
from .orthopoly import (
    BasisSpec,
    canonical_integrals,
    lift_moments,
    multiply_by_first,
    vander,
    vander_derivative,
)

logger = logging.getLogger(__name__)

# n <= 150 is the stable range for 64-bit floats in Chebyshev/Legendre bases
DEFAULT_MAX_N = 150


class DXMode(str, Enum):
    """How <Q_k> is computed: sample sums or closed-form integrals."""

    SAMPLE = "sample"
    ANALYTICAL = "analytical"

    @classmethod
    def parse(cls, value: Union[str, "DXMode"]) -> "DXMode":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        # accept the historical flag spellings sampleDX / analyticalDX
        if text.endswith("dx"):
            text = text[:-2]
        try:
            return cls(text)
        except ValueError:
            raise ConfigurationError(
                f"Unknown dx mode '{value}'. Supported: sample, analytical"
            ) from None


class MatrixKind(str, Enum):
    """Which moment vector a matrix is lifted from."""

    Q = "Q"
    FQ = "FQ"
    DFQ = "DFQ"
    DFQ_BYPARTS = "DFQ_byparts"
    XQ = "XQ"
    DLNFQ = "DLNFQ"


class OperatorLabel(str, Enum):
    """Menu of (M^L; M^R) pairs."""

    VALUE = "value"
    DERIVATIVE = "derivative"
    DERIVATIVE_BYPARTS = "derivative_byparts"
    RELAX_RATE = "relax_rate"
    LOG_DERIVATIVE = "log_derivative"
    POSITION = "position"


# (left, right) matrix kinds for every menu entry
PAIR_MENU = {
    OperatorLabel.VALUE: (MatrixKind.FQ, MatrixKind.Q),
    OperatorLabel.DERIVATIVE: (MatrixKind.DFQ, MatrixKind.Q),
    OperatorLabel.DERIVATIVE_BYPARTS: (MatrixKind.DFQ_BYPARTS, MatrixKind.Q),
    OperatorLabel.RELAX_RATE: (MatrixKind.DFQ, MatrixKind.FQ),
    OperatorLabel.LOG_DERIVATIVE: (MatrixKind.DLNFQ, MatrixKind.Q),
    OperatorLabel.POSITION: (MatrixKind.XQ, MatrixKind.Q),
}


@dataclass(frozen=True, eq=False)
class Timeserie:
    """Ordered sample pairs (x_l, f_l)."""

    xs: np.ndarray
    fs: np.ndarray

    def __post_init__(self):
        xs = np.array(self.xs, dtype=float).reshape(-1)
        fs = np.array(self.fs, dtype=float).reshape(-1)
        if xs.shape != fs.shape:
            raise InputError(f"x and f lengths differ: {xs.shape[0]} vs {fs.shape[0]}")
        if xs.shape[0] < 2:
            raise InsufficientDataError(f"A timeserie needs at least 2 samples, got {xs.shape[0]}")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(fs))):
            raise InputError("Timeserie contains non-finite values")
        steps = np.diff(xs)
        if np.any(steps < 0):
            bad = int(np.argmax(steps < 0)) + 1
            raise InputError(
                f"x must be nondecreasing: x[{bad}]={xs[bad]} < x[{bad - 1}]={xs[bad - 1]}"
            )
        xs.setflags(write=False)
        fs.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "fs", fs)

    def __len__(self) -> int:
        return self.xs.shape[0]

    @property
    def x_min(self) -> float:
        return float(self.xs[0])

    @property
    def x_max(self) -> float:
        return float(self.xs[-1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Timeserie):
            return NotImplemented
        return np.array_equal(self.xs, other.xs) and np.array_equal(self.fs, other.fs)


@dataclass(frozen=True, eq=False)
class MomentSet:
    """
    Moment vectors of length 2n - 1 in the basis of `spec`.

    `xq` holds <x Q_k>; `dlnfq` holds <d ln f/dx Q_k> and is None unless
    every f_l > 0.
    """

    q: np.ndarray
    fq: np.ndarray
    dfq: np.ndarray
    dfq_byparts: np.ndarray
    xq: np.ndarray
    spec: BasisSpec
    dx_mode: DXMode
    dlnfq: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.spec.n

    def vector(self, which: MatrixKind) -> np.ndarray:
        which = MatrixKind(which)
        vectors = {
            MatrixKind.Q: self.q,
            MatrixKind.FQ: self.fq,
            MatrixKind.DFQ: self.dfq,
            MatrixKind.DFQ_BYPARTS: self.dfq_byparts,
            MatrixKind.XQ: self.xq,
            MatrixKind.DLNFQ: self.dlnfq,
        }
        vector = vectors[which]
        if vector is None:
            raise ContractError(
                "Log-derivative moments are unavailable: f must be positive at every sample"
            )
        return vector


@dataclass(frozen=True, eq=False)
class OperatorPair:
    """Two symmetric n x n matrices (M^L, M^R) defining a virtual Hamiltonian."""

    m_left: np.ndarray
    m_right: np.ndarray
    label: OperatorLabel

    def __post_init__(self):
        left = np.array(self.m_left, dtype=float)
        right = np.array(self.m_right, dtype=float)
        if left.ndim != 2 or left.shape[0] != left.shape[1] or left.shape != right.shape:
            raise ContractError(
                f"Operator pair needs two square matrices of equal size, "
                f"got {left.shape} and {right.shape}"
            )
        object.__setattr__(self, "m_left", 0.5 * (left + left.T))
        object.__setattr__(self, "m_right", 0.5 * (right + right.T))
        object.__setattr__(self, "label", OperatorLabel(self.label))

    @property
    def n(self) -> int:
        return self.m_left.shape[0]


def compute_moments(
    ts: Timeserie,
    spec: BasisSpec,
    dx_mode: Union[DXMode, str] = DXMode.SAMPLE,
    max_n: int = DEFAULT_MAX_N,
) -> MomentSet:
    """
    Compute <Q_k>, <f Q_k>, <df/dx Q_k> and derived moments, k = 0..2n-2.

    Args:
        ts: Input timeserie
        spec: Basis (family, dimension, domain map)
        dx_mode: SAMPLE sums or ANALYTICAL integrals for <Q_k>
        max_n: Largest basis dimension allowed

    Returns:
        MomentSet
    """
    dx_mode = DXMode.parse(dx_mode)
    if spec.n > max_n:
        raise ConfigurationError(
            f"Basis dimension n={spec.n} exceeds the supported maximum {max_n} "
            "for 64-bit arithmetic"
        )
    if len(ts) < 2:
        raise InsufficientDataError("At least 2 samples are required")
    count = spec.n_moments
    xs, fs = ts.xs, ts.fs
    dx = np.diff(xs)
    df = np.diff(fs)

    # one extra column: <x Q_k> up to k = 2n-2 needs <Q_{2n-1}>
    basis = vander(spec, xs[1:], count)
    if dx_mode is DXMode.SAMPLE:
        q_ext = basis.T @ dx
    else:
        q_ext = canonical_integrals(spec.family, count + 1) / spec.domain_map.scale

    basis = basis[:, :count]
    fq = basis.T @ (fs[1:] * dx)
    dfq = basis.T @ df

    # [f Q_k] at the ends minus the sample sum of f Q_k' dx
    ends = vander(spec, np.array([xs[0], xs[-1]]), count - 1)
    derivative = vander_derivative(spec, xs[1:], count - 1)
    dfq_byparts = fs[-1] * ends[1] - fs[0] * ends[0] - derivative.T @ (fs[1:] * dx)

    scale, offset = spec.domain_map.scale, spec.domain_map.offset
    xq = (multiply_by_first(spec.family, q_ext) - offset * q_ext[:count]) / scale

    dlnfq = None
    if np.all(fs > 0):
        dlnfq = basis.T @ np.diff(np.log(fs))

    logger.debug(
        "Computed %d moments over %d samples (%s basis, %s dx)",
        count, len(ts), spec.family.value, dx_mode.value,
    )
    return MomentSet(
        q=q_ext[:count],
        fq=fq,
        dfq=dfq,
        dfq_byparts=dfq_byparts,
        xq=xq,
        spec=spec,
        dx_mode=dx_mode,
        dlnfq=dlnfq,
    )


def build_matrix(
    m: MomentSet, which: Union[MatrixKind, str], n: Optional[int] = None
) -> np.ndarray:
    """Lift a moment vector into the n x n matrix <Q_j g Q_k>."""
    if n is None:
        n = m.n
    if n < 1:
        raise ContractError(f"Matrix dimension must be positive, got {n}")
    vector = m.vector(MatrixKind(which))
    if vector.shape[0] < 2 * n - 1:
        raise ContractError(
            f"A {n}x{n} matrix needs {2 * n - 1} moments, only {vector.shape[0]} available"
        )
    return lift_moments(m.spec.family, vector, n)


def operator_pair(
    m: MomentSet, label: Union[OperatorLabel, str], n: Optional[int] = None
) -> OperatorPair:
    """Assemble one entry of the matrix-pair menu."""
    label = OperatorLabel(label)
    left, right = PAIR_MENU[label]
    return OperatorPair(build_matrix(m, left, n), build_matrix(m, right, n), label)


def byparts_discrepancy(m: MomentSet) -> float:
    """Largest |dfq - dfq_byparts| relative to the largest |dfq| (absolute if dfq is zero)."""
    diff = float(np.max(np.abs(m.dfq - m.dfq_byparts)))
    scale = float(np.max(np.abs(m.dfq)))
    return diff / scale if scale > 0 else diff
