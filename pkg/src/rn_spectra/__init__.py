"""
rn-spectra: Radon-Nikodym interpolation, Lebesgue and Gauss quadratures,
and generalized eigenvalue spectra of sampled signals.
"""

__version__ = "0.1.0"

from .analysis import AnalysisResult, RunConfig, SpectralAnalyzer, run_analysis
from .datafile import parse_timeserie, write_table, write_timeserie
from .errors import (
    ConfigurationError,
    ContractError,
    DefectiveMatrixError,
    DegenerateDistributionError,
    InputError,
    InsufficientDataError,
    NumericalError,
    ParseError,
    RNSpectraError,
)
from .linalg import Spectrum, cholesky, rayleigh_quotient, solve_gep, solve_gram
from .models import StageKind, StageSpec, gen_multistage_exp, gen_runge, gen_two_stage
from .moments import (
    DXMode,
    MatrixKind,
    MomentSet,
    OperatorLabel,
    OperatorPair,
    Timeserie,
    build_matrix,
    compute_moments,
    operator_pair,
)
from .orthopoly import BasisFamily, BasisSpec, DomainMap
from .spectral import (
    GaussQuadrature,
    InterpolationResult,
    LebesgueQuadrature,
    christoffel_function,
    gauss_quadrature,
    lebesgue_quadrature,
    ls_interpolate,
    rn_interpolate,
    skewness_estimator,
)

__all__ = [
    "AnalysisResult",
    "RunConfig",
    "SpectralAnalyzer",
    "run_analysis",
    "parse_timeserie",
    "write_table",
    "write_timeserie",
    "ConfigurationError",
    "ContractError",
    "DefectiveMatrixError",
    "DegenerateDistributionError",
    "InputError",
    "InsufficientDataError",
    "NumericalError",
    "ParseError",
    "RNSpectraError",
    "Spectrum",
    "cholesky",
    "rayleigh_quotient",
    "solve_gep",
    "solve_gram",
    "StageKind",
    "StageSpec",
    "gen_multistage_exp",
    "gen_runge",
    "gen_two_stage",
    "DXMode",
    "MatrixKind",
    "MomentSet",
    "OperatorLabel",
    "OperatorPair",
    "Timeserie",
    "build_matrix",
    "compute_moments",
    "operator_pair",
    "BasisFamily",
    "BasisSpec",
    "DomainMap",
    "GaussQuadrature",
    "InterpolationResult",
    "LebesgueQuadrature",
    "christoffel_function",
    "gauss_quadrature",
    "lebesgue_quadrature",
    "ls_interpolate",
    "rn_interpolate",
    "skewness_estimator",
]
