"""
End-to-end analysis of a timeserie file: moments, spectra of the operator
pair menu, both interpolation routes, and the output data files.
"""

import hashlib
import logging
import shutil
import tempfile
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from .config_loader import ANALYSIS_DEFAULTS, NUMERICS_DEFAULTS, Config
from .datafile import parse_timeserie, write_table
from .errors import ConfigurationError
from .linalg import Spectrum, solve_gep
from .moments import (
    DXMode,
    MatrixKind,
    MomentSet,
    OperatorLabel,
    Timeserie,
    build_matrix,
    byparts_discrepancy,
    compute_moments,
    operator_pair,
)
from .orthopoly import BasisFamily, BasisSpec
from .spectral import (
    GaussQuadrature,
    InterpolationResult,
    LebesgueQuadrature,
    gauss_quadrature,
    interpolate,
    interpolate_eigenbasis,
    lebesgue_quadrature,
    spectrum_distribution,
)

logger = logging.getLogger(__name__)

INTERPOLATED_FILE = "RN_interpolated.dat"
EIGENBASIS_INTERPOLATED_FILE = "EV_RN_interpolated.dat"

SPECTRUM_FILES: Dict[OperatorLabel, str] = {
    OperatorLabel.VALUE: "QQf_QQ_spectrum.dat",
    OperatorLabel.DERIVATIVE: "QQdf_QQ_spectrum.dat",
    OperatorLabel.DERIVATIVE_BYPARTS: "QQdfbyparts_QQ_spectrum.dat",
    OperatorLabel.RELAX_RATE: "QQdf_QQf_spectrum.dat",
    OperatorLabel.LOG_DERIVATIVE: "QQdlnf_QQ_spectrum.dat",
}

INTERPOLATED_COLUMNS = (
    "x", "f_orig", "f_RN", "f_LS", "df_RN", "df_LS", "df_RN_byparts", "df_LS_byparts",
)
SPECTRUM_COLUMNS = ("index", "lambda", "x_est")
DISTRIBUTION_COLUMNS = ("lambda_center", "equal_weight", "lebesgue_weight")


@dataclass(frozen=True)
class RunConfig:
    """Input file, basis dimension, dx mode, basis family and output location."""

    input_path: Path
    n: int = ANALYSIS_DEFAULTS["n"]
    dx_mode: DXMode = DXMode.SAMPLE
    basis: BasisFamily = BasisFamily.CHEBYSHEV
    output_dir: Optional[Path] = None
    log_derivative: bool = False
    histogram_bins: int = 0
    max_n: int = NUMERICS_DEFAULTS["max_n"]

    def __post_init__(self):
        object.__setattr__(self, "input_path", Path(self.input_path))
        if self.output_dir is not None:
            object.__setattr__(self, "output_dir", Path(self.output_dir))
        object.__setattr__(self, "dx_mode", DXMode.parse(self.dx_mode))
        object.__setattr__(self, "basis", BasisFamily.parse(self.basis))
        if int(self.n) != self.n or not 1 <= self.n <= self.max_n:
            raise ConfigurationError(f"n must be an integer in [1, {self.max_n}], got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if int(self.histogram_bins) != self.histogram_bins or self.histogram_bins < 0:
            raise ConfigurationError(
                f"histogram_bins must be a non-negative integer, got {self.histogram_bins}"
            )

    @classmethod
    def from_config(cls, input_path: Union[str, Path], config: Config, **overrides) -> "RunConfig":
        """Config-file defaults, replaced by any override that is not None."""
        defaults = config.get_analysis_defaults()
        values = {
            "n": defaults["n"],
            "dx_mode": defaults["dx_mode"],
            "basis": defaults["basis"],
            "log_derivative": bool(defaults["log_derivative"]),
            "histogram_bins": defaults["histogram_bins"],
            "max_n": config.get_numerics_settings()["max_n"],
        }
        output_dir = config.get_output_dir()
        if output_dir:
            values["output_dir"] = output_dir
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(input_path=input_path, **values)

    def header(self) -> str:
        return (
            f"rn-spectra input={self.input_path.name} n={self.n} "
            f"dx={self.dx_mode.value} basis={self.basis.value}"
        )


@dataclass
class AnalysisResult:
    """Everything one analysis run produced."""

    config: RunConfig
    output_dir: Path
    moments: MomentSet
    spectra: Dict[OperatorLabel, Spectrum]
    quadratures: Dict[OperatorLabel, LebesgueQuadrature]
    files: Dict[str, Path] = field(default_factory=dict)
    dual_form_difference: float = 0.0
    byparts_discrepancy: float = 0.0


def load_moments(
    input_path: Union[str, Path, Timeserie],
    n: int,
    dx_mode: Union[DXMode, str] = DXMode.SAMPLE,
    basis: Union[BasisFamily, str] = BasisFamily.CHEBYSHEV,
    max_n: int = NUMERICS_DEFAULTS["max_n"],
) -> Tuple[Timeserie, MomentSet]:
    """Read (or take) a timeserie and compute its moments on its own [x_min, x_max]."""
    ts = input_path if isinstance(input_path, Timeserie) else parse_timeserie(input_path)
    spec = BasisSpec.for_sample(basis, n, ts.xs)
    return ts, compute_moments(ts, spec, dx_mode, max_n)


def solve_pairs(
    moments: MomentSet,
    labels,
    numerics: Optional[Mapping[str, Any]] = None,
) -> Tuple[Dict[OperatorLabel, Spectrum], Dict[OperatorLabel, LebesgueQuadrature]]:
    """Spectrum and Lebesgue quadrature for every requested pair."""
    numerics = {**NUMERICS_DEFAULTS, **(numerics or {})}
    gram = build_matrix(moments, MatrixKind.Q)
    x_matrix = build_matrix(moments, MatrixKind.XQ)
    spectra: Dict[OperatorLabel, Spectrum] = {}
    quadratures: Dict[OperatorLabel, LebesgueQuadrature] = {}
    for label in labels:
        label = OperatorLabel(label)
        spectrum = solve_gep(
            operator_pair(moments, label), numerics["pivot_rtol"], numerics["jacobi_max_n"]
        )
        spectra[label] = spectrum
        quadratures[label] = lebesgue_quadrature(spectrum, moments.q, x_matrix, gram)
        logger.info(
            "%s spectrum: n=%d, range [%s, %s]",
            label.value, spectrum.n, spectrum.lambdas[0], spectrum.lambdas[-1],
        )
    return spectra, quadratures


def dual_form_difference(
    direct: List[InterpolationResult], eigen: List[InterpolationResult]
) -> float:
    """Largest column difference of the two interpolation routes, relative to max(1, |column|)."""
    a = np.array([r.as_row()[1:] for r in direct])
    b = np.array([r.as_row()[1:] for r in eigen])
    if a.size == 0:
        return 0.0
    scale = np.maximum(1.0, np.max(np.abs(a), axis=0))
    with np.errstate(invalid="ignore"):
        return float(np.nanmax(np.abs(a - b) / scale))


def run_analysis(
    cfg: RunConfig,
    numerics: Optional[Mapping[str, Any]] = None,
    output_dir: Optional[Path] = None,
) -> AnalysisResult:
    """
    Run the full analysis and write the output files.

    Args:
        cfg: Run configuration
        numerics: Overrides of NUMERICS_DEFAULTS
        output_dir: Where to write; defaults to cfg.output_dir

    Returns:
        AnalysisResult

    Raises:
        InputError: unreadable or malformed input
        ConfigurationError: n above the supported maximum
        DefectiveMatrixError: Gram matrix not positive definite
        OSError: output directory not writable
    """
    numerics = {**NUMERICS_DEFAULTS, **(numerics or {})}
    output_dir = Path(output_dir or cfg.output_dir or Path.cwd())
    logger.info("Analyzing %s (%s)", cfg.input_path, cfg.header())

    ts, moments = load_moments(cfg.input_path, cfg.n, cfg.dx_mode, cfg.basis, cfg.max_n)

    discrepancy = byparts_discrepancy(moments)
    if discrepancy > numerics["byparts_tol"]:
        logger.warning(
            "Derivative moments by differences and by parts disagree (relative %.3e)",
            discrepancy,
        )

    labels = [
        OperatorLabel.VALUE,
        OperatorLabel.DERIVATIVE,
        OperatorLabel.DERIVATIVE_BYPARTS,
        OperatorLabel.RELAX_RATE,
    ]
    if cfg.log_derivative:
        if moments.dlnfq is None:
            logger.warning("f is not positive everywhere; skipping the log-derivative spectrum")
        else:
            labels.append(OperatorLabel.LOG_DERIVATIVE)
    spectra, quadratures = solve_pairs(moments, labels, numerics)

    direct = interpolate(moments, ts.xs)
    eigen = interpolate_eigenbasis(
        moments,
        spectra[OperatorLabel.VALUE],
        spectra[OperatorLabel.DERIVATIVE],
        spectra[OperatorLabel.DERIVATIVE_BYPARTS],
        ts.xs,
    )
    difference = dual_form_difference(direct, eigen)
    if not difference <= numerics["dual_form_tol"]:
        logger.warning(
            "Direct and eigenbasis interpolation differ by %.3e (tolerance %.1e)",
            difference, numerics["dual_form_tol"],
        )

    output_dir.mkdir(parents=True, exist_ok=True)
    result = AnalysisResult(
        config=cfg,
        output_dir=output_dir,
        moments=moments,
        spectra=spectra,
        quadratures=quadratures,
        dual_form_difference=difference,
        byparts_discrepancy=discrepancy,
    )
    header = cfg.header()

    for name, rows in (
        (INTERPOLATED_FILE, direct),
        (EIGENBASIS_INTERPOLATED_FILE, eigen),
    ):
        table = [
            (r.x, f, *r.as_row()[1:]) for r, f in zip(rows, ts.fs)
        ]
        result.files[name] = write_table(
            output_dir / name, table, f"{header} columns: {' '.join(INTERPOLATED_COLUMNS)}"
        )

    for label in labels:
        name = SPECTRUM_FILES[label]
        spectrum, quadrature = spectra[label], quadratures[label]
        table = [
            (i, spectrum.lambdas[i], quadrature.x_estimates[i]) for i in range(spectrum.n)
        ]
        result.files[name] = write_table(
            output_dir / name,
            table,
            f"{header} pair={label.value} columns: {' '.join(SPECTRUM_COLUMNS)}",
        )
        if cfg.histogram_bins:
            centers, equal, weighted = spectrum_distribution(
                spectrum, quadrature.weights, cfg.histogram_bins
            )
            hist_name = name.replace(".dat", "_distribution.dat")
            result.files[hist_name] = write_table(
                output_dir / hist_name,
                list(zip(centers, equal, weighted)),
                f"{header} pair={label.value} columns: {' '.join(DISTRIBUTION_COLUMNS)}",
            )

    for path in result.files.values():
        logger.info("Wrote %s", path)
    return result


class SpectralAnalyzer:
    """
    Runs analyses into content-addressed directories under a cache.

    Each input file gets <cache_dir>/output/<stem>_<md5[:8]> unless an
    explicit output directory is given.
    """

    def __init__(
        self,
        cache_dir: Optional[str] = None,
        numerics: Optional[Mapping[str, Any]] = None,
    ):
        if cache_dir:
            self.cache_dir = Path(cache_dir)
        else:
            self.cache_dir = Path(tempfile.gettempdir()) / "rn_spectra_cache"
        self.output_dir = self.cache_dir / "output"
        self.numerics = {**NUMERICS_DEFAULTS, **(numerics or {})}

    @classmethod
    def from_config(cls, config: Config) -> "SpectralAnalyzer":
        return cls(cache_dir=config.get_cache_dir(), numerics=config.get_numerics_settings())

    def _get_file_hash(self, file_path: Path) -> str:
        """Generate MD5 hash of file for unique identification."""
        hasher = hashlib.md5()
        with open(file_path, "rb") as f:
            for chunk in iter(lambda: f.read(8192), b""):
                hasher.update(chunk)
        return hasher.hexdigest()

    def run_dir_for(self, input_path: Union[str, Path]) -> Path:
        input_path = Path(input_path)
        if not input_path.exists():
            raise FileNotFoundError(f"File not found: {input_path}")
        return self.output_dir / f"{input_path.stem}_{self._get_file_hash(input_path)[:8]}"

    def analyze(self, cfg: RunConfig) -> AnalysisResult:
        """run_analysis into cfg.output_dir, or the run directory of the input."""
        output_dir = cfg.output_dir or self.run_dir_for(cfg.input_path)
        return run_analysis(cfg, self.numerics, output_dir)

    def compute_spectrum(
        self,
        input_path: Union[str, Path],
        label: Union[OperatorLabel, str],
        n: int,
        dx_mode: Union[DXMode, str] = DXMode.SAMPLE,
        basis: Union[BasisFamily, str] = BasisFamily.CHEBYSHEV,
    ) -> Tuple[Spectrum, LebesgueQuadrature]:
        """One pair's spectrum and Lebesgue quadrature, nothing written."""
        label = OperatorLabel(label)
        _, moments = load_moments(input_path, n, dx_mode, basis, self.numerics["max_n"])
        spectra, quadratures = solve_pairs(moments, [label], self.numerics)
        return spectra[label], quadratures[label]

    def gauss_quadrature(
        self,
        input_path: Union[str, Path],
        n: int,
        dx_mode: Union[DXMode, str] = DXMode.SAMPLE,
        basis: Union[BasisFamily, str] = BasisFamily.CHEBYSHEV,
    ) -> GaussQuadrature:
        """n-point Gauss quadrature of the sample measure of a file."""
        _, moments = load_moments(input_path, n, dx_mode, basis, self.numerics["max_n"])
        return gauss_quadrature(
            build_matrix(moments, MatrixKind.XQ),
            build_matrix(moments, MatrixKind.Q),
            moments.q,
            self.numerics["pivot_rtol"],
            self.numerics["jacobi_max_n"],
        )

    def get_cache_info(self) -> dict:
        """Get information about cached analyses."""
        analyses = []
        total_size = 0

        if self.output_dir.exists():
            for item in sorted(self.output_dir.iterdir()):
                if not item.is_dir():
                    continue
                files = sorted(item.glob("*.dat"))
                dir_size = sum(f.stat().st_size for f in files)
                total_size += dir_size
                modified = ""
                if files:
                    latest = max(f.stat().st_mtime for f in files)
                    modified = datetime.fromtimestamp(latest).isoformat()
                analyses.append({
                    "name": item.name,
                    "path": str(item),
                    "files": [f.name for f in files],
                    "size_bytes": dir_size,
                    "size_human": self._human_readable_size(dir_size),
                    "modified": modified,
                })

        return {
            "cache_dir": str(self.cache_dir),
            "output_dir": str(self.output_dir),
            "analyses": analyses,
            "total_analyses": len(analyses),
            "total_size_bytes": total_size,
            "total_size_human": self._human_readable_size(total_size),
        }

    def _human_readable_size(self, size_bytes: float) -> str:
        """Convert bytes to human readable format."""
        for unit in ["B", "KB", "MB", "GB"]:
            if size_bytes < 1024:
                return f"{size_bytes:.1f} {unit}"
            size_bytes /= 1024
        return f"{size_bytes:.1f} TB"

    def clear_cache(self) -> dict:
        """Remove every cached run directory."""
        cleared = []
        if self.output_dir.exists():
            for item in sorted(self.output_dir.iterdir()):
                if item.is_dir():
                    shutil.rmtree(item)
                    cleared.append(str(item))
        return {"cleared": cleared, "count": len(cleared)}
