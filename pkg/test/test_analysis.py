"""Tests for the end-to-end analysis and the cached analyzer."""

import json
from pathlib import Path

import numpy as np
import pytest

from rn_spectra.analysis import (
    EIGENBASIS_INTERPOLATED_FILE,
    INTERPOLATED_FILE,
    SPECTRUM_FILES,
    RunConfig,
    SpectralAnalyzer,
    dual_form_difference,
    load_moments,
    run_analysis,
)
from rn_spectra.config_loader import Config
from rn_spectra.errors import ConfigurationError, DefectiveMatrixError
from rn_spectra.moments import DXMode, OperatorLabel
from rn_spectra.orthopoly import BasisFamily
from rn_spectra.spectral import interpolate


def _table(path):
    return np.loadtxt(path, comments="|", delimiter="\t", ndmin=2)


@pytest.fixture(scope="module")
def fixture_run(tmp_path_factory):
    """Full default analysis of the committed 15:5 fixture."""
    source = Path(__file__).parent / "data" / "two_stage_15_5.dat"
    out = tmp_path_factory.mktemp("fixture_run")
    return run_analysis(RunConfig(source, n=50), output_dir=out)


class TestRunConfig:
    def test_validation(self, tmp_path):
        for n in (0, 151, 2.5):
            with pytest.raises(ConfigurationError):
                RunConfig(tmp_path / "x.dat", n=n)
        with pytest.raises(ConfigurationError):
            RunConfig(tmp_path / "x.dat", histogram_bins=-1)
        with pytest.raises(ConfigurationError):
            RunConfig(tmp_path / "x.dat", basis="hermite")

    def test_parses_enums(self, tmp_path):
        cfg = RunConfig(str(tmp_path / "x.dat"), n=12, dx_mode="analyticalDX", basis="Legendre")
        assert cfg.dx_mode is DXMode.ANALYTICAL
        assert cfg.basis is BasisFamily.LEGENDRE
        assert cfg.header() == "rn-spectra input=x.dat n=12 dx=analytical basis=legendre"

    def test_from_config(self, tmp_path, monkeypatch):
        monkeypatch.delenv("RN_SPECTRA_OUTPUT_DIR", raising=False)
        path = tmp_path / "config.json"
        settings = {"analysis": {"n": 20, "basis": "monomial"}, "output_dir": "out"}
        path.write_text(json.dumps(settings))
        config = Config(str(path))
        cfg = RunConfig.from_config("in.dat", config, n=None, basis=None)
        assert cfg.n == 20
        assert cfg.basis is BasisFamily.MONOMIAL
        assert cfg.output_dir == tmp_path / "out"
        assert RunConfig.from_config("in.dat", config, n=5).n == 5


def test_output_files(fixture_run, two_stage_file):
    files = fixture_run.files
    assert set(files) == {INTERPOLATED_FILE, EIGENBASIS_INTERPOLATED_FILE} | {
        SPECTRUM_FILES[label]
        for label in (
            OperatorLabel.VALUE,
            OperatorLabel.DERIVATIVE,
            OperatorLabel.DERIVATIVE_BYPARTS,
            OperatorLabel.RELAX_RATE,
        )
    }
    for path in files.values():
        first = path.read_text().splitlines()[0]
        assert first.startswith("| rn-spectra input=two_stage_15_5.dat n=50 dx=sample")

    table = _table(files[INTERPOLATED_FILE])
    assert table.shape == (401, 8)
    source = _table(two_stage_file)
    np.testing.assert_array_equal(table[:, 0], source[:, 0])
    np.testing.assert_array_equal(table[:, 1], source[:, 1])

    spectrum = _table(files[SPECTRUM_FILES[OperatorLabel.DERIVATIVE]])
    assert spectrum.shape == (50, 3)
    np.testing.assert_array_equal(spectrum[:, 0], np.arange(50))
    assert np.all(np.diff(spectrum[:, 1]) >= 0)


def test_interpolated_values_track_the_signal(fixture_run, two_stage_file):
    table = _table(fixture_run.files[INTERPOLATED_FILE])
    f = table[:, 1]
    interior = (table[:, 0] > 2.0) & (table[:, 0] < 13.0)
    np.testing.assert_allclose(table[interior, 2], f[interior], atol=0.02)
    np.testing.assert_allclose(table[interior, 3], f[interior], atol=0.02)


def test_dual_forms_agree(fixture_run):
    assert fixture_run.dual_form_difference < 1e-8
    direct = _table(fixture_run.files[INTERPOLATED_FILE])
    eigen = _table(fixture_run.files[EIGENBASIS_INTERPOLATED_FILE])
    scale = np.maximum(1.0, np.max(np.abs(direct), axis=0))
    assert np.max(np.abs(direct - eigen) / scale) < 1e-8


def test_relax_rate_spectrum_is_finite_for_positive_signal(fixture_run):
    spectrum = fixture_run.spectra[OperatorLabel.RELAX_RATE]
    assert not spectrum.defective
    assert np.all(np.isfinite(spectrum.lambdas))


def test_constant_signal_has_zero_derivative_spectrum(write_series, tmp_path):
    xs = np.linspace(0.0, 10.0, 101)
    path = write_series(xs, np.full(101, 2.5))
    result = run_analysis(RunConfig(path, n=10), output_dir=tmp_path / "out")
    lambdas = _table(result.files[SPECTRUM_FILES[OperatorLabel.DERIVATIVE]])[:, 1]
    np.testing.assert_allclose(lambdas, 0.0, atol=1e-10)
    values = _table(result.files[SPECTRUM_FILES[OperatorLabel.VALUE]])[:, 1]
    np.testing.assert_allclose(values, 2.5, rtol=1e-10)


def test_sign_changing_signal_gives_nan_relax_rate(write_series, tmp_path):
    xs = np.linspace(0.0, 20.0, 201)
    path = write_series(xs, 1.0 - xs / 5.0)
    cfg = RunConfig(path, n=5, log_derivative=True)
    result = run_analysis(cfg, output_dir=tmp_path / "out")
    table = _table(result.files[SPECTRUM_FILES[OperatorLabel.RELAX_RATE]])
    assert table.shape == (5, 3)
    assert np.all(np.isnan(table[:, 1]))
    assert np.all(np.isnan(table[:, 2]))
    assert result.spectra[OperatorLabel.RELAX_RATE].defective
    # f <= 0 somewhere: no log-derivative spectrum
    assert SPECTRUM_FILES[OperatorLabel.LOG_DERIVATIVE] not in result.files


def test_log_derivative_and_histograms(two_stage_file, tmp_path):
    cfg = RunConfig(two_stage_file, n=12, log_derivative=True, histogram_bins=8)
    result = run_analysis(cfg, output_dir=tmp_path)
    name = SPECTRUM_FILES[OperatorLabel.LOG_DERIVATIVE]
    assert _table(result.files[name]).shape == (12, 3)

    histograms = [key for key in result.files if key.endswith("_distribution.dat")]
    assert len(histograms) == 5
    hist = _table(result.files[name.replace(".dat", "_distribution.dat")])
    assert hist.shape == (8, 3)
    assert np.sum(hist[:, 1]) == pytest.approx(1.0)
    assert np.sum(hist[:, 2]) == pytest.approx(1.0)


def test_defective_gram_raises(write_series, tmp_path):
    path = write_series([0.0, 1.0, 2.0], [1.0, 0.5, 0.25])
    with pytest.raises(DefectiveMatrixError):
        run_analysis(RunConfig(path, n=5), output_dir=tmp_path / "out")


def test_dual_form_difference_helper(two_stage_15_5):
    _, moments = load_moments(two_stage_15_5, 6)
    rows = interpolate(moments, two_stage_15_5.xs[:5])
    assert dual_form_difference(rows, rows) == 0.0
    assert dual_form_difference([], []) == 0.0


class TestSpectralAnalyzer:
    def test_run_directory_and_cache(self, two_stage_file, tmp_path):
        analyzer = SpectralAnalyzer(cache_dir=str(tmp_path / "cache"))
        run_dir = analyzer.run_dir_for(two_stage_file)
        assert run_dir.parent == tmp_path / "cache" / "output"
        assert run_dir.name.startswith("two_stage_15_5_")
        assert len(run_dir.name) == len("two_stage_15_5_") + 8

        result = analyzer.analyze(RunConfig(two_stage_file, n=10))
        assert result.output_dir == run_dir
        assert (run_dir / INTERPOLATED_FILE).exists()

        info = analyzer.get_cache_info()
        assert info["total_analyses"] == 1
        entry = info["analyses"][0]
        assert entry["name"] == run_dir.name
        assert INTERPOLATED_FILE in entry["files"]
        assert entry["size_bytes"] > 0
        assert info["total_size_human"].endswith("KB")

        cleared = analyzer.clear_cache()
        assert cleared["count"] == 1
        assert not run_dir.exists()
        assert analyzer.get_cache_info()["total_analyses"] == 0

    def test_missing_input(self, tmp_path):
        analyzer = SpectralAnalyzer(cache_dir=str(tmp_path))
        with pytest.raises(FileNotFoundError):
            analyzer.run_dir_for(tmp_path / "missing.dat")

    def test_explicit_output_dir(self, two_stage_file, tmp_path):
        analyzer = SpectralAnalyzer(cache_dir=str(tmp_path / "cache"))
        result = analyzer.analyze(RunConfig(two_stage_file, n=6, output_dir=tmp_path / "mine"))
        assert result.output_dir == tmp_path / "mine"
        assert analyzer.get_cache_info()["total_analyses"] == 0

    def test_compute_spectrum(self, two_stage_file, tmp_path):
        analyzer = SpectralAnalyzer(cache_dir=str(tmp_path))
        spectrum, quadrature = analyzer.compute_spectrum(two_stage_file, "derivative", 10)
        assert spectrum.n == 10
        assert quadrature.total_weight == pytest.approx(20.0, rel=1e-10)
        assert -0.1 - 1e-9 <= spectrum.lambdas[0] and spectrum.lambdas[-1] <= -0.01 + 1e-9

    def test_gauss_quadrature(self, two_stage_file, tmp_path):
        analyzer = SpectralAnalyzer(cache_dir=str(tmp_path))
        gauss = analyzer.gauss_quadrature(two_stage_file, 5)
        assert np.sum(gauss.weights) == pytest.approx(20.0, rel=1e-10)
        assert np.all((gauss.nodes > 0.0) & (gauss.nodes < 20.0))
        assert gauss.integrate(lambda x: x) == pytest.approx(200.0 + 0.05 * 20.0 / 2, rel=1e-10)

    def test_human_readable_size(self, tmp_path):
        analyzer = SpectralAnalyzer(cache_dir=str(tmp_path))
        assert analyzer._human_readable_size(512) == "512.0 B"
        assert analyzer._human_readable_size(2048) == "2.0 KB"
