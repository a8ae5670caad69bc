"""Shared fixtures for the rn-spectra test suite."""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from rn_spectra.models import gen_runge, generate  # noqa: E402
from rn_spectra.moments import DXMode, Timeserie, compute_moments  # noqa: E402
from rn_spectra.orthopoly import BasisSpec  # noqa: E402

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def two_stage_file() -> Path:
    """Committed two-stage 15:5 fixture, step 0.05."""
    return DATA_DIR / "two_stage_15_5.dat"


@pytest.fixture(scope="session")
def two_stage_10_10() -> Timeserie:
    return generate("linear", (-0.01, -0.1), (10.0, 10.0))


@pytest.fixture(scope="session")
def two_stage_15_5() -> Timeserie:
    return generate("linear", (-0.01, -0.1), (15.0, 5.0))


@pytest.fixture(scope="session")
def three_stage() -> Timeserie:
    return generate("exponential", (-0.4, -0.2, -0.1), (7.0, 7.0, 7.0))


@pytest.fixture(scope="session")
def runge() -> Timeserie:
    return gen_runge(2001)


def uniform_moments(n: int, family: str = "chebyshev", x_min: float = -1.0, x_max: float = 1.0):
    """Closed-form moments of the uniform measure dx on [x_min, x_max]."""
    ts = Timeserie(np.linspace(x_min, x_max, 5), np.ones(5))
    spec = BasisSpec.for_sample(family, n, ts.xs)
    return compute_moments(ts, spec, DXMode.ANALYTICAL)


@pytest.fixture
def write_series(tmp_path):
    """Write (x, f) rows to a tab-separated file and return its path."""

    def _write(xs, fs, name="series.dat"):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for x, v in zip(xs, fs):
                f.write(f"{float(x)!r}\t{float(v)!r}\n")
        return path

    return _write
