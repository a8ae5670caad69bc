"""
Deterministic synthetic signals: staged linear degradation, staged
exponential relaxation and the Runge function.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ConfigurationError, InputError, InsufficientDataError
from .moments import Timeserie

# samples per shortest stage when no step is given
SAMPLES_PER_STAGE = 500

RUNGE_COUNT = 2001

# (rates, lengths) used when a staged model is generated without them
MODEL_DEFAULTS = {
    "two-stage": ((-0.01, -0.1), (10.0, 10.0)),
    "multi-exp": ((-0.4, -0.2, -0.1), (7.0, 7.0, 7.0)),
}

MODELS = [*MODEL_DEFAULTS, "runge"]


class StageKind(str, Enum):
    LINEAR = "linear"
    EXPONENTIAL = "exponential"

    @classmethod
    def parse(cls, value: Union[str, "StageKind"]) -> "StageKind":
        if isinstance(value, cls):
            return value
        aliases = {"two-stage": cls.LINEAR, "multi-exp": cls.EXPONENTIAL}
        text = str(value).strip().lower()
        if text in aliases:
            return aliases[text]
        try:
            return cls(text)
        except ValueError:
            raise ConfigurationError(
                f"Unknown stage kind '{value}'. Supported: linear, exponential"
            ) from None


@dataclass(frozen=True)
class StageSpec:
    """
    Consecutive stages of a degradation model.

    rates are slopes (LINEAR) or log-slopes (EXPONENTIAL); lengths are the
    stage durations in x units.
    """

    rates: tuple
    lengths: tuple
    step: float
    kind: StageKind = StageKind.LINEAR

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        lengths = tuple(float(v) for v in self.lengths)
        if len(rates) < 1 or len(rates) != len(lengths):
            raise InputError(
                f"rates and lengths must be non-empty and of equal size, "
                f"got {len(rates)} and {len(lengths)}"
            )
        if not all(np.isfinite(rates)):
            raise InputError("Stage rates must be finite")
        if not all(np.isfinite(v) and v > 0 for v in lengths):
            raise InputError(f"Stage lengths must be positive, got {lengths}")
        if not (np.isfinite(self.step) and self.step > 0):
            raise InputError(f"Sampling step must be positive, got {self.step}")
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "step", float(self.step))
        object.__setattr__(self, "kind", StageKind.parse(self.kind))

    @property
    def total_length(self) -> float:
        return float(sum(self.lengths))


def default_step(lengths: Sequence[float]) -> float:
    """Step giving the shortest stage SAMPLES_PER_STAGE samples."""
    return float(min(lengths)) / SAMPLES_PER_STAGE


def _grid(spec: StageSpec) -> np.ndarray:
    count = int(round(spec.total_length / spec.step)) + 1
    return spec.step * np.arange(count)


def _staged(spec: StageSpec, xs: np.ndarray) -> np.ndarray:
    """Piecewise-linear values with value 0 at x=0, continuous at the stage ends."""
    rates = np.asarray(spec.rates)
    lengths = np.asarray(spec.lengths)
    starts = np.concatenate(([0.0], np.cumsum(lengths)[:-1]))
    start_values = np.concatenate(([0.0], np.cumsum(rates * lengths)[:-1]))
    # a breakpoint belongs to the stage it ends
    stage = np.searchsorted(starts[1:], xs, side="left")
    return start_values[stage] + rates[stage] * (xs - starts[stage])


def gen_two_stage(spec: StageSpec) -> Timeserie:
    """Linear degradation f(0) = 1 with slope rates[i] during stage i."""
    if spec.kind is not StageKind.LINEAR:
        raise InputError("gen_two_stage needs a LINEAR stage spec")
    xs = _grid(spec)
    return Timeserie(xs, 1.0 + _staged(spec, xs))


def gen_multistage_exp(spec: StageSpec) -> Timeserie:
    """Exponential relaxation f(0) = 1 with d ln f/dx = rates[i] during stage i."""
    if spec.kind is not StageKind.EXPONENTIAL:
        raise InputError("gen_multistage_exp needs an EXPONENTIAL stage spec")
    xs = _grid(spec)
    return Timeserie(xs, np.exp(_staged(spec, xs)))


def gen_runge(count: int) -> Timeserie:
    """count uniform samples of 1 / (1 + 25 x^2) on [-1, 1]."""
    if count < 2:
        raise InsufficientDataError(f"Runge series needs at least 2 samples, got {count}")
    xs = np.linspace(-1.0, 1.0, int(count))
    return Timeserie(xs, 1.0 / (1.0 + 25.0 * xs**2))


def generate(
    kind: Union[StageKind, str],
    rates: Sequence[float],
    lengths: Sequence[float],
    step: Optional[float] = None,
) -> Timeserie:
    """Build a StageSpec (default_step when step is None) and run the matching generator."""
    kind = StageKind.parse(kind)
    if step is None:
        if len(lengths) == 0:
            raise InputError("At least one stage length is required")
        step = default_step(lengths)
    spec = StageSpec(tuple(rates), tuple(lengths), step, kind)
    if kind is StageKind.LINEAR:
        return gen_two_stage(spec)
    return gen_multistage_exp(spec)
