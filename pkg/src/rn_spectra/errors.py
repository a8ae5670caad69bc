"""
Exception hierarchy for rn-spectra.

Input problems exit the CLI with status 1, numerical failures with status 2.
"""

from pathlib import Path
from typing import Optional, Union


class RNSpectraError(Exception):
    """Base class for all rn-spectra errors."""

    exit_code = 1


class InputError(RNSpectraError, ValueError):
    """Invalid user data: non-finite values, decreasing x, bad arguments."""


class ParseError(InputError):
    """A timeserie file line could not be parsed."""

    def __init__(self, message: str, path: Optional[Union[str, Path]] = None, line: int = 0):
        self.path = str(path) if path is not None else None
        self.line = line
        location = f"{self.path}:{line}: " if self.path else (f"line {line}: " if line else "")
        super().__init__(f"{location}{message}")


class InsufficientDataError(InputError):
    """Not enough samples to build the requested moments."""


class ConfigurationError(RNSpectraError, ValueError):
    """Invalid configuration (basis dimension above the moment cap, unknown basis, ...)."""


class ContractError(RNSpectraError, ValueError):
    """An operation was called outside its preconditions."""


class NumericalError(RNSpectraError, ArithmeticError):
    """A numerical step could not be completed."""

    exit_code = 2


class DefectiveMatrixError(NumericalError):
    """A matrix that must be positive definite is not."""


class DegenerateDistributionError(NumericalError):
    """The observable has no spread (λ_min == λ_max)."""


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit status."""
    if isinstance(exc, RNSpectraError):
        return exc.exit_code
    if isinstance(exc, (OSError, ValueError)):
        return 1
    return 2
