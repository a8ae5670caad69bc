"""
Reading and writing tab-separated data files.

Lines starting with "|" are comments. Numbers are written with 17
significant digits so a written series reads back bit-for-bit.
"""

import logging
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

from .errors import InputError, InsufficientDataError, ParseError
from .moments import Timeserie

logger = logging.getLogger(__name__)

COMMENT_PREFIX = "|"

PathLike = Union[str, Path]


def format_value(value) -> str:
    """Fixed formatting: integers as is, floats %.17g, NaN as 'NaN'."""
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def parse_timeserie(path: PathLike) -> Timeserie:
    """
    Read (x, f) pairs from the first two tab-separated fields of each line.

    Raises:
        FileNotFoundError: path does not exist
        ParseError: a field is not a number (carries the line number)
        InputError: x decreases
        InsufficientDataError: fewer than 2 data rows
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")

    xs: List[float] = []
    fs: List[float] = []
    lines: List[int] = []
    with open(path, "r", encoding="utf-8") as f:
        for number, raw in enumerate(f, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith(COMMENT_PREFIX):
                continue
            fields = line.split("\t")
            if len(fields) < 2:
                raise ParseError("expected two tab-separated fields", path, number)
            try:
                x, value = float(fields[0]), float(fields[1])
            except ValueError:
                raise ParseError(
                    f"malformed number in '{fields[0]}\\t{fields[1]}'", path, number
                ) from None
            if xs and x < xs[-1]:
                raise InputError(
                    f"{path}:{number}: x must be nondecreasing ({x} after {xs[-1]}, "
                    f"line {lines[-1]})"
                )
            xs.append(x)
            fs.append(value)
            lines.append(number)

    if len(xs) < 2:
        raise InsufficientDataError(f"{path}: need at least 2 data rows, found {len(xs)}")
    logger.debug("Read %d samples from %s", len(xs), path)
    return Timeserie(xs, fs)


def write_table(
    path: PathLike,
    columns: Sequence[Sequence],
    header: Optional[str] = None,
) -> Path:
    """
    Write rows of values tab-separated with LF endings.

    Args:
        path: Output file
        columns: Row-major data, one sequence per row
        header: Optional comment text written after "|" on the first line
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        if header:
            f.write(f"{COMMENT_PREFIX} {header}\n")
        for row in columns:
            f.write("\t".join(format_value(v) for v in row))
            f.write("\n")
    logger.debug("Wrote %s", path)
    return path


def write_timeserie(path: PathLike, ts: Timeserie, header: Optional[str] = None) -> Path:
    """Write a series in the format parse_timeserie reads."""
    return write_table(path, _rows(ts.xs, ts.fs), header)


def _rows(*columns: Iterable) -> Iterable:
    return zip(*(map(float, column) for column in columns))
