"""Small helpers for tabulated curves and CSV round-tripping.

All floats are written with repr-faithful precision (17 significant
digits) so that a written file reloads to bit-identical values and
reruns can be compared byte-for-byte.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDataError

FLOAT_FMT = "%.17g"


def format_float(x: float) -> str:
    """Render a float with enough digits to round-trip exactly."""
    return FLOAT_FMT % float(x)


@dataclass(frozen=True)
class BinnedSeries:
    """A curve sampled on a fixed time grid."""

    times: np.ndarray
    values: np.ndarray
    label: str = "value"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or v.ndim != 1 or t.shape != v.shape:
            raise InvalidDataError(
                f"times and values must be 1-d arrays of equal length, "
                f"got shapes {t.shape} and {v.shape}"
            )
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.times.size


def render_table(header: list[str], columns: list[np.ndarray]) -> str:
    """Format named columns as CSV text (17 significant digits)."""
    if len(header) != len(columns):
        raise InvalidDataError("header and column count differ")
    cols = [np.asarray(c) for c in columns]
    n = cols[0].shape[0] if cols else 0
    for c in cols:
        if c.shape != (n,):
            raise InvalidDataError("all columns must share one length")
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    rendered = [
        [format_float(x) for x in c] if np.issubdtype(c.dtype, np.floating)
        else [str(x) for x in c]
        for c in cols
    ]
    for i in range(n):
        buf.write(",".join(col[i] for col in rendered) + "\n")
    return buf.getvalue()


def write_table(path, header: list[str], columns: list[np.ndarray]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(render_table(header, columns))


def read_columns(path, names: list[str]) -> dict[str, np.ndarray]:
    """Read the named float columns from a CSV file with a header row.

    Missing columns or non-numeric cells raise InvalidDataError; extra
    columns are ignored so record files with channel labels still load.
    """
    out: dict[str, list[float]] = {name: [] for name in names}
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InvalidDataError(f"cannot read samples from {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        missing = [name for name in names if name not in fields]
        if missing:
            raise InvalidDataError(
                f"{path}: missing required column(s) {', '.join(missing)}"
            )
        for row in reader:
            for name in names:
                cell = row[name]
                try:
                    out[name].append(float(cell))
                except (TypeError, ValueError):
                    raise InvalidDataError(
                        f"{path}: non-numeric value {cell!r} in column {name}"
                    ) from None
    return {name: np.asarray(vals, dtype=float) for name, vals in out.items()}
