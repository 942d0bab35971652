"""Ingestion and preprocessing of price series.

Raw CSV prices are read into :class:`RawSeries`, intersected on a weekly
(Monday) grid by :func:`align_weekly`, and turned into analysis-ready
:class:`TimeSeries` via log returns or normalized log levels.
"""

from __future__ import annotations

import csv
import datetime as _dt
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import InputError

MIN_LENGTH = 8


@dataclass(frozen=True)
class RawSeries:
    name: str
    dates: tuple
    values: np.ndarray
    dropped: int = 0
    source: str | None = None

    def __post_init__(self):
        if len(self.dates) != len(self.values):
            raise InputError(f"{self.name}: dates and values differ in length")
        for a, b in zip(self.dates, self.dates[1:]):
            if b == a:
                raise InputError(f"{self.name}: duplicate date {a.isoformat()}")
            if b < a:
                raise InputError(f"{self.name}: dates not increasing at {b.isoformat()}")
        if not np.all(np.isfinite(self.values)):
            raise InputError(f"{self.name}: non-finite value")

    def __len__(self):
        return len(self.dates)


@dataclass(frozen=True)
class TimeSeries:
    """Evenly spaced observations.

    ``dt`` is in weeks. ``dates`` carries the calendar label of every sample
    when the series came from dated input; it is informational only, the
    transform assumes nominal spacing ``dt`` throughout.
    """

    name: str
    values: np.ndarray
    t0: _dt.date = _dt.date(1970, 1, 5)
    dt: float = 1.0
    dates: tuple | None = None
    gaps: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise InputError(f"{self.name}: values must be one-dimensional")
        if len(values) == 0:
            raise InputError(f"{self.name}: empty series")
        if not self.dt > 0:
            raise InputError(f"{self.name}: dt must be positive")
        if not np.all(np.isfinite(values)):
            raise InputError(f"{self.name}: non-finite value")
        if self.dates is not None and len(self.dates) != len(values):
            raise InputError(f"{self.name}: dates and values differ in length")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)

    def time_axis(self):
        """Calendar label per sample (the stored dates, else t0 + i*dt weeks)."""
        if self.dates is not None:
            return tuple(self.dates)
        return tuple(self.t0 + _dt.timedelta(weeks=i * self.dt) for i in range(len(self)))


def _parse_date(text):
    text = text.strip()
    # Accept a trailing time part ("2003-11-24T00:00" or "2003-11-24 00:00").
    if len(text) > 10 and text[10] in "T ":
        text = text[:10]
    try:
        return _dt.date.fromisoformat(text)
    except ValueError:
        return None


def require_length(x, n=MIN_LENGTH):
    if len(x) < n:
        raise InputError(f"{x.name}: need at least {n} points, got {len(x)}")


def load_csv(path, column, date_column="date", name=None):
    """Read one price column from a CSV file with an ISO-8601 date column.

    Rows whose value cell is empty are dropped; the count is kept in
    ``RawSeries.dropped``. Every other malformed cell is an error reported
    with the file name and line number.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        for wanted in (date_column, column):
            if wanted not in header:
                raise InputError(f"{path}:1: missing column {wanted!r}")
        di, vi = header.index(date_column), header.index(column)

        seen = {}
        dates, values, dropped = [], [], 0
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) <= max(di, vi):
                raise InputError(f"{path}:{lineno}: too few fields")
            day = _parse_date(row[di])
            if day is None:
                raise InputError(f"{path}:{lineno}: unparseable date {row[di]!r}")
            cell = row[vi].strip()
            if not cell:
                dropped += 1
                continue
            try:
                value = float(cell)
            except ValueError:
                raise InputError(f"{path}:{lineno}: unparseable number {cell!r}") from None
            if not math.isfinite(value):
                raise InputError(f"{path}:{lineno}: non-finite number {cell!r}")
            if day in seen:
                raise InputError(f"{path}:{lineno}: duplicate date {day.isoformat()} (first on line {seen[day]})")
            seen[day] = lineno
            dates.append(day)
            values.append(value)

    if not dates:
        raise InputError(f"{path}: zero usable rows")
    order = sorted(range(len(dates)), key=dates.__getitem__)
    return RawSeries(
        name=name or column,
        dates=tuple(dates[i] for i in order),
        values=np.array([values[i] for i in order], dtype=float),
        dropped=dropped,
        source=str(path),
    )


def week_monday(day):
    return day - _dt.timedelta(days=day.weekday())


def _by_monday(raw):
    out = {}
    for day, value in zip(raw.dates, raw.values):
        monday = week_monday(day)
        if monday in out:
            raise InputError(f"{raw.name}: two observations in the week of {monday.isoformat()}")
        out[monday] = value
    return out


def align_weekly(a, b):
    """Intersect two raw series on Monday-of-ISO-week dates.

    Weeks missing from either series are excluded, not interpolated. The
    number of skipped interior weeks is stored in ``TimeSeries.gaps``.
    """
    if len(a) == 0 or len(b) == 0:
        raise InputError("cannot align an empty series")
    wa, wb = _by_monday(a), _by_monday(b)
    common = sorted(set(wa) & set(wb))
    if len(common) < MIN_LENGTH:
        raise InputError(f"insufficient overlap: {len(common)} common weeks, need {MIN_LENGTH}")
    span = (common[-1] - common[0]).days // 7 + 1
    gaps = span - len(common)
    dates = tuple(common)
    xa = TimeSeries(a.name, np.array([wa[d] for d in common]), common[0], 1.0, dates, gaps)
    xb = TimeSeries(b.name, np.array([wb[d] for d in common]), common[0], 1.0, dates, gaps)
    return xa, xb


def _require_positive(x):
    if np.any(x.values <= 0):
        raise InputError(f"{x.name}: non-positive value; logarithm undefined")


def log_returns(x):
    _require_positive(x)
    logs = np.log(x.values)
    dates = x.dates[1:] if x.dates is not None else None
    return replace(
        x,
        values=np.diff(logs),
        t0=x.t0 + _dt.timedelta(weeks=x.dt),
        dates=dates,
    )


def normalized_log_price(x):
    """Log prices shifted so that the minimum is exactly zero."""
    _require_positive(x)
    logs = np.log(x.values)
    return replace(x, values=logs - logs.min())


def standardize(x):
    v = x.values
    if len(v) < 2:
        raise InputError(f"{x.name}: need at least 2 points to standardize")
    centered = v - v.mean()
    sd = centered.std(ddof=1)
    scale = np.abs(v).max()
    if sd == 0 or sd <= 1e-13 * scale:
        raise InputError(f"{x.name}: zero variance")
    return replace(x, values=centered / sd)
