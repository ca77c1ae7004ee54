"""Quarterly time-series containers and the transforms applied to them.

All containers are immutable: transforms return new objects and the
underlying arrays are flagged read-only.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DataError,
    DomainError,
    GapError,
    InsufficientDataError,
    NoOverlapError,
    RangeError,
)

_PERIOD_RE = re.compile(r"^\s*(\d{4})\s*-?\s*[Qq]([1-4])\s*$")


@dataclass(frozen=True, order=True)
class Period:
    """A calendar quarter. Ordering is lexicographic on (year, quarter)."""

    year: int
    quarter: int

    def __post_init__(self):
        if self.quarter not in (1, 2, 3, 4):
            raise ValueError(f"quarter must be in 1..4, got {self.quarter}")

    @classmethod
    def parse(cls, text: str | "Period") -> "Period":
        """Parse ``2004Q1`` / ``2004-Q1`` (case-insensitive)."""
        if isinstance(text, Period):
            return text
        m = _PERIOD_RE.match(str(text))
        if not m:
            raise ValueError(f"cannot parse quarter {text!r}; expected e.g. 2004Q1")
        return cls(int(m.group(1)), int(m.group(2)))

    @property
    def ordinal(self) -> int:
        return self.year * 4 + (self.quarter - 1)

    @classmethod
    def from_ordinal(cls, n: int) -> "Period":
        return cls(n // 4, n % 4 + 1)

    def __add__(self, quarters: int) -> "Period":
        if not isinstance(quarters, (int, np.integer)):
            return NotImplemented
        return Period.from_ordinal(self.ordinal + int(quarters))

    def __sub__(self, other):
        if isinstance(other, Period):
            return self.ordinal - other.ordinal
        if isinstance(other, (int, np.integer)):
            return self + (-int(other))
        return NotImplemented

    def __str__(self) -> str:
        return f"{self.year}Q{self.quarter}"


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """Contiguous quarterly series; ``values[i]`` belongs to ``start + i``."""

    name: str
    start: Period
    values: np.ndarray
    transforms: tuple[str, ...] = ("raw",)

    def __post_init__(self):
        object.__setattr__(self, "start", Period.parse(self.start))
        arr = _frozen(self.values)
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            where = ", ".join(str(self.start + int(i)) for i in bad[:5])
            raise GapError(f"series {self.name!r} has missing values at {where}")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "transforms", tuple(self.transforms))

    def __len__(self) -> int:
        return self.values.size

    @property
    def end(self) -> Period:
        return self.start + (len(self) - 1)

    @property
    def periods(self) -> list[Period]:
        return [self.start + i for i in range(len(self))]

    def at(self, period: Period | str) -> float:
        i = Period.parse(period) - self.start
        if not 0 <= i < len(self):
            raise RangeError(f"{period} outside {self.name!r} span {self.start}..{self.end}")
        return float(self.values[i])

    def window(self, start: Period, end: Period) -> "TimeSeries":
        """Inclusive slice; the window must lie inside the span."""
        i0, i1 = start - self.start, end - self.start
        if i0 < 0 or i1 >= len(self) or i1 < i0:
            raise RangeError(
                f"window {start}..{end} not inside {self.name!r} span {self.start}..{self.end}"
            )
        return TimeSeries(self.name, start, self.values[i0 : i1 + 1], self.transforms)

    def rename(self, name: str) -> "TimeSeries":
        return TimeSeries(name, self.start, self.values, self.transforms)

    def _derive(self, start: Period, values, tag: str) -> "TimeSeries":
        log = self.transforms if self.transforms != ("raw",) else ()
        return TimeSeries(self.name, start, values, log + (tag,))


def _require_nonempty(s: TimeSeries) -> None:
    if len(s) == 0:
        raise InsufficientDataError(f"series {s.name!r} is empty")


def log_transform(s: TimeSeries) -> TimeSeries:
    """Natural log; every value must be strictly positive."""
    _require_nonempty(s)
    bad = np.flatnonzero(s.values <= 0)
    if bad.size:
        i = int(bad[0])
        raise DomainError(
            f"log of non-positive value {s.values[i]!r} in {s.name!r} at {s.start + i}"
        )
    return s._derive(s.start, np.log(s.values), "log")


def difference(s: TimeSeries) -> TimeSeries:
    if len(s) < 2:
        raise InsufficientDataError(
            f"difference needs at least 2 observations, {s.name!r} has {len(s)}"
        )
    return s._derive(s.start + 1, np.diff(s.values), "diff")


def growth(s: TimeSeries, periods: int = 1) -> TimeSeries:
    """Percent growth as ``100 * (ln x_t - ln x_{t-periods})``.

    ``periods=1`` is quarter-on-quarter, ``periods=4`` year-on-year.
    """
    if periods < 1:
        raise ValueError("periods must be >= 1")
    if len(s) <= periods:
        raise InsufficientDataError(
            f"growth over {periods} quarters needs more than {periods} observations"
        )
    logs = log_transform(s).values
    tag = "growth" if periods == 1 else f"growth{periods}"
    return s._derive(s.start + periods, 100.0 * (logs[periods:] - logs[:-periods]), tag)


@dataclass(frozen=True)
class Dataset:
    """Aligned panel of series sharing start and length.

    Variable order is meaningful: it is the recursive identification order
    used downstream.
    """

    series: tuple[TimeSeries, ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        series = tuple(self.series)
        if not series:
            raise DataError("a dataset needs at least one series")
        names = [s.name for s in series]
        if len(set(names)) != len(names):
            raise DataError(f"duplicate variable names: {names}")
        first = series[0]
        for s in series[1:]:
            if s.start != first.start or len(s) != len(first):
                raise DataError(
                    f"series {s.name!r} ({s.start}..{s.end}) not aligned with "
                    f"{first.name!r} ({first.start}..{first.end})"
                )
        object.__setattr__(self, "series", series)

    @classmethod
    def from_array(cls, values, names: Sequence[str], start: Period | str = "2000Q1") -> "Dataset":
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != len(names):
            raise DataError(f"expected a (T, {len(names)}) array, got shape {arr.shape}")
        start = Period.parse(start)
        return cls(tuple(TimeSeries(n, start, arr[:, j]) for j, n in enumerate(names)))

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.series]

    @property
    def start(self) -> Period:
        return self.series[0].start

    @property
    def end(self) -> Period:
        return self.series[0].end

    @property
    def nobs(self) -> int:
        return len(self.series[0])

    def __len__(self) -> int:
        return self.nobs

    @property
    def values(self) -> np.ndarray:
        """(T, k) array in variable order."""
        return np.column_stack([s.values for s in self.series])

    def __getitem__(self, name: str) -> TimeSeries:
        for s in self.series:
            if s.name == name:
                return s
        raise KeyError(name)

    def reorder(self, names: Iterable[str]) -> "Dataset":
        names = list(names)
        if sorted(names) != sorted(self.names):
            raise DataError(f"ordering {names} is not a permutation of {self.names}")
        return Dataset(tuple(self[n] for n in names), dict(self.meta))

    def select(self, names: Iterable[str]) -> "Dataset":
        return Dataset(tuple(self[n] for n in names), dict(self.meta))


def align(series: Sequence[TimeSeries]) -> Dataset:
    """Truncate every series to the common span, preserving input order."""
    series = list(series)
    if not series:
        raise DataError("align needs at least one series")
    for s in series:
        _require_nonempty(s)
    start = max(s.start for s in series)
    end = min(s.end for s in series)
    if end < start:
        spans = ", ".join(f"{s.name}: {s.start}..{s.end}" for s in series)
        raise NoOverlapError(f"series spans do not overlap ({spans})")
    return Dataset(tuple(s.window(start, end) for s in series))


def subsample(d: Dataset, start: Period | str, end: Period | str) -> Dataset:
    """Restrict all variables to ``[start, end]`` inclusive, clipped to the span."""
    start, end = Period.parse(start), Period.parse(end)
    if end < start:
        raise RangeError(f"empty range {start}..{end}")
    lo, hi = max(start, d.start), min(end, d.end)
    if hi < lo:
        raise RangeError(f"range {start}..{end} does not intersect {d.start}..{d.end}")
    return Dataset(tuple(s.window(lo, hi) for s in d.series), dict(d.meta))
