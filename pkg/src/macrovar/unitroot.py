"""Augmented Dickey-Fuller and KPSS tests.

ADF critical values come from MacKinnon's (2010) finite-sample response
surfaces, ``cv(n) = b0 + b1/n + b2/n**2 + b3/n**3`` with ``n`` the number of
observations in the test regression. KPSS critical values are the asymptotic
values tabulated by Kwiatkowski, Phillips, Schmidt and Shin (1992, Table 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DegenerateInputError, InsufficientDataError
from .regress import information_criteria, ols
from .series import TimeSeries

Deterministic = Literal["none", "constant", "constant+trend"]
LEVELS = (0.01, 0.05, 0.10)

_ADF_SURFACE = {
    "none": {
        0.01: (-2.56574, -2.2358, -3.627, 0.0),
        0.05: (-1.94100, -0.2686, -3.365, 31.223),
        0.10: (-1.61682, 0.2656, -2.714, 25.364),
    },
    "constant": {
        0.01: (-3.43035, -6.5393, -16.786, -79.433),
        0.05: (-2.86154, -2.8903, -4.234, -40.040),
        0.10: (-2.56677, -1.5384, -2.809, 0.0),
    },
    "constant+trend": {
        0.01: (-3.95877, -9.0531, -28.428, -134.155),
        0.05: (-3.41049, -4.3904, -9.036, -45.374),
        0.10: (-3.12705, -2.5856, -3.925, -22.380),
    },
}

KPSS_CRITICAL = {
    "level": {0.10: 0.347, 0.05: 0.463, 0.01: 0.739},
    "trend": {0.10: 0.119, 0.05: 0.146, 0.01: 0.216},
}

_DET_ALIASES = {
    "n": "none", "nc": "none", "none": "none",
    "c": "constant", "constant": "constant",
    "ct": "constant+trend", "trend": "constant+trend", "constant+trend": "constant+trend",
}


def _deterministic(value: str) -> str:
    try:
        return _DET_ALIASES[value.lower()]
    except KeyError:
        raise ValueError(f"unknown deterministic term {value!r}") from None


def adf_critical_values(deterministic: str, nobs: int) -> dict[float, float]:
    table = _ADF_SURFACE[_deterministic(deterministic)]
    x = 1.0 / nobs
    return {lvl: b[0] + b[1] * x + b[2] * x**2 + b[3] * x**3 for lvl, b in table.items()}


def default_max_lags(n: int) -> int:
    return int(math.floor(12.0 * (n / 100.0) ** 0.25))


def default_bandwidth(n: int) -> int:
    return int(math.floor(4.0 * (n / 100.0) ** 0.25))


@dataclass(frozen=True)
class AdfSpec:
    deterministic: Deterministic = "constant"
    max_lags: int | None = None
    lag_selection: Literal["fixed", "aic", "bic"] = "bic"

    def __post_init__(self):
        object.__setattr__(self, "deterministic", _deterministic(self.deterministic))
        if self.lag_selection not in ("fixed", "aic", "bic"):
            raise ValueError(f"unknown lag selection {self.lag_selection!r}")
        if self.max_lags is not None and self.max_lags < 0:
            raise ValueError("max_lags must be >= 0")


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    lags_used: int
    nobs: int
    deterministic: str
    critical_values: dict
    reject_at: float | None

    @property
    def stationary_1pct(self) -> bool:
        return self.reject_at == 0.01


@dataclass(frozen=True)
class KpssSpec:
    null_type: Literal["level", "trend"] = "level"
    bandwidth: int | Literal["auto"] = "auto"

    def __post_init__(self):
        if self.null_type not in ("level", "trend"):
            raise ValueError(f"unknown KPSS null {self.null_type!r}")
        if self.bandwidth != "auto" and (not isinstance(self.bandwidth, int) or self.bandwidth < 0):
            raise ValueError("bandwidth must be 'auto' or a non-negative integer")


@dataclass(frozen=True)
class KpssResult:
    statistic: float
    bandwidth_used: int
    nobs: int
    null_type: str
    critical_values: dict
    reject_at: float | None

    @property
    def stationary_1pct(self) -> bool:
        return self.reject_at is None or self.reject_at > 0.01


def adf_reject_level(statistic: float, critical_values: dict) -> float | None:
    """Smallest level at which the unit-root null is rejected (left tail)."""
    for lvl in sorted(critical_values):
        if statistic < critical_values[lvl]:
            return lvl
    return None


def kpss_reject_level(statistic: float, critical_values: dict) -> float | None:
    """Smallest level at which the stationarity null is rejected (right tail)."""
    for lvl in sorted(critical_values):
        if statistic > critical_values[lvl]:
            return lvl
    return None


def _adf_design(y: np.ndarray, lags: int, start: int, det: str):
    """Regression of dy_t on deterministics, y_{t-1} and dy_{t-1..t-lags}.

    ``start`` is the first index t (into y) used as a dependent observation;
    it must satisfy start >= lags + 1.
    """
    dy = np.diff(y)
    t = np.arange(start, y.size)
    cols, names = [], []
    if det != "none":
        cols.append(np.ones(t.size))
        names.append("const")
    if det == "constant+trend":
        cols.append(t.astype(float))
        names.append("trend")
    cols.append(y[t - 1])
    names.append("level")
    for i in range(1, lags + 1):
        cols.append(dy[t - 1 - i])
        names.append(f"dlag{i}")
    return np.column_stack(cols), dy[t - 1], names


def adf_test(s: TimeSeries, spec: AdfSpec | None = None) -> AdfResult:
    spec = spec or AdfSpec()
    y = np.asarray(s.values, dtype=np.float64)
    n = y.size
    max_lags = spec.max_lags if spec.max_lags is not None else min(default_max_lags(n), n - 15)
    if n < 15 + max(max_lags, 0) or max_lags < 0:
        raise InsufficientDataError(
            f"ADF needs at least {15 + max(max_lags, 0)} observations, {s.name!r} has {n}"
        )
    if np.ptp(y) == 0.0:
        raise DegenerateInputError(f"series {s.name!r} is constant")
    det = spec.deterministic

    if spec.lag_selection == "fixed":
        lags = max_lags
    else:
        best = None
        for p in range(max_lags + 1):
            X, dep, _ = _adf_design(y, p, max_lags + 1, det)
            res = ols(X, dep)
            ic = information_criteria(res.rss / res.nobs, res.nobs, X.shape[1])[spec.lag_selection]
            if best is None or ic < best[0]:
                best = (ic, p)
        lags = best[1]

    X, dep, names = _adf_design(y, lags, lags + 1, det)
    res = ols(X, dep, names)
    j = names.index("level")
    if res.stderr[j] == 0.0 or not np.isfinite(res.stderr[j]):
        raise DegenerateInputError(f"ADF regression for {s.name!r} is an exact fit")
    stat = float(res.coefficients[j] / res.stderr[j])
    crit = adf_critical_values(det, res.nobs)
    return AdfResult(stat, lags, res.nobs, det, crit, adf_reject_level(stat, crit))


def newey_west_lrv(residuals, bandwidth: int) -> float:
    """Bartlett-kernel long-run variance of a series (demeaned, divisor n)."""
    e = np.asarray(residuals, dtype=np.float64).reshape(-1)
    n = e.size
    if not 0 <= bandwidth < n:
        raise ValueError(f"bandwidth must be in [0, {n}), got {bandwidth}")
    e = e - e.mean()
    lrv = float(e @ e) / n
    for j in range(1, bandwidth + 1):
        gamma = float(e[j:] @ e[:-j]) / n
        lrv += 2.0 * (1.0 - j / (bandwidth + 1.0)) * gamma
    return max(lrv, 0.0)


def kpss_test(s: TimeSeries, spec: KpssSpec | None = None) -> KpssResult:
    spec = spec or KpssSpec()
    y = np.asarray(s.values, dtype=np.float64)
    n = y.size
    if n < 15:
        raise InsufficientDataError(f"KPSS needs at least 15 observations, {s.name!r} has {n}")
    bw = default_bandwidth(n) if spec.bandwidth == "auto" else int(spec.bandwidth)
    if bw >= n:
        raise ValueError(f"bandwidth {bw} must be below the series length {n}")

    if spec.null_type == "level":
        e = y - y.mean()
    else:
        t = np.arange(n, dtype=np.float64)
        e = ols(np.column_stack([np.ones(n), t]), y).residuals
    scale = max(float(np.max(np.abs(y))), 1.0)
    if float(np.max(np.abs(e))) <= 1e-12 * scale:
        raise DegenerateInputError(f"series {s.name!r} is perfectly deterministic")
    lrv = newey_west_lrv(e, bw)
    if lrv <= 0.0:
        raise DegenerateInputError(f"long-run variance of {s.name!r} residuals is zero")
    S = np.cumsum(e)
    stat = float(S @ S) / (n * n * lrv)
    crit = dict(KPSS_CRITICAL[spec.null_type])
    return KpssResult(stat, bw, n, spec.null_type, crit, kpss_reject_level(stat, crit))


@dataclass(frozen=True)
class UnitRootRow:
    """Both tests on one series, as one cell group of the unit-root table."""

    name: str
    adf: AdfResult
    kpss: KpssResult

    @property
    def confirmed_stationary(self) -> bool:
        return self.adf.stationary_1pct and self.kpss.stationary_1pct


def unit_root_pair(s: TimeSeries, level: bool, max_lags: int | None = None,
                   lag_selection: str = "bic", bandwidth="auto") -> UnitRootRow:
    """Run ADF and KPSS with the default deterministic terms.

    Level series get a constant and trend; differenced series a constant only.
    """
    adf = adf_test(s, AdfSpec("constant+trend" if level else "constant", max_lags, lag_selection))
    kpss = kpss_test(s, KpssSpec("trend" if level else "level", bandwidth))
    return UnitRootRow(s.name, adf, kpss)
