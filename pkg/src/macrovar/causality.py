"""Granger causality by block-exclusion Wald tests inside a VAR."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy import linalg, special

from .errors import MacrovarError, NumericalError
from .series import Dataset, Period, subsample
from .var import VarModel, VarSpec, fit_var


def chi2_sf(x: float, df: int) -> float:
    """Upper-tail chi-square probability, Q(df/2, x/2)."""
    if df <= 0:
        raise ValueError("df must be positive")
    if x <= 0:
        return 1.0
    return float(special.gammaincc(0.5 * df, 0.5 * x))


@dataclass(frozen=True)
class GrangerResult:
    cause: str
    effect: str
    chi2: float | None
    df: int
    pvalue: float | None
    sample_label: str = "full"
    nobs: int | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def significant(self, level: float) -> bool:
        return self.ok and self.pvalue < level


def granger_wald(m: VarModel, cause: str, effect: str, sample_label: str = "full") -> GrangerResult:
    """Wald test that every lag of ``cause`` drops out of ``effect``'s equation.

    Uses the OLS coefficient covariance of that single equation, so the
    statistic is ``b' (R V R')^{-1} b`` with b the excluded coefficients.
    """
    if cause == effect:
        raise ValueError("cause and effect must differ")
    if m.equations is None:
        raise ValueError("Wald tests need a fitted model with equation covariances")
    j = m.index(effect)
    idx = [m.coef_column(cause, lag) for lag in range(1, m.p + 1)]
    eq = m.equations[j]
    b = eq.coefficients[idx]
    V = eq.coef_cov[np.ix_(idx, idx)]
    try:
        c = linalg.cho_factor(V, lower=True)
        if np.any(np.diag(c[0]) <= 0):
            raise linalg.LinAlgError
    except linalg.LinAlgError as exc:
        raise NumericalError(
            f"coefficient covariance of {cause} lags in the {effect} equation is singular"
        ) from exc
    stat = float(b @ linalg.cho_solve(c, b))
    stat = max(stat, 0.0)
    return GrangerResult(cause, effect, stat, m.p, chi2_sf(stat, m.p), sample_label, m.nobs)


def hypothesis_pairs(names: Sequence[str], shock: str) -> list[tuple[str, str]]:
    """Shock-to-others hypotheses first, then the reverse directions."""
    others = [n for n in names if n != shock]
    return [(shock, o) for o in others] + [(o, shock) for o in others]


@dataclass(frozen=True)
class SampleRange:
    label: str
    start: Period
    end: Period

    def __post_init__(self):
        object.__setattr__(self, "start", Period.parse(self.start))
        object.__setattr__(self, "end", Period.parse(self.end))


def granger_table(
    d: Dataset,
    spec: VarSpec,
    samples: Sequence[SampleRange],
    shock: str,
    mode: Literal["conditional", "bivariate"] = "conditional",
) -> list[GrangerResult]:
    """All shock/other hypotheses for every sample.

    ``conditional`` runs every test inside the full VAR; ``bivariate`` fits a
    two-variable VAR per pair. A sample that cannot be estimated yields rows
    with ``error`` set instead of aborting the table.
    """
    if mode not in ("conditional", "bivariate"):
        raise ValueError(f"unknown Granger mode {mode!r}")
    names = list(spec.variable_ordering or d.names)
    pairs = hypothesis_pairs(names, shock)
    out: list[GrangerResult] = []
    for rng in samples:
        try:
            sub = subsample(d, rng.start, rng.end)
        except MacrovarError as exc:
            out += [GrangerResult(c, e, None, spec.lags, None, rng.label, None, str(exc)) for c, e in pairs]
            continue
        full = None
        for cause, effect in pairs:
            try:
                if mode == "conditional":
                    if full is None:
                        full = fit_var(sub, spec)
                    model = full
                else:
                    pair_spec = VarSpec(spec.lags, spec.include_constant, (cause, effect))
                    model = fit_var(sub.select([cause, effect]), pair_spec)
                out.append(granger_wald(model, cause, effect, rng.label))
            except MacrovarError as exc:
                out.append(GrangerResult(cause, effect, None, spec.lags, None, rng.label, sub.nobs, str(exc)))
    return out
