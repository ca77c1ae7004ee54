"""Reduced-form VAR(p) estimation, lag-order selection and stability."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError, InsufficientDataError
from .regress import RegressionResult, information_criteria, ols
from .series import Dataset

MIN_EXTRA_OBS = 10


@dataclass(frozen=True)
class VarSpec:
    lags: int = 1
    include_constant: bool = True
    variable_ordering: tuple[str, ...] | None = None

    def __post_init__(self):
        if int(self.lags) < 1:
            raise ValueError(f"lags must be >= 1, got {self.lags}")
        object.__setattr__(self, "lags", int(self.lags))
        if self.variable_ordering is not None:
            object.__setattr__(self, "variable_ordering", tuple(self.variable_ordering))


@dataclass(frozen=True)
class VarModel:
    """A VAR in the form ``y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + u_t``.

    ``coef`` has shape (p, k, k) with ``coef[i-1] == A_i``. Fitted models also
    carry the per-equation regressions (for Wald tests) and residuals; models
    built by hand only need ``names`` and ``coef``.
    """

    names: tuple[str, ...]
    coef: np.ndarray
    intercept: np.ndarray | None = None
    sigma: np.ndarray | None = None
    residuals: np.ndarray | None = None
    equations: tuple[RegressionResult, ...] | None = None
    include_constant: bool = True
    data: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        coef = np.asarray(self.coef, dtype=np.float64)
        if coef.ndim == 2:
            coef = coef[None]
        k = len(self.names)
        if coef.ndim != 3 or coef.shape[1:] != (k, k):
            raise ValueError(f"coef must have shape (p, {k}, {k}), got {coef.shape}")
        object.__setattr__(self, "coef", coef)
        object.__setattr__(self, "names", tuple(self.names))
        intercept = np.zeros(k) if self.intercept is None else np.asarray(self.intercept, float)
        object.__setattr__(self, "intercept", intercept)
        if self.sigma is not None:
            object.__setattr__(self, "sigma", np.atleast_2d(np.asarray(self.sigma, float)))

    @property
    def k(self) -> int:
        return len(self.names)

    @property
    def p(self) -> int:
        return self.coef.shape[0]

    @property
    def nobs(self) -> int:
        """Effective number of observations, T - p."""
        return 0 if self.residuals is None else self.residuals.shape[0]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not in the model ({list(self.names)})") from None

    def coef_column(self, cause: str, lag: int) -> int:
        """Position of ``cause`` at ``lag`` in each equation's regressor vector."""
        return int(self.include_constant) + (lag - 1) * self.k + self.index(cause)

    def companion(self) -> np.ndarray:
        k, p = self.k, self.p
        C = np.zeros((k * p, k * p))
        C[:k] = np.concatenate(list(self.coef), axis=1)
        if p > 1:
            C[k:, :-k] = np.eye(k * (p - 1))
        return C

    def fitted(self) -> np.ndarray:
        if self.data is None:
            raise ValueError("model has no data attached")
        Y, Z = lag_matrices(self.data, self.p, self.include_constant)
        return Z @ self.stacked_params().T

    def stacked_params(self) -> np.ndarray:
        """(k, 1 + k*p) matrix ``[c, A_1, ..., A_p]`` (constant omitted if excluded)."""
        blocks = list(self.coef)
        if self.include_constant:
            blocks = [self.intercept[:, None]] + blocks
        return np.concatenate(blocks, axis=1)


def lag_matrices(values: np.ndarray, p: int, include_constant: bool = True):
    """Left-hand block Y (T-p, k) and regressors Z = [1, y_{t-1}, ..., y_{t-p}]."""
    y = np.asarray(values, dtype=np.float64)
    T = y.shape[0]
    cols = [y[p - i : T - i] for i in range(1, p + 1)]
    if include_constant:
        cols = [np.ones((T - p, 1))] + cols
    return y[p:], np.concatenate(cols, axis=1)


def _regressor_names(names: Sequence[str], p: int, include_constant: bool) -> list[str]:
    out = ["const"] if include_constant else []
    for i in range(1, p + 1):
        out += [f"L{i}.{n}" for n in names]
    return out


def fit_var(d: Dataset, spec: VarSpec | None = None) -> VarModel:
    """Equation-by-equation OLS on a common regressor matrix."""
    spec = spec or VarSpec()
    if spec.variable_ordering is not None:
        d = d.reorder(spec.variable_ordering)
    return fit_var_array(d.values, d.names, spec.lags, spec.include_constant)


def fit_var_array(values, names: Sequence[str], p: int, include_constant: bool = True) -> VarModel:
    y = np.asarray(values, dtype=np.float64)
    T, k = y.shape
    if len(names) != k:
        raise DataError(f"{len(names)} names for {k} columns")
    need = k * p + 1 + MIN_EXTRA_OBS
    if T - p <= need:
        raise InsufficientDataError(
            f"VAR({p}) with {k} variables needs more than {need} effective observations, "
            f"have {T - p}"
        )
    Y, Z = lag_matrices(y, p, include_constant)
    regnames = _regressor_names(names, p, include_constant)
    eqs = tuple(ols(Z, Y[:, j], regnames) for j in range(k))
    B = np.vstack([e.coefficients for e in eqs])
    E = np.column_stack([e.residuals for e in eqs])
    off = int(include_constant)
    coef = B[:, off:].reshape(k, p, k).transpose(1, 0, 2)
    intercept = B[:, 0] if include_constant else np.zeros(k)
    sigma = E.T @ E / (T - p)
    return VarModel(
        names=tuple(names),
        coef=coef,
        intercept=intercept,
        sigma=0.5 * (sigma + sigma.T),
        residuals=E,
        equations=eqs,
        include_constant=include_constant,
        data=y,
    )


@dataclass(frozen=True)
class LagSelection:
    rows: tuple[dict, ...]
    selected: dict[str, int]
    nobs: int

    def as_table(self) -> list[list]:
        return [[r["p"], r["aic"], r["bic"], r["hq"]] for r in self.rows]


def select_lag(d: Dataset, p_max: int, include_constant: bool = True) -> LagSelection:
    """Information criteria for p = 1..p_max on the common sample t > p_max.

    Orders whose system parameter count reaches the common sample size are
    reported with ``None`` criteria and never selected. Ties go to the
    smaller lag order.
    """
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    y = d.values
    T, k = y.shape
    if T - p_max <= k * p_max + 1 + MIN_EXTRA_OBS:
        raise InsufficientDataError(
            f"sample of {T} observations too short for lag selection up to p={p_max}"
        )
    rows = []
    for p in range(1, p_max + 1):
        n_params = k * (k * p + int(include_constant))
        if T - p_max <= n_params:
            rows.append({"p": p, "aic": None, "bic": None, "hq": None})
            continue
        m = fit_var_array(y[p_max - p :], d.names, p, include_constant)
        rows.append({"p": p, **information_criteria(m.sigma, m.nobs, n_params)})
    selected = {}
    for crit in ("aic", "bic", "hq"):
        scored = [r for r in rows if r[crit] is not None]
        selected[crit] = min(scored, key=lambda r: r[crit])["p"]
    return LagSelection(tuple(rows), selected, T - p_max)


@dataclass(frozen=True)
class Stability:
    max_modulus: float
    stable: bool
    eigenvalues: np.ndarray


def stability(m: VarModel) -> Stability:
    eig = np.linalg.eigvals(m.companion())
    mod = float(np.max(np.abs(eig))) if eig.size else 0.0
    return Stability(mod, mod < 1.0 - 1e-10, eig)
