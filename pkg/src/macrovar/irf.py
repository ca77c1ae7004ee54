"""Cholesky-orthogonalised impulse responses and residual-bootstrap bands.

Random numbers: replication ``r`` of a run seeded with ``seed`` draws from
``numpy.random.Generator(PCG64(SeedSequence([seed, r])))``. Each replication
therefore owns an independent stream that does not depend on the order in
which replications are executed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import linalg

from .errors import BootstrapError, IdentificationError, MacrovarError, NumericalError
from .series import Dataset
from .var import VarModel, VarSpec, fit_var, fit_var_array, stability

MAX_FAILURE_SHARE = 0.05
JITTER = 1e-10


@dataclass(frozen=True)
class IrfSpec:
    horizon: int = 8
    ci_level: float = 0.95
    bootstrap_reps: int = 1000
    seed: int = 0
    shock_size: Literal["one-sd", "unit"] = "one-sd"
    jitter: bool = False

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError("ci_level must lie in (0, 1)")
        if self.shock_size not in ("one-sd", "unit"):
            raise ValueError(f"unknown shock size {self.shock_size!r}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class IrfResult:
    """Responses indexed ``[shock, response, h]``."""

    names: tuple[str, ...]
    point: np.ndarray
    lower: np.ndarray | None
    upper: np.ndarray | None
    spec: IrfSpec
    failed_reps: int = 0

    def response(self, shock: str, response: str) -> dict[str, np.ndarray | None]:
        i, j = self.names.index(shock), self.names.index(response)
        pick = lambda a: None if a is None else a[i, j]  # noqa: E731
        return {"h": np.arange(self.spec.horizon + 1), "point": self.point[i, j],
                "lower": pick(self.lower), "upper": pick(self.upper)}


def ma_coefficients(m: VarModel, H: int) -> np.ndarray:
    """Reduced-form MA matrices Phi_0..Phi_H, shape (H+1, k, k)."""
    k, p = m.k, m.p
    phi = np.zeros((H + 1, k, k))
    phi[0] = np.eye(k)
    for h in range(1, H + 1):
        for i in range(1, min(h, p) + 1):
            phi[h] += phi[h - i] @ m.coef[i - 1]
    return phi


def impact_matrix(sigma: np.ndarray, shock_size: str = "one-sd", jitter: bool = False) -> np.ndarray:
    """Lower-triangular Cholesky factor of ``sigma``; unit shocks rescale columns."""
    S = np.asarray(sigma, dtype=np.float64)
    if jitter:
        S = S + JITTER * max(float(np.trace(S)) / S.shape[0], 1.0) * np.eye(S.shape[0])
    try:
        P = linalg.cholesky(S, lower=True)
    except linalg.LinAlgError:
        P = None
    if P is None or np.any(np.diag(P) <= 0) or not np.all(np.isfinite(P)):
        raise IdentificationError(
            "residual covariance is not positive definite; Cholesky identification "
            "failed (a ridge jitter of at most 1e-10 can be enabled explicitly)"
        )
    if shock_size == "unit":
        P = P / np.diag(P)
    return P


def _theta(m: VarModel, spec: IrfSpec) -> np.ndarray:
    P = impact_matrix(m.sigma, spec.shock_size, spec.jitter)
    theta = ma_coefficients(m, spec.horizon) @ P  # [h, response, shock]
    return theta.transpose(2, 1, 0)


def orthogonalized_irf(m: VarModel, spec: IrfSpec | None = None) -> IrfResult:
    spec = spec or IrfSpec()
    if m.sigma is None:
        raise IdentificationError("model has no residual covariance")
    return IrfResult(m.names, _theta(m, spec), None, None, spec)


def _simulate(m: VarModel, initial: np.ndarray, shocks: np.ndarray) -> np.ndarray:
    p = m.p
    T = initial.shape[0] + shocks.shape[0]
    y = np.empty((T, m.k))
    y[:p] = initial
    for t in range(p, T):
        acc = m.intercept + shocks[t - p]
        for i in range(p):
            acc = acc + m.coef[i] @ y[t - 1 - i]
        y[t] = acc
    return y


def replication_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, rep])))


def bootstrap_draws(d: Dataset, spec: VarSpec, irf_spec: IrfSpec):
    """Point estimate and the stack of bootstrap responses.

    Returns ``(model, point, draws, failed)`` with ``draws`` of shape
    (successful reps, k, k, H+1).
    """
    m = fit_var(d, spec)
    stab = stability(m)
    if not stab.stable:
        raise NumericalError(
            f"fitted VAR is not stable (max companion modulus {stab.max_modulus:.4f})"
        )
    point = _theta(m, irf_spec)
    resid = m.residuals - m.residuals.mean(axis=0)
    n = resid.shape[0]
    initial = m.data[: m.p]
    reps = irf_spec.bootstrap_reps
    draws, failed = [], 0
    for r in range(reps):
        rng = replication_rng(irf_spec.seed, r)
        u = resid[rng.integers(0, n, size=n)]
        ystar = _simulate(m, initial, u)
        try:
            mb = fit_var_array(ystar, m.names, m.p, m.include_constant)
            if not stability(mb).stable:
                raise NumericalError("unstable replication")
            draws.append(_theta(mb, irf_spec))
        except MacrovarError:
            failed += 1
        if failed > MAX_FAILURE_SHARE * reps:
            raise BootstrapError(
                f"{failed} of {r + 1} bootstrap replications failed or were unstable "
                f"(limit {MAX_FAILURE_SHARE:.0%} of {reps})"
            )
    return m, point, np.asarray(draws), failed


def percentile_bands(draws: np.ndarray, ci_level: float) -> tuple[np.ndarray, np.ndarray]:
    alpha = 1.0 - ci_level
    lower = np.quantile(draws, alpha / 2.0, axis=0)
    upper = np.quantile(draws, 1.0 - alpha / 2.0, axis=0)
    return lower, upper


def bootstrap_bands(d: Dataset, spec: VarSpec, irf_spec: IrfSpec | None = None) -> IrfResult:
    """Point IRFs with recursive-design residual-bootstrap percentile bands."""
    irf_spec = irf_spec or IrfSpec()
    if irf_spec.bootstrap_reps < 100:
        raise ValueError("at least 100 bootstrap replications are needed for bands")
    m, point, draws, failed = bootstrap_draws(d, spec, irf_spec)
    lower, upper = percentile_bands(draws, irf_spec.ci_level)
    return IrfResult(m.names, point, lower, upper, irf_spec, failed)

