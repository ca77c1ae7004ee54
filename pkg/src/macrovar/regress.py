"""Ordinary least squares via pivoted QR, plus multivariate information criteria."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from .errors import CollinearityError, DegenerateModelError, InsufficientDataError

RANK_TOL = 1e-10


@dataclass(frozen=True)
class RegressionResult:
    coefficients: np.ndarray
    stderr: np.ndarray
    residuals: np.ndarray
    sigma2: float
    coef_cov: np.ndarray
    xtx_inv: np.ndarray
    nobs: int
    df: int
    rss: float
    names: tuple[str, ...] = ()

    @property
    def tvalues(self) -> np.ndarray:
        return self.coefficients / self.stderr


def ols(X, y, names: Sequence[str] | None = None) -> RegressionResult:
    """Least squares fit of ``y`` on the columns of ``X``.

    Solved with a column-pivoted QR decomposition. A column is flagged as
    collinear when its pivoted diagonal entry of R falls below
    ``RANK_TOL`` times the largest column norm.

    Parameters
    ----------
    X : array_like, shape (n, k)
    y : array_like, shape (n,)
    names : optional column labels used in error messages.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if X.ndim == 1:
        X = X[:, None]
    n, k = X.shape
    if names is None:
        names = tuple(f"x{j}" for j in range(k))
    names = tuple(names)
    if y.size != n:
        raise ValueError(f"X has {n} rows but y has {y.size} entries")
    if n <= k:
        raise InsufficientDataError(f"need more observations than regressors (n={n}, k={k})")

    Q, R, piv = linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    scale = diag[0] if k else 0.0
    rank = int(np.sum(diag > RANK_TOL * scale)) if scale > 0 else 0
    if rank < k:
        dropped = [names[j] for j in piv[rank:]]
        raise CollinearityError(
            f"design matrix is rank deficient ({rank} < {k}); dependent columns: {dropped}",
            dropped,
        )

    beta_p = linalg.solve_triangular(R, Q.T @ y)
    beta = np.empty(k)
    beta[piv] = beta_p
    Rinv = linalg.solve_triangular(R, np.eye(k))
    xtx_p = Rinv @ Rinv.T
    xtx_inv = np.empty((k, k))
    xtx_inv[np.ix_(piv, piv)] = xtx_p
    xtx_inv = 0.5 * (xtx_inv + xtx_inv.T)

    resid = y - X @ beta
    rss = float(resid @ resid)
    df = n - k
    sigma2 = rss / df
    cov = sigma2 * xtx_inv
    return RegressionResult(
        coefficients=beta,
        stderr=np.sqrt(np.diag(cov)),
        residuals=resid,
        sigma2=sigma2,
        coef_cov=cov,
        xtx_inv=xtx_inv,
        nobs=n,
        df=df,
        rss=rss,
        names=names,
    )


def information_criteria(sigma, nobs: int, n_params: int) -> dict[str, float]:
    """AIC, BIC and Hannan-Quinn from an MLE residual covariance.

    ``sigma`` is a scalar variance or a (k, k) covariance computed with
    divisor ``nobs``; ``n_params`` counts every estimated coefficient.
    """
    S = np.atleast_2d(np.asarray(sigma, dtype=np.float64))
    if nobs <= n_params:
        raise InsufficientDataError(f"nobs={nobs} must exceed n_params={n_params}")
    try:
        c = linalg.cholesky(S, lower=True)
    except linalg.LinAlgError as exc:
        raise DegenerateModelError("residual covariance is not positive definite") from exc
    d = np.diag(c)
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise DegenerateModelError("residual covariance is not positive definite")
    logdet = 2.0 * float(np.sum(np.log(d)))
    T, m = float(nobs), float(n_params)
    return {
        "aic": logdet + 2.0 * m / T,
        "bic": logdet + m * np.log(T) / T,
        "hq": logdet + 2.0 * m * np.log(np.log(T)) / T,
    }
