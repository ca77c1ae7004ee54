"""Quarterly macro VAR toolkit: unit-root tests, Granger causality and
Cholesky impulse responses with bootstrap bands."""

__version__ = "0.1.0"

from .causality import GrangerResult, granger_table, granger_wald
from .errors import MacrovarError
from .irf import IrfResult, IrfSpec, bootstrap_bands, ma_coefficients, orthogonalized_irf
from .regress import RegressionResult, information_criteria, ols
from .series import Dataset, Period, TimeSeries, align, difference, growth, log_transform, subsample
from .unitroot import AdfSpec, KpssSpec, adf_test, kpss_test, newey_west_lrv
from .var import VarModel, VarSpec, fit_var, select_lag, stability

__all__ = [
    "AdfSpec", "Dataset", "GrangerResult", "IrfResult", "IrfSpec", "KpssSpec", "MacrovarError",
    "Period", "RegressionResult", "TimeSeries", "VarModel", "VarSpec", "adf_test", "align",
    "bootstrap_bands", "difference", "fit_var", "granger_table", "granger_wald", "growth",
    "information_criteria", "kpss_test", "log_transform", "ma_coefficients", "newey_west_lrv",
    "ols", "orthogonalized_irf", "select_lag", "stability", "subsample",
]
