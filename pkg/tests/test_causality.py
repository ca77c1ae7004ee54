import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macrovar.causality import (
    SampleRange,
    chi2_sf,
    granger_table,
    granger_wald,
    hypothesis_pairs,
)
from macrovar.errors import NumericalError
from macrovar.regress import RegressionResult
from macrovar.series import Dataset
from macrovar.var import VarModel, VarSpec, fit_var

from conftest import simulate_var1


def causal_pair(T, rng):
    x = rng.standard_normal(T)
    y = np.empty(T)
    y[0] = rng.standard_normal()
    y[1:] = 0.8 * x[:-1] + rng.standard_normal(T - 1)
    return Dataset.from_array(np.column_stack([x, y]), ["x", "y"])


@pytest.mark.parametrize("df", [1, 2, 3, 5, 8, 17])
@pytest.mark.parametrize("x", [1e-4, 0.3, 1.0, 4.2, 9.911, 10.364, 30.0, 80.0])
def test_chi2_sf_against_mpmath(x, df):
    mpmath.mp.dps = 50
    want = mpmath.gammainc(mpmath.mpf(df) / 2, mpmath.mpf(x) / 2, mpmath.inf, regularized=True)
    assert chi2_sf(x, df) == pytest.approx(float(want), rel=1e-10)


def test_chi2_sf_edges():
    assert chi2_sf(0.0, 3) == 1.0
    with pytest.raises(ValueError):
        chi2_sf(1.0, 0)


@given(st.floats(0, 200), st.floats(0, 200), st.integers(1, 10))
def test_pvalue_monotone(a, b, df):
    lo, hi = sorted((a, b))
    assert chi2_sf(hi, df) <= chi2_sf(lo, df)


def _eq(coefs, cov):
    coefs = np.asarray(coefs, float)
    return RegressionResult(coefs, np.sqrt(np.diag(cov)), np.zeros(3), 1.0, cov, cov, 50, 45, 45.0)


def test_exact_null_model():
    # y's equation has exactly zero weight on x's lags by construction
    p, k = 2, 2
    npar = 1 + k * p
    cov = np.eye(npar) * 0.01
    x_eq = _eq([0.1, 0.5, 0.2, 0.1, 0.0], cov)
    y_eq = _eq([0.0, 0.0, 0.4, 0.0, -0.2], cov)
    coef = np.array([[[0.5, 0.2], [0.0, 0.4]], [[0.1, 0.0], [0.0, -0.2]]])
    m = VarModel(("x", "y"), coef, [0.1, 0.0], np.eye(2), equations=(x_eq, y_eq))
    r = granger_wald(m, "x", "y")
    assert r.chi2 == 0.0 and r.pvalue == 1.0 and r.df == 2


def test_wald_matches_hand_formula():
    rng = np.random.default_rng(0)
    d = causal_pair(300, rng)
    m = fit_var(d, VarSpec(lags=2))
    eq = m.equations[1]
    idx = [1, 3]  # const, L1.x, L1.y, L2.x, L2.y
    b = eq.coefficients[idx]
    V = eq.coef_cov[np.ix_(idx, idx)]
    want = b @ np.linalg.solve(V, b)
    r = granger_wald(m, "x", "y")
    assert r.chi2 == pytest.approx(want, rel=1e-10)


def test_singular_covariance():
    cov = np.zeros((3, 3))
    eq = _eq([0.0, 0.1, 0.2], cov)
    m = VarModel(("x", "y"), np.zeros((1, 2, 2)), None, np.eye(2), equations=(eq, eq))
    with pytest.raises(NumericalError):
        granger_wald(m, "x", "y")


@settings(max_examples=20, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(-1e3, 1e3), st.integers(0, 2))
def test_affine_invariance(a, b, col):
    d = Dataset.from_array(
        simulate_var1(np.diag([0.5, 0.3, 0.2]) + 0.1, 120, np.random.default_rng(11)), ["a", "b", "c"]
    )
    vals = d.values.copy()
    vals[:, col] = a * vals[:, col] + b
    d2 = Dataset.from_array(vals, d.names)
    for cause, effect in [("a", "b"), ("c", "a"), ("b", "c")]:
        r1 = granger_wald(fit_var(d, VarSpec(lags=2)), cause, effect)
        r2 = granger_wald(fit_var(d2, VarSpec(lags=2)), cause, effect)
        assert r2.chi2 == pytest.approx(r1.chi2, abs=1e-6, rel=1e-8)


def test_hypothesis_order():
    pairs = hypothesis_pairs(["oil", "ipi", "fx", "cpi", "rate"], "oil")
    assert pairs[:4] == [("oil", "ipi"), ("oil", "fx"), ("oil", "cpi"), ("oil", "rate")]
    assert pairs[4:] == [("ipi", "oil"), ("fx", "oil"), ("cpi", "oil"), ("rate", "oil")]


class TestTable:
    def panel(self):
        rng = np.random.default_rng(5)
        y = simulate_var1(np.diag([0.3] * 5), 70, rng)
        return Dataset.from_array(y, ["oil", "ipi", "fx", "cpi", "rate"], "2004Q2")

    def samples(self):
        return [SampleRange("full", "2004Q1", "2021Q3"), SampleRange("pre2008", "2004Q1", "2008Q3"),
                SampleRange("post2008", "2008Q4", "2021Q3")]

    def test_shape_and_isolation(self):
        res = granger_table(self.panel(), VarSpec(lags=1), self.samples(), "oil")
        assert len(res) == 24
        assert all(r.ok for r in res)
        res2 = granger_table(self.panel(), VarSpec(lags=2), self.samples(), "oil")
        pre = [r for r in res2 if r.sample_label == "pre2008"]
        assert len(pre) == 8 and not any(r.ok for r in pre)
        assert all(r.ok for r in res2 if r.sample_label != "pre2008")

    def test_bivariate_mode(self):
        res = granger_table(self.panel(), VarSpec(lags=1), self.samples()[:1], "oil", mode="bivariate")
        assert len(res) == 8 and all(r.ok for r in res)
        d = self.panel()
        direct = granger_wald(fit_var(d.select(["oil", "cpi"])), "oil", "cpi")
        assert res[2].chi2 == pytest.approx(direct.chi2)


@pytest.mark.slow
def test_power_and_reverse_size():
    rng = np.random.default_rng(1000)
    strong = reverse = 0
    for _ in range(200):
        m = fit_var(causal_pair(1000, rng))
        strong += granger_wald(m, "x", "y").pvalue < 0.001
        reverse += granger_wald(m, "y", "x").pvalue < 0.05
    assert strong >= 198 and reverse <= 20


@pytest.mark.slow
def test_pvalues_uniform_under_null():
    rng = np.random.default_rng(500)
    p = np.array([
        granger_wald(fit_var(Dataset.from_array(rng.standard_normal((200, 3)), list("abc")),
                             VarSpec(lags=2)), "a", "b").pvalue
        for _ in range(500)
    ])
    freq = np.histogram(p, bins=np.linspace(0, 1, 11))[0] / 500
    assert np.all((freq >= 0.05) & (freq <= 0.15))
