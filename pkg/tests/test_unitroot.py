import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import lfilter

from macrovar.errors import DegenerateInputError, InsufficientDataError
from macrovar.series import TimeSeries
from macrovar.unitroot import (
    KPSS_CRITICAL,
    AdfSpec,
    KpssSpec,
    adf_critical_values,
    adf_reject_level,
    adf_test,
    default_bandwidth,
    default_max_lags,
    kpss_reject_level,
    kpss_test,
    newey_west_lrv,
    unit_root_pair,
)


def ts(x):
    return TimeSeries("x", "2000Q1", x)


def random_walk(n, seed):
    return np.cumsum(np.random.default_rng(seed).standard_normal(n))


class TestNeweyWest:
    def test_bw0_is_variance(self):
        e = np.random.default_rng(0).standard_normal(37)
        assert newey_west_lrv(e, 0) == pytest.approx(np.var(e), rel=1e-14)

    def test_constant_is_zero(self):
        assert newey_west_lrv(np.full(20, 3.0), 5) == 0.0

    def test_ma1_closed_form(self):
        theta, n = 0.5, 100_000
        u = np.random.default_rng(100_000).standard_normal(n + 1)
        e = u[1:] + theta * u[:-1]
        assert newey_west_lrv(e, 20) == pytest.approx((1 + theta) ** 2, rel=0.05)

    def test_bandwidth_bounds(self):
        with pytest.raises(ValueError):
            newey_west_lrv(np.ones(5), 5)


class TestAdf:
    def test_critical_values_response_surface(self):
        # b0 + b1/n + b2/n^2 + b3/n^3 evaluated by hand for n=100, constant case, 5%
        want = -2.86154 - 2.8903 / 100 - 4.234 / 100**2 - 40.040 / 100**3
        assert adf_critical_values("c", 100)[0.05] == pytest.approx(want, abs=1e-12)
        cv = adf_critical_values("ct", 70)
        assert cv[0.01] < cv[0.05] < cv[0.10]

    def test_stationary_series_rejects(self):
        e = np.random.default_rng(1).standard_normal(200)
        res = adf_test(ts(e), AdfSpec("constant"))
        assert res.reject_at == 0.01 and res.stationary_1pct

    def test_random_walk_not_rejected(self):
        res = adf_test(ts(random_walk(300, 2)), AdfSpec("constant+trend"))
        assert res.reject_at is None

    def test_fixed_lags(self):
        res = adf_test(ts(random_walk(100, 3)), AdfSpec("c", max_lags=3, lag_selection="fixed"))
        assert res.lags_used == 3 and res.nobs == 100 - 4

    def test_zero_lag_matches_hand_regression(self):
        y = random_walk(80, 4)
        res = adf_test(ts(y), AdfSpec("c", max_lags=0, lag_selection="fixed"))
        dy, lag = np.diff(y), y[:-1]
        X = np.column_stack([np.ones(79), lag])
        beta, *_ = np.linalg.lstsq(X, dy, rcond=None)
        r = dy - X @ beta
        se = np.sqrt(r @ r / 77 * np.linalg.inv(X.T @ X)[1, 1])
        assert res.statistic == pytest.approx(beta[1] / se, rel=1e-10)

    def test_default_lag_bound(self):
        assert default_max_lags(70) == 10
        assert default_max_lags(200) == 14

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.01, 1e3), st.floats(-1e3, 1e3), st.sampled_from(["c", "ct"]))
    def test_affine_invariance(self, a, b, det):
        y = random_walk(120, 5)
        spec = AdfSpec(det)
        s1, s2 = adf_test(ts(y), spec), adf_test(ts(a * y + b), spec)
        assert s2.lags_used == s1.lags_used
        assert s2.statistic == pytest.approx(s1.statistic, abs=1e-8)

    def test_reject_at_rederivable(self):
        for seed in range(10):
            res = adf_test(ts(random_walk(100, seed) * 0.3 + np.random.default_rng(seed).standard_normal(100)))
            assert res.reject_at == adf_reject_level(res.statistic, res.critical_values)

    def test_errors(self):
        with pytest.raises(InsufficientDataError):
            adf_test(ts(np.arange(10.0)))
        with pytest.raises(DegenerateInputError):
            adf_test(ts(np.ones(50)))


class TestKpss:
    def test_white_noise_stationary(self):
        res = kpss_test(ts(np.random.default_rng(6).standard_normal(200)))
        assert res.reject_at is None and res.bandwidth_used == default_bandwidth(200) == 4

    def test_random_walk_rejected(self):
        res = kpss_test(ts(random_walk(200, 7)), KpssSpec("level"))
        assert res.reject_at == 0.01

    def test_hand_computed_statistic(self):
        y = np.random.default_rng(8).standard_normal(40)
        e = y - y.mean()
        S = np.cumsum(e)
        g = [e[j:] @ e[: 40 - j] / 40 for j in range(3)]
        lrv = g[0] + 2 * (2 / 3 * g[1] + 1 / 3 * g[2])
        res = kpss_test(ts(y), KpssSpec("level", 2))
        assert res.statistic == pytest.approx((S @ S) / 40**2 / lrv, rel=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(1e-3, 1e3), st.sampled_from(["level", "trend"]))
    def test_scale_invariance(self, a, null):
        y = random_walk(90, 9)
        assert kpss_test(ts(a * y), KpssSpec(null)).statistic == pytest.approx(
            kpss_test(ts(y), KpssSpec(null)).statistic, rel=1e-9
        )

    def test_reject_at_rederivable(self):
        for seed in range(10):
            res = kpss_test(ts(random_walk(60, seed)), KpssSpec("trend"))
            assert res.reject_at == kpss_reject_level(res.statistic, res.critical_values)
            assert res.statistic >= 0

    def test_errors(self):
        with pytest.raises(InsufficientDataError):
            kpss_test(ts(np.arange(10.0)))
        with pytest.raises(DegenerateInputError):
            kpss_test(ts(np.arange(30.0)), KpssSpec("trend"))

    @pytest.mark.slow
    @pytest.mark.parametrize("null", ["level", "trend"])
    def test_critical_values_by_simulation(self, null):
        # Under iid errors the statistic's asymptotic quantiles are the tabulated values;
        # bandwidth 0 keeps the long-run variance exact for iid data.
        rng = np.random.default_rng(20211)
        stats = np.array([
            kpss_test(ts(rng.standard_normal(500)), KpssSpec(null, 0)).statistic for _ in range(4000)
        ])
        for level, cv in KPSS_CRITICAL[null].items():
            q = np.quantile(stats, 1 - level)
            assert q == pytest.approx(cv, rel=0.12 if level == 0.01 else 0.07)


def test_unit_root_pair_defaults():
    row = unit_root_pair(ts(random_walk(71, 11)), level=True)
    assert row.adf.deterministic == "constant+trend" and row.kpss.null_type == "trend"
    d = unit_root_pair(ts(np.diff(random_walk(71, 11))), level=False)
    assert d.adf.deterministic == "constant" and d.kpss.null_type == "level"
    assert d.confirmed_stationary


@pytest.mark.slow
def test_ar1_kpss_size_reference():
    # Stationary-start AR(1); the 5% size at bandwidth 4 sits close to 10%.
    rng = np.random.default_rng(1)
    rej = 0
    for _ in range(5000):
        e = rng.standard_normal(200)
        e[0] /= np.sqrt(0.75)
        x = lfilter([1.0], [1.0, -0.5], e)
        rej += kpss_test(ts(x)).reject_at in (0.01, 0.05)
    assert 0.07 <= rej / 5000 <= 0.13
