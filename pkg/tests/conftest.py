from pathlib import Path

import numpy as np
import pytest
import yaml

from macrovar.ingest import bundled_config_path
from macrovar.series import Period

START, END = Period(2004, 1), Period(2021, 3)
NQ = END - START + 1  # 71

FILES = {
    "oil": ("brent.csv", "DCOILBRENTEU"),
    "ipi": ("ipi.csv", "RUSPROINDQISMEI"),
    "growth": ("gdp.csv", "NAEXKP01RUQ652S"),
    "fx": ("rubusd.csv", "CCUSMA02RUQ618N"),
    "cpi": ("cpi.csv", "RUSCPIALLQINMEI"),
    "rate": ("rate.csv", "IR3TIB01RUQ156N"),
}


def simulate_var1(A, T, rng, sigma=None, burn=100, c=None):
    A = np.asarray(A, dtype=float)
    k = A.shape[0]
    chol = np.eye(k) if sigma is None else np.linalg.cholesky(sigma)
    c = np.zeros(k) if c is None else np.asarray(c, float)
    y = np.zeros((T + burn, k))
    e = rng.standard_normal((T + burn, k)) @ chol.T
    for t in range(1, T + burn):
        y[t] = c + A @ y[t - 1] + e[t]
    return y[burn:]


def write_csv(path, values, start=START, column="value"):
    lines = ["observation_date," + column]
    for i, v in enumerate(values):
        p = start + i
        lines.append(f"{p.year}-{3 * p.quarter - 2:02d}-01,{float(v)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_synthetic_pipeline(directory, seed=0, name="reference"):
    """Six synthetic quarterly series 2004Q1..2021Q3 plus a copy of a bundled config.

    Growth rates follow a stable VAR(1) so every stage of the pipeline is
    well-posed; nothing here resembles the real data.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    A = np.diag([0.2, 0.3, 0.25, 0.5, 0.3])
    A[1, 0], A[2, 0], A[3, 0], A[4, 0] = 0.1, -0.3, -0.05, -0.5
    sd = np.array([0.12, 0.02, 0.05, 0.01, 0.8])
    d = simulate_var1(A, NQ - 1, rng) * sd
    oil = 40.0 * np.exp(np.concatenate([[0.0], np.cumsum(d[:, 0])]))
    ipi = 90.0 * np.exp(np.concatenate([[0.0], np.cumsum(d[:, 1])]))
    gdp = 1e4 * np.exp(np.concatenate([[0.0], np.cumsum(0.6 * d[:, 1] + 0.004)]))
    fx = 30.0 * np.exp(np.concatenate([[0.0], np.cumsum(d[:, 2])]))
    cpi = 50.0 * np.exp(np.concatenate([[0.0], np.cumsum(d[:, 3] + 0.015)]))
    rate = 8.0 + np.concatenate([[0.0], np.cumsum(d[:, 4])])
    data = {"oil": oil, "ipi": ipi, "growth": gdp, "fx": fx, "cpi": cpi, "rate": rate}
    for key, (fname, col) in FILES.items():
        write_csv(directory / fname, data[key], column=col)
    cfg = yaml.safe_load(bundled_config_path(name).read_text())
    path = directory / f"{name}.yaml"
    path.write_text(yaml.safe_dump(cfg, sort_keys=False))
    return path


@pytest.fixture
def synthetic_config(tmp_path):
    return write_synthetic_pipeline(tmp_path / "data", seed=3)


@pytest.fixture
def synthetic_robustness(tmp_path):
    path = write_synthetic_pipeline(tmp_path / "data", seed=3)
    return write_synthetic_pipeline(path.parent, seed=3, name="robustness")
