"""Pipeline stages and their table/file renderings.

Each stage takes a resolved :class:`PipelineConfig`, computes its results and
returns plain rows; the ``render_*`` helpers turn rows into aligned text or
CSV. File writers never embed timestamps so reruns are byte-identical.
"""
from __future__ import annotations

import csv
import io
import json
import platform
import time
from pathlib import Path
from typing import Sequence

import numpy as np
import yaml

from . import __version__
from .causality import GrangerResult, SampleRange, granger_table
from .ingest import PipelineConfig, assemble, load_raw, unit_root_inputs
from .irf import IrfResult, IrfSpec, bootstrap_bands
from .svg import irf_svg
from .unitroot import UnitRootRow, unit_root_pair
from .var import LagSelection, VarSpec, select_lag


def render(header: Sequence[str], rows: Sequence[Sequence], fmt: str = "text") -> str:
    rows = [[str(c) for c in r] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max(len(str(h)), *(len(r[i]) for r in rows)) if rows else len(str(h))
              for i, h in enumerate(header)]
    line = lambda cells: "  ".join(  # noqa: E731
        c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths))
    )
    out = [line([str(h) for h in header]), "  ".join("-" * w for w in widths)]
    out += [line(r) for r in rows]
    return "\n".join(out) + "\n"


# -- unit roots ------------------------------------------------------------

def unitroot_stage(cfg: PipelineConfig, raw=None) -> list[tuple[UnitRootRow, UnitRootRow]]:
    rows = []
    for name, level, diffed in unit_root_inputs(cfg, raw):
        rows.append((unit_root_pair(level, level=True), unit_root_pair(diffed, level=False)))
    return rows


def _star1(stat: float, flag: bool) -> str:
    return f"{stat:.3f}{'*' if flag else ''}"


def unitroot_table(rows, fmt: str = "text") -> str:
    if fmt == "csv":
        header = ["variable", "level_adf", "level_adf_lags", "level_adf_stationary_1pct",
                  "level_kpss", "level_kpss_stationary_1pct", "level_confirmed_stationary",
                  "diff_adf", "diff_adf_lags", "diff_adf_stationary_1pct",
                  "diff_kpss", "diff_kpss_stationary_1pct", "diff_confirmed_stationary"]
        body = []
        for lv, df in rows:
            body.append([lv.name,
                         f"{lv.adf.statistic:.6f}", lv.adf.lags_used, int(lv.adf.stationary_1pct),
                         f"{lv.kpss.statistic:.6f}", int(lv.kpss.stationary_1pct), int(lv.confirmed_stationary),
                         f"{df.adf.statistic:.6f}", df.adf.lags_used, int(df.adf.stationary_1pct),
                         f"{df.kpss.statistic:.6f}", int(df.kpss.stationary_1pct), int(df.confirmed_stationary)])
        return render(header, body, "csv")
    header = ["variable", "level ADF", "level KPSS", "diff ADF", "diff KPSS", "level", "diff"]
    body = [[lv.name,
             _star1(lv.adf.statistic, lv.adf.stationary_1pct),
             _star1(lv.kpss.statistic, lv.kpss.stationary_1pct),
             _star1(df.adf.statistic, df.adf.stationary_1pct),
             _star1(df.kpss.statistic, df.kpss.stationary_1pct),
             "I(0)" if lv.confirmed_stationary else "-",
             "I(0)" if df.confirmed_stationary else "-"]
            for lv, df in rows]
    note = ("* stationary at the 1% level (ADF rejects a unit root / KPSS does not reject "
            "stationarity). Levels: constant+trend; differences: constant. "
            "I(0): both tests agree.\n")
    return render(header, body) + note


# -- lag selection ---------------------------------------------------------

def lagselect_stage(cfg: PipelineConfig, data=None) -> LagSelection:
    data = data if data is not None else assemble(cfg)
    return select_lag(data, cfg.p_max, cfg.include_constant)


def lagselect_table(sel: LagSelection, lags_in_use: int, fmt: str = "text") -> str:
    header = ["p", "aic", "bic", "hq"]
    body = []
    for r in sel.rows:
        cells = [r["p"]]
        for c in ("aic", "bic", "hq"):
            mark = "*" if sel.selected[c] == r["p"] and fmt == "text" else ""
            cells.append("n/a" if r[c] is None else f"{r[c]:.4f}{mark}")
        body.append(cells)
    if fmt == "csv":
        return render(header + ["selected_by"], [
            b + [";".join(c for c in ("aic", "bic", "hq") if sel.selected[c] == b[0])] for b in body
        ], "csv")
    note = (f"* minimum per criterion (common sample of {sel.nobs} observations). "
            f"n/a: system parameter count not below the sample size. "
            f"Lag order in use: p={lags_in_use}.\n")
    return render(header, body) + note


# -- Granger ---------------------------------------------------------------

def sample_ranges(cfg: PipelineConfig, labels: Sequence[str] | None = None) -> list[SampleRange]:
    ranges = [SampleRange(l, a, b) for l, a, b in cfg.subsamples] or [
        SampleRange("full", cfg.sample_start, cfg.sample_end)
    ]
    if labels:
        known = [r.label for r in ranges]
        missing = [l for l in labels if l not in known]
        if missing:
            raise ValueError(f"unknown samples {missing}; configured: {known}")
        ranges = [r for r in ranges if r.label in labels]
    return ranges


def granger_stage(cfg: PipelineConfig, lags: int | None = None, labels=None, data=None) -> list[GrangerResult]:
    data = data if data is not None else assemble(cfg)
    spec = VarSpec(lags or cfg.lags, cfg.include_constant, cfg.ordering)
    return granger_table(data, spec, sample_ranges(cfg, labels), cfg.shock, cfg.granger_mode)


def _stars(p: float) -> str:
    return "**" if p < 0.05 else "*" if p < 0.10 else ""


def granger_table_text(results: Sequence[GrangerResult], fmt: str = "text") -> str:
    labels = list(dict.fromkeys(r.sample_label for r in results))
    hyps = list(dict.fromkeys((r.cause, r.effect) for r in results))
    cell = {(r.cause, r.effect, r.sample_label): r for r in results}
    if fmt == "csv":
        header = ["cause", "effect", "sample", "chi2", "df", "pvalue", "nobs", "error"]
        body = [[r.cause, r.effect, r.sample_label,
                 "" if r.chi2 is None else f"{r.chi2:.6f}", r.df,
                 "" if r.pvalue is None else f"{r.pvalue:.6f}",
                 "" if r.nobs is None else r.nobs, r.error or ""] for r in results]
        return render(header, body, "csv")
    header = ["null hypothesis"]
    for l in labels:
        header += [f"{l} chi2", f"{l} p"]
    body = []
    for c, e in hyps:
        row = [f"{c} does not cause {e}"]
        for l in labels:
            r = cell[(c, e, l)]
            if r.ok:
                row += [f"{r.chi2:.3f}", f"{r.pvalue:.3f}{_stars(r.pvalue)}"]
            else:
                row += ["n/a", "n/a"]
        body.append(row)
    df = results[0].df if results else 0
    note = (f"Wald chi-square with {df} df. ** and * reject the null at the 5% and 10% level. "
            "n/a: sample too short to estimate.\n")
    return render(header, body) + note


# -- impulse responses -----------------------------------------------------

def irf_stage(cfg: PipelineConfig, irf_spec: IrfSpec, lags: int | None = None, data=None) -> IrfResult:
    data = data if data is not None else assemble(cfg)
    return bootstrap_bands(data, VarSpec(lags or cfg.lags, cfg.include_constant, cfg.ordering), irf_spec)


def _num(x: float) -> str:
    return repr(float(x))


def write_irf_files(cfg: PipelineConfig, res: IrfResult, out: Path, tag: str) -> list[Path]:
    """One CSV and one SVG per response to the shock variable."""
    out.mkdir(parents=True, exist_ok=True)
    shock = cfg.shock
    unit = "unit" if res.spec.shock_size == "unit" else "one-s.d."
    written = []
    for name in res.names:
        if name == shock:
            continue
        r = res.response(shock, name)
        stem = out / f"irf_{tag}_{name}"
        lines = ["h,point,lower,upper"]
        for i, h in enumerate(r["h"]):
            lines.append(f"{int(h)},{_num(r['point'][i])},{_num(r['lower'][i])},{_num(r['upper'][i])}")
        stem.with_suffix(".csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        label = cfg.get(name).label or name
        svg = irf_svg(r["h"], r["point"], r["lower"], r["upper"],
                      title=f"Response of {name} to {unit} {shock} shock",
                      ylabel=f"{label} ({', '.join(cfg.get(name).transforms)})")
        stem.with_suffix(".svg").write_text(svg, encoding="utf-8")
        written += [stem.with_suffix(".csv"), stem.with_suffix(".svg")]
    return written


def echo_config(cfg: PipelineConfig, out: Path, **flags) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    doc = cfg.to_dict()
    if flags:
        doc["flags"] = flags
    path = out / "config.resolved.yaml"
    path.write_text(yaml.safe_dump(doc, sort_keys=False), encoding="utf-8")
    return path


def run_report(cfg: PipelineConfig, out: Path, irf_spec: IrfSpec, lags: int | None = None) -> dict:
    """unitroot -> lag selection -> Granger -> IRF, writing every output under ``out``."""
    t0 = time.perf_counter()
    out.mkdir(parents=True, exist_ok=True)
    echo_config(cfg, out, seed=irf_spec.seed, reps=irf_spec.bootstrap_reps,
                horizon=irf_spec.horizon, shock=irf_spec.shock_size, lags=lags or cfg.lags)
    raw = load_raw(cfg)
    ur = unitroot_stage(cfg, raw)
    (out / "unitroot.txt").write_text(unitroot_table(ur), encoding="utf-8")
    (out / "unitroot.csv").write_text(unitroot_table(ur, "csv"), encoding="utf-8")

    data = assemble(cfg, raw)
    sel = lagselect_stage(cfg, data)
    (out / "lagselect.txt").write_text(lagselect_table(sel, lags or cfg.lags), encoding="utf-8")
    (out / "lagselect.csv").write_text(lagselect_table(sel, lags or cfg.lags, "csv"), encoding="utf-8")

    gr = granger_stage(cfg, lags, data=data)
    (out / "granger.txt").write_text(granger_table_text(gr), encoding="utf-8")
    (out / "granger.csv").write_text(granger_table_text(gr, "csv"), encoding="utf-8")

    res = irf_stage(cfg, irf_spec, lags, data)
    tag = cfg.fingerprint(seed=irf_spec.seed, reps=irf_spec.bootstrap_reps, horizon=irf_spec.horizon,
                          shock=irf_spec.shock_size, lags=lags or cfg.lags)
    write_irf_files(cfg, res, out, tag)

    manifest = {
        "config": cfg.to_dict(),
        "versions": {"macrovar": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": __import__("scipy").__version__},
        "seeds": {"bootstrap": irf_spec.seed},
        "bootstrap": {"reps": irf_spec.bootstrap_reps, "failed": res.failed_reps,
                      "rng": "PCG64, SeedSequence([seed, replication])"},
        "panel": {"start": str(data.start), "end": str(data.end), "nobs": data.nobs,
                  "variables": data.names},
        "outputs": sorted(p.name for p in out.iterdir() if p.is_file() and p.name != "run_manifest.json"),
        "wall_time_seconds": round(time.perf_counter() - t0, 3),
    }
    (out / "run_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest
