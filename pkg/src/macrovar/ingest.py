"""CSV ingestion, declarative pipeline configs and panel assembly.

Config files are YAML. Relative data paths resolve against the directory
holding the config file. The full schema is documented in README.md.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import re
import urllib.error
import urllib.request
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from datetime import date
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .errors import (
    ConfigError,
    DataError,
    DuplicatePeriodError,
    FetchError,
    GapError,
    MacrovarError,
    ParseError,
)
from .series import Dataset, Period, TimeSeries, align, difference, growth, log_transform

TRANSFORMS = ("log", "diff", "growth", "none")
FRED_CSV_URL = "https://fred.stlouisfed.org/graph/fredgraph.csv"
FETCH_TIMEOUT = 30.0

_ISO_RE = re.compile(r"^\s*(\d{4})-(\d{2})-(\d{2})\s*$")
_QTR_RE = re.compile(r"^\s*(\d{4})-?[Qq]([1-4])\s*$")
_NUM_RE = re.compile(r"^\s*[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?\s*$")


def parse_period(text: str, date_format: str = "auto") -> Period:
    """Parse ``YYYY-MM-DD`` (first month of a quarter), ``YYYYQn`` or ``YYYY-Qn``."""
    if date_format in ("auto", "iso"):
        m = _ISO_RE.match(text)
        if m:
            year, month = int(m.group(1)), int(m.group(2))
            if month not in (1, 4, 7, 10):
                raise ValueError(f"date {text!r} is not the first month of a quarter")
            date(year, month, int(m.group(3)))
            return Period(year, (month - 1) // 3 + 1)
        if date_format == "iso":
            raise ValueError(f"expected YYYY-MM-DD, got {text!r}")
    if date_format in ("auto", "quarter"):
        m = _QTR_RE.match(text)
        if m:
            return Period(int(m.group(1)), int(m.group(2)))
    raise ValueError(f"cannot parse date {text!r}")


@dataclass(frozen=True)
class SeriesConfig:
    name: str
    file: str
    date_column: str = "observation_date"
    value_column: str = "value"
    date_format: str = "auto"
    transforms: tuple[str, ...] = ("log", "diff")
    growth_periods: int = 1
    in_var: bool = True
    shock: bool = False
    label: str = ""
    source_id: str | None = None
    base_dir: str = field(default=".", compare=False)

    def __post_init__(self):
        chain = tuple(self.transforms)
        bad = [t for t in chain if t not in TRANSFORMS]
        if bad:
            raise ConfigError(f"series {self.name!r}: unknown transforms {bad}; allowed {TRANSFORMS}")
        object.__setattr__(self, "transforms", chain)
        if self.date_format not in ("auto", "iso", "quarter"):
            raise ConfigError(f"series {self.name!r}: date_format must be auto, iso or quarter")
        if self.growth_periods not in (1, 4):
            raise ConfigError(f"series {self.name!r}: growth_periods must be 1 (q/q) or 4 (y/y)")

    @property
    def path(self) -> Path:
        p = Path(self.file)
        return p if p.is_absolute() else Path(self.base_dir) / p

    @property
    def level_transforms(self) -> tuple[str, ...]:
        """Chain for the 'level' column of the unit-root table: drop a trailing diff."""
        chain = tuple(t for t in self.transforms if t != "none")
        return chain[:-1] if chain and chain[-1] == "diff" else chain


@dataclass(frozen=True)
class PipelineConfig:
    series: tuple[SeriesConfig, ...]
    sample_start: Period
    sample_end: Period
    subsamples: tuple[tuple[str, Period, Period], ...] = ()
    lags: int = 1
    include_constant: bool = True
    ordering: tuple[str, ...] = ()
    p_max: int = 4
    granger_mode: str = "conditional"
    horizon: int = 8
    ci_level: float = 0.95
    reps: int = 1000
    seed: int = 0
    shock_size: str = "one-sd"
    output_dir: str = "out"
    name: str = "pipeline"
    source: str | None = None

    def __post_init__(self):
        names = [s.name for s in self.series]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate series names in config: {names}")
        shocks = [s.name for s in self.series if s.shock]
        if len(shocks) != 1:
            raise ConfigError(f"exactly one series must be flagged as the shock, found {shocks}")
        var_names = [s.name for s in self.series if s.in_var]
        ordering = tuple(self.ordering) or tuple(var_names)
        if sorted(ordering) != sorted(var_names):
            raise ConfigError(f"var.ordering {list(ordering)} must list exactly the VAR series {var_names}")
        if shocks[0] not in ordering:
            raise ConfigError(f"shock series {shocks[0]!r} must be part of the VAR")
        object.__setattr__(self, "ordering", ordering)
        if self.sample_end < self.sample_start:
            raise ConfigError("sample end precedes sample start")
        if self.granger_mode not in ("conditional", "bivariate"):
            raise ConfigError("var.granger_mode must be conditional or bivariate")
        if self.lags < 1 or self.p_max < 1:
            raise ConfigError("var.lags and var.p_max must be >= 1")
        if self.shock_size not in ("one-sd", "unit"):
            raise ConfigError("irf.shock_size must be one-sd or unit")
        if not 0 < self.ci_level < 1:
            raise ConfigError("irf.ci_level must lie in (0, 1)")

    @property
    def shock(self) -> str:
        return next(s.name for s in self.series if s.shock)

    def get(self, name: str) -> SeriesConfig:
        for s in self.series:
            if s.name == name:
                return s
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        """Resolved config, in the same nested layout the YAML file uses."""
        series = []
        for s in self.series:
            d = asdict(s)
            d.pop("base_dir")
            d["file"] = str(s.path)
            d["transforms"] = list(s.transforms)
            series.append(d)
        return {
            "name": self.name,
            "sample": {"start": str(self.sample_start), "end": str(self.sample_end)},
            "subsamples": [{"label": l, "start": str(a), "end": str(b)} for l, a, b in self.subsamples],
            "series": series,
            "var": {"lags": self.lags, "include_constant": self.include_constant,
                    "ordering": list(self.ordering), "p_max": self.p_max,
                    "granger_mode": self.granger_mode},
            "irf": {"horizon": self.horizon, "ci_level": self.ci_level, "reps": self.reps,
                    "seed": self.seed, "shock_size": self.shock_size},
            "output": {"dir": self.output_dir},
        }

    def fingerprint(self, **extra) -> str:
        """Short stable hash of the resolved config plus any run flags.

        Data files enter as written in the config, so moving a config and its
        data directory together keeps the hash.
        """
        doc = self.to_dict()
        for entry, s in zip(doc["series"], self.series):
            entry["file"] = s.file
        payload = json.dumps({"config": doc, **extra}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:10]


def _section(raw: dict, key: str) -> dict:
    value = raw.get(key) or {}
    if not isinstance(value, dict):
        raise ConfigError(f"section {key!r} must be a mapping")
    return value


def config_from_dict(raw: dict, base_dir: str | Path = ".", source: str | None = None) -> PipelineConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    try:
        series = []
        for item in raw.get("series") or []:
            item = dict(item)
            item.setdefault("label", item.get("name", ""))
            item["transforms"] = tuple(item.get("transforms") or ("none",))
            series.append(SeriesConfig(base_dir=str(base_dir), **item))
        if not series:
            raise ConfigError("config lists no series")
        sample = _section(raw, "sample")
        var, irf, out = _section(raw, "var"), _section(raw, "irf"), _section(raw, "output")
        subs = tuple(
            (str(s["label"]), Period.parse(s["start"]), Period.parse(s["end"]))
            for s in raw.get("subsamples") or []
        )
        return PipelineConfig(
            series=tuple(series),
            sample_start=Period.parse(sample["start"]),
            sample_end=Period.parse(sample["end"]),
            subsamples=subs,
            lags=int(var.get("lags", 1)),
            include_constant=bool(var.get("include_constant", True)),
            ordering=tuple(var.get("ordering") or ()),
            p_max=int(var.get("p_max", 4)),
            granger_mode=str(var.get("granger_mode", "conditional")),
            horizon=int(irf.get("horizon", 8)),
            ci_level=float(irf.get("ci_level", 0.95)),
            reps=int(irf.get("reps", 1000)),
            seed=int(irf.get("seed", 0)),
            shock_size=str(irf.get("shock_size", "one-sd")),
            output_dir=str(out.get("dir", "out")),
            name=str(raw.get("name", "pipeline")),
            source=source,
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc!r}") from exc


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    return config_from_dict(raw, base_dir=path.resolve().parent, source=str(path))


def bundled_config_path(name: str = "reference") -> Path:
    return Path(str(resources.files("macrovar") / "data" / f"{name}.yaml"))


def read_series(cfg: SeriesConfig) -> TimeSeries:
    """Read one contiguous quarterly series from a CSV file."""
    path = cfg.path
    try:
        text = path.read_text(encoding="utf-8-sig")
    except FileNotFoundError as exc:
        raise DataError(f"data file for {cfg.name!r} not found: {path}") from exc
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ParseError(f"{path}: empty file, header row required")
    for col in (cfg.date_column, cfg.value_column):
        if col not in reader.fieldnames:
            raise ParseError(f"{path}: column {col!r} not in header {reader.fieldnames}")
    rows: dict[Period, float] = {}
    for lineno, row in enumerate(reader, start=2):
        raw_date, raw_val = row[cfg.date_column] or "", row[cfg.value_column] or ""
        try:
            period = parse_period(raw_date, cfg.date_format)
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: column {cfg.date_column!r}: {exc}") from None
        if not _NUM_RE.match(raw_val):
            raise ParseError(f"{path}:{lineno}: column {cfg.value_column!r}: cannot parse {raw_val!r}")
        if period in rows:
            raise DuplicatePeriodError(f"{path}:{lineno}: duplicate period {period}")
        rows[period] = float(raw_val)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    periods = sorted(rows)
    missing = [
        str(a + j) for a, b in zip(periods, periods[1:]) for j in range(1, b - a)
    ]
    if missing:
        raise GapError(f"{path}: missing quarters {', '.join(missing)}")
    return TimeSeries(cfg.name, periods[0], [rows[p] for p in periods])


def write_series(s: TimeSeries, path: str | Path, date_column: str = "observation_date",
                 value_column: str = "value") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([date_column, value_column])
        for p, v in zip(s.periods, s.values):
            w.writerow([f"{p.year:04d}-{3 * p.quarter - 2:02d}-01", repr(float(v))])


def apply_chain(s: TimeSeries, chain, growth_periods: int = 1) -> TimeSeries:
    for step in chain:
        if step == "log":
            s = log_transform(s)
        elif step == "diff":
            s = difference(s)
        elif step == "growth":
            s = growth(s, growth_periods)
        elif step != "none":
            raise ConfigError(f"unknown transform {step!r}")
    return s


def _clip(s: TimeSeries, cfg: PipelineConfig) -> TimeSeries:
    lo, hi = max(s.start, cfg.sample_start), min(s.end, cfg.sample_end)
    if hi < lo:
        raise DataError(
            f"series {s.name!r} ({s.start}..{s.end}) does not cover the sample "
            f"{cfg.sample_start}..{cfg.sample_end}"
        )
    return s.window(lo, hi)


def load_raw(cfg: PipelineConfig) -> dict[str, TimeSeries]:
    """Read every configured series and clip it to the sample range."""
    out = {}
    for sc in cfg.series:
        out[sc.name] = _clip(read_series(sc), cfg)
    return out


def _with_context(name: str, fn, *args):
    try:
        return fn(*args)
    except MacrovarError as exc:
        raise type(exc)(f"series {name!r}: {exc}") from exc


def assemble(cfg: PipelineConfig, raw: dict[str, TimeSeries] | None = None) -> Dataset:
    """Transformed, aligned VAR panel in identification order."""
    raw = raw if raw is not None else load_raw(cfg)
    transformed = []
    for name in cfg.ordering:
        sc = cfg.get(name)
        transformed.append(_with_context(name, apply_chain, raw[name], sc.transforms, sc.growth_periods))
    d = align(transformed)
    return Dataset(d.series, {"config": cfg.name, "transforms": {s.name: list(s.transforms) for s in d.series}})


def unit_root_inputs(cfg: PipelineConfig, raw: dict[str, TimeSeries] | None = None):
    """(name, level series, differenced series) for every configured series."""
    raw = raw if raw is not None else load_raw(cfg)
    out = []
    for sc in cfg.series:
        level = _with_context(sc.name, apply_chain, raw[sc.name], sc.level_transforms, sc.growth_periods)
        out.append((sc.name, level, _with_context(sc.name, difference, level)))
    return out


def _http_get(url: str, timeout: float) -> str:
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            status = getattr(resp, "status", 200)
            body = resp.read().decode("utf-8")
    except urllib.error.HTTPError as exc:
        raise FetchError(f"GET {url} returned HTTP {exc.code}") from exc
    except (urllib.error.URLError, OSError) as exc:
        raise FetchError(f"GET {url} failed: {exc}") from exc
    if status != 200:
        raise FetchError(f"GET {url} returned HTTP {status}")
    return body


def quarterly_from_csv(text: str) -> list[tuple[Period, float]]:
    """Collapse a two-column date/value CSV to quarterly means.

    Missing observations (FRED writes ``.``) are ignored; quarterly input
    passes through unchanged.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or len(header) < 2:
        raise FetchError("downloaded CSV has no date/value header")
    buckets: dict[Period, list[float]] = defaultdict(list)
    for row in reader:
        if len(row) < 2 or not _NUM_RE.match(row[1]):
            continue
        m = _ISO_RE.match(row[0])
        if not m:
            raise FetchError(f"unexpected date {row[0]!r} in downloaded CSV")
        buckets[Period(int(m.group(1)), (int(m.group(2)) - 1) // 3 + 1)].append(float(row[1]))
    return [(p, float(np.mean(buckets[p]))) for p in sorted(buckets)]


def fetch_series(series_id: str, dest: str | Path, base_url: str = FRED_CSV_URL,
                 timeout: float = FETCH_TIMEOUT, value_column: str | None = None) -> Path:
    """Download a FRED series by id and store it as a quarterly CSV."""
    text = _http_get(f"{base_url}?id={series_id}", timeout)
    rows = quarterly_from_csv(text)
    if not rows:
        raise FetchError(f"no observations returned for {series_id}")
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["observation_date", value_column or series_id])
        for p, v in rows:
            w.writerow([f"{p.year:04d}-{3 * p.quarter - 2:02d}-01", repr(v)])
    return dest


def fetch_all(cfg: PipelineConfig, base_url: str = FRED_CSV_URL, manifest: str | Path | None = None):
    """Fetch every series that declares a ``source_id`` and update the manifest."""
    fetched = {}
    for sc in cfg.series:
        if not sc.source_id:
            continue
        fetch_series(sc.source_id, sc.path, base_url, value_column=sc.value_column)
        fetched[sc.name] = {"source_id": sc.source_id, "file": sc.path.name,
                            "retrieved": date.today().isoformat(), "url": base_url}
    if manifest is not None:
        manifest = Path(manifest)
        doc = yaml.safe_load(manifest.read_text()) if manifest.exists() else {}
        doc = doc or {}
        doc.setdefault("series", {})
        for name, info in fetched.items():
            doc["series"].setdefault(name, {}).update(info)
        manifest.write_text(yaml.safe_dump(doc, sort_keys=False))
    return fetched
