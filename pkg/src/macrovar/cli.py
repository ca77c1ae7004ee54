"""``macrovar`` command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .errors import ConfigError, MacrovarError
from .ingest import FRED_CSV_URL, bundled_config_path, fetch_all, load_config
from .irf import IrfSpec
from .report import (
    echo_config,
    granger_stage,
    granger_table_text,
    irf_stage,
    lagselect_stage,
    lagselect_table,
    run_report,
    unitroot_stage,
    unitroot_table,
    write_irf_files,
)

SEED_ENV = "MACROVAR_SEED"


def _resolve_config(value: str | None):
    if value is None:
        return load_config(bundled_config_path("reference"))
    path = Path(value)
    if not path.exists() and value in ("reference", "robustness"):
        path = bundled_config_path(value)
    return load_config(path)


def _seed(args, cfg) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env not in (None, ""):
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV}={env!r} is not an integer") from None
    return cfg.seed


def _irf_spec(args, cfg) -> IrfSpec:
    return IrfSpec(
        horizon=args.horizon if args.horizon is not None else cfg.horizon,
        ci_level=cfg.ci_level,
        bootstrap_reps=args.reps if args.reps is not None else cfg.reps,
        seed=_seed(args, cfg),
        shock_size=args.shock or cfg.shock_size,
    )


def _out(args, cfg) -> Path:
    return Path(args.out or cfg.output_dir)


def cmd_unitroot(args) -> int:
    cfg = _resolve_config(args.config)
    rows = unitroot_stage(cfg)
    echo_config(cfg, _out(args, cfg))
    sys.stdout.write(unitroot_table(rows, args.format))
    return 0


def cmd_lagselect(args) -> int:
    cfg = _resolve_config(args.config)
    if args.p_max is not None:
        cfg = replace(cfg, p_max=args.p_max)
    sel = lagselect_stage(cfg)
    echo_config(cfg, _out(args, cfg))
    sys.stdout.write(lagselect_table(sel, args.lags or cfg.lags, args.format))
    return 0


def cmd_granger(args) -> int:
    cfg = _resolve_config(args.config)
    labels = [s for s in args.samples.split(",") if s] if args.samples else None
    results = granger_stage(cfg, args.lags, labels)
    echo_config(cfg, _out(args, cfg), lags=args.lags or cfg.lags)
    sys.stdout.write(granger_table_text(results, args.format))
    return 0


def cmd_irf(args) -> int:
    cfg = _resolve_config(args.config)
    spec = _irf_spec(args, cfg)
    lags = args.lags or cfg.lags
    res = irf_stage(cfg, spec, lags)
    out = _out(args, cfg)
    flags = dict(seed=spec.seed, reps=spec.bootstrap_reps, horizon=spec.horizon,
                 shock=spec.shock_size, lags=lags)
    echo_config(cfg, out, **flags)
    files = write_irf_files(cfg, res, out, cfg.fingerprint(**flags))
    for f in files:
        print(f)
    if res.failed_reps:
        print(f"note: {res.failed_reps} of {spec.bootstrap_reps} bootstrap replications skipped",
              file=sys.stderr)
    return 0


def cmd_report(args) -> int:
    cfg = _resolve_config(args.config)
    manifest = run_report(cfg, _out(args, cfg), _irf_spec(args, cfg), args.lags)
    print(f"report written to {_out(args, cfg)} in {manifest['wall_time_seconds']:.2f}s")
    return 0


def cmd_fetch(args) -> int:
    cfg = _resolve_config(args.config)
    manifest = Path(cfg.source).resolve().parent / "manifest.yaml" if cfg.source else None
    fetched = fetch_all(cfg, args.base_url, manifest)
    for name, info in fetched.items():
        print(f"{name}: {info['source_id']} -> {info['file']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="macrovar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        p.add_argument("--config", help="pipeline YAML (default: bundled reference config)")
        p.add_argument("--out", help="output directory (default: config output.dir, ./out)")
        p.add_argument("--lags", type=int, help="VAR lag order (overrides var.lags)")
        if fmt:
            p.add_argument("--format", choices=("text", "csv"), default="text")
        return p

    common(sub.add_parser("unitroot", help="ADF/KPSS table for levels and differences")).set_defaults(
        func=cmd_unitroot)
    p = common(sub.add_parser("lagselect", help="AIC/BIC/HQ lag-order table"))
    p.add_argument("--p-max", type=int, dest="p_max")
    p.set_defaults(func=cmd_lagselect)
    p = common(sub.add_parser("granger", help="Granger causality table"))
    p.add_argument("--samples", help="comma-separated sample labels, e.g. full,post2008")
    p.set_defaults(func=cmd_granger)

    for name, func, helptext in (("irf", cmd_irf, "impulse responses to the shock variable"),
                                 ("report", cmd_report, "run every stage and write all outputs")):
        p = common(sub.add_parser(name, help=helptext), fmt=False)
        p.add_argument("--reps", type=int, help="bootstrap replications")
        p.add_argument("--seed", type=int, help=f"bootstrap seed (default ${SEED_ENV}, then config)")
        p.add_argument("--horizon", type=int)
        p.add_argument("--shock", choices=("one-sd", "unit"))
        p.set_defaults(func=func)

    p = sub.add_parser("fetch", help="download the configured series from FRED")
    p.add_argument("--config")
    p.add_argument("--base-url", default=FRED_CSV_URL)
    p.set_defaults(func=cmd_fetch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MacrovarError as exc:
        print(f"macrovar {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"macrovar {args.command}: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
