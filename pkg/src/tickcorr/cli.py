"""Command-line entry point.

Subcommands: simulate, estimate, bars, experiment, summarize. All
randomness flows from a single --seed; when omitted a seed is generated
and printed. A JSON --config file supplies defaults; explicit flags
override it. Outputs are written atomically, so reruns with the same
seed produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys

import numpy as np

from . import experiments
from .aggregation import calendar_bars, dedupe_trades, intrinsic_volume_bars, synchronized_volume_bars
from .core import PathBundle
from .experiments import (
    CLOCKS,
    ExperimentReport,
    _atomic_write,
    make_synthetic_taq,
    read_taq_csv,
    run_missing_data_sweep,
    run_process_comparison,
    run_reno_extended,
    run_reno_recovery,
    run_taq_pipeline,
    summarize_correlations,
    taq_volatility_report,
)
from .simulators import MODEL_NAMES, SimConfig, simulate


def _csv_floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _csv_strs(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tickcorr",
        description="Covariance estimation for asynchronous tick data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="RNG seed (generated and printed if omitted)")
        p.add_argument("--config", type=str, default=None, help="JSON file of flag defaults")
        p.add_argument("--threads", type=int, default=None, help="parallelism cap (default: all cores)")
        p.add_argument("--out", type=str, required=True, help="output file path")

    p = sub.add_parser("simulate", help="simulate correlated paths to a TAQ-format CSV")
    common(p)
    p.add_argument("--model", choices=MODEL_NAMES, default="gbm")
    p.add_argument("--n-steps", type=int, default=10_000)
    p.add_argument("--rho", type=float, default=0.35)
    p.add_argument("--mu", type=_csv_floats, default=(0.01, 0.01))
    p.add_argument("--sigma2", type=_csv_floats, default=(0.1, 0.2))
    p.add_argument("--start-price", type=_csv_floats, default=(100.0, 100.0))
    p.add_argument("--model-params", type=str, default="{}", help="JSON block of model parameters")

    p = sub.add_parser("estimate", help="TAQ pipeline: clock aggregation + correlation matrix")
    common(p)
    p.add_argument("--in", dest="input", required=True, help="TAQ CSV (timestamp,ticker,price,volume)")
    p.add_argument("--method", choices=("mm", "hy"), default="mm")
    p.add_argument("--clock", choices=CLOCKS, default="TAQ")
    p.add_argument("--scale", type=float, default=None, help="bar seconds (calendar clocks)")
    p.add_argument("--buckets-per-day", type=int, default=None, help="bucket count (volume clocks)")
    p.add_argument("--baseline", choices=("LEAST_LIQUID", "MOST_LIQUID"), default="LEAST_LIQUID")
    p.add_argument("--session", type=_csv_floats, default=None, help="intraday window, seconds: start,end")
    p.add_argument("--vol-report", type=str, default=None, help="also write the per-scale volatility CSV")

    p = sub.add_parser("bars", help="aggregate a TAQ CSV into bar files (one per ticker)")
    common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--kind", choices=("CALENDAR_CLOSE", "CALENDAR_VWAP", "INTRINSIC", "SYNC_VOLUME"), required=True)
    p.add_argument("--scale", type=float, default=None)
    p.add_argument("--buckets-per-day", type=int, default=None)
    p.add_argument("--baseline", choices=("LEAST_LIQUID", "MOST_LIQUID"), default="LEAST_LIQUID")

    p = sub.add_parser("experiment", help="run a Monte Carlo study and write a report CSV")
    common(p)
    p.add_argument(
        "kind",
        choices=("missing-data", "process-comparison", "reno-recovery", "reno-extended", "synthetic-taq"),
    )
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--n-steps", type=int, default=None)
    p.add_argument("--rho", type=float, default=0.35)
    p.add_argument("--rho-grid", type=_csv_floats, default=None)
    p.add_argument("--fractions", type=_csv_floats, default=(0.0, 0.1, 0.2, 0.4))
    p.add_argument("--n-grid", type=_csv_floats, default=(10, 20, 40, 80, 160))
    p.add_argument("--models", type=_csv_strs, default=None)
    p.add_argument("--variant", choices=("andersen", "reno"), default="andersen")
    p.add_argument("--mean-gaps", type=_csv_floats, default=None)

    p = sub.add_parser("summarize", help="mean |rho| and std of a correlation matrix CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", type=str, default=None)

    return parser


def _apply_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser, argv) -> None:
    """Config-file values fill in flags the user did not set explicitly."""
    if not getattr(args, "config", None):
        return
    with open(args.config) as fh:
        doc = json.load(fh)
    explicit = {a.lstrip("-").split("=")[0].replace("-", "_") for a in argv if a.startswith("--")}
    for key, value in doc.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ValueError(f"unknown config field {key!r}")
        if attr not in explicit:
            setattr(args, attr, tuple(value) if isinstance(value, list) else value)


def _ensure_seed(args) -> int:
    if getattr(args, "seed", None) is None:
        seed = secrets.randbits(32)
        print(f"seed: {seed} (generated)")
        return seed
    return int(args.seed)


def _cmd_simulate(args) -> int:
    seed = _ensure_seed(args)
    cfg = SimConfig(
        n_steps=args.n_steps,
        start_price=args.start_price,
        mu=args.mu,
        sigma2=args.sigma2,
        rho=args.rho,
        seed=seed,
        model_params=json.loads(args.model_params),
    )
    bundle = simulate(args.model, cfg)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(experiments.TAQ_HEADER)
    for series in bundle.series:
        for t, price, volume in zip(series.times, series.prices, series.volumes):
            writer.writerow([int(t), series.asset_id, repr(float(price)), int(volume)])
    _atomic_write(args.out, buf.getvalue())
    print(f"simulate {args.model}: {len(bundle)} assets x {cfg.n_steps} ticks -> {args.out}")
    return 0


def _cmd_estimate(args) -> int:
    session = tuple(args.session) if args.session else None
    result = run_taq_pipeline(
        args.input,
        clock=args.clock,
        scale=args.scale,
        estimator=args.method,
        buckets_per_day=args.buckets_per_day,
        baseline=args.baseline,
        session=session,
    )
    result.write_matrix_csv(args.out)
    if args.vol_report:
        rows = taq_volatility_report(args.input, session=session)
        buf = io.StringIO()
        fields = sorted({k for r in rows for k in r}, key=lambda k: (k != "ticker", k != "adv", k))
        writer = csv.DictWriter(buf, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
        _atomic_write(args.vol_report, buf.getvalue())
    print(
        f"estimate {args.method} clock={args.clock}: {len(result.asset_ids)} tickers, "
        f"mean|rho|={result.mean_abs_corr:.4f} +/- {result.std_abs_corr:.4f} -> {args.out}"
    )
    return 0


def _cmd_bars(args) -> int:
    data = read_taq_csv(args.input)
    deduped = {t: dedupe_trades(s) for t, s in data.items()}
    stem = args.out[:-4] if args.out.endswith(".csv") else args.out
    written = []
    if args.kind == "SYNC_VOLUME":
        if not args.buckets_per_day:
            raise ValueError("--buckets-per-day is required for SYNC_VOLUME")
        adv = {t: float(s.volumes.sum()) for t, s in deduped.items()}
        pick = min if args.baseline == "LEAST_LIQUID" else max
        base = pick(sorted(adv), key=lambda t: adv[t])
        bundle = PathBundle.from_series([deduped[t] for t in sorted(deduped)])
        bars = synchronized_volume_bars(bundle, adv[base] / args.buckets_per_day)
        for ticker, b in sorted(bars.items()):
            path = f"{stem}_{ticker}.csv"
            b.write_csv(path)
            written.append(path)
    else:
        for ticker, series in sorted(deduped.items()):
            if args.kind == "INTRINSIC":
                if not args.buckets_per_day:
                    raise ValueError("--buckets-per-day is required for INTRINSIC")
                b = intrinsic_volume_bars(series, float(series.volumes.sum()) / args.buckets_per_day)
            else:
                if not args.scale:
                    raise ValueError("--scale is required for calendar bars")
                b = calendar_bars(series, args.scale, kind=args.kind)
            path = f"{stem}_{ticker}.csv"
            b.write_csv(path)
            written.append(path)
    print(f"bars {args.kind}: wrote {len(written)} file(s)")
    return 0


def _cmd_experiment(args) -> int:
    seed = _ensure_seed(args)
    kw = dict(reps=args.reps, seed=seed, threads=args.threads)
    if args.kind == "missing-data":
        report = run_missing_data_sweep(
            fractions=args.fractions,
            rho_grid=args.rho_grid or experiments.DEFAULT_RHO_GRID,
            n_steps=args.n_steps or 10_000,
            **kw,
        )
    elif args.kind == "process-comparison":
        report = run_process_comparison(
            models=args.models or ("merton-0", "merton-0.2", "merton-0.5", "vg", "garch-andersen", "ou"),
            rho_grid=args.rho_grid or experiments.DEFAULT_RHO_GRID,
            n_steps=args.n_steps or 10_000,
            **kw,
        )
    elif args.kind == "reno-recovery":
        report = run_reno_recovery(
            variant=args.variant,
            n_grid=tuple(int(n) for n in args.n_grid),
            n_steps=args.n_steps or 86_400,
            mean_gaps=args.mean_gaps or (15.0, 45.0),
            rho=args.rho,
            **kw,
        )
    elif args.kind == "reno-extended":
        report = run_reno_extended(
            models=args.models or ("gbm", "merton-0.2", "vg", "garch-andersen", "ou-fast"),
            n_grid=tuple(int(n) for n in args.n_grid),
            n_steps=args.n_steps or 10_000,
            mean_gaps=args.mean_gaps or (30.0, 45.0),
            rho=args.rho,
            **kw,
        )
    else:  # synthetic-taq
        make_synthetic_taq(args.out, rho=args.rho, n_seconds=args.n_steps or 28_800, seed=seed)
        print(f"experiment synthetic-taq: wrote {args.out}")
        return 0
    report.save(args.out)
    print(
        f"experiment {args.kind}: {len(report.estimates)} cells x {args.reps} reps -> {args.out}"
    )
    return 0


def _cmd_summarize(args) -> int:
    with open(args.input, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    matrix = np.asarray([[float(x) for x in row[1:]] for row in rows])
    if matrix.shape[0] != matrix.shape[1] or len(header) - 1 != matrix.shape[0]:
        raise ValueError("matrix CSV must be square with a ticker header row/column")
    mean_abs, std_abs = summarize_correlations(matrix)
    line = f"mean|rho| = {mean_abs:.6f}, std = {std_abs:.6f} ({matrix.shape[0]} tickers)"
    print(line)
    if args.out:
        _atomic_write(args.out, line + "\n")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "bars": _cmd_bars,
    "experiment": _cmd_experiment,
    "summarize": _cmd_summarize,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args, parser, argv)
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
