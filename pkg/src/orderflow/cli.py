"""Command-line driver: ``orderflow {classify,analyze,simulate}``.

Settings come from an optional JSON file (``--config``) overridden by
flags. Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 data or
schema error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import heapq
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import InvalidMatrixFile, OrderflowError, SequenceTooShort
from .ingest import encode_events, parse_timestamp, scan_paths
from .markov import chi_square_test, count_transitions
from .report import (
    SectorSpec,
    build_sector_chains,
    chain_set_record,
    diagonal_inertia,
    emit_heatmap,
    emit_summary_tables,
    read_matrix_csv,
    slug,
    transition_probes,
)
from .simulate import SimulationSpec, planted_ranges, sequence_events, simulate_sequence
from .states import ORDER_ALPHABET
from .volatility import classify_days, normalized_range, read_labels_csv, select_extremes, write_labels_csv

log = logging.getLogger("orderflow")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DATA = 4


class ConfigError(OrderflowError):
    pass


@dataclass
class RunConfig:
    inputs: list[str] = field(default_factory=list)
    sectors: dict[str, list[str]] = field(default_factory=dict)
    tickers: list[str] = field(default_factory=list)
    window: tuple[dt.date, dt.date] | None = None
    session: tuple[dt.time, dt.time] | None = None
    norm: str = "low"
    sigma: str = "population"
    agg: str = "pooled"
    alpha: float = 0.01
    out: str = "orderflow-out"
    seed: int = 0
    labels: str | None = None
    skip_bad_rows: bool = False
    dry_run: bool = False
    # simulate only
    matrix: str | None = None
    length: int | None = None
    start_state: str | None = None
    plant_volatility: bool = False
    output: str | None = None

    @property
    def ticker_list(self) -> list[str]:
        if self.tickers:
            return list(self.tickers)
        return [t for name in self.sectors for t in self.sectors[name]]

    def sector_specs(self) -> list[SectorSpec]:
        return [SectorSpec(name, tuple(tickers)) for name, tickers in self.sectors.items()]

    def window_dates(self) -> list[dt.date]:
        start, end = self.window
        return [start + dt.timedelta(days=i) for i in range((end - start).days + 1)]


def parse_window(text: str) -> tuple[dt.date, dt.date]:
    try:
        a, b = text.split(":")
        start, end = dt.date.fromisoformat(a.strip()), dt.date.fromisoformat(b.strip())
    except ValueError:
        raise ConfigError(f"window must look like YYYY-MM-DD:YYYY-MM-DD, got {text!r}") from None
    if end < start:
        raise ConfigError(f"window {text!r} is empty")
    return start, end


def parse_session(text: str) -> tuple[dt.time, dt.time]:
    try:
        a, b = text.split("-")
        return parse_timestamp(a), parse_timestamp(b)
    except ValueError:
        raise ConfigError(f"session must look like HH:MM:SS-HH:MM:SS, got {text!r}") from None


_SIMPLE_KEYS = {
    "norm", "sigma", "agg", "alpha", "out", "seed", "labels", "skip_bad_rows", "dry_run",
    "matrix", "length", "start_state", "plant_volatility", "output",
}


def load_config(path: str | None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    base = Path(path).parent
    for key, value in raw.items():
        if key == "inputs":
            cfg.inputs = [str(base / p) for p in value]
        elif key == "sectors":
            cfg.sectors = {str(k): [str(t) for t in v] for k, v in value.items()}
        elif key == "tickers":
            cfg.tickers = [str(t) for t in value]
        elif key == "window":
            cfg.window = parse_window(value)
        elif key == "session":
            cfg.session = parse_session(value)
        elif key in _SIMPLE_KEYS:
            setattr(cfg, key, value)
        else:
            raise ConfigError(f"{path}: unknown setting {key!r}")
    return cfg


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON settings file; flags override it")
    common.add_argument("--input", nargs="+", action="extend", dest="inputs", help="order-event CSV files")
    common.add_argument("--tickers", help="comma-separated ticker list")
    common.add_argument("--window", help="date window FROM:TO (inclusive)")
    common.add_argument("--session", help="only use events inside HH:MM:SS-HH:MM:SS for sequences")
    common.add_argument("--alpha", type=float, help="chi-square significance level (default 0.01)")
    common.add_argument("--agg", choices=("pooled", "mean"), help="sector aggregation (default pooled)")
    common.add_argument("--norm", choices=("low", "open", "none"), help="range normalization (default low)")
    common.add_argument("--sigma", choices=("population", "sample"), help="standard deviation flavour")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="random seed (simulate)")
    common.add_argument("--labels", help="use this volatility label CSV instead of classifying")
    common.add_argument("--skip-bad-rows", action="store_true", default=None, help="record malformed rows and continue")
    common.add_argument("--dry-run", action="store_true", default=None, help="print the plan, write nothing")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="orderflow", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="label high/low volatility days")
    sub.add_parser("analyze", parents=[common], help="fit sector chains and write the report bundle")
    sim = sub.add_parser("simulate", parents=[common], help="write a synthetic order-event CSV")
    sim.add_argument("--matrix", help="transition matrix CSV (state header, one row per current state)")
    sim.add_argument("--length", type=int, help="events per stock-day")
    sim.add_argument("--start-state", help="initial state (default: first matrix state)")
    sim.add_argument("--plant-volatility", action="store_true", default=None,
                     help="plant one high- and one low-volatility day in the window")
    sim.add_argument("--output", help="output CSV path (default OUT/simulated.csv)")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config)
    over = {}
    if args.inputs:
        over["inputs"] = list(args.inputs)
    if args.tickers is not None:
        over["tickers"] = [t.strip() for t in args.tickers.split(",") if t.strip()]
        if not over["tickers"]:
            raise ConfigError("no tickers configured")
    if args.window:
        over["window"] = parse_window(args.window)
    if args.session:
        over["session"] = parse_session(args.session)
    for key in ("alpha", "agg", "norm", "sigma", "out", "seed", "labels", "skip_bad_rows", "dry_run",
                "matrix", "length", "start_state", "plant_volatility", "output"):
        value = getattr(args, key, None)
        if value is not None:
            over[key] = value
    cfg = replace(cfg, **over)

    if not 0 < cfg.alpha < 1:
        raise ConfigError(f"alpha must lie in (0, 1), got {cfg.alpha}")
    if cfg.sigma not in ("population", "sample"):
        raise ConfigError(f"unknown sigma flavour {cfg.sigma!r}")
    if cfg.norm not in ("low", "open", "none"):
        raise ConfigError(f"unknown normalization {cfg.norm!r}")
    if cfg.agg not in ("pooled", "mean"):
        raise ConfigError(f"unknown aggregation {cfg.agg!r}")
    return cfg


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ORDERFLOW_THREADS", "1")))
    except ValueError:
        raise ConfigError("ORDERFLOW_THREADS must be an integer") from None


def _require_inputs(cfg: RunConfig) -> None:
    if not cfg.ticker_list:
        raise ConfigError("no tickers configured")
    if not cfg.inputs:
        raise ConfigError("no input files configured")
    for path in cfg.inputs:
        if not os.path.isfile(path):
            raise FileNotFoundError(f"input file not found: {path}")


def _scan(cfg: RunConfig):
    dates = cfg.window_dates() if cfg.window else None
    seqs, stats, errors = scan_paths(
        cfg.inputs, cfg.ticker_list, dates, cfg.session, workers=_threads()
    )
    if errors and not cfg.skip_bad_rows:
        first = errors[0]
        raise first
    return seqs, stats, errors


def _classify(cfg: RunConfig, stats) -> tuple[dict, list[dict]]:
    ddof = 0 if cfg.sigma == "population" else 1
    labels: dict = {}
    failures = []
    for ticker in cfg.ticker_list:
        ranges = {}
        try:
            for (t, day), s in stats.items():
                if t == ticker:
                    ranges[day] = normalized_range(s, cfg.norm)
            for day, lab in classify_days(ranges, cfg.window, ticker=ticker, ddof=ddof).items():
                labels[(ticker, day)] = lab
        except OrderflowError as exc:
            failures.append({"ticker": ticker, "stage": "classify", "error": f"{type(exc).__name__}: {exc}"})
    return labels, failures


def _write(out: Path, name: str, text: str) -> None:
    with open(out / name, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _row_error_records(errors) -> list[dict]:
    return [{"path": getattr(e, "path", None), "line": e.line, "reason": e.reason} for e in errors]


def cmd_classify(cfg: RunConfig) -> int:
    _require_inputs(cfg)
    out = Path(cfg.out)
    if cfg.dry_run:
        print(f"classify: {len(cfg.inputs)} input file(s), tickers {','.join(cfg.ticker_list)}, "
              f"window {cfg.window}, norm={cfg.norm}, sigma={cfg.sigma}")
        print(f"would write {out / 'labels.csv'}")
        return EXIT_OK
    _, stats, errors = _scan(cfg)
    labels, failures = _classify(cfg, stats)
    for f in failures:
        log.warning("%s: %s", f["ticker"], f["error"])
    for e in errors:
        log.warning("skipped %s", e)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "labels.csv", "w", encoding="utf-8", newline="") as fh:
        write_labels_csv(labels.values(), fh)
    return EXIT_DATA if failures and not labels else EXIT_OK


def _chi_row(ticker, day, regime, counts, alpha) -> dict:
    res = chi_square_test(counts, alpha)
    return {
        "ticker": ticker,
        "date": day.isoformat() if day else None,
        "regime": regime,
        "n_transitions": counts.total,
        "statistic": res.statistic,
        "dof": res.dof,
        "p_value": res.p_value,
        "low_expected_cells": res.low_expected_cells,
        "reject_null": res.reject_null,
        "flag": "independence rejected" if res.reject_null else "independence not rejected",
    }


_CHI_FIELDS = ("ticker", "date", "regime", "n_transitions", "statistic", "dof", "p_value",
               "low_expected_cells", "reject_null", "flag")


def _chi_csv(rows: list[dict], key: str = "ticker") -> str:
    buf = io.StringIO()
    fields = _CHI_FIELDS if key == "ticker" else ("sector",) + _CHI_FIELDS[2:]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def cmd_analyze(cfg: RunConfig) -> int:
    _require_inputs(cfg)
    if not cfg.sectors:
        raise ConfigError("no sectors configured")
    sector_of = {t: name for name, ts in cfg.sectors.items() for t in ts}
    uncovered = [t for t in cfg.ticker_list if t not in sector_of]
    if uncovered:
        raise ConfigError(f"tickers without a sector: {', '.join(uncovered)}")
    out = Path(cfg.out)
    if cfg.dry_run:
        print(f"analyze: {len(cfg.inputs)} input file(s), sectors {', '.join(cfg.sectors)}, "
              f"window {cfg.window}, alpha={cfg.alpha}, agg={cfg.agg}")
        print(f"would write report bundle under {out}")
        return EXIT_OK

    seqs, stats, row_errors = _scan(cfg)
    failures: list[dict] = []
    if cfg.labels:
        with open(cfg.labels, encoding="utf-8") as fh:
            labels = read_labels_csv(fh)
    else:
        labels, failures = _classify(cfg, stats)
    selected = select_extremes(labels.values())

    counts = {}
    chi_rows = []
    for (ticker, day), lab in selected.items():
        seq = seqs.get((ticker, day))
        try:
            if seq is None:
                raise SequenceTooShort("no events for this stock-day")
            c = count_transitions(seq)
            chi_rows.append(_chi_row(ticker, day, lab.label.value, c, cfg.alpha))
            counts[(ticker, day)] = c
        except OrderflowError as exc:
            failures.append({"ticker": ticker, "date": day.isoformat(), "stage": "count",
                             "error": f"{type(exc).__name__}: {exc}"})

    usable = {k: v for k, v in selected.items() if k in counts}
    sets = []
    for spec in cfg.sector_specs():
        try:
            sets.extend(build_sector_chains(counts, usable, [spec], cfg.agg))
        except OrderflowError as exc:
            failures.append({"sector": spec.name, "stage": "aggregate", "error": f"{type(exc).__name__}: {exc}"})

    pooled_chi = []
    for s in sets:
        if s.pooled_counts.total:
            row = _chi_row(None, None, s.regime.value, s.pooled_counts, cfg.alpha)
            row["sector"] = s.sector.name
            pooled_chi.append(row)
        if s.error:
            failures.append({"sector": s.sector.name, "regime": s.regime.value, "stage": "analytics",
                             "error": s.error})

    out.mkdir(parents=True, exist_ok=True)
    with open(out / "labels.csv", "w", encoding="utf-8", newline="") as fh:
        write_labels_csv(labels.values(), fh)
    _write(out, "chi_square.csv", _chi_csv(chi_rows))
    _write(out, "chi_square_pooled.csv", _chi_csv(pooled_chi, key="sector"))
    for s in sets:
        title = f"{s.sector.name} ({s.regime.value} volatility)"
        hm = emit_heatmap(s.matrix, title)
        stem = f"heatmap_{slug(s.sector.name)}_{s.regime.value.lower()}"
        _write(out, stem + ".svg", hm.svg)
        _write(out, stem + ".csv", hm.csv)
    for name, text in emit_summary_tables(sets).files().items():
        _write(out, name, text)

    probes = transition_probes(sets)
    probe_rows = ["sector,from,to,prob_high,prob_low"]
    probe_rows += [f"{p.sector},{p.src},{p.dst},{p.prob_high!r},{p.prob_low!r}" for p in probes]
    _write(out, "probes.csv", "\n".join(probe_rows) + "\n")
    inertia_rows = ["sector,regime," + ",".join(ORDER_ALPHABET)]
    for s in sets:
        diag = dict(zip(s.matrix.states, diagonal_inertia(s.matrix)))
        inertia_rows.append(
            f"{s.sector.name},{s.regime.value}," + ",".join(repr(float(diag.get(st, float('nan')))) for st in ORDER_ALPHABET)
        )
    _write(out, "inertia.csv", "\n".join(inertia_rows) + "\n")

    summary = {
        "config": {
            "window": [d.isoformat() for d in cfg.window] if cfg.window else None,
            "session": [t.isoformat() for t in cfg.session] if cfg.session else None,
            "alpha": cfg.alpha,
            "aggregation": cfg.agg,
            "normalization": cfg.norm,
            "sigma": cfg.sigma,
            "sectors": cfg.sectors,
        },
        "selected_days": [
            {"ticker": t, "date": d.isoformat(), "label": lab.label.value, "normalized_range": lab.normalized_range}
            for (t, d), lab in selected.items()
        ],
        "chi_square": chi_rows,
        "chi_square_pooled": pooled_chi,
        "sector_chains": [chain_set_record(s) for s in sets],
        "probes": [
            {"sector": p.sector, "from": p.src, "to": p.dst,
             "prob_high": None if np.isnan(p.prob_high) else p.prob_high,
             "prob_low": None if np.isnan(p.prob_low) else p.prob_low}
            for p in probes
        ],
        "failures": failures,
        "row_errors": _row_error_records(row_errors),
    }
    _write(out, "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    for f in failures:
        log.warning("%s", f)
    return EXIT_OK


def _trading_days(window) -> list[dt.date]:
    start, end = window
    days = [start + dt.timedelta(days=i) for i in range((end - start).days + 1)]
    return [d for d in days if d.weekday() < 5] or days


def _stream_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence([seed, *key]).generate_state(1, np.uint64)[0])


def cmd_simulate(cfg: RunConfig) -> int:
    if cfg.matrix is None:
        raise ConfigError("simulate needs --matrix")
    if cfg.length is None or cfg.length < 1:
        raise ConfigError(f"length must be a positive integer, got {cfg.length}")
    with open(cfg.matrix, encoding="utf-8") as fh:
        P = read_matrix_csv(fh.read())
    unknown = [s for s in P.states if s not in ORDER_ALPHABET]
    if unknown:
        raise InvalidMatrixFile(f"states {unknown} are not order states")
    start = cfg.start_state or P.states[0]
    if start not in P.states:
        raise ConfigError(f"start state {start!r} is not in the matrix")
    tickers = cfg.ticker_list or ["SIM"]
    window = cfg.window or (dt.date(2018, 11, 6), dt.date(2018, 11, 6))
    days = _trading_days(window)
    ranges = planted_ranges(days) if cfg.plant_volatility else {d: 0.01 for d in days}
    output = Path(cfg.output) if cfg.output else Path(cfg.out) / "simulated.csv"
    if cfg.dry_run:
        print(f"simulate: {len(tickers)} ticker(s) x {len(days)} day(s) x {cfg.length} events, seed {cfg.seed}")
        print(f"would write {output}")
        return EXIT_OK

    output.parent.mkdir(parents=True, exist_ok=True)
    low = Decimal("100.00")
    next_id = 1
    with open(output, "w", encoding="utf-8", newline="") as fh:
        streams = []
        for di, day in enumerate(days):
            high = (low * (1 + Decimal(repr(ranges[day])))).quantize(Decimal("0.01"), ROUND_HALF_UP)
            per_ticker = []
            for ti, ticker in enumerate(tickers):
                spec = SimulationSpec.starting_at(P, start, cfg.length, _stream_seed(cfg.seed, di, ti))
                seq = simulate_sequence(spec, ticker, day)
                per_ticker.append(sequence_events(seq, ticker, day, low=low, high=high, first_order_id=next_id))
                next_id += cfg.length
            streams.append(heapq.merge(*per_ticker, key=lambda e: e.timestamp))
        encode_events((e for s in streams for e in s), fh)
    return EXIT_OK


COMMANDS = {"classify": cmd_classify, "analyze": cmd_analyze, "simulate": cmd_simulate}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"orderflow: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"orderflow: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OrderflowError, ValueError, KeyError) as exc:
        print(f"orderflow: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
