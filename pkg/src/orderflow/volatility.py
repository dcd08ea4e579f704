"""High/low volatility day classification by a mean +/- one sigma rule.

For each stock, every day in the date window gets a normalized daily
price range. Days whose range is strictly above ``mu + sigma`` are High,
strictly below ``mu - sigma`` are Low, everything else is Neither.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Mapping

from .errors import InsufficientData, NonPositiveLow
from .ingest import DailyPriceStats

__all__ = [
    "Label",
    "VolatilityLabel",
    "normalized_range",
    "classify_days",
    "classify_stocks",
    "select_extremes",
    "write_labels_csv",
    "read_labels_csv",
]


class Label(str, Enum):
    HIGH = "High"
    LOW = "Low"
    NEITHER = "Neither"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class VolatilityLabel:
    ticker: str
    date: dt.date
    normalized_range: float
    mu: float
    sigma: float
    label: Label


def normalized_range(stats: DailyPriceStats, method: str = "low") -> float:
    """Daily price range of ``stats`` under one of three normalizations.

    ``low``   (high - low) / low
    ``open``  (high - low) / first priced row of the day
    ``none``  high - low, in currency units
    """
    spread = stats.high - stats.low
    if method == "none":
        return float(spread)
    if method == "low":
        base = stats.low
    elif method == "open":
        base = stats.open
    else:
        raise ValueError(f"unknown normalization {method!r}")
    if base <= 0:
        raise NonPositiveLow(f"{stats.ticker} {stats.date}: normalizing price {base} is not positive")
    return float(spread / base)


def _in_window(day: dt.date, window) -> bool:
    if window is None:
        return True
    start, end = window
    return start <= day <= end


def classify_days(
    ranges: Mapping[dt.date, float],
    window: tuple[dt.date, dt.date] | None = None,
    *,
    ticker: str = "",
    ddof: int = 0,
) -> dict[dt.date, VolatilityLabel]:
    """Label every day of one stock inside ``window`` (inclusive).

    ``mu`` and ``sigma`` are taken over all in-window days. ``ddof=0`` gives
    the population standard deviation, ``ddof=1`` the sample one. Threshold
    equality counts as Neither.
    """
    days = sorted(d for d in ranges if _in_window(d, window))
    if len(days) < 2:
        raise InsufficientData(f"{ticker or 'stock'}: need at least 2 days in window, got {len(days)}")
    values = [float(ranges[d]) for d in days]
    n = len(values)
    mu = math.fsum(values) / n
    sigma = math.sqrt(math.fsum((v - mu) ** 2 for v in values) / (n - ddof))

    out = {}
    for day, v in zip(days, values):
        if v > mu + sigma:
            label = Label.HIGH
        elif v < mu - sigma:
            label = Label.LOW
        else:
            label = Label.NEITHER
        out[day] = VolatilityLabel(ticker, day, v, mu, sigma, label)
    return out


def classify_stocks(
    stats: Mapping[tuple[str, dt.date], DailyPriceStats],
    window: tuple[dt.date, dt.date] | None = None,
    *,
    method: str = "low",
    ddof: int = 0,
) -> dict[tuple[str, dt.date], VolatilityLabel]:
    """Run :func:`classify_days` separately for every ticker in ``stats``."""
    per_ticker: dict[str, dict[dt.date, float]] = defaultdict(dict)
    for (ticker, day), s in stats.items():
        per_ticker[ticker][day] = normalized_range(s, method)
    out = {}
    for ticker in sorted(per_ticker):
        for day, lab in classify_days(per_ticker[ticker], window, ticker=ticker, ddof=ddof).items():
            out[(ticker, day)] = lab
    return out


def select_extremes(
    labels: Iterable[VolatilityLabel],
) -> dict[tuple[str, dt.date], VolatilityLabel]:
    """Keep at most one High and one Low day per ticker.

    The High day is the labeled day with the largest range and the Low day
    the one with the smallest; ties go to the earliest date.
    """
    best: dict[tuple[str, Label], VolatilityLabel] = {}
    for lab in sorted(labels, key=lambda x: (x.ticker, x.date)):
        if lab.label is Label.NEITHER:
            continue
        key = (lab.ticker, lab.label)
        cur = best.get(key)
        if cur is None:
            best[key] = lab
        elif lab.label is Label.HIGH and lab.normalized_range > cur.normalized_range:
            best[key] = lab
        elif lab.label is Label.LOW and lab.normalized_range < cur.normalized_range:
            best[key] = lab
    return {(lab.ticker, lab.date): lab for lab in sorted(best.values(), key=lambda x: (x.ticker, x.date))}


_CSV_FIELDS = ("ticker", "date", "normalized_range", "mu", "sigma", "label")


def write_labels_csv(labels: Iterable[VolatilityLabel], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(_CSV_FIELDS)
    for lab in sorted(labels, key=lambda x: (x.ticker, x.date)):
        writer.writerow(
            (lab.ticker, lab.date.isoformat(), repr(lab.normalized_range), repr(lab.mu), repr(lab.sigma), lab.label.value)
        )


def read_labels_csv(stream: IO[str]) -> dict[tuple[str, dt.date], VolatilityLabel]:
    out = {}
    for row in csv.DictReader(stream):
        lab = VolatilityLabel(
            row["ticker"],
            dt.date.fromisoformat(row["date"]),
            float(row["normalized_range"]),
            float(row["mu"]),
            float(row["sigma"]),
            Label(row["label"]),
        )
        out[(lab.ticker, lab.date)] = lab
    return out
