"""Streaming decoder for order-event CSV logs.

The log has one row per exchange event with the columns::

    DATE, TIMESTAMP, ORDER ID., EVENT TYPE, TICKER, PRICE, QUANTITY, EXCHANGE

Files run to tens of gigabytes per day, so nothing here buffers a whole
file: rows are decoded lazily and only the per-(ticker, day) state codes
and running price extrema are retained.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import os
import re
from array import array
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import IO, Callable, Iterable, Iterator, Mapping, NamedTuple

import numpy as np

from .errors import BadRow, MissingColumn, OutOfSession, UnknownEventType
from .states import ORDER_ALPHABET, OrderState, StateSequence

__all__ = [
    "COLUMNS",
    "SESSION_OPEN",
    "SESSION_CLOSE",
    "OrderEvent",
    "DailyPriceStats",
    "decode_stream",
    "decode_paths",
    "encode_events",
    "format_timestamp",
    "parse_timestamp",
    "extract_sequences",
    "daily_price_stats",
    "scan_events",
    "scan_paths",
]

#: Event field -> header name in the log.
COLUMNS: dict[str, str] = {
    "date": "DATE",
    "timestamp": "TIMESTAMP",
    "order_id": "ORDER ID.",
    "event_type": "EVENT TYPE",
    "ticker": "TICKER",
    "price": "PRICE",
    "quantity": "QUANTITY",
    "exchange": "EXCHANGE",
}

SESSION_OPEN = dt.time(4, 0, 0)
SESSION_CLOSE = dt.time(20, 0, 0)

# H:MM:SS.mmm; '.' is tolerated in place of ':' since real exports contain
# both "16:00.00.000" and "20.00.00.000".
_TIMESTAMP = re.compile(r"(\d{1,2})[:.](\d{2})[:.](\d{2})(?:\.(\d{1,3}))?$")

_EVENT_LOOKUP = {s.event_type: s for s in OrderState}


class OrderEvent(NamedTuple):
    date: dt.date
    timestamp: dt.time
    order_id: int
    event_type: OrderState
    ticker: str
    price: Decimal
    quantity: int
    exchange: str


@dataclass(frozen=True)
class DailyPriceStats:
    """High/low over the priced (price > 0) rows of one stock-day.

    ``open`` is the first priced row in file order.
    """

    ticker: str
    date: dt.date
    high: Decimal
    low: Decimal
    n_priced_rows: int
    open: Decimal


ErrorHandler = Callable[[BadRow], None]


def _normalize_header(name: str) -> str:
    return " ".join(name.strip().upper().split()).rstrip(".")


def _column_indices(header: list[str], schema: Mapping[str, str]) -> list[int]:
    positions = {_normalize_header(h): i for i, h in enumerate(header)}
    indices = []
    for field in OrderEvent._fields:
        name = schema[field]
        try:
            indices.append(positions[_normalize_header(name)])
        except KeyError:
            raise MissingColumn(name) from None
    return indices


def parse_timestamp(text: str) -> dt.time:
    m = _TIMESTAMP.match(text.strip())
    if m is None:
        raise ValueError(f"bad timestamp {text!r}")
    h, mi, s, ms = m.groups()
    millis = int(ms.ljust(3, "0")) if ms else 0
    return dt.time(int(h), int(mi), int(s), millis * 1000)


def format_timestamp(t: dt.time) -> str:
    return f"{t.hour}:{t.minute:02d}:{t.second:02d}.{t.microsecond // 1000:03d}"


def _text_stream(source) -> tuple[IO[str], io.TextIOWrapper | None]:
    if isinstance(source.read(0), bytes):
        wrapper = io.TextIOWrapper(source, encoding="utf-8", newline="")
        return wrapper, wrapper
    return source, None


def decode_stream(
    source: IO,
    schema: Mapping[str, str] | None = None,
    on_error: ErrorHandler | None = None,
) -> Iterator[OrderEvent]:
    """Yield the events of a header-bearing CSV stream in file order.

    ``source`` may be a binary (UTF-8) or text stream. A row that fails to
    decode raises a :class:`~orderflow.errors.BadRow` subclass carrying the
    line number; pass ``on_error`` to receive those errors and keep going
    instead. A header without one of the required columns always raises
    :class:`~orderflow.errors.MissingColumn`.
    """
    schema = dict(COLUMNS, **(schema or {}))
    text, wrapper = _text_stream(source)
    try:
        reader = csv.reader(text)
        header = next(reader, None)
        if header is None:
            return
        i_date, i_ts, i_id, i_ev, i_tic, i_px, i_qty, i_exch = _column_indices(header, schema)
        width = max(i_date, i_ts, i_id, i_ev, i_tic, i_px, i_qty, i_exch) + 1

        dates: dict[str, dt.date] = {}
        for row in reader:
            if not row:
                continue
            line = reader.line_num
            try:
                if len(row) < width:
                    raise BadRow(line, f"expected {len(header)} fields, got {len(row)}")
                d = row[i_date]
                date = dates.get(d)
                if date is None:
                    try:
                        date = dt.date.fromisoformat(d.strip())
                    except ValueError:
                        raise BadRow(line, f"bad date {d!r}") from None
                    dates[d] = date
                try:
                    ts = parse_timestamp(row[i_ts])
                except ValueError as exc:
                    raise BadRow(line, str(exc)) from None
                if ts < SESSION_OPEN or ts > SESSION_CLOSE:
                    raise OutOfSession(line, f"timestamp {row[i_ts]!r} outside 04:00-20:00")
                ev = row[i_ev]
                state = _EVENT_LOOKUP.get(ev)
                if state is None:
                    state = _EVENT_LOOKUP.get(ev.strip().upper())
                    if state is None:
                        raise UnknownEventType(line, ev)
                try:
                    order_id = int(row[i_id])
                    price = Decimal(row[i_px])
                    qty = int(row[i_qty])
                except (ValueError, InvalidOperation):
                    raise BadRow(
                        line, f"bad numeric field in {row[i_id]!r}, {row[i_px]!r}, {row[i_qty]!r}"
                    ) from None
                if not price.is_finite() or price < 0:
                    raise BadRow(line, f"bad price {row[i_px]!r}")
                if qty < 0:
                    raise BadRow(line, f"negative quantity {qty}")
            except BadRow as err:
                if on_error is None:
                    raise
                on_error(err)
                continue
            yield OrderEvent(
                date, ts, order_id, state, row[i_tic].strip(), price, qty, row[i_exch].strip()
            )
    finally:
        if wrapper is not None:
            wrapper.detach()


def decode_paths(
    paths: Iterable[str | os.PathLike],
    schema: Mapping[str, str] | None = None,
    on_error: ErrorHandler | None = None,
) -> Iterator[OrderEvent]:
    """Decode several files back to back, in the order given."""
    for path in paths:
        with open(path, "rb") as fh:
            yield from decode_stream(fh, schema, on_error)


def encode_events(events: Iterable[OrderEvent], stream: IO[str]) -> None:
    """Write events as a log CSV readable by :func:`decode_stream`."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS.values())
    for e in events:
        writer.writerow(
            (
                e.date.isoformat(),
                format_timestamp(e.timestamp),
                e.order_id,
                e.event_type.event_type,
                e.ticker,
                e.price,
                e.quantity,
                e.exchange,
            )
        )


class _Scan:
    """Single-pass accumulator for state codes and daily price extrema.

    ``session`` only limits the state sequences; price extrema always cover
    the whole trading day.
    """

    def __init__(self, tickers=None, dates=None, session=None):
        self.tickers = None if tickers is None else frozenset(tickers)
        self.dates = None if dates is None else frozenset(dates)
        self.session = session
        self.codes: dict[tuple[str, dt.date], array] = {}
        # key -> [high, low, n, open]
        self.prices: dict[tuple[str, dt.date], list] = {}

    def feed(self, events: Iterable[OrderEvent], states=True, prices=True) -> "_Scan":
        codes, px = self.codes, self.prices
        tickers, dates = self.tickers, self.dates
        start, end = self.session or (SESSION_OPEN, SESSION_CLOSE)
        for e in events:
            if tickers is not None and e.ticker not in tickers:
                continue
            if dates is not None and e.date not in dates:
                continue
            key = (e.ticker, e.date)
            if states and start <= e.timestamp <= end:
                buf = codes.get(key)
                if buf is None:
                    buf = codes[key] = array("B")
                buf.append(e.event_type.index)
            if prices and e.price > 0:
                acc = px.get(key)
                if acc is None:
                    px[key] = [e.price, e.price, 1, e.price]
                else:
                    if e.price > acc[0]:
                        acc[0] = e.price
                    if e.price < acc[1]:
                        acc[1] = e.price
                    acc[2] += 1
        return self

    def merge(self, other: "_Scan") -> None:
        """Append ``other``'s data as if it came later in file order."""
        for key, buf in other.codes.items():
            if key in self.codes:
                self.codes[key].extend(buf)
            else:
                self.codes[key] = buf
        for key, acc in other.prices.items():
            mine = self.prices.get(key)
            if mine is None:
                self.prices[key] = acc
            else:
                mine[0] = max(mine[0], acc[0])
                mine[1] = min(mine[1], acc[1])
                mine[2] += acc[2]

    def sequences(self) -> dict[tuple[str, dt.date], StateSequence]:
        return {
            key: StateSequence(np.frombuffer(buf, dtype=np.uint8), ORDER_ALPHABET, *key)
            for key, buf in sorted(self.codes.items())
        }

    def stats(self) -> dict[tuple[str, dt.date], DailyPriceStats]:
        return {
            key: DailyPriceStats(key[0], key[1], hi, lo, n, op)
            for key, (hi, lo, n, op) in sorted(self.prices.items())
        }


def extract_sequences(
    events: Iterable[OrderEvent],
    tickers: Iterable[str],
    dates: Iterable[dt.date] | None = None,
    session: tuple[dt.time, dt.time] | None = None,
) -> dict[tuple[str, dt.date], StateSequence]:
    """Group event types into one state sequence per (ticker, day).

    ``dates=None`` keeps every day. ``session`` optionally restricts events
    to an inclusive time-of-day window, e.g. regular hours only. Pairs with
    no matching events are absent from the result.
    """
    return _Scan(tickers, dates, session).feed(events, prices=False).sequences()


def daily_price_stats(
    events: Iterable[OrderEvent],
    tickers: Iterable[str] | None = None,
) -> dict[tuple[str, dt.date], DailyPriceStats]:
    """Daily high/low per (ticker, day), ignoring zero-price rows."""
    return _Scan(tickers).feed(events, states=False).stats()


def scan_events(
    events: Iterable[OrderEvent],
    tickers: Iterable[str],
    dates: Iterable[dt.date] | None = None,
    session: tuple[dt.time, dt.time] | None = None,
):
    """One pass computing both :func:`extract_sequences` and price stats.

    Price statistics ignore ``session`` so the daily range always spans the
    full trading day.
    """
    scan = _Scan(tickers, dates, session).feed(events)
    return scan.sequences(), scan.stats()


def _scan_file(path, tickers, dates, session, schema):
    errors: list[BadRow] = []
    with open(path, "rb") as fh:
        scan = _Scan(tickers, dates, session).feed(decode_stream(fh, schema, errors.append))
    return scan, errors


def scan_paths(
    paths: list[str | os.PathLike],
    tickers: Iterable[str],
    dates: Iterable[dt.date] | None = None,
    session: tuple[dt.time, dt.time] | None = None,
    schema: Mapping[str, str] | None = None,
    workers: int = 1,
):
    """Scan several files, optionally one process per file.

    Returns ``(sequences, stats, errors)``. Per-file results are merged in
    the order of ``paths`` so the output does not depend on ``workers``.
    Row errors are collected, not raised; a missing column still raises.
    """
    tickers = frozenset(tickers)
    dates = None if dates is None else frozenset(dates)
    args = [(os.fspath(p), tickers, dates, session, schema) for p in paths]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_file, *zip(*args)))
    else:
        parts = [_scan_file(*a) for a in args]

    scan = _Scan(tickers, dates, session)
    errors: list[BadRow] = []
    for arg, (part, errs) in zip(args, parts):
        scan.merge(part)
        for err in errs:
            err.path = arg[0]
        errors.extend(errs)
    return scan.sequences(), scan.stats(), errors

