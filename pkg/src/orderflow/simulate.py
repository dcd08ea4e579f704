"""Synthetic order-state sequences and empirical oracles.

Sampling is inverse-CDF: one uniform double per step from NumPy's PCG64
generator (``numpy.random.Generator(PCG64(seed)).random``), then a
cumulative-sum walk along the current row picking the first state whose
cumulative probability exceeds the draw. Zero-probability states are never
chosen. The same seed gives the same sequence on every platform.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterator, Sequence

import numba
import numpy as np

from .errors import InvalidDistribution
from .ingest import SESSION_CLOSE, SESSION_OPEN, OrderEvent
from .markov.counts import TransitionMatrix
from .states import OrderState, StateSequence

__all__ = [
    "SimulationSpec",
    "simulate_sequence",
    "iid_sequence",
    "empirical_state_frequencies",
    "RecurrenceTimes",
    "empirical_recurrence_times",
    "sequence_events",
    "planted_ranges",
]


@dataclass(frozen=True, eq=False)
class SimulationSpec:
    P: TransitionMatrix
    initial: np.ndarray
    length: int
    seed: int = 0

    def __post_init__(self):
        P = self.P
        if not isinstance(P, TransitionMatrix):
            try:
                p = np.asarray(P, dtype=float)
                P = TransitionMatrix(tuple(f"s{i}" for i in range(len(p))), p)
            except ValueError as exc:
                raise InvalidDistribution(str(exc)) from None
        initial = np.asarray(self.initial, dtype=float)
        if initial.shape != (P.size,):
            raise InvalidDistribution(f"initial distribution needs {P.size} entries")
        if np.any(initial < 0) or abs(initial.sum() - 1.0) > 1e-12:
            raise InvalidDistribution("initial distribution must be non-negative and sum to 1")
        if self.length < 1:
            raise InvalidDistribution("length must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidDistribution("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "initial", initial)

    @classmethod
    def starting_at(cls, P: TransitionMatrix, state: str, length: int, seed: int = 0) -> "SimulationSpec":
        initial = np.zeros(P.size)
        initial[P.index(state)] = 1.0
        return cls(P, initial, length, seed)


def _walk_table(prob: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(prob, axis=-1)
    # everything from the last positive entry onward catches u in [cdf, 1)
    for row, p in zip(cdf.reshape(-1, prob.shape[-1]), prob.reshape(-1, prob.shape[-1])):
        row[np.flatnonzero(p > 0)[-1] :] = np.inf
    return cdf


@numba.njit(cache=True)
def _walk(cdf, init_cdf, u, out):
    r = cdf.shape[1]
    s = 0
    while s < r - 1 and not u[0] < init_cdf[s]:
        s += 1
    out[0] = s
    for t in range(1, u.shape[0]):
        x = u[t]
        j = 0
        while j < r - 1 and not x < cdf[s, j]:
            j += 1
        out[t] = j
        s = j


def simulate_sequence(spec: SimulationSpec, ticker: str = "", date: dt.date | None = None) -> StateSequence:
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    u = rng.random(spec.length)
    out = np.empty(spec.length, dtype=np.intp)
    _walk(_walk_table(spec.P.p), _walk_table(spec.initial), u, out)
    return StateSequence(out, spec.P.states, ticker, date)


def iid_sequence(probs: Sequence[float], states: Sequence[str], length: int, seed: int = 0) -> StateSequence:
    """Serially independent draws from one fixed distribution."""
    probs = np.asarray(probs, dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
        raise InvalidDistribution("probabilities must be non-negative and sum to 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(length)
    codes = np.searchsorted(_walk_table(probs), u, side="right")
    return StateSequence(codes, tuple(states))


def empirical_state_frequencies(seq: StateSequence) -> np.ndarray:
    """Fraction of time steps spent in each alphabet state."""
    if seq.length < 1:
        raise ValueError("empty sequence")
    return np.bincount(seq.codes, minlength=len(seq.alphabet)) / seq.length


@dataclass(frozen=True, eq=False)
class RecurrenceTimes:
    """Mean gap between consecutive visits per state.

    States seen fewer than twice get NaN and are listed in ``insufficient``.
    """

    states: tuple[str, ...]
    mean_gap: np.ndarray
    insufficient: tuple[str, ...]


def empirical_recurrence_times(seq: StateSequence) -> RecurrenceTimes:
    gaps = np.full(len(seq.alphabet), np.nan)
    short = []
    for k, state in enumerate(seq.alphabet):
        hits = np.flatnonzero(seq.codes == k)
        if hits.size < 2:
            short.append(state)
        else:
            gaps[k] = (hits[-1] - hits[0]) / (hits.size - 1)
    return RecurrenceTimes(seq.alphabet, gaps, tuple(short))


_PRICED = {OrderState.AB, OrderState.AA, OrderState.EB, OrderState.EA, OrderState.FB, OrderState.FA}
_SESSION_MS = (SESSION_CLOSE.hour - SESSION_OPEN.hour) * 3_600_000
_OPEN_MS = SESSION_OPEN.hour * 3_600_000


def _ms_to_time(ms: int) -> dt.time:
    h, rem = divmod(ms, 3_600_000)
    m, rem = divmod(rem, 60_000)
    s, milli = divmod(rem, 1000)
    return dt.time(h, m, s, milli * 1000)


def sequence_events(
    seq: StateSequence,
    ticker: str,
    date: dt.date,
    *,
    low: Decimal = Decimal("100.00"),
    high: Decimal = Decimal("101.00"),
    first_order_id: int = 1,
    exchange: str = "NASDAQ",
) -> Iterator[OrderEvent]:
    """Render a simulated sequence as log events for one stock-day.

    Timestamps are spread evenly over 04:00-20:00 at millisecond
    resolution. Add/execute/fill rows alternate between ``low`` and
    ``high`` (first one at ``low``); delete/cancel rows carry price 0.
    Requires an order-state alphabet.
    """
    states = [OrderState(a) for a in seq.alphabet]
    n = seq.length
    priced = 0
    for i, code in enumerate(seq.codes):
        state = states[code]
        if state in _PRICED:
            price = low if priced % 2 == 0 else high
            priced += 1
        else:
            price = Decimal(0)
        ts = _ms_to_time(_OPEN_MS + (i * _SESSION_MS) // max(n, 1))
        yield OrderEvent(date, ts, first_order_id + i, state, ticker, price, 100, exchange)


def planted_ranges(
    dates: Sequence[dt.date], base: float = 0.02, high: float = 0.04, low: float = 0.001
) -> dict[dt.date, float]:
    """Normalized daily ranges with one planted high and one planted low day.

    Every day gets ``base`` except the middle day (``high``) and the day a
    quarter of the way in (``low``). With the defaults, eight or more days
    put the planted days strictly beyond ``mu +/- sigma``.
    """
    dates = sorted(dates)
    out = {d: base for d in dates}
    if len(dates) >= 3:
        out[dates[len(dates) // 2]] = high
        out[dates[len(dates) // 4]] = low
    return out
