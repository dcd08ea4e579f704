"""Sector-level aggregation, transition probes, tables and heatmaps."""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptySector, InvalidMatrixFile, OrderflowError
from .markov import ChainAnalytics, TransitionCounts, TransitionMatrix, analyze_chain, fit_mle, pool_counts
from .states import ORDER_ALPHABET
from .volatility import Label, VolatilityLabel

__all__ = [
    "SectorSpec",
    "SectorChainSet",
    "TransitionProbe",
    "DEFAULT_PROBES",
    "build_sector_chains",
    "transition_probes",
    "diagonal_inertia",
    "Heatmap",
    "emit_heatmap",
    "heatmap_svg",
    "matrix_csv",
    "read_matrix_csv",
    "SummaryTables",
    "emit_summary_tables",
    "render_probability",
    "chain_set_record",
    "slug",
]

REGIMES = (Label.HIGH, Label.LOW)


@dataclass(frozen=True)
class SectorSpec:
    name: str
    tickers: tuple[str, ...]

    def __post_init__(self):
        tickers = tuple(self.tickers)
        if not tickers:
            raise ValueError(f"sector {self.name!r} has no tickers")
        if len(set(tickers)) != len(tickers):
            raise ValueError(f"sector {self.name!r} lists a ticker twice")
        object.__setattr__(self, "tickers", tickers)


@dataclass(frozen=True, eq=False)
class SectorChainSet:
    """The fitted chain for one sector in one volatility regime.

    ``analytics`` is None when the fitted chain is not ergodic (or a
    numerical step failed); ``error`` then says why.
    """

    sector: SectorSpec
    regime: Label
    pooled_counts: TransitionCounts
    matrix: TransitionMatrix
    analytics: ChainAnalytics | None
    members: tuple[tuple[str, dt.date], ...] = ()
    error: str | None = None


def _mean_of_matrices(parts: Sequence[TransitionCounts]) -> TransitionMatrix:
    states = parts[0].states
    total = np.zeros((len(states), len(states)))
    for part in parts:
        total += fit_mle(part).embed(states)
    rows = total.sum(axis=1)
    keep = np.flatnonzero(rows > 0)
    mean = total[np.ix_(keep, keep)]
    mean = mean / mean.sum(axis=1, keepdims=True)
    kept = tuple(states[i] for i in keep)
    return TransitionMatrix(kept, mean, tuple(s for s in states if s not in kept))


def build_sector_chains(
    chains: Mapping[tuple[str, dt.date], TransitionCounts],
    labels: Mapping[tuple[str, dt.date], VolatilityLabel] | Iterable[VolatilityLabel],
    sectors: Sequence[SectorSpec],
    mode: str = "pooled",
) -> list[SectorChainSet]:
    """Aggregate labeled stock-days into one chain per (sector, regime).

    ``pooled`` sums the count matrices of all High (or Low) stock-days in
    the sector and fits once. ``mean`` fits each stock-day separately and
    averages the probability matrices, renormalizing rows.
    """
    if mode not in ("pooled", "mean"):
        raise ValueError(f"unknown aggregation mode {mode!r}")
    if isinstance(labels, Mapping):
        labels = labels.values()
    by_ticker: dict[str, list[VolatilityLabel]] = {}
    for lab in labels:
        by_ticker.setdefault(lab.ticker, []).append(lab)

    out = []
    for sector in sectors:
        found = False
        for regime in REGIMES:
            members = sorted(
                (lab.ticker, lab.date)
                for t in sector.tickers
                for lab in by_ticker.get(t, ())
                if lab.label is regime
            )
            if not members:
                continue
            missing = [m for m in members if m not in chains]
            if missing:
                raise KeyError(f"no transition counts for labeled stock-days {missing}")
            found = True
            parts = [chains[m] for m in members]
            pooled = pool_counts(parts)
            matrix = fit_mle(pooled) if mode == "pooled" else _mean_of_matrices(parts)
            try:
                analytics, error = analyze_chain(matrix), None
            except OrderflowError as exc:
                analytics, error = None, f"{type(exc).__name__}: {exc}"
            out.append(SectorChainSet(sector, regime, pooled, matrix, analytics, tuple(members), error))
        if not found:
            raise EmptySector(f"sector {sector.name!r} has no High or Low stock-days")
    return out


@dataclass(frozen=True)
class TransitionProbe:
    sector: str
    src: str
    dst: str
    prob_high: float
    prob_low: float


#: FB->AA and FA->AB (refill after a full execution) and add->delete.
DEFAULT_PROBES = (("FB", "AA"), ("FA", "AB"), ("AB", "DB"), ("AA", "DA"))


def transition_probes(
    sets: Sequence[SectorChainSet], pairs: Sequence[tuple[str, str]] = DEFAULT_PROBES
) -> list[TransitionProbe]:
    """High vs Low probability of selected transitions, per sector.

    A probability is NaN when the regime is missing or either state was
    dropped from its chain.
    """
    table: dict[str, dict[Label, TransitionMatrix]] = {}
    order = []
    for s in sets:
        if s.sector.name not in table:
            order.append(s.sector.name)
        table.setdefault(s.sector.name, {})[s.regime] = s.matrix
    nan = float("nan")
    out = []
    for name in order:
        mats = table[name]
        for src, dst in pairs:
            hi = mats[Label.HIGH].prob(src, dst) if Label.HIGH in mats else nan
            lo = mats[Label.LOW].prob(src, dst) if Label.LOW in mats else nan
            out.append(TransitionProbe(name, src, dst, hi, lo))
    return out


def diagonal_inertia(P: TransitionMatrix) -> np.ndarray:
    """Probability that each state repeats at the next step."""
    return np.diag(P.p).copy()


# -- matrix CSV ---------------------------------------------------------------

def matrix_csv(P: TransitionMatrix) -> str:
    """Full-precision CSV; rows are the current state, columns the next."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("state", *P.states))
    for s, row in zip(P.states, P.p):
        writer.writerow((s, *(repr(float(v)) for v in row)))
    return buf.getvalue()


def read_matrix_csv(text: str) -> TransitionMatrix:
    """Parse :func:`matrix_csv` output back into a :class:`TransitionMatrix`."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise InvalidMatrixFile("matrix file is empty")
    states = tuple(c.strip() for c in rows[0][1:])
    body = rows[1:]
    if len(body) != len(states) or any(len(r) != len(states) + 1 for r in body):
        raise InvalidMatrixFile(f"expected a {len(states)}x{len(states)} matrix")
    if tuple(r[0].strip() for r in body) != states:
        raise InvalidMatrixFile("row labels must match the column header")
    try:
        p = np.array([[float(v) for v in r[1:]] for r in body])
        return TransitionMatrix(states, p)
    except ValueError as exc:
        raise InvalidMatrixFile(str(exc)) from None


# -- SVG heatmap ----------------------------------------------------------------

_CELL = 44
_LEFT = 70
_TOP = 60


def _ramp(v: float) -> str:
    # white -> navy, linear in each channel
    lo, hi = (255, 255, 255), (8, 48, 107)
    rgb = (round(a + (b - a) * v) for a, b in zip(lo, hi))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def heatmap_svg(P: TransitionMatrix, title: str, vmax: float | None = 1.0) -> str:
    """Heatmap with the current state along columns and next state down rows.

    Colour is linear in probability over ``[0, vmax]``; ``vmax=None``
    scales to the largest entry.
    """
    p = P.p
    r = len(p)
    top = float(p.max()) if vmax is None else float(vmax)
    top = top if top > 0 else 1.0
    width = _LEFT + r * _CELL + 20
    height = _TOP + r * _CELL + 40
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<title>{escape(title)}</title>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{_LEFT + r * _CELL / 2:.1f}" y="{height - 8}" text-anchor="middle" font-size="11">current state</text>',
        f'<text x="14" y="{_TOP + r * _CELL / 2:.1f}" text-anchor="middle" font-size="11" '
        f'transform="rotate(-90 14 {_TOP + r * _CELL / 2:.1f})">next state</text>',
    ]
    for k, s in enumerate(P.states):
        cx = _LEFT + k * _CELL + _CELL / 2
        parts.append(f'<text x="{cx:.1f}" y="{_TOP - 8}" text-anchor="middle" font-size="11">{escape(s)}</text>')
        cy = _TOP + k * _CELL + _CELL / 2 + 4
        parts.append(f'<text x="{_LEFT - 8}" y="{cy:.1f}" text-anchor="end" font-size="11">{escape(s)}</text>')
    for nxt in range(r):
        for cur in range(r):
            v = float(p[cur, nxt])
            level = min(max(v / top, 0.0), 1.0)
            x = _LEFT + cur * _CELL
            y = _TOP + nxt * _CELL
            parts.append(
                f'<rect class="cell" x="{x}" y="{y}" width="{_CELL}" height="{_CELL}" '
                f'fill="{_ramp(level)}" data-from="{escape(P.states[cur])}" data-to="{escape(P.states[nxt])}"/>'
            )
            ink = "#ffffff" if level > 0.5 else "#000000"
            parts.append(
                f'<text x="{x + _CELL / 2:.1f}" y="{y + _CELL / 2 + 4:.1f}" text-anchor="middle" '
                f'font-size="10" fill="{ink}">{v:.2f}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


@dataclass(frozen=True)
class Heatmap:
    svg: str
    csv: str


def emit_heatmap(P: TransitionMatrix, title: str, vmax: float | None = 1.0) -> Heatmap:
    return Heatmap(heatmap_svg(P, title, vmax), matrix_csv(P))


# -- summary tables -----------------------------------------------------------------

def render_probability(x: float) -> str:
    if math.isnan(x):
        return "-"
    if x < 0.001:
        return "<0.001"
    return f"{x:.3f}"


def _fixed(decimals: int):
    def fmt(x: float) -> str:
        return "-" if math.isnan(x) or math.isinf(x) else f"{x:.{decimals}f}"

    return fmt


def _per_state(s: SectorChainSet, values: np.ndarray, states: Sequence[str]) -> list[float]:
    lookup = dict(zip(s.matrix.states, values))
    return [float(lookup.get(st, float("nan"))) for st in states]


@dataclass(frozen=True)
class SummaryTables:
    """Rendered tables plus full-precision companions, all as CSV text."""

    stationary: str
    mrt: str
    spectral: str
    stationary_full: str
    mrt_full: str
    spectral_full: str

    def files(self) -> dict[str, str]:
        return {
            "stationary.csv": self.stationary,
            "mrt.csv": self.mrt,
            "spectral.csv": self.spectral,
            "stationary_full.csv": self.stationary_full,
            "mrt_full.csv": self.mrt_full,
            "spectral_full.csv": self.spectral_full,
        }


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def emit_summary_tables(sets: Sequence[SectorChainSet], states: Sequence[str] = ORDER_ALPHABET) -> SummaryTables:
    """Stationary distribution, mean recurrence time and spectral tables.

    Rendering: probabilities to 3 decimals (below 0.001 shown as
    ``<0.001``), recurrence times to 1 decimal, spectral gap / relaxation
    time / entropy rate to 3 decimals. States absent from a chain show
    ``-``. The ``*_full`` companions carry every value at full precision.
    """
    ok = [s for s in sets if s.analytics is not None]
    nan = float("nan")

    head = ["sector", "regime", *states]
    st_rows, st_full = [head], [head]
    mrt_rows, mrt_full = [head], [head]
    for s in ok:
        a = s.analytics
        pi = _per_state(s, a.stationary.pi, states)
        mu = _per_state(s, a.mean_recurrence, states)
        key = [s.sector.name, s.regime.value]
        st_rows.append(key + [render_probability(v) for v in pi])
        st_full.append(key + [repr(v) for v in pi])
        mrt_rows.append(key + [_fixed(1)(v) for v in mu])
        mrt_full.append(key + [repr(v) for v in mu])

    # sectors as columns, (property, regime) as rows
    sectors = list(dict.fromkeys(s.sector.name for s in sets))
    lookup = {(s.sector.name, s.regime): s.analytics for s in ok}
    props = (
        ("spectral_gap", lambda a: a.spectral.gap_absolute),
        ("relaxation_time", lambda a: a.spectral.relaxation_time),
        ("entropy_rate", lambda a: a.entropy.bits_per_step),
        ("gap_lambda2", lambda a: a.spectral.gap),
        ("slem", lambda a: a.spectral.slem),
    )
    sp_rows = [["property", "regime", *sectors]]
    sp_full = [["property", "regime", *sectors]]
    for name, get in props:
        for regime in REGIMES:
            vals = [get(lookup[(sec, regime)]) if (sec, regime) in lookup else nan for sec in sectors]
            sp_rows.append([name, regime.value, *(_fixed(3)(v) for v in vals)])
            sp_full.append([name, regime.value, *(repr(float(v)) for v in vals)])

    return SummaryTables(
        _csv(st_rows), _csv(mrt_rows), _csv(sp_rows), _csv(st_full), _csv(mrt_full), _csv(sp_full)
    )


def _num(x):
    x = float(x)
    return None if math.isnan(x) or math.isinf(x) else x


def chain_set_record(s: SectorChainSet) -> dict:
    """JSON-ready full-precision description of one sector chain."""
    rec = {
        "sector": s.sector.name,
        "regime": s.regime.value,
        "members": [[t, d.isoformat()] for t, d in s.members],
        "states": list(s.matrix.states),
        "removed_states": list(s.matrix.removed),
        "pooled_counts": s.pooled_counts.counts.tolist(),
        "transition_matrix": [[_num(v) for v in row] for row in s.matrix.p],
        "diagonal_inertia": [_num(v) for v in diagonal_inertia(s.matrix)],
        "error": s.error,
    }
    a = s.analytics
    if a is not None:
        rec.update(
            {
                "ergodic": a.structure.ergodic,
                "stationary": [_num(v) for v in a.stationary.pi],
                "stationary_residual": a.stationary.residual,
                "mean_recurrence_time": [_num(v) for v in a.mean_recurrence],
                "eigenvalues": [[_num(z.real), _num(z.imag)] for z in a.spectral.eigenvalues],
                "slem": _num(a.spectral.slem),
                "spectral_gap": _num(a.spectral.gap_absolute),
                "gap_lambda2": _num(a.spectral.gap),
                "relaxation_time": _num(a.spectral.relaxation_time),
                "entropy_rate": _num(a.entropy.bits_per_step),
                "max_entropy_rate": _num(a.entropy.max_bits),
            }
        )
    return rec


def slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", text).strip("_") or "sector"
