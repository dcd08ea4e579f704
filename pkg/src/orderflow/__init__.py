"""Markov-chain analytics for high-frequency limit-order event streams.

Pipeline: :mod:`orderflow.ingest` decodes order-event logs into per-stock,
per-day state sequences; :mod:`orderflow.volatility` labels high and low
volatility days; :mod:`orderflow.markov` fits transition matrices and
computes chain diagnostics; :mod:`orderflow.report` aggregates by sector
and renders tables and heatmaps; :mod:`orderflow.simulate` produces
synthetic sequences for testing.
"""

__version__ = "0.1.0"

from .states import EVENT_TYPES, ORDER_ALPHABET, OrderState, StateSequence

__all__ = ["EVENT_TYPES", "ORDER_ALPHABET", "OrderState", "StateSequence", "__version__"]
