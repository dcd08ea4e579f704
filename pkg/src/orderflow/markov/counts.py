"""Transition counting and maximum-likelihood transition matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import EmptyCounts, SequenceTooShort, StateSetMismatch
from ..states import ORDER_ALPHABET, StateSequence


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class TransitionCounts:
    """``counts[i, j]`` is the number of ``states[i] -> states[j]`` steps."""

    states: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        r = len(self.states)
        if counts.shape != (r, r):
            raise ValueError(f"counts shape {counts.shape} does not match {r} states")
        if np.any(counts < 0):
            raise ValueError("transition counts must be non-negative")
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "counts", _frozen(counts.astype(np.int64)))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def zeros(cls, states: Sequence[str] = ORDER_ALPHABET) -> "TransitionCounts":
        return cls(tuple(states), np.zeros((len(states), len(states)), dtype=np.int64))

    def __eq__(self, other):
        if not isinstance(other, TransitionCounts):
            return NotImplemented
        return self.states == other.states and np.array_equal(self.counts, other.counts)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Row-stochastic one-step transition matrix over ``states``.

    ``removed`` lists states that were dropped while fitting because they
    were never seen as a transition source.
    """

    states: tuple[str, ...]
    p: np.ndarray
    removed: tuple[str, ...] = ()

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        r = len(self.states)
        if p.shape != (r, r):
            raise ValueError(f"matrix shape {p.shape} does not match {r} states")
        if r == 0:
            raise ValueError("empty transition matrix")
        if not np.all(np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
            raise ValueError("transition probabilities must lie in [0, 1]")
        if np.max(np.abs(p.sum(axis=1) - 1.0)) > 1e-9:
            raise ValueError("rows of a transition matrix must sum to 1")
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        object.__setattr__(self, "removed", tuple(self.removed))
        object.__setattr__(self, "p", _frozen(p))

    @property
    def size(self) -> int:
        return len(self.states)

    def index(self, state: str) -> int:
        return self.states.index(str(state))

    def prob(self, src: str, dst: str) -> float:
        """``p[src, dst]``, or NaN when either state is not in the chain."""
        try:
            return float(self.p[self.index(src), self.index(dst)])
        except ValueError:
            return float("nan")

    def embed(self, states: Sequence[str]) -> np.ndarray:
        """This matrix laid out over a larger state list, zero elsewhere."""
        pos = [list(states).index(s) for s in self.states]
        out = np.zeros((len(states), len(states)))
        out[np.ix_(pos, pos)] = self.p
        return out

    def __eq__(self, other):
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        return self.states == other.states and self.removed == other.removed and np.array_equal(self.p, other.p)

    __hash__ = None


def count_transitions(seq: StateSequence) -> TransitionCounts:
    codes = seq.codes
    if codes.size < 2:
        raise SequenceTooShort(f"need at least 2 states to count transitions, got {codes.size}")
    r = len(seq.alphabet)
    flat = np.bincount(codes[:-1] * r + codes[1:], minlength=r * r)
    return TransitionCounts(seq.alphabet, flat.reshape(r, r))


def pool_counts(
    parts: Sequence[TransitionCounts], states: Sequence[str] | None = None
) -> TransitionCounts:
    """Elementwise sum of count matrices sharing one state order.

    An empty list gives the zero matrix over ``states`` (default: the
    ten-state order alphabet).
    """
    if states is None:
        states = parts[0].states if parts else ORDER_ALPHABET
    states = tuple(states)
    total = np.zeros((len(states), len(states)), dtype=np.int64)
    for part in parts:
        if part.states != states:
            raise StateSetMismatch(f"cannot pool {part.states} with {states}")
        total += part.counts
    return TransitionCounts(states, total)


def fit_mle(counts: TransitionCounts) -> TransitionMatrix:
    """Maximum-likelihood estimate ``p_ij = n_ij / sum_j n_ij``.

    States with no outgoing transitions are dropped; columns into dropped
    states are discarded and their rows renormalized, which can empty
    further rows, so dropping repeats until every kept row has mass.
    """
    n = counts.counts.astype(float)
    if counts.total == 0:
        raise EmptyCounts("no transitions to fit")
    keep = np.arange(len(counts.states))
    while True:
        sub = n[np.ix_(keep, keep)]
        live = sub.sum(axis=1) > 0
        if live.all():
            break
        keep = keep[live]
        if keep.size == 0:
            raise EmptyCounts("every state was removed while fitting")
    p = sub / sub.sum(axis=1, keepdims=True)
    states = tuple(counts.states[i] for i in keep)
    removed = tuple(s for s in counts.states if s not in states)
    return TransitionMatrix(states, p, removed)
