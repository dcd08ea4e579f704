import datetime as dt
import io
from decimal import Decimal

import numpy as np
import pytest

from orderflow.errors import InvalidDistribution
from orderflow.ingest import daily_price_stats, decode_stream, encode_events, extract_sequences
from orderflow.markov import TransitionMatrix, stationary_distribution
from orderflow.simulate import (
    SimulationSpec,
    empirical_recurrence_times,
    empirical_state_frequencies,
    iid_sequence,
    planted_ranges,
    sequence_events,
    simulate_sequence,
)
from orderflow.states import ORDER_ALPHABET, StateSequence
from orderflow.volatility import Label, classify_days

from .conftest import random_stochastic

IDENTITY = TransitionMatrix(ORDER_ALPHABET, np.eye(10))


def test_absorbing_identity():
    s = simulate_sequence(SimulationSpec.starting_at(IDENTITY, "AB", 5, seed=1))
    assert s.states == ["AB"] * 5


def test_deterministic_cycle():
    spec = SimulationSpec(np.array([[0.0, 1.0], [1.0, 0.0]]), [1.0, 0.0], 4)
    assert simulate_sequence(spec).states == ["s0", "s1", "s0", "s1"]


def test_same_seed_same_sequence(order_flow_matrix):
    spec = SimulationSpec.starting_at(order_flow_matrix, "DA", 10_000, seed=2**64 - 1)
    a, b = simulate_sequence(spec), simulate_sequence(spec)
    assert a == b
    other = simulate_sequence(SimulationSpec.starting_at(order_flow_matrix, "DA", 10_000, seed=5))
    assert a != other


def test_initial_distribution_is_sampled():
    P = TransitionMatrix(("a", "b"), np.eye(2))
    firsts = [simulate_sequence(SimulationSpec(P, [0.3, 0.7], 1, seed=k)).codes[0] for k in range(2000)]
    assert abs(np.mean(firsts) - 0.7) < 0.04


def test_zero_probability_never_chosen(rng):
    p = random_stochastic(rng, 6)
    p[:, 2] = 0
    p[:, 5] = 0
    p /= p.sum(axis=1, keepdims=True)
    s = simulate_sequence(SimulationSpec(p, np.full(6, 1 / 6) * [1, 1, 0, 1, 1, 0] * 1.5, 50_000, seed=3))
    assert not np.isin(s.codes, [2, 5]).any()


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(initial=[0.5, 0.6], length=3),
        dict(initial=[-0.5, 1.5], length=3),
        dict(initial=[1.0], length=3),
        dict(initial=[1.0, 0.0], length=0),
        dict(initial=[1.0, 0.0], length=3, seed=-1),
        dict(initial=[1.0, 0.0], length=3, seed=2**64),
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(InvalidDistribution):
        SimulationSpec(np.eye(2), **kwargs)


def test_frequency_examples():
    f = empirical_state_frequencies(StateSequence.from_states(["AB", "AA", "AB", "AB"]))
    assert f[0] == 0.75 and f[1] == 0.25 and f[2:].sum() == 0
    assert empirical_state_frequencies(StateSequence.from_states(["CA"]))[9] == 1.0


def test_frequencies_converge_to_stationary(order_flow_matrix):
    s = simulate_sequence(SimulationSpec.starting_at(order_flow_matrix, "AB", 10**7, seed=4))
    pi = stationary_distribution(order_flow_matrix).pi
    assert np.max(np.abs(empirical_state_frequencies(s) - pi)) < 0.003


def test_recurrence_examples():
    r = empirical_recurrence_times(StateSequence([0, 1, 0, 1, 0], ("A", "B")))
    assert list(r.mean_gap) == [2.0, 2.0]
    cyc = SimulationSpec(np.roll(np.eye(3), 1, axis=1), [1, 0, 0], 30_000)
    r = empirical_recurrence_times(simulate_sequence(cyc))
    assert np.all(r.mean_gap == 3.0)


def test_recurrence_insufficient_visits():
    r = empirical_recurrence_times(StateSequence.from_states(["AB", "AA", "AB"]))
    assert r.mean_gap[0] == 2.0
    assert np.isnan(r.mean_gap[1])
    assert "AA" in r.insufficient and "CA" in r.insufficient


def test_recurrence_matches_reciprocal_stationary(rng):
    P = TransitionMatrix(tuple("abcd"), random_stochastic(rng, 4, floor=0.05))
    s = simulate_sequence(SimulationSpec.starting_at(P, "a", 10**7, seed=8))
    pi = stationary_distribution(P).pi
    gaps = empirical_recurrence_times(s).mean_gap
    assert np.all(np.abs(gaps * pi - 1) < 0.02)


def test_iid_sequence_frequencies():
    s = iid_sequence([0.2, 0.0, 0.8], ["x", "y", "z"], 100_000, seed=1)
    f = empirical_state_frequencies(s)
    assert f[1] == 0
    assert abs(f[2] - 0.8) < 0.01
    with pytest.raises(InvalidDistribution):
        iid_sequence([0.5, 0.6], ["x", "y"], 10)


def test_sequence_events_round_trip_through_ingest(order_flow_matrix):
    d = dt.date(2018, 11, 6)
    s = simulate_sequence(SimulationSpec.starting_at(order_flow_matrix, "AB", 5000, seed=6))
    events = list(sequence_events(s, "XOM", d, low=Decimal("80.00"), high=Decimal("82.40")))
    times = [e.timestamp for e in events]
    assert times == sorted(times)
    assert times[0] == dt.time(4) and times[-1] < dt.time(20)
    buf = io.StringIO()
    encode_events(events, buf)
    back = list(decode_stream(io.StringIO(buf.getvalue())))
    assert extract_sequences(back, {"XOM"})[("XOM", d)] == StateSequence(s.codes, ORDER_ALPHABET, "XOM", d)
    stats = daily_price_stats(back)[("XOM", d)]
    assert (stats.low, stats.high) == (Decimal("80.00"), Decimal("82.40"))


def test_planted_ranges_are_labeled():
    dates = [dt.date(2018, 11, 1) + dt.timedelta(days=k) for k in range(10)]
    ranges = planted_ranges(dates)
    labels = classify_days(ranges)
    high = [d for d, v in labels.items() if v.label is Label.HIGH]
    low = [d for d, v in labels.items() if v.label is Label.LOW]
    assert high == [dates[5]] and low == [dates[2]]
