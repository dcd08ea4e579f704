import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orderflow.errors import NotErgodic, ZeroStationaryMass
from orderflow.markov import (
    StationaryDistribution,
    TransitionMatrix,
    analyze_chain,
    entropy_rate,
    mean_recurrence_times,
    spectral_summary,
    stationary_by_power_iteration,
    stationary_distribution,
)
from orderflow.simulate import SimulationSpec, empirical_state_frequencies, simulate_sequence

from .conftest import random_stochastic

TWO = TransitionMatrix(("a", "b"), [[0.5, 0.5], [0.25, 0.75]])
UNIFORM = TransitionMatrix(tuple("abcdefghij"), np.full((10, 10), 0.1))


def test_stationary_two_state():
    pi = stationary_distribution(TWO)
    assert np.allclose(pi.pi, [1 / 3, 2 / 3], rtol=0, atol=1e-15)
    assert pi["b"] == pytest.approx(2 / 3)
    assert pi.residual < 1e-15


def test_stationary_uniform():
    pi = stationary_distribution(UNIFORM)
    assert np.allclose(pi.pi, 0.1, rtol=0, atol=1e-15)


def test_stationary_requires_ergodic():
    with pytest.raises(NotErgodic):
        stationary_distribution(np.eye(2))
    with pytest.raises(NotErgodic):
        stationary_distribution(np.array([[0.0, 1.0], [1.0, 0.0]]))


def _matrix_power_rows(p, k=20):
    m = p.copy()
    for _ in range(k):
        m = m @ m
    return m


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_stationary_against_matrix_power(r, seed):
    p = random_stochastic(np.random.default_rng(seed), r, floor=1e-3)
    pi = stationary_distribution(p)
    limit = _matrix_power_rows(p)
    assert np.max(np.abs(limit - pi.pi)) < 1e-8
    assert np.max(np.abs(stationary_by_power_iteration(p) - pi.pi)) < 1e-9
    assert np.max(np.abs(pi.pi @ p - pi.pi)) < 1e-10


def test_stationary_with_tiny_mass(order_flow_matrix):
    pi = stationary_distribution(order_flow_matrix)
    assert np.all(pi.pi > 0)
    assert abs(pi.pi.sum() - 1) < 1e-15
    assert np.max(np.abs(stationary_by_power_iteration(order_flow_matrix) - pi.pi)) < 1e-10


def test_stationary_matches_long_simulation(order_flow_matrix):
    pi = stationary_distribution(order_flow_matrix)
    s = simulate_sequence(SimulationSpec.starting_at(order_flow_matrix, "AB", 10**7, seed=99))
    assert np.max(np.abs(empirical_state_frequencies(s) - pi.pi)) < 0.003


def test_mean_recurrence_examples():
    assert np.allclose(mean_recurrence_times(stationary_distribution(TWO)), [3.0, 1.5], rtol=1e-14)
    assert np.allclose(mean_recurrence_times(stationary_distribution(UNIFORM)), 10.0, rtol=1e-14)


def test_mean_recurrence_zero_mass():
    with pytest.raises(ZeroStationaryMass):
        mean_recurrence_times(StationaryDistribution(("a", "b"), np.array([1.0, 0.0]), 0.0))


def test_spectral_two_state():
    s = spectral_summary(TWO)
    assert np.allclose(s.eigenvalues, [1.0, 0.25], atol=1e-15)
    assert s.slem == pytest.approx(0.25, abs=1e-15)
    assert s.gap_absolute == pytest.approx(0.75, abs=1e-15)
    assert s.relaxation_time == pytest.approx(4 / 3, abs=1e-14)
    assert s.gap == pytest.approx(0.75, abs=1e-15)


def test_spectral_uniform():
    s = spectral_summary(UNIFORM)
    assert s.gap_absolute == pytest.approx(1.0, abs=1e-13)
    assert s.relaxation_time == pytest.approx(1.0, abs=1e-13)


def test_spectral_negative_and_complex_eigenvalues():
    # -0.8 dominates in modulus, so the gap measures differ
    p = np.array([[0.1, 0.9], [0.9, 0.1]])
    s = spectral_summary(p)
    assert s.slem == pytest.approx(0.8)
    assert s.gap == pytest.approx(1.8)
    cyc = 0.9 * np.roll(np.eye(3), 1, axis=1) + 0.1 / 3
    s = spectral_summary(cyc)
    assert s.slem == pytest.approx(0.9, abs=1e-12)


def test_spectral_single_state():
    s = spectral_summary(np.array([[1.0]]))
    assert s.slem == 0.0 and s.relaxation_time == 1.0


def test_spectral_reducible_has_zero_gap():
    s = spectral_summary(np.eye(3))
    assert s.gap_absolute == pytest.approx(0.0, abs=1e-15)
    assert s.relaxation_time == math.inf


def test_entropy_examples():
    fair = TransitionMatrix(("a", "b"), np.full((2, 2), 0.5))
    h = entropy_rate(fair, stationary_distribution(fair))
    assert h.bits_per_step == 1.0 and h.max_bits == 1.0
    ident = entropy_rate(np.eye(3), np.full(3, 1 / 3))
    assert ident.bits_per_step == 0.0
    h = entropy_rate(UNIFORM, stationary_distribution(UNIFORM))
    assert h.bits_per_step == pytest.approx(math.log2(10), abs=1e-12)
    assert round(h.max_bits, 3) == 3.322


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_entropy_bounded_and_matches_direct_sum(r, seed):
    p = random_stochastic(np.random.default_rng(seed), r)
    p[p < 0.02] = 0
    p /= p.sum(axis=1, keepdims=True)
    try:
        pi = stationary_distribution(p)
    except NotErgodic:
        return
    h = entropy_rate(p, pi).bits_per_step
    direct = -sum(pi.pi[i] * p[i, j] * math.log2(p[i, j]) for i in range(r) for j in range(r) if p[i, j] > 0)
    assert h == pytest.approx(direct, abs=1e-12)
    assert 0 <= h <= math.log2(r) + 1e-12


def test_analyze_chain_bundle(order_flow_matrix):
    a = analyze_chain(order_flow_matrix)
    assert a.structure.ergodic
    assert np.allclose(a.mean_recurrence * a.stationary.pi, 1.0, rtol=0, atol=1e-12)
    assert a.spectral.relaxation_time == 1.0 / a.spectral.gap_absolute
    assert 0 < a.entropy.bits_per_step < a.entropy.max_bits
