import numpy as np
import pytest
import scipy.special
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from orderflow.errors import EmptyCounts
from orderflow.markov import TransitionCounts, chi2_sf, chi_square_test, count_transitions, gamma_p, gamma_q
from orderflow.simulate import SimulationSpec, iid_sequence, simulate_sequence


def counts(n):
    n = np.asarray(n)
    return TransitionCounts(tuple(f"s{i}" for i in range(len(n))), n)


def test_independent_table():
    res = chi_square_test(counts([[10, 10], [10, 10]]))
    assert res.statistic == 0.0
    assert res.p_value == 1.0
    assert not res.reject_null


def test_hand_evaluated_diagonal():
    res = chi_square_test(counts([[50, 0], [0, 50]]))
    assert np.array_equal(res.expected, np.full((2, 2), 25.0))
    assert res.statistic == 100.0
    assert res.dof == 1
    assert res.p_value < 0.001
    assert res.reject_null


def test_zero_marginals_are_dropped():
    n = np.zeros((10, 10), dtype=int)
    n[:3, :3] = [[5, 3, 2], [1, 7, 2], [2, 2, 6]]
    res = chi_square_test(TransitionCounts.zeros().__class__(tuple("abcdefghij"), n))
    ref = scipy.stats.chi2_contingency(n[:3, :3], correction=False)
    assert res.dof == 4
    assert res.statistic == pytest.approx(ref.statistic, rel=1e-12)
    assert res.p_value == pytest.approx(ref.pvalue, rel=1e-10)
    assert res.states_used == ("a", "b", "c")
    assert res.low_expected_cells == int(np.sum(ref.expected_freq < 5))


def test_rectangular_after_dropping():
    # "c" only appears as a destination
    res = chi_square_test(counts([[4, 6, 1], [7, 2, 3], [0, 0, 0]]))
    assert res.dof == (2 - 1) * (3 - 1)


def test_empty_counts():
    with pytest.raises(EmptyCounts):
        chi_square_test(counts([[0, 0], [0, 0]]))


def test_alpha_bounds():
    with pytest.raises(ValueError):
        chi_square_test(counts([[1, 2], [3, 4]]), alpha=0)


@settings(max_examples=200, deadline=None)
@given(arrays(np.int64, (4, 4), elements=st.integers(1, 500)))
def test_statistic_matches_scipy(n):
    res = chi_square_test(counts(n))
    ref = scipy.stats.chi2_contingency(n, correction=False)
    assert res.statistic == pytest.approx(ref.statistic, rel=1e-10, abs=1e-10)
    assert res.p_value == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-300)


@pytest.mark.parametrize("a", [0.5, 1.0, 4.5, 40.5, 200.0])
@pytest.mark.parametrize("x", [1e-6, 0.3, 1.0, 5.0, 40.0, 250.0, 1000.0])
def test_incomplete_gamma_against_scipy(a, x):
    assert gamma_q(a, x) == pytest.approx(scipy.special.gammaincc(a, x), rel=1e-10, abs=1e-300)
    assert gamma_p(a, x) == pytest.approx(scipy.special.gammainc(a, x), rel=1e-10, abs=1e-300)


@settings(max_examples=300)
@given(st.integers(1, 200), st.floats(0, 2000))
def test_chi2_sf_against_scipy(dof, stat):
    assert chi2_sf(stat, dof) == pytest.approx(scipy.stats.chi2.sf(stat, dof), rel=1e-9, abs=1e-280)


def test_chi2_sf_edges():
    assert chi2_sf(0.0, 81) == 1.0
    assert chi2_sf(5.0, 0) == 1.0
    assert chi2_sf(1e6, 81) == 0.0


def test_iid_sequences_are_calibrated():
    probs = np.full(10, 0.1)
    rejected = 0
    for seed in range(60):
        s = iid_sequence(probs, [f"s{i}" for i in range(10)], 20_000, seed=seed)
        rejected += chi_square_test(count_transitions(s)).reject_null
    # one percent nominal; allow generous slack at this sample size
    assert rejected <= 4


def test_markov_sequences_are_rejected(order_flow_matrix):
    for seed in range(10):
        s = simulate_sequence(SimulationSpec.starting_at(order_flow_matrix, "AB", 10**4, seed=seed))
        res = chi_square_test(count_transitions(s))
        assert res.p_value < 0.001
