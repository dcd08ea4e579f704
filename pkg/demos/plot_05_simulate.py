"""
Simulating order sequences
==========================

Seeded sampling from a transition matrix, then checking the sample against
the analytic answers.
"""

import numpy as np

from orderflow.markov import TransitionMatrix, count_transitions, fit_mle, stationary_distribution
from orderflow.simulate import (
    SimulationSpec,
    empirical_recurrence_times,
    empirical_state_frequencies,
    simulate_sequence,
)

P = TransitionMatrix(("AB", "AA", "DB", "DA"), [
    [0.20, 0.40, 0.30, 0.10],
    [0.45, 0.15, 0.10, 0.30],
    [0.50, 0.20, 0.20, 0.10],
    [0.20, 0.50, 0.10, 0.20],
])
spec = SimulationSpec.starting_at(P, "AB", 10**6, seed=42)
seq = simulate_sequence(spec)
print(seq.states[:12])

# same seed, same sequence
print("repeatable:", simulate_sequence(spec) == seq)

pi = stationary_distribution(P).pi
print("frequency error:", np.max(np.abs(empirical_state_frequencies(seq) - pi)))
print("return times:", np.round(empirical_recurrence_times(seq).mean_gap, 3), "vs", np.round(1 / pi, 3))
print("refit error:", np.max(np.abs(fit_mle(count_transitions(seq)).p - P.p)))
