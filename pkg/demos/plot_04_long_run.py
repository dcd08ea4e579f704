"""
Long-run behaviour of a fitted chain
====================================

Stationary distribution, mean recurrence times, spectrum and entropy rate
for a chain shaped like real order flow: adds and deletes dominate, fills
and cancels are rare.
"""

import numpy as np

from orderflow.markov import TransitionMatrix, analyze_chain, stationary_by_power_iteration
from orderflow.states import ORDER_ALPHABET

rng = np.random.default_rng(0)
weights = np.array([25, 25, 24, 24, 1.0, 1.0, 0.3, 0.3, 0.1, 0.1])
p = rng.dirichlet(weights * 4, size=10)
P = TransitionMatrix(ORDER_ALPHABET, p)

a = analyze_chain(P)
print("ergodic:", a.structure.ergodic)
for s, pi, mu in zip(P.states, a.stationary.pi, a.mean_recurrence):
    print(f"{s}: pi = {pi:.4f}  return time = {mu:8.1f}")

# the linear solve agrees with brute-force iteration
print("power-iteration gap:", np.max(np.abs(stationary_by_power_iteration(P) - a.stationary.pi)))

sp = a.spectral
print(f"SLEM = {sp.slem:.4f}, gap = {sp.gap_absolute:.4f}, relaxation = {sp.relaxation_time:.4f}")
print(f"entropy rate = {a.entropy.bits_per_step:.3f} of {a.entropy.max_bits:.3f} bits")
