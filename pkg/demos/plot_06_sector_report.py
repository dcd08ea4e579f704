"""
Sector chains, probes and heatmaps
==================================

Pool labeled stock-days per sector and regime, compare named transitions
between High and Low days and render the matrices.
"""

import datetime as dt
import tempfile
from pathlib import Path

import numpy as np

from orderflow.markov import TransitionMatrix, count_transitions
from orderflow.report import SectorSpec, build_sector_chains, emit_heatmap, emit_summary_tables, transition_probes
from orderflow.simulate import SimulationSpec, simulate_sequence
from orderflow.states import ORDER_ALPHABET
from orderflow.volatility import Label, VolatilityLabel

rng = np.random.default_rng(3)
calm = TransitionMatrix(ORDER_ALPHABET, rng.dirichlet(np.ones(10) * 2, size=10))
busy = TransitionMatrix(ORDER_ALPHABET, rng.dirichlet(np.ones(10) * 2, size=10))

high_day, low_day = dt.date(2018, 11, 8), dt.date(2018, 11, 5)
chains, labels = {}, []
seed = 0
for ticker in ["XOM", "CVX"]:
    for day, label, P in ((high_day, Label.HIGH, busy), (low_day, Label.LOW, calm)):
        seed += 1
        seq = simulate_sequence(SimulationSpec.starting_at(P, "AB", 50_000, seed=seed))
        chains[(ticker, day)] = count_transitions(seq)
        labels.append(VolatilityLabel(ticker, day, 0.0, 0.0, 0.0, label))

sets = build_sector_chains(chains, labels, [SectorSpec("Energy", ("XOM", "CVX"))])
for probe in transition_probes(sets):
    print(f"{probe.src}->{probe.dst}: high {probe.prob_high:.3f}  low {probe.prob_low:.3f}")

tables = emit_summary_tables(sets)
print(tables.stationary)
print(tables.spectral)

out = Path(tempfile.mkdtemp())
for s in sets:
    hm = emit_heatmap(s.matrix, f"Energy ({s.regime.value} volatility)")
    (out / f"energy_{s.regime.value.lower()}.svg").write_text(hm.svg)
print("heatmaps written to", out)
