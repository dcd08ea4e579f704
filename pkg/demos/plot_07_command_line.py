"""
End-to-end run through the command line
=======================================

Simulate a ten-day corpus with planted volatility, then classify and
analyze it exactly as a user would from the shell.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from orderflow.cli import main
from orderflow.markov import TransitionMatrix
from orderflow.report import matrix_csv
from orderflow.states import ORDER_ALPHABET

work = Path(tempfile.mkdtemp())
p = np.random.default_rng(9).dirichlet(np.ones(10) * 3, size=10)
(work / "truth.csv").write_text(matrix_csv(TransitionMatrix(ORDER_ALPHABET, p)))

# equivalent to: orderflow simulate --matrix truth.csv --length 20000 ...
main(["simulate", "--matrix", str(work / "truth.csv"), "--length", "20000", "--tickers", "XOM,CVX,JPM",
      "--window", "2018-11-01:2018-11-14", "--plant-volatility", "--seed", "7", "--output", str(work / "orders.csv")])

(work / "config.json").write_text(json.dumps({
    "inputs": ["orders.csv"],
    "sectors": {"Energy": ["XOM", "CVX"], "Finance": ["JPM"]},
    "window": "2018-11-01:2018-11-14",
}))
main(["analyze", "--config", str(work / "config.json"), "--out", str(work / "report")])

for f in sorted((work / "report").iterdir()):
    print(f.name)
print((work / "report" / "spectral.csv").read_text())
