import numpy as np
import pytest

from orderflow.markov import TransitionMatrix
from orderflow.states import ORDER_ALPHABET


def random_stochastic(rng, r, floor=0.0):
    """Random row-stochastic matrix whose entries are all >= ``floor``."""
    raw = rng.dirichlet(np.ones(r), size=r)
    return floor + (1.0 - r * floor) * raw


# Order-flow-like structure: add orders mostly followed by adds/deletes on
# either side, fills and executions rare, cancels rarer still.
_ORDER_FLOW = np.array(
    [
        # AB    AA    DB    DA    FB    FA    EB    EA    CB    CA
        [0.22, 0.26, 0.26, 0.22, 0.012, 0.010, 0.008, 0.004, 0.004, 0.002],  # AB
        [0.26, 0.22, 0.22, 0.26, 0.010, 0.012, 0.004, 0.008, 0.002, 0.004],  # AA
        [0.30, 0.22, 0.22, 0.22, 0.012, 0.008, 0.008, 0.004, 0.004, 0.002],  # DB
        [0.22, 0.30, 0.22, 0.22, 0.008, 0.012, 0.004, 0.008, 0.002, 0.004],  # DA
        [0.10, 0.52, 0.08, 0.10, 0.16, 0.02, 0.01, 0.005, 0.004, 0.001],  # FB
        [0.51, 0.10, 0.10, 0.08, 0.02, 0.16, 0.005, 0.01, 0.001, 0.014],  # FA
        [0.20, 0.30, 0.10, 0.10, 0.10, 0.02, 0.15, 0.01, 0.01, 0.01],  # EB
        [0.30, 0.20, 0.10, 0.10, 0.02, 0.10, 0.01, 0.15, 0.01, 0.01],  # EA
        [0.30, 0.20, 0.15, 0.15, 0.02, 0.02, 0.01, 0.01, 0.13, 0.01],  # CB
        [0.20, 0.30, 0.15, 0.15, 0.02, 0.02, 0.01, 0.01, 0.01, 0.13],  # CA
    ]
)


@pytest.fixture
def order_flow_matrix():
    p = _ORDER_FLOW / _ORDER_FLOW.sum(axis=1, keepdims=True)
    return TransitionMatrix(ORDER_ALPHABET, p)


@pytest.fixture
def rng():
    return np.random.default_rng(20181106)
