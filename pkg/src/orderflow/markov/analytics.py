"""Long-run diagnostics of a fitted chain.

Stationary distribution, mean recurrence times, eigenvalue spectrum with
spectral gap / relaxation time, and entropy rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import NoConvergence, NotErgodic, SingularSystem, ZeroStationaryMass
from .counts import TransitionMatrix
from .eigen import eigenvalues
from .structure import ChainStructure, classify_structure

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    states: tuple[str, ...]
    pi: np.ndarray
    residual: float

    def __getitem__(self, state: str) -> float:
        return float(self.pi[self.states.index(state)])


def _as_matrix(P) -> TransitionMatrix:
    if isinstance(P, TransitionMatrix):
        return P
    p = np.asarray(P, dtype=float)
    return TransitionMatrix(tuple(str(i) for i in range(len(p))), p)


def stationary_distribution(
    P: TransitionMatrix, structure: ChainStructure | None = None
) -> StationaryDistribution:
    """Solve ``pi = pi P`` with ``sum(pi) = 1`` for an ergodic chain.

    The last balance equation is replaced by the normalization row and the
    system solved by LU with partial pivoting.
    """
    P = _as_matrix(P)
    structure = structure or classify_structure(P)
    if not structure.ergodic:
        raise NotErgodic(
            f"chain has {len(structure.communicating_classes)} communicating classes, "
            f"periods {sorted(set(structure.periods))}"
        )
    p = P.p
    r = len(p)
    a = p.T - np.eye(r)
    a[-1, :] = 1.0
    b = np.zeros(r)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None
    if not np.all(np.isfinite(pi)):
        raise SingularSystem("non-finite stationary solution")
    # roundoff can leave -1e-18 where the true mass is tiny
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = float(np.max(np.abs(pi @ p - pi)))
    if residual >= RESIDUAL_TOL:
        raise SingularSystem(f"stationary residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    return StationaryDistribution(P.states, pi, residual)


def stationary_by_power_iteration(
    P: TransitionMatrix, tol: float = 1e-12, max_iter: int = 1_000_000
) -> np.ndarray:
    """Cross-check for :func:`stationary_distribution`: iterate ``x <- x P``
    from the uniform vector until successive iterates differ by < ``tol``."""
    p = _as_matrix(P).p
    x = np.full(len(p), 1.0 / len(p))
    for _ in range(max_iter):
        nxt = x @ p
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - x)) < tol:
            return nxt
        x = nxt
    raise NoConvergence(f"power iteration did not settle within {max_iter} steps")


def mean_recurrence_times(pi: StationaryDistribution) -> np.ndarray:
    """Expected return time of each state, ``1 / pi_j``.

    For a positive-recurrent ergodic chain this equals the mean of the
    first-return time distribution.
    """
    vec = pi.pi if isinstance(pi, StationaryDistribution) else np.asarray(pi, dtype=float)
    if np.any(vec <= 0):
        zero = np.flatnonzero(vec <= 0).tolist()
        raise ZeroStationaryMass(f"states {zero} carry no stationary mass")
    return 1.0 / vec


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    """Eigenvalue summary of a transition matrix.

    ``slem`` is the largest modulus among eigenvalues other than the unit
    eigenvalue, ``gap_absolute = 1 - slem`` and ``relaxation_time`` is its
    reciprocal. ``gap = 1 - lambda_2`` uses the second-largest real part.
    """

    eigenvalues: np.ndarray
    slem: float
    gap_absolute: float
    gap: float
    relaxation_time: float


def spectral_summary(P: TransitionMatrix, max_iter: int = 60) -> SpectralSummary:
    p = _as_matrix(P).p
    vals = eigenvalues(p, max_iter=max_iter)
    unit = int(np.argmin(np.abs(vals - 1.0)))
    rest = np.delete(vals, unit)
    if rest.size:
        slem = float(np.max(np.abs(rest)))
        lambda2 = float(np.max(rest.real))
    else:
        slem = lambda2 = 0.0
    gap_abs = 1.0 - slem
    relax = 1.0 / gap_abs if gap_abs > 0 else math.inf
    return SpectralSummary(vals, slem, gap_abs, 1.0 - lambda2, relax)


@dataclass(frozen=True)
class EntropyRateResult:
    bits_per_step: float
    max_bits: float


def entropy_rate(P: TransitionMatrix, pi: StationaryDistribution) -> EntropyRateResult:
    """``H = -sum_ij pi_i p_ij log2 p_ij`` with ``0 log 0 = 0``."""
    p = _as_matrix(P).p
    vec = pi.pi if isinstance(pi, StationaryDistribution) else np.asarray(pi, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(p > 0, p * np.log2(p), 0.0)
    h = float(-(vec @ plogp.sum(axis=1)))
    return EntropyRateResult(max(h, 0.0), math.log2(len(p)))


@dataclass(frozen=True, eq=False)
class ChainAnalytics:
    matrix: TransitionMatrix
    structure: ChainStructure
    stationary: StationaryDistribution
    mean_recurrence: np.ndarray
    spectral: SpectralSummary
    entropy: EntropyRateResult


def analyze_chain(P: TransitionMatrix) -> ChainAnalytics:
    """All diagnostics for one ergodic chain.

    Raises :class:`~orderflow.errors.NotErgodic` for reducible or periodic
    chains, whose stationary quantities are not unique.
    """
    structure = classify_structure(P)
    pi = stationary_distribution(P, structure)
    return ChainAnalytics(
        matrix=P,
        structure=structure,
        stationary=pi,
        mean_recurrence=mean_recurrence_times(pi),
        spectral=spectral_summary(P),
        entropy=entropy_rate(P, pi),
    )
