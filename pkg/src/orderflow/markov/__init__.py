"""First-order discrete-time Markov chain estimation and diagnostics."""

from .analytics import (
    ChainAnalytics,
    EntropyRateResult,
    SpectralSummary,
    StationaryDistribution,
    analyze_chain,
    entropy_rate,
    mean_recurrence_times,
    spectral_summary,
    stationary_by_power_iteration,
    stationary_distribution,
)
from .chisquare import ChiSquareResult, chi2_sf, chi_square_test, gamma_p, gamma_q
from .counts import TransitionCounts, TransitionMatrix, count_transitions, fit_mle, pool_counts
from .eigen import eigenvalues, hessenberg
from .structure import ChainStructure, classify_structure

__all__ = [
    "ChainAnalytics",
    "ChainStructure",
    "ChiSquareResult",
    "EntropyRateResult",
    "SpectralSummary",
    "StationaryDistribution",
    "TransitionCounts",
    "TransitionMatrix",
    "analyze_chain",
    "chi2_sf",
    "chi_square_test",
    "classify_structure",
    "count_transitions",
    "eigenvalues",
    "entropy_rate",
    "fit_mle",
    "gamma_p",
    "gamma_q",
    "hessenberg",
    "mean_recurrence_times",
    "pool_counts",
    "spectral_summary",
    "stationary_by_power_iteration",
    "stationary_distribution",
]
