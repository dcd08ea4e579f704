"""Chi-square test of serial independence on a transition count table."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyCounts, NoConvergence
from .counts import TransitionCounts

_TINY = 1e-300
_MAX_ITER = 10_000


def _gamma_series(a: float, x: float, tol: float) -> float:
    # P(a, x) by its power series; converges fast for x < a + 1.
    term = total = 1.0 / a
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * tol:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise NoConvergence(f"incomplete gamma series did not converge (a={a}, x={x})")


def _gamma_cf(a: float, x: float, tol: float) -> float:
    # Q(a, x) by its continued fraction (modified Lentz); for x >= a + 1.
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < tol:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise NoConvergence(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def gamma_q(a: float, x: float, tol: float = 1e-15) -> float:
    """Regularized upper incomplete gamma function ``Q(a, x)``."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x, tol)
    return _gamma_cf(a, x, tol)


def gamma_p(a: float, x: float, tol: float = 1e-15) -> float:
    """Regularized lower incomplete gamma function ``P(a, x)``."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x, tol)
    return 1.0 - _gamma_cf(a, x, tol)


def chi2_sf(statistic: float, dof: int) -> float:
    """Upper tail probability of the chi-square distribution."""
    if dof <= 0:
        return 1.0
    return min(1.0, max(0.0, gamma_q(dof / 2.0, statistic / 2.0)))


@dataclass(frozen=True, eq=False)
class ChiSquareResult:
    statistic: float
    expected: np.ndarray
    dof: int
    p_value: float
    low_expected_cells: int
    alpha: float
    states_used: tuple[str, ...]

    @property
    def reject_null(self) -> bool:
        """True when serial independence is rejected at ``alpha``."""
        return self.p_value < self.alpha


def chi_square_test(counts: TransitionCounts, alpha: float = 0.01) -> ChiSquareResult:
    """Pearson test of independence between consecutive states.

    Expected counts are ``e_ij = (row_i total)(column_j total) / N``. Rows
    and columns with a zero marginal are dropped; the degrees of freedom are
    ``(rows kept - 1) * (columns kept - 1)``, i.e. ``(r - 1)**2`` whenever
    the same ``r`` states appear as sources and destinations. Cells with
    ``e_ij < 5`` are counted in ``low_expected_cells`` but still used.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    n = counts.counts.astype(float)
    total = n.sum()
    if total == 0:
        raise EmptyCounts("chi-square test needs at least one transition")
    row = n.sum(axis=1)
    col = n.sum(axis=0)
    expected = np.outer(row, col) / total

    rows_kept = row > 0
    cols_kept = col > 0
    cell = np.outer(rows_kept, cols_kept)
    diff = n[cell] - expected[cell]
    statistic = float(np.sum(diff * diff / expected[cell]))
    dof = int((rows_kept.sum() - 1) * (cols_kept.sum() - 1))
    used = rows_kept | cols_kept
    return ChiSquareResult(
        statistic=statistic,
        expected=expected,
        dof=dof,
        p_value=chi2_sf(statistic, dof),
        low_expected_cells=int(np.sum(expected[cell] < 5.0)),
        alpha=alpha,
        states_used=tuple(s for s, u in zip(counts.states, used) if u),
    )
