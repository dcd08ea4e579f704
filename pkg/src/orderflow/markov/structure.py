"""Communicating classes, recurrence and periodicity of a finite chain."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import gcd

import numpy as np

from .counts import TransitionMatrix


@dataclass(frozen=True)
class ChainStructure:
    """Graph-theoretic classification of a transition matrix.

    ``periods[i]`` is 0 for a state that cannot return to itself at all.
    """

    communicating_classes: tuple[tuple[int, ...], ...]
    closed: tuple[bool, ...]
    periods: tuple[int, ...]
    recurrent: tuple[bool, ...]

    @property
    def irreducible(self) -> bool:
        return len(self.communicating_classes) == 1

    @property
    def aperiodic(self) -> bool:
        return all(p == 1 for p in self.periods)

    @property
    def ergodic(self) -> bool:
        return self.irreducible and self.aperiodic


def reachability(adj: np.ndarray) -> np.ndarray:
    """Boolean transitive-reflexive closure of an adjacency matrix."""
    reach = np.asarray(adj, dtype=bool) | np.eye(len(adj), dtype=bool)
    for k in range(len(adj)):
        reach |= np.outer(reach[:, k], reach[k, :])
    return reach


def _class_period(members: list[int], adj: np.ndarray) -> int:
    # BFS levels inside the class; every internal edge u->v contributes
    # level[u] + 1 - level[v] to the gcd.
    inside = set(members)
    level = {members[0]: 0}
    queue = deque([members[0]])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(adj[u]):
            v = int(v)
            if v in inside and v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    g = 0
    for u in members:
        for v in np.flatnonzero(adj[u]):
            v = int(v)
            if v in inside:
                g = gcd(g, abs(level[u] + 1 - level[v]))
    return g


def classify_structure(P: TransitionMatrix) -> ChainStructure:
    p = P.p if isinstance(P, TransitionMatrix) else np.asarray(P)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError(f"transition matrix must be square, got shape {p.shape}")
    adj = p > 0
    reach = reachability(adj)
    mutual = reach & reach.T

    classes: list[tuple[int, ...]] = []
    seen = np.zeros(len(p), dtype=bool)
    for i in range(len(p)):
        if not seen[i]:
            members = tuple(int(j) for j in np.flatnonzero(mutual[i]))
            seen[list(members)] = True
            classes.append(members)

    closed = []
    periods = [0] * len(p)
    recurrent = [False] * len(p)
    for members in classes:
        outside = np.ones(len(p), dtype=bool)
        outside[list(members)] = False
        is_closed = not adj[np.ix_(members, outside)].any()
        closed.append(is_closed)
        period = _class_period(list(members), adj)
        for i in members:
            periods[i] = period
            recurrent[i] = is_closed
    return ChainStructure(tuple(classes), tuple(closed), tuple(periods), tuple(recurrent))
