"""Hypergeometric law of group compositions drawn without replacement.

When ``G`` agents are drawn uniformly without replacement from a swarm
of ``N`` agents of which ``K`` hold opinion X1, the number ``k`` of X1
opinions in the group follows the hypergeometric distribution

    P(X = k) = C(K, k) * C(N - K, G - k) / C(N, G).

``pmf`` evaluates this exactly: Python integers never overflow, so the
binomials are computed in full precision and only the final division
rounds (to nearest, once).  ``pmf_bruteforce`` is an independent
validation oracle that literally enumerates every subset.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

__all__ = ["PmfTable", "pmf", "pmf_bruteforce", "pmf_table"]

_SUM_TOL = 1e-12
_BRUTEFORCE_MAX_N = 24


@dataclass(frozen=True)
class PmfTable:
    """Probabilities of each composition ``k = 0..G`` at one swarm state."""

    group_size: int
    probabilities: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.probabilities) != self.group_size + 1:
            raise ValueError(
                f"table for group size {self.group_size} needs "
                f"{self.group_size + 1} entries, got {len(self.probabilities)}"
            )
        if any(not 0.0 <= p <= 1.0 for p in self.probabilities):
            raise ValueError("probabilities must lie in [0, 1]")
        total = math.fsum(self.probabilities)
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")

    def __iter__(self):
        return iter(self.probabilities)

    def __getitem__(self, k: int) -> float:
        return self.probabilities[k]


def _validate(n_agents: int, count_x1: int, group_size: int) -> None:
    if not 0 <= count_x1 <= n_agents:
        raise ValueError(
            f"count_x1 must lie in [0, {n_agents}], got {count_x1}"
        )
    if not 1 <= group_size <= n_agents:
        raise ValueError(
            f"group size must lie in [1, {n_agents}], got {group_size}"
        )


def pmf(n_agents: int, count_x1: int, group_size: int, k: int) -> float:
    """Probability of drawing exactly ``k`` X1 opinions in one group.

    Parameters
    ----------
    n_agents : population size N.
    count_x1 : number K of X1 opinions in the population.
    group_size : number G of agents drawn without replacement.
    k : composition whose probability is wanted, 0 <= k <= G.

    Compositions outside the feasible support (more X1 than the
    population holds, or more X2 than it holds) have probability 0.
    """
    _validate(n_agents, count_x1, group_size)
    if not 0 <= k <= group_size:
        raise ValueError(f"composition k must lie in [0, {group_size}], got {k}")
    if k > count_x1 or group_size - k > n_agents - count_x1:
        return 0.0
    favorable = math.comb(count_x1, k) * math.comb(
        n_agents - count_x1, group_size - k
    )
    return favorable / math.comb(n_agents, group_size)


def pmf_table(n_agents: int, count_x1: int, group_size: int) -> PmfTable:
    """Full composition distribution for ``k = 0..G`` at one state."""
    return PmfTable(
        group_size,
        tuple(pmf(n_agents, count_x1, group_size, k) for k in range(group_size + 1)),
    )


def pmf_bruteforce(n_agents: int, count_x1: int, group_size: int, k: int) -> float:
    """Validation oracle: enumerate all C(N, G) subsets and count hits.

    Builds a population of ``count_x1`` ones and ``N - count_x1`` zeros,
    walks every size-G subset, and returns the exact fraction whose
    element sum equals ``k``.  All arithmetic is integer until the final
    division.  Limited to ``N <= 24`` to keep the enumeration tractable.
    """
    if n_agents > _BRUTEFORCE_MAX_N:
        raise ValueError(
            f"subset enumeration is limited to N <= {_BRUTEFORCE_MAX_N}, "
            f"got {n_agents}"
        )
    _validate(n_agents, count_x1, group_size)
    if not 0 <= k <= group_size:
        raise ValueError(f"composition k must lie in [0, {group_size}], got {k}")
    population = [1] * count_x1 + [0] * (n_agents - count_x1)
    hits = sum(
        1
        for draw in itertools.combinations(population, group_size)
        if sum(draw) == k
    )
    return hits / math.comb(n_agents, group_size)
