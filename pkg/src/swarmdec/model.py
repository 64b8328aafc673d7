"""State space and interaction rules of a binary-opinion swarm.

A swarm of ``N`` agents, each holding opinion ``X1`` or ``X2``, is fully
described by the pair ``(N, K)`` where ``K`` counts the agents holding
``X1``.  Agents interact in groups of odd size ``G`` drawn uniformly
without replacement; depending on the rule polarity assigned to the
group's composition, one agent converts toward the group majority
(positive feedback) or toward the group minority (negative feedback).
Spontaneous noise flips move single agents in either direction.

Every event changes ``K`` by at most one, so the macroscopic order
parameter ``z = 2K/N - 1`` walks on the lattice ``z_K = 2K/N - 1``.
All values in this module are immutable and all functions are pure,
so they can be shared freely across threads.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "FlipDirection",
    "NoiseSpec",
    "RulePolarity",
    "RuleSet",
    "SwarmState",
    "apply_noise_flip",
    "apply_rule",
    "enumerate_rulesets",
    "signed_weight",
    "state_of_z",
    "z_of",
]


class RulePolarity(Enum):
    """Whether a group interaction reinforces its majority or its minority."""

    MAJORITY = "M"
    MINORITY = "m"


class FlipDirection(Enum):
    """Direction of a spontaneous noise-driven opinion flip."""

    X1_TO_X2 = "x1->x2"
    X2_TO_X1 = "x2->x1"


@dataclass(frozen=True)
class SwarmState:
    """Macroscopic swarm state: ``n_agents`` total, ``count_x1`` holding X1.

    The swarm size must be odd so that the population can never split
    into an exact tie.
    """

    n_agents: int
    count_x1: int

    def __post_init__(self) -> None:
        if self.n_agents <= 0 or self.n_agents % 2 == 0:
            raise ValueError(
                f"swarm size must be a positive odd integer, got {self.n_agents}"
            )
        if not 0 <= self.count_x1 <= self.n_agents:
            raise ValueError(
                f"count_x1 must lie in [0, {self.n_agents}], got {self.count_x1}"
            )

    @property
    def count_x2(self) -> int:
        return self.n_agents - self.count_x1

    @property
    def z(self) -> float:
        """Order parameter x1-fraction minus x2-fraction, in [-1, 1]."""
        return 2.0 * self.count_x1 / self.n_agents - 1.0

    @property
    def is_consensus(self) -> bool:
        return self.count_x1 in (0, self.n_agents)


@dataclass(frozen=True)
class NoiseSpec:
    """Macroscopic noise level ``epsilon`` (drift per unit z per unit time)."""

    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if not self.epsilon >= 0.0 or not math.isfinite(self.epsilon):
            raise ValueError(f"noise level must be finite and >= 0, got {self.epsilon}")


@dataclass(frozen=True)
class RuleSet:
    """A symmetric assignment of rule polarities for one group size.

    ``polarities[i]`` governs both group compositions whose minority
    count is ``i + 1``; mirror compositions (``k`` and ``G - k`` agents
    of X1) therefore share a polarity by construction.  A group size
    ``G`` has ``(G - 1) // 2`` independent polarity slots, hence
    ``2 ** ((G - 1) // 2)`` distinct rule sets.
    """

    group_size: int
    polarities: tuple[RulePolarity, ...]

    def __post_init__(self) -> None:
        g = self.group_size
        if g < 3 or g % 2 == 0:
            raise ValueError(f"group size must be an odd integer >= 3, got {g}")
        expected = (g - 1) // 2
        if len(self.polarities) != expected:
            raise ValueError(
                f"group size {g} needs {expected} polarity entries, "
                f"got {len(self.polarities)}"
            )
        if not all(isinstance(p, RulePolarity) for p in self.polarities):
            raise TypeError("polarities must be RulePolarity values")

    @property
    def label(self) -> str:
        """Compact encoding, one 'M'/'m' per minority count 1..(G-1)/2."""
        return "".join(p.value for p in self.polarities)

    def polarity_at(self, k: int) -> RulePolarity:
        """Polarity of the rule that fires when ``k`` of the G drawn hold X1."""
        g = self.group_size
        if not 1 <= k <= g - 1:
            raise ValueError(f"composition k must lie in [1, {g - 1}], got {k}")
        return self.polarities[min(k, g - k) - 1]

    def signed_weight(self, k: int) -> int:
        """Change of count_x1 when the rule at composition ``k`` fires."""
        if k in (0, self.group_size):
            return 0
        return signed_weight(k, self.group_size, self.polarity_at(k))

    def complement(self) -> "RuleSet":
        """The rule set with every polarity flipped."""
        flipped = tuple(
            RulePolarity.MINORITY if p is RulePolarity.MAJORITY else RulePolarity.MAJORITY
            for p in self.polarities
        )
        return RuleSet(self.group_size, flipped)


def z_of(state: SwarmState) -> float:
    """Order parameter ``2*K/N - 1`` of a swarm state."""
    return 2.0 * state.count_x1 / state.n_agents - 1.0


def state_of_z(n_agents: int, z: float) -> SwarmState:
    """Nearest lattice state for a continuous order parameter.

    ``count_x1`` is ``N*(z+1)/2`` rounded half away from zero and clamped
    to ``[0, N]``, which keeps the mapping symmetric about ``z = 0``.
    """
    if not -1.0 <= z <= 1.0:
        raise ValueError(f"order parameter must lie in [-1, 1], got {z}")
    # The pre-rounding value is always >= 0, so half-away-from-zero
    # reduces to floor(x + 1/2).
    count = math.floor(n_agents * (z + 1.0) / 2.0 + 0.5)
    count = min(max(count, 0), n_agents)
    return SwarmState(n_agents, count)


def signed_weight(k: int, group_size: int, polarity: RulePolarity) -> int:
    """Direction in which ``count_x1`` moves when a rule fires.

    For a drawn group containing ``k`` agents of opinion X1, a majority
    rule converts one agent toward the more numerous side (``+1`` if X1
    is the majority, ``-1`` otherwise) and a minority rule does the
    opposite.  Uniform groups (``k = 0`` or ``k = G``) contain no agent
    to convert, so their weight is zero.
    """
    if not 0 <= k <= group_size:
        raise ValueError(f"composition k must lie in [0, {group_size}], got {k}")
    if k == 0 or k == group_size:
        return 0
    toward_majority = (2 * k > group_size) - (2 * k < group_size)
    if polarity is RulePolarity.MAJORITY:
        return toward_majority
    return -toward_majority


def apply_rule(
    state: SwarmState, k: int, group_size: int, polarity: RulePolarity
) -> SwarmState:
    """State after firing the rule for a group with ``k`` X1 opinions.

    Raises ValueError if the update would leave ``[0, N]``; that can only
    happen when the caller supplies a composition that is infeasible for
    the current state.
    """
    delta = signed_weight(k, group_size, polarity)
    new_count = state.count_x1 + delta
    if not 0 <= new_count <= state.n_agents:
        raise ValueError(
            f"firing at composition k={k} is infeasible for count_x1="
            f"{state.count_x1} of {state.n_agents}"
        )
    return SwarmState(state.n_agents, new_count)


def apply_noise_flip(state: SwarmState, direction: FlipDirection) -> SwarmState:
    """State after one spontaneous opinion flip in the given direction."""
    if direction is FlipDirection.X1_TO_X2:
        if state.count_x1 < 1:
            raise ValueError("no X1 agent available to flip")
        return SwarmState(state.n_agents, state.count_x1 - 1)
    if state.count_x1 > state.n_agents - 1:
        raise ValueError("no X2 agent available to flip")
    return SwarmState(state.n_agents, state.count_x1 + 1)


def enumerate_rulesets(group_size: int) -> list[RuleSet]:
    """All ``2 ** ((G-1)/2)`` rule sets for a group size, in label order.

    Labels sort with 'M' before 'm', so the listing starts with the
    all-majority set and ends with the all-minority one.
    """
    if group_size < 3 or group_size % 2 == 0:
        raise ValueError(
            f"group size must be an odd integer >= 3, got {group_size}"
        )
    slots = (group_size - 1) // 2
    return [
        RuleSet(group_size, combo)
        for combo in itertools.product(
            (RulePolarity.MAJORITY, RulePolarity.MINORITY), repeat=slots
        )
    ]
