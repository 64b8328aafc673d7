"""Exact event-driven simulation of the swarm (Gillespie direct method).

Three event channels compete as independent Poisson clocks:

* group interactions, at total rate ``rule_rate * N``;
* noise flips X1 -> X2, at rate ``noise_rate * K``;
* noise flips X2 -> X1, at rate ``noise_rate * (N - K)``.

Waiting times are exponential in the total propensity and the channel
is chosen proportionally to its rate.  A group event draws ``G`` agents
uniformly without replacement; the composition ``k`` (number of X1
opinions drawn) selects the rule that fires.  Uniform draws
(``k = 0`` or ``k = G``) convert nobody and are recorded as null events.

With ``rule_rate = 0.5`` and ``noise_rate = epsilon / 2`` the expected
motion of ``z = 2K/N - 1`` per unit time equals the analytic drift
curve of :mod:`swarmdec.drift` with noise level ``epsilon``, so
simulated time is directly comparable to the drift model.

A single run is strictly sequential; independent replicates may run
concurrently, each with its own generator (seed ``base + index``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .model import (
    FlipDirection,
    RuleSet,
    SwarmState,
    apply_noise_flip,
    apply_rule,
)

__all__ = [
    "EventKind",
    "FrozenSystemError",
    "NoiseFlip",
    "NullDraw",
    "Propensities",
    "RuleFired",
    "SimConfig",
    "Trajectory",
    "TrajectoryEvent",
    "draw_group_composition",
    "event_label",
    "propensities",
    "simulate",
    "step",
    "trajectory_csv_lines",
    "verify_trajectory",
]


class FrozenSystemError(RuntimeError):
    """Every propensity is zero; no further event can occur."""


@dataclass(frozen=True)
class SimConfig:
    """Rates and stopping bounds for a simulation run.

    ``noise_rate`` is the per-agent flip rate; a macroscopic noise
    level ``epsilon`` corresponds to ``noise_rate = epsilon / 2``
    (see :meth:`from_noise_level`).  At least one stopping condition
    (``max_events``, ``t_max`` or ``stop_at_consensus``) must be set.
    """

    rule_rate: float = 0.5
    noise_rate: float = 0.0
    max_events: int | None = None
    t_max: float | None = None
    record_null_draws: bool = True
    stop_at_consensus: bool = False

    def __post_init__(self) -> None:
        if self.rule_rate < 0:
            raise ValueError(f"rule rate must be >= 0, got {self.rule_rate}")
        if self.noise_rate < 0:
            raise ValueError(f"noise rate must be >= 0, got {self.noise_rate}")
        if self.max_events is not None and self.max_events < 1:
            raise ValueError(f"max_events must be >= 1, got {self.max_events}")
        if self.t_max is not None and not self.t_max > 0:
            raise ValueError(f"t_max must be > 0, got {self.t_max}")
        if self.max_events is None and self.t_max is None and not self.stop_at_consensus:
            raise ValueError(
                "unbounded run: set max_events, t_max or stop_at_consensus"
            )

    @classmethod
    def from_noise_level(cls, epsilon: float, **kwargs) -> "SimConfig":
        """Config whose per-agent flip rate realizes noise level ``epsilon``."""
        return cls(noise_rate=epsilon / 2.0, **kwargs)


@dataclass(frozen=True)
class Propensities:
    """Instantaneous event rates of the three channels."""

    group_event: float
    noise_x1_to_x2: float
    noise_x2_to_x1: float

    @property
    def total(self) -> float:
        return self.group_event + self.noise_x1_to_x2 + self.noise_x2_to_x1


def propensities(state: SwarmState, config: SimConfig) -> Propensities:
    """Event rates at a state: ``r*N`` for groups, ``c*K`` / ``c*(N-K)`` for noise."""
    return Propensities(
        config.rule_rate * state.n_agents,
        config.noise_rate * state.count_x1,
        config.noise_rate * state.count_x2,
    )


@dataclass(frozen=True, slots=True)
class RuleFired:
    """A group draw with composition ``k`` whose rule converted one agent."""

    k: int


@dataclass(frozen=True, slots=True)
class NullDraw:
    """A uniform group draw (``k`` is 0 or G); nothing changes."""

    k: int


@dataclass(frozen=True, slots=True)
class NoiseFlip:
    """A spontaneous single-agent flip."""

    direction: FlipDirection


EventKind = Union[RuleFired, NullDraw, NoiseFlip]

_NOISE_LABELS = {
    FlipDirection.X1_TO_X2: "noise12",
    FlipDirection.X2_TO_X1: "noise21",
}


def event_label(kind: EventKind) -> str:
    """CSV label of an event kind: rule, null, noise12 or noise21."""
    if isinstance(kind, RuleFired):
        return "rule"
    if isinstance(kind, NullDraw):
        return "null"
    return _NOISE_LABELS[kind.direction]


@dataclass(frozen=True, slots=True)
class TrajectoryEvent:
    time: float
    kind: EventKind
    count_x1: int  # after the event


@dataclass(frozen=True)
class Trajectory:
    """Recorded event sequence of one simulation run.

    ``n_events`` counts every event including null draws that were not
    recorded; ``final_time``/``final_state`` describe the run's end even
    when the tail of the record is elided.
    """

    initial_state: SwarmState
    seed: int
    events: tuple[TrajectoryEvent, ...]
    final_state: SwarmState
    final_time: float
    n_events: int


def draw_group_composition(
    rng: np.random.Generator, n_agents: int, count_x1: int, group_size: int
) -> int:
    """Sequential urn draw: pick ``G`` agents one by one, count X1 picks.

    Each pick is uniform over the remaining agents (integer comparison,
    no floating-point bias), so the returned composition follows the
    hypergeometric law exactly.
    """
    if group_size > n_agents:
        raise ValueError(
            f"cannot draw {group_size} agents from a swarm of {n_agents}"
        )
    hits = 0
    remaining = n_agents
    favorable = count_x1
    for _ in range(group_size):
        if rng.integers(remaining) < favorable:
            hits += 1
            favorable -= 1
        remaining -= 1
    return hits


def step(
    state: SwarmState,
    rules: RuleSet | None,
    config: SimConfig,
    rng: np.random.Generator,
) -> tuple[float, EventKind, SwarmState]:
    """Advance by one event; returns ``(dt, event, new_state)``.

    ``rules`` may be None only when ``rule_rate`` is zero (noise-only
    system).  Raises :class:`FrozenSystemError` when the total
    propensity vanishes.
    """
    n = state.n_agents
    if rules is not None and rules.group_size > n:
        raise ValueError(
            f"group size {rules.group_size} exceeds swarm size {n}"
        )
    a_group = config.rule_rate * n
    if a_group > 0 and rules is None:
        raise ValueError("rule_rate > 0 requires a rule set")
    a_12 = config.noise_rate * state.count_x1
    a_21 = config.noise_rate * state.count_x2
    total = a_group + a_12 + a_21
    if total <= 0:
        raise FrozenSystemError("all propensities are zero; the system is frozen")

    dt = rng.exponential() / total
    u = rng.random() * total
    if u < a_group:
        # Composition of G agents drawn without replacement.
        k = int(rng.hypergeometric(state.count_x1, state.count_x2, rules.group_size))
        if k == 0 or k == rules.group_size:
            return dt, NullDraw(k), state
        new_state = apply_rule(state, k, rules.group_size, rules.polarity_at(k))
        return dt, RuleFired(k), new_state
    if u < a_group + a_12:
        direction = FlipDirection.X1_TO_X2
    else:
        direction = FlipDirection.X2_TO_X1
    return dt, NoiseFlip(direction), apply_noise_flip(state, direction)


def simulate(
    initial: SwarmState,
    rules: RuleSet | None,
    config: SimConfig,
    seed: int,
) -> Trajectory:
    """Run the simulation from ``initial`` until a stopping bound hits.

    The run is reproducible: identical inputs and seed give an
    identical trajectory.  Null draws still advance time and count
    toward ``max_events`` when ``record_null_draws`` is off; they are
    merely dropped from the record.
    """
    rng = np.random.default_rng(seed)
    state = initial
    t = 0.0
    n_events = 0
    events: list[TrajectoryEvent] = []
    while True:
        if config.stop_at_consensus and state.is_consensus:
            break
        if config.max_events is not None and n_events >= config.max_events:
            break
        dt, kind, next_state = step(state, rules, config, rng)
        if config.t_max is not None and t + dt > config.t_max:
            break
        t += dt
        state = next_state
        n_events += 1
        if config.record_null_draws or not isinstance(kind, NullDraw):
            events.append(TrajectoryEvent(t, kind, state.count_x1))
    return Trajectory(initial, seed, tuple(events), state, t, n_events)


def verify_trajectory(trajectory: Trajectory, rules: RuleSet | None) -> None:
    """Replay a trajectory record and raise ValueError on any inconsistency.

    Checks strictly increasing times and that every recorded count
    follows from the previous one under the recorded event kind.
    """
    count = trajectory.initial_state.count_x1
    n = trajectory.initial_state.n_agents
    last_time = 0.0
    for i, event in enumerate(trajectory.events):
        if not event.time > last_time:
            raise ValueError(f"event {i}: time {event.time} does not increase")
        last_time = event.time
        kind = event.kind
        if isinstance(kind, NullDraw):
            delta = 0
        elif isinstance(kind, RuleFired):
            if rules is None:
                raise ValueError("rule events in a trajectory without rules")
            delta = rules.signed_weight(kind.k)
        else:
            delta = -1 if kind.direction is FlipDirection.X1_TO_X2 else 1
        count += delta
        if not 0 <= count <= n:
            raise ValueError(f"event {i}: count {count} leaves [0, {n}]")
        if count != event.count_x1:
            raise ValueError(
                f"event {i}: recorded count {event.count_x1}, replay gives {count}"
            )
    # Elided events are null draws, which never change the count, so the
    # final state must match the last recorded count unconditionally.
    if trajectory.events and trajectory.events[-1].count_x1 != trajectory.final_state.count_x1:
        raise ValueError("final state disagrees with the last recorded event")


CSV_HEADER = "time,event,k,count_x1,z"


def trajectory_csv_lines(
    trajectory: Trajectory, provenance: str | None = None
) -> Iterator[str]:
    """Render a trajectory as CSV lines (no trailing newlines).

    Columns: ``time,event,k,count_x1,z`` with the event labels
    ``rule``/``noise12``/``noise21``/``null``; ``k`` is empty for noise
    events; floats carry 17 significant digits.
    """
    if provenance is not None:
        yield provenance
    yield CSV_HEADER
    n = trajectory.initial_state.n_agents
    for event in trajectory.events:
        kind = event.kind
        label = event_label(kind)
        k_field = "" if isinstance(kind, NoiseFlip) else str(kind.k)
        z = 2.0 * event.count_x1 / n - 1.0
        yield f"{event.time:.17g},{label},{k_field},{event.count_x1},{z:.17g}"
