"""Macroscopic drift of the order parameter and its fixed points.

The expected motion of ``z = 2K/N - 1`` per unit time decomposes into a
rule term and a noise term::

    dz/dt = sum_k w_k * P(X = k)  -  epsilon * z

where ``P(X = k)`` is the hypergeometric probability of drawing a group
with ``k`` X1 opinions at the current state and ``w_k`` is the signed
weight of the rule that fires there (zero at the uniform compositions).
The noise term is a plain linear restoring drift, so noise superposes on
the rule dynamics without altering the firing probabilities.

``analytic_drift`` evaluates this sum exactly (quantizing ``z`` to the
nearest lattice state); ``empirical_drift`` estimates the same quantity
by Monte Carlo resampling of single events, and ``find_fixed_points``
locates and classifies the zeros of the analytic curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .hypergeom import PmfTable, pmf_table
from .model import NoiseSpec, RuleSet, state_of_z

__all__ = [
    "DriftCurve",
    "FixedPoint",
    "Stability",
    "analytic_drift",
    "analytic_drift_curve",
    "empirical_drift",
    "empirical_firing_probabilities",
    "find_fixed_points",
    "lattice_z_values",
    "negate_check",
    "rule_firing_probabilities",
]

#: Refined-bracket width at which bisection stops.
_BISECT_TOL = 1e-9
#: Slope magnitude below which a fixed point is classified as marginal.
_MARGINAL_SLOPE_TOL = 1e-10


@dataclass(frozen=True)
class DriftCurve:
    """Sampled ``(z, dz/dt)`` curve plus the configuration it came from."""

    z: tuple[float, ...]
    dzdt: tuple[float, ...]
    n_agents: int
    epsilon: float
    source: str  # "analytic" | "empirical"
    group_size: int | None = None
    rule_label: str | None = None
    samples_per_point: int | None = None

    def __post_init__(self) -> None:
        if len(self.z) != len(self.dzdt):
            raise ValueError("z and dzdt must have equal length")
        if any(b <= a for a, b in zip(self.z, self.z[1:])):
            raise ValueError("z values must be strictly increasing")
        if self.source not in ("analytic", "empirical"):
            raise ValueError(f"unknown curve source {self.source!r}")


class Stability(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class FixedPoint:
    """A zero of the drift curve with its stability classification."""

    z: float
    stability: Stability
    bracket: tuple[float, float]


def lattice_z_values(n_agents: int) -> tuple[float, ...]:
    """The reachable order-parameter values ``2K/N - 1`` for ``K = 0..N``."""
    return tuple(2.0 * k / n_agents - 1.0 for k in range(n_agents + 1))


def analytic_drift(
    n_agents: int, rules: RuleSet | None, noise: NoiseSpec, z: float
) -> float:
    """Expected ``dz/dt`` at order parameter ``z``.

    ``z`` is quantized to the nearest lattice state (half away from
    zero) before evaluating the composition probabilities.  With
    ``rules=None`` only the noise term ``-epsilon*z`` remains, which is
    the purely noise-driven system.

    The rule term is accumulated with exact summation of exactly
    computed probabilities, so complementary rule sets produce exactly
    negated values and the noise term superposes exactly.
    """
    if not -1.0 <= z <= 1.0:
        raise ValueError(f"order parameter must lie in [-1, 1], got {z}")
    noise_term = noise.epsilon * z
    if rules is None:
        return -noise_term
    state = state_of_z(n_agents, z)
    table = pmf_table(n_agents, state.count_x1, rules.group_size)
    terms = [
        rules.signed_weight(k) * p for k, p in enumerate(table.probabilities)
    ]
    return math.fsum(terms) - noise_term


def analytic_drift_curve(
    n_agents: int,
    rules: RuleSet | None,
    noise: NoiseSpec,
    grid_points: int = 201,
) -> DriftCurve:
    """Analytic drift evaluated on a uniform z grid over [-1, 1]."""
    if grid_points < 2:
        raise ValueError(f"grid must have at least 2 points, got {grid_points}")
    zs = np.linspace(-1.0, 1.0, grid_points)
    values = tuple(analytic_drift(n_agents, rules, noise, float(z)) for z in zs)
    return DriftCurve(
        tuple(float(z) for z in zs),
        values,
        n_agents,
        noise.epsilon,
        "analytic",
        group_size=rules.group_size if rules else None,
        rule_label=rules.label if rules else None,
    )


def _split_events(
    rng: np.random.Generator, samples: int, a_group: float, a_12: float, a_21: float
) -> tuple[int, int, int]:
    # Multinomial split via chained binomials; identical in law, and
    # immune to "probabilities sum above 1" rounding complaints.
    total = a_group + a_12 + a_21
    n_group = int(rng.binomial(samples, a_group / total)) if a_group > 0 else 0
    rest = samples - n_group
    noise_total = a_12 + a_21
    if rest == 0 or noise_total == 0:
        return n_group, 0, rest
    n_12 = int(rng.binomial(rest, a_12 / noise_total)) if a_12 > 0 else 0
    return n_group, n_12, rest - n_12


def empirical_drift(
    n_agents: int,
    rules: RuleSet | None,
    noise: NoiseSpec,
    samples_per_state: int,
    seed: int,
    rule_rate: float = 0.5,
) -> DriftCurve:
    """Monte Carlo drift estimate on the full lattice ``K = 0..N``.

    At every lattice state the chain is reset and ``samples_per_state``
    single events are drawn (channel chosen by propensity, composition
    by the group law); the mean count change per event times the total
    event rate, rescaled by ``2/N``, estimates ``dz/dt`` there.

    Each state uses its own generator seeded from ``(seed, K)``, so the
    curve is independent of evaluation order and states may be computed
    concurrently.
    """
    if n_agents <= 0 or n_agents % 2 == 0:
        raise ValueError(f"swarm size must be a positive odd integer, got {n_agents}")
    if samples_per_state < 1:
        raise ValueError(f"samples_per_state must be >= 1, got {samples_per_state}")
    if rule_rate < 0:
        raise ValueError(f"rule rate must be >= 0, got {rule_rate}")
    if rules is None and rule_rate != 0:
        raise ValueError("rule_rate > 0 requires a rule set")
    c = noise.epsilon / 2.0
    weights = (
        np.array([rules.signed_weight(k) for k in range(rules.group_size + 1)])
        if rules is not None
        else None
    )
    zs: list[float] = []
    estimates: list[float] = []
    for count in range(n_agents + 1):
        zs.append(2.0 * count / n_agents - 1.0)
        a_group = rule_rate * n_agents
        a_12 = c * count
        a_21 = c * (n_agents - count)
        total = a_group + a_12 + a_21
        if total == 0.0:
            estimates.append(0.0)
            continue
        rng = np.random.default_rng([seed, count])
        n_group, n_12, n_21 = _split_events(rng, samples_per_state, a_group, a_12, a_21)
        delta_sum = n_21 - n_12
        if n_group > 0:
            ks = rng.hypergeometric(
                count, n_agents - count, rules.group_size, size=n_group
            )
            delta_sum += int(weights[ks].sum())
        mean_step = delta_sum / samples_per_state
        estimates.append((2.0 / n_agents) * mean_step * total)
    return DriftCurve(
        tuple(zs),
        tuple(estimates),
        n_agents,
        noise.epsilon,
        "empirical",
        group_size=rules.group_size if rules else None,
        rule_label=rules.label if rules else None,
        samples_per_point=samples_per_state,
    )


def rule_firing_probabilities(
    n_agents: int, group_size: int, count_x1: int
) -> PmfTable:
    """Probability that the rule at each composition fires at this state.

    This is exactly the hypergeometric composition law; in particular it
    does not depend on the noise level or on the rule polarities.
    """
    return pmf_table(n_agents, count_x1, group_size)


def empirical_firing_probabilities(
    n_agents: int, group_size: int, count_x1: int, draws: int, seed: int
) -> PmfTable:
    """Observed composition frequencies over ``draws`` group draws."""
    if draws < 1:
        raise ValueError(f"draws must be >= 1, got {draws}")
    rng = np.random.default_rng([seed, count_x1])
    ks = rng.hypergeometric(count_x1, n_agents - count_x1, group_size, size=draws)
    counts = np.bincount(ks, minlength=group_size + 1)
    return PmfTable(group_size, tuple(float(c) / draws for c in counts))


def _bisect(f, lo: float, hi: float, f_lo: float) -> tuple[float, float]:
    lo_positive = f_lo > 0
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or (fm > 0) == lo_positive:
            lo = mid
        else:
            hi = mid
    return lo, hi


def find_fixed_points(
    n_agents: int,
    rules: RuleSet | None,
    noise: NoiseSpec,
    grid_points: int = 2001,
) -> list[FixedPoint]:
    """Locate and classify every zero of the analytic drift on [-1, 1].

    The curve is scanned on a uniform grid; every sign change is refined
    by bisection to a bracket narrower than 1e-9.  Because the drift is
    piecewise constant between lattice states, runs of exact zeros are
    collapsed: a zero plateau touching a boundary is reported as the
    boundary fixed point ``z = +/-1`` (classified by the drift just
    inside), and an interior plateau as a single fixed point at its
    midpoint.  A drift that vanishes identically yields one marginal
    fixed point spanning the whole interval.
    """
    if grid_points < 3:
        raise ValueError(f"grid must have at least 3 points, got {grid_points}")
    zs = np.linspace(-1.0, 1.0, grid_points)
    fs = np.array([analytic_drift(n_agents, rules, noise, float(z)) for z in zs])

    nonzero = np.flatnonzero(fs)
    if nonzero.size == 0:
        return [FixedPoint(0.0, Stability.MARGINAL, (-1.0, 1.0))]
    first_nz = int(nonzero[0])
    last_nz = int(nonzero[-1])

    found: list[FixedPoint] = []
    if first_nz > 0:
        stability = Stability.STABLE if fs[first_nz] < 0 else Stability.UNSTABLE
        found.append(
            FixedPoint(-1.0, stability, (float(zs[0]), float(zs[first_nz - 1])))
        )

    def drift_at(z: float) -> float:
        return analytic_drift(n_agents, rules, noise, z)

    i = first_nz
    while i < last_nz:
        a, b = fs[i], fs[i + 1]
        if b == 0.0:
            # Interior zero plateau: collapse the run to one fixed point.
            j = i + 1
            while fs[j + 1] == 0.0:  # j+1 <= last_nz, which is nonzero
                j += 1
            left_sign, right_sign = a > 0, fs[j + 1] > 0
            if left_sign and not right_sign:
                stability = Stability.STABLE
            elif not left_sign and right_sign:
                stability = Stability.UNSTABLE
            else:
                stability = Stability.MARGINAL
            z_star = 0.5 * (float(zs[i + 1]) + float(zs[j]))
            found.append(
                FixedPoint(z_star, stability, (float(zs[i]), float(zs[j + 1])))
            )
            i = j + 1
            continue
        if (a > 0) != (b > 0):
            lo, hi = _bisect(drift_at, float(zs[i]), float(zs[i + 1]), float(a))
            slope = (drift_at(hi) - drift_at(lo)) / (hi - lo)
            if abs(slope) < _MARGINAL_SLOPE_TOL:
                stability = Stability.MARGINAL
            elif a > 0:
                stability = Stability.STABLE
            else:
                stability = Stability.UNSTABLE
            found.append(FixedPoint(0.5 * (lo + hi), stability, (lo, hi)))
        i += 1

    if last_nz < grid_points - 1:
        stability = Stability.STABLE if fs[last_nz] > 0 else Stability.UNSTABLE
        found.append(
            FixedPoint(1.0, stability, (float(zs[last_nz + 1]), float(zs[-1])))
        )
    return found


def _one_ulp(magnitude: float) -> float:
    return math.ulp(magnitude) if magnitude > 0 else math.ulp(0.0)


def negate_check(
    rules_a: RuleSet, rules_b: RuleSet, n_agents: int, epsilon: float = 0.0
) -> bool:
    """True iff the drift of ``rules_b`` is the pointwise negation of ``rules_a``.

    ``rules_b`` must be the polarity complement of ``rules_a`` (raises
    ValueError otherwise).  The curves are compared on the exact
    lattice ``z_K``; agreement is required to within one ulp, which the
    exact-summation evaluation in fact achieves bit-for-bit.
    """
    if rules_a.group_size != rules_b.group_size or rules_a.complement() != rules_b:
        raise ValueError(
            f"rule sets {rules_a.label!r} and {rules_b.label!r} are not "
            "polarity complements"
        )
    noise = NoiseSpec(epsilon)
    for z in lattice_z_values(n_agents):
        a = analytic_drift(n_agents, rules_a, noise, z)
        b = analytic_drift(n_agents, rules_b, noise, z)
        if abs(a + b) > _one_ulp(max(abs(a), abs(b))):
            return False
    return True
