"""Binary collective decision-making swarms.

Simulates a well-mixed swarm of agents choosing between two opinions
under configurable majority/minority group rules and noise, and
reproduces its macroscopic drift behaviour both empirically (exact
Gillespie simulation) and analytically (hypergeometric composition
law), including fixed-point and stability analysis.
"""

from .drift import (
    DriftCurve,
    FixedPoint,
    Stability,
    analytic_drift,
    analytic_drift_curve,
    empirical_drift,
    empirical_firing_probabilities,
    find_fixed_points,
    lattice_z_values,
    negate_check,
    rule_firing_probabilities,
)
from .hypergeom import PmfTable, pmf, pmf_bruteforce, pmf_table
from .model import (
    FlipDirection,
    NoiseSpec,
    RulePolarity,
    RuleSet,
    SwarmState,
    apply_noise_flip,
    apply_rule,
    enumerate_rulesets,
    signed_weight,
    state_of_z,
    z_of,
)
from .schema import (
    Reaction,
    ReactionSchema,
    SchemaError,
    SchemaSyntaxError,
    SchemaValidationError,
    format_schema,
    parse_polarity_string,
    parse_schema,
    reaction_text,
    ruleset_of_schema,
    schema_of_ruleset,
)
from .ssa import (
    FrozenSystemError,
    NoiseFlip,
    NullDraw,
    Propensities,
    RuleFired,
    SimConfig,
    Trajectory,
    TrajectoryEvent,
    draw_group_composition,
    propensities,
    simulate,
    step,
    trajectory_csv_lines,
    verify_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "DriftCurve",
    "FixedPoint",
    "FlipDirection",
    "FrozenSystemError",
    "NoiseFlip",
    "NoiseSpec",
    "NullDraw",
    "PmfTable",
    "Propensities",
    "Reaction",
    "ReactionSchema",
    "RuleFired",
    "RulePolarity",
    "RuleSet",
    "SchemaError",
    "SchemaSyntaxError",
    "SchemaValidationError",
    "SimConfig",
    "Stability",
    "SwarmState",
    "Trajectory",
    "TrajectoryEvent",
    "analytic_drift",
    "analytic_drift_curve",
    "apply_noise_flip",
    "apply_rule",
    "draw_group_composition",
    "empirical_drift",
    "empirical_firing_probabilities",
    "enumerate_rulesets",
    "find_fixed_points",
    "format_schema",
    "lattice_z_values",
    "negate_check",
    "parse_polarity_string",
    "parse_schema",
    "pmf",
    "pmf_bruteforce",
    "pmf_table",
    "propensities",
    "reaction_text",
    "rule_firing_probabilities",
    "ruleset_of_schema",
    "schema_of_ruleset",
    "signed_weight",
    "simulate",
    "state_of_z",
    "step",
    "trajectory_csv_lines",
    "verify_trajectory",
    "z_of",
]
