"""Command-line front end: run experiments, write data files.

Subcommands
-----------
drift         analytic (and optionally Monte Carlo) dz/dt curve -> CSV
probs         rule firing probabilities per lattice state -> CSV
simulate      one Gillespie run -> trajectory CSV + JSON summary on stdout
fixed-points  zeros of the drift curve with stability -> JSON
rulesets      every rule set for a group size, with canonical reactions
validate      internal cross-checks (oracle agreement, symmetries) -> JSON

Every output file starts with a provenance comment line recording the
package version and the resolved configuration, and all commands are
deterministic given identical flags (including the seed).  Exit codes:
0 success, 2 configuration error, 3 I/O error, 4 validation failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import sys
import tempfile
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .drift import (
    analytic_drift,
    analytic_drift_curve,
    empirical_drift,
    empirical_firing_probabilities,
    find_fixed_points,
    lattice_z_values,
    negate_check,
    rule_firing_probabilities,
)
from .hypergeom import pmf, pmf_bruteforce
from .model import NoiseSpec, RuleSet, SwarmState, enumerate_rulesets, state_of_z
from .schema import (
    SchemaError,
    format_schema,
    parse_polarity_string,
    parse_schema,
    ruleset_of_schema,
    schema_of_ruleset,
)
from .ssa import (
    FrozenSystemError,
    SimConfig,
    event_label,
    simulate,
    trajectory_csv_lines,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_VALIDATION = 4

SEED_ENV_VAR = "SWARMDEC_SEED"

_FILE_COMMANDS = ("drift", "probs", "simulate", "fixed-points")
_RULE_COMMANDS = ("drift", "simulate", "fixed-points")

_CONFIG_KEYS = {
    "agents": int,
    "group": int,
    "rules": str,
    "schema": str,
    "epsilon": float,
    "rule_rate": float,
    "seed": int,
    "out": str,
    "grid": int,
    "samples": int,
    "events": int,
    "t_max": float,
    "empirical": bool,
    "init_z": float,
    "init_k": int,
    "stop_at_consensus": bool,
    "elide_nulls": bool,
    "plot_script": str,
}


class ConfigError(Exception):
    """Inconsistent or incomplete experiment configuration."""


@dataclass
class ExperimentConfig:
    command: str
    agents: int
    group: int | None
    rules: RuleSet | None
    pure_noise: bool
    epsilon: float
    rule_rate: float
    seed: int
    out: Path | None
    grid: int
    samples: int
    events: int | None
    t_max: float | None
    empirical: bool
    initial: SwarmState | None
    stop_at_consensus: bool
    elide_nulls: bool
    plot_script: Path | None

    @property
    def rules_label(self) -> str | None:
        if self.pure_noise:
            return "none"
        return self.rules.label if self.rules is not None else None

    @property
    def noise(self) -> NoiseSpec:
        return NoiseSpec(self.epsilon)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--agents", type=int, help="swarm size N, odd (default 101)")
    common.add_argument("--group", type=int, help="group size G, odd (inferred from --rules when omitted)")
    common.add_argument("--rules", help="polarity string such as MMm, or 'none' for the noise-only system")
    common.add_argument("--schema", help="path to a reaction schema file (alternative to --rules)")
    common.add_argument("--epsilon", type=float, help="noise level (default 0)")
    common.add_argument("--rule-rate", type=float, dest="rule_rate", help="group interaction rate per agent (default 0.5)")
    common.add_argument("--seed", type=int, help=f"RNG seed (default ${SEED_ENV_VAR} or 0)")
    common.add_argument("--out", help="output file path")
    common.add_argument("--grid", type=int, help="number of z grid points")
    common.add_argument("--samples", type=int, help="Monte Carlo samples per state")
    common.add_argument("--events", type=int, help="maximum number of simulated events")
    common.add_argument("--t-max", type=float, dest="t_max", help="maximum simulated time")
    common.add_argument("--empirical", action=argparse.BooleanOptionalAction, help="also write a Monte Carlo estimate to a sibling .empirical.csv file")
    common.add_argument("--config", help="JSON file with the same keys; flags take precedence")
    common.add_argument("--plot-script", dest="plot_script", help="also write a gnuplot script for the output file")

    parser = argparse.ArgumentParser(
        prog="swarmdec",
        description="Collective decision-making swarm experiments.",
    )
    parser.add_argument("--version", action="version", version=f"swarmdec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("drift", parents=[common], help="write the dz/dt vs z curve as CSV")
    sub.add_parser("probs", parents=[common], help="write rule firing probabilities per state as CSV")
    p_sim = sub.add_parser("simulate", parents=[common], help="run one Gillespie simulation, write the trajectory CSV")
    p_sim.add_argument("--init-z", type=float, dest="init_z", help="initial order parameter (default 0)")
    p_sim.add_argument("--init-k", type=int, dest="init_k", help="initial X1 count (alternative to --init-z)")
    p_sim.add_argument("--stop-at-consensus", action=argparse.BooleanOptionalAction, dest="stop_at_consensus", help="stop as soon as |z| = 1")
    p_sim.add_argument("--elide-nulls", action=argparse.BooleanOptionalAction, dest="elide_nulls", help="do not record null draws (time still advances)")
    sub.add_parser("fixed-points", parents=[common], help="locate drift zeros and their stability, write JSON")
    sub.add_parser("rulesets", parents=[common], help="list every rule set for a group size")
    sub.add_parser("validate", parents=[common], help="run internal cross-checks, write a JSON report")
    return parser


def _load_config_file(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path}: expected a JSON object")
    for key, value in data.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"config file {path}: unknown key {key!r}")
        expected = _CONFIG_KEYS[key]
        if expected is float:
            ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        elif expected is int:
            ok = isinstance(value, int) and not isinstance(value, bool)
        else:
            ok = isinstance(value, expected)
        if not ok:
            raise ConfigError(
                f"config file {path}: key {key!r} must be {expected.__name__}"
            )
    return data


def _resolve_seed(flag_value, file_cfg: dict) -> int:
    if flag_value is not None:
        seed = flag_value
    elif "seed" in file_cfg:
        seed = file_cfg["seed"]
    elif SEED_ENV_VAR in os.environ:
        raw = os.environ[SEED_ENV_VAR]
        try:
            seed = int(raw)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None
    else:
        seed = 0
    if seed < 0:
        raise ConfigError(f"seed must be >= 0, got {seed}")
    return seed


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge flags, config file, environment and defaults; validate."""
    command = args.command
    file_cfg = _load_config_file(args.config) if getattr(args, "config", None) else {}

    def pick(name, default=None):
        value = getattr(args, name, None)
        if value is not None:
            return value
        return file_cfg.get(name, default)

    agents = pick("agents", 101)
    if agents <= 0 or agents % 2 == 0:
        raise ConfigError(f"--agents must be a positive odd integer, got {agents}")

    epsilon = pick("epsilon", 0.0)
    if epsilon < 0 or not math.isfinite(epsilon):
        raise ConfigError(f"--epsilon must be finite and >= 0, got {epsilon}")
    rule_rate = pick("rule_rate", 0.5)
    if rule_rate < 0 or not math.isfinite(rule_rate):
        raise ConfigError(f"--rule-rate must be finite and >= 0, got {rule_rate}")
    seed = _resolve_seed(getattr(args, "seed", None), file_cfg)

    rules_arg = pick("rules")
    schema_arg = pick("schema")
    if rules_arg is not None and schema_arg is not None:
        raise ConfigError("--rules and --schema are mutually exclusive")

    rules: RuleSet | None = None
    pure_noise = False
    explicit_group = pick("group")
    if rules_arg is not None:
        if rules_arg == "none":
            pure_noise = True
        else:
            # An explicit --group drives the parse so that a length
            # mismatch is reported as such; otherwise infer the group
            # size from the string length.
            target_group = (
                explicit_group
                if explicit_group is not None
                else 2 * len(rules_arg) + 1
            )
            try:
                rules = parse_polarity_string(rules_arg, target_group)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
    elif schema_arg is not None:
        text = Path(schema_arg).read_text(encoding="utf-8")
        try:
            rules = ruleset_of_schema(parse_schema(text))
        except SchemaError as exc:
            raise ConfigError(f"schema file {schema_arg}: {exc}") from exc

    group = explicit_group
    if rules is not None:
        if group is not None and group != rules.group_size:
            raise ConfigError(
                f"--group {group} conflicts with the rule set's group size "
                f"{rules.group_size}"
            )
        group = rules.group_size
    if group is not None:
        if group < 3 or group % 2 == 0:
            raise ConfigError(f"--group must be an odd integer >= 3, got {group}")
        if group > agents:
            raise ConfigError(f"--group {group} exceeds --agents {agents}")

    if command in _RULE_COMMANDS and rules is None and not pure_noise:
        raise ConfigError(f"{command} requires --rules or --schema")
    if command in ("probs", "rulesets") and group is None:
        raise ConfigError(f"{command} requires --group")

    out_arg = pick("out")
    if command in _FILE_COMMANDS and out_arg is None:
        raise ConfigError(f"{command} requires --out")

    grid = pick("grid", 2001 if command == "fixed-points" else 201)
    if grid < 3:
        raise ConfigError(f"--grid must be >= 3, got {grid}")
    samples = pick("samples", 1_000_000 if command == "probs" else 100_000)
    if samples < 1:
        raise ConfigError(f"--samples must be >= 1, got {samples}")

    events = pick("events")
    t_max = pick("t_max")
    stop_at_consensus = bool(pick("stop_at_consensus", False))
    if command == "simulate" and events is None and t_max is None and not stop_at_consensus:
        events = 100_000
    if events is not None and events < 1:
        raise ConfigError(f"--events must be >= 1, got {events}")
    if t_max is not None and not t_max > 0:
        raise ConfigError(f"--t-max must be > 0, got {t_max}")

    initial: SwarmState | None = None
    if command == "simulate":
        init_z = pick("init_z")
        init_k = pick("init_k")
        if init_z is not None and init_k is not None:
            raise ConfigError("--init-z and --init-k are mutually exclusive")
        try:
            if init_k is not None:
                initial = SwarmState(agents, init_k)
            else:
                initial = state_of_z(agents, init_z if init_z is not None else 0.0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    return ExperimentConfig(
        command=command,
        agents=agents,
        group=group,
        rules=rules,
        pure_noise=pure_noise,
        epsilon=epsilon,
        rule_rate=rule_rate,
        seed=seed,
        out=Path(out_arg) if out_arg is not None else None,
        grid=grid,
        samples=samples,
        events=events,
        t_max=t_max,
        empirical=bool(pick("empirical", False)),
        initial=initial,
        stop_at_consensus=stop_at_consensus,
        elide_nulls=bool(pick("elide_nulls", False)),
        plot_script=Path(pick("plot_script")) if pick("plot_script") else None,
    )


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def _provenance(
    agents=None, group=None, rules=None, epsilon=None, seed=None, **extra
) -> str:
    parts = [
        f"# swarmdec {__version__}",
        f"agents={_fmt(agents)}",
        f"group={_fmt(group)}",
        f"rules={_fmt(rules)}",
        f"epsilon={_fmt(epsilon)}",
        f"seed={_fmt(seed)}",
    ]
    parts.extend(f"{key.replace('_', '-')}={_fmt(value)}" for key, value in extra.items())
    return " ".join(parts)


def _write_text(path: Path, text: str) -> None:
    """Write atomically: temp file in the target directory, then rename."""
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp_name = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp_name)
        raise


def _empirical_path(out: Path) -> Path:
    if out.suffix == ".csv":
        return out.with_suffix(".empirical.csv")
    return Path(str(out) + ".empirical.csv")


def _curve_csv(curve, provenance: str) -> str:
    lines = [provenance, "z,dzdt"]
    lines.extend(f"{z:.17g},{d:.17g}" for z, d in zip(curve.z, curve.dzdt))
    return "\n".join(lines) + "\n"


_GNUPLOT_PRELUDE = (
    "set datafile separator \",\"\n"
    "set datafile commentschars \"#\"\n"
    "set key autotitle columnhead\n"
    "set grid\n"
)


def _write_plot_script(cfg: ExperimentConfig, body: str) -> None:
    script = f"# swarmdec {__version__} gnuplot companion\n" + _GNUPLOT_PRELUDE + body
    _write_text(cfg.plot_script, script)


def cmd_drift(cfg: ExperimentConfig) -> int:
    curve = analytic_drift_curve(cfg.agents, cfg.rules, cfg.noise, cfg.grid)
    header = _provenance(
        agents=cfg.agents,
        group=cfg.group,
        rules=cfg.rules_label,
        epsilon=cfg.epsilon,
        seed=cfg.seed,
        grid=cfg.grid,
    )
    _write_text(cfg.out, _curve_csv(curve, header))
    if cfg.empirical:
        emp = empirical_drift(
            cfg.agents,
            cfg.rules,
            cfg.noise,
            cfg.samples,
            cfg.seed,
            rule_rate=0.0 if cfg.pure_noise else cfg.rule_rate,
        )
        emp_header = _provenance(
            agents=cfg.agents,
            group=cfg.group,
            rules=cfg.rules_label,
            epsilon=cfg.epsilon,
            seed=cfg.seed,
            samples=cfg.samples,
            rule_rate=0.0 if cfg.pure_noise else cfg.rule_rate,
        )
        _write_text(_empirical_path(cfg.out), _curve_csv(emp, emp_header))
    if cfg.plot_script:
        title = cfg.rules_label or "drift"
        body = (
            'set xlabel "z"\nset ylabel "dz/dt"\n'
            f'plot "{cfg.out}" using 1:2 with lines title "{title}"'
        )
        if cfg.empirical:
            body += f', \\\n     "{_empirical_path(cfg.out)}" using 1:2 with points title "{title} (sampled)"'
        _write_plot_script(cfg, body + "\n")
    return EXIT_OK


def _probs_csv(cfg: ExperimentConfig, empirical: bool) -> str:
    header = _provenance(
        agents=cfg.agents,
        group=cfg.group,
        rules=None,
        epsilon=None,
        seed=cfg.seed,
        **({"samples": cfg.samples} if empirical else {}),
    )
    columns = ",".join(f"p{k}" for k in range(cfg.group + 1))
    lines = [header, f"z,{columns}"]
    for count, z in enumerate(lattice_z_values(cfg.agents)):
        if empirical:
            table = empirical_firing_probabilities(
                cfg.agents, cfg.group, count, cfg.samples, cfg.seed
            )
        else:
            table = rule_firing_probabilities(cfg.agents, cfg.group, count)
        row = ",".join(f"{p:.17g}" for p in table.probabilities)
        lines.append(f"{z:.17g},{row}")
    return "\n".join(lines) + "\n"


def cmd_probs(cfg: ExperimentConfig) -> int:
    _write_text(cfg.out, _probs_csv(cfg, empirical=False))
    if cfg.empirical:
        _write_text(_empirical_path(cfg.out), _probs_csv(cfg, empirical=True))
    if cfg.plot_script:
        body = (
            'set xlabel "z"\nset ylabel "firing probability"\n'
            f'plot for [i=2:{cfg.group + 2}] "{cfg.out}" using 1:i with lines'
        )
        _write_plot_script(cfg, body + "\n")
    return EXIT_OK


def cmd_simulate(cfg: ExperimentConfig) -> int:
    sim_config = SimConfig(
        rule_rate=0.0 if cfg.pure_noise else cfg.rule_rate,
        noise_rate=cfg.epsilon / 2.0,
        max_events=cfg.events,
        t_max=cfg.t_max,
        record_null_draws=not cfg.elide_nulls,
        stop_at_consensus=cfg.stop_at_consensus,
    )
    trajectory = simulate(cfg.initial, cfg.rules, sim_config, cfg.seed)
    header = _provenance(
        agents=cfg.agents,
        group=cfg.group,
        rules=cfg.rules_label,
        epsilon=cfg.epsilon,
        seed=cfg.seed,
        rule_rate=sim_config.rule_rate,
        events=cfg.events,
        t_max=cfg.t_max,
        init_k=cfg.initial.count_x1,
        stop_at_consensus=cfg.stop_at_consensus,
        elide_nulls=cfg.elide_nulls,
    )
    _write_text(cfg.out, "\n".join(trajectory_csv_lines(trajectory, header)) + "\n")

    counts = Counter(event_label(event.kind) for event in trajectory.events)
    counts["null"] = trajectory.n_events - len(trajectory.events) + counts.get("null", 0)
    summary = {
        "final_count_x1": trajectory.final_state.count_x1,
        "final_z": trajectory.final_state.z,
        "final_time": trajectory.final_time,
        "n_events": trajectory.n_events,
        "event_counts": {
            label: counts.get(label, 0) for label in ("rule", "noise12", "noise21", "null")
        },
        "seed": cfg.seed,
    }
    print(json.dumps(summary, sort_keys=True))
    if cfg.plot_script:
        body = (
            'set xlabel "time"\nset ylabel "z"\n'
            f'plot "{cfg.out}" using 1:5 with steps title "z(t)"'
        )
        _write_plot_script(cfg, body + "\n")
    return EXIT_OK


def cmd_fixed_points(cfg: ExperimentConfig) -> int:
    points = find_fixed_points(cfg.agents, cfg.rules, cfg.noise, cfg.grid)
    payload = [
        {
            "z": fp.z,
            "stability": fp.stability.value,
            "bracket": [fp.bracket[0], fp.bracket[1]],
        }
        for fp in points
    ]
    header = _provenance(
        agents=cfg.agents,
        group=cfg.group,
        rules=cfg.rules_label,
        epsilon=cfg.epsilon,
        seed=cfg.seed,
        grid=cfg.grid,
    )
    _write_text(cfg.out, header + "\n" + json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def cmd_rulesets(cfg: ExperimentConfig) -> int:
    blocks = []
    for rules in enumerate_rulesets(cfg.group):
        schema_text = format_schema(schema_of_ruleset(rules))
        indented = "".join(f"  {line}\n" for line in schema_text.splitlines())
        blocks.append(f"{rules.label}\n{indented}")
    listing = "\n".join(blocks)
    if cfg.out is not None:
        header = _provenance(agents=None, group=cfg.group, rules=None, epsilon=None, seed=None)
        _write_text(cfg.out, header + "\n" + listing)
    else:
        sys.stdout.write(listing)
    return EXIT_OK


def _check_pmf_oracle() -> dict:
    worst = 0.0
    for n in (7, 10, 12):
        for g in (3, 5, 7):
            if g > n:
                continue
            for count in range(n + 1):
                for k in range(g + 1):
                    diff = abs(
                        pmf(n, count, g, k) - pmf_bruteforce(n, count, g, k)
                    )
                    worst = max(worst, diff)
    return {
        "name": "pmf-bruteforce-agreement",
        "passed": worst <= 1e-12,
        "detail": f"max |pmf - enumeration| = {worst:.3e}",
    }


def _check_antisymmetry(n_agents: int = 101) -> dict:
    worst = 0.0
    zs = lattice_z_values(n_agents)
    for rules in enumerate_rulesets(7):
        for epsilon in (0.0, 0.1):
            noise = NoiseSpec(epsilon)
            for count in range(n_agents + 1):
                a = analytic_drift(n_agents, rules, noise, zs[count])
                b = analytic_drift(n_agents, rules, noise, zs[n_agents - count])
                worst = max(worst, abs(a + b))
    return {
        "name": "lattice-antisymmetry",
        "passed": worst <= 1e-12,
        "detail": f"max |drift(z_K) + drift(z_(N-K))| = {worst:.3e}",
    }


def _check_complement_negation(n_agents: int = 101) -> dict:
    ok = True
    for rules in enumerate_rulesets(7):
        if rules.label[0] == "m":
            continue  # each pair once
        ok = ok and negate_check(rules, rules.complement(), n_agents)
    return {
        "name": "complement-negation",
        "passed": ok,
        "detail": "drift curves of complementary rule sets negate pointwise",
    }


def _check_noise_superposition(n_agents: int = 101) -> dict:
    exact = True
    for rules in enumerate_rulesets(7):
        for epsilon in (0.05, 0.1):
            noisy = NoiseSpec(epsilon)
            quiet = NoiseSpec(0.0)
            for z in lattice_z_values(n_agents):
                with_noise = analytic_drift(n_agents, rules, noisy, z)
                without = analytic_drift(n_agents, rules, quiet, z)
                if with_noise != without - epsilon * z:
                    exact = False
    return {
        "name": "noise-superposition",
        "passed": exact,
        "detail": "drift(z; eps) == drift(z; 0) - eps*z bit-exactly",
    }


def cmd_validate(cfg: ExperimentConfig) -> int:
    checks = [
        _check_pmf_oracle(),
        _check_antisymmetry(),
        _check_complement_negation(),
        _check_noise_superposition(),
    ]
    report = {"version": __version__, "checks": checks, "passed": all(c["passed"] for c in checks)}
    text = json.dumps(report, indent=2) + "\n"
    sys.stdout.write(text)
    if cfg.out is not None:
        header = _provenance(agents=None, group=None, rules=None, epsilon=None, seed=None)
        _write_text(cfg.out, header + "\n" + text)
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


_HANDLERS = {
    "drift": cmd_drift,
    "probs": cmd_probs,
    "simulate": cmd_simulate,
    "fixed-points": cmd_fixed_points,
    "rulesets": cmd_rulesets,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage; its error code (2) matches ours.
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        cfg = resolve_config(args)
        return _HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"swarmdec: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FrozenSystemError as exc:
        print(f"swarmdec: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"swarmdec: {exc}", file=sys.stderr)
        return EXIT_IO


def run() -> None:
    raise SystemExit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()
