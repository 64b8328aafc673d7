import math
from dataclasses import replace

import numpy as np
import pytest

from swarmdec.model import FlipDirection, SwarmState
from swarmdec.schema import parse_polarity_string
from swarmdec.ssa import (
    FrozenSystemError,
    NoiseFlip,
    NullDraw,
    RuleFired,
    SimConfig,
    TrajectoryEvent,
    draw_group_composition,
    event_label,
    propensities,
    simulate,
    step,
    trajectory_csv_lines,
    verify_trajectory,
)
from swarmdec.hypergeom import pmf_table

MMM = parse_polarity_string("MMM", 7)
MMm = parse_polarity_string("MMm", 7)
MMM_G5 = parse_polarity_string("MM", 5)


class TestSimConfig:
    def test_defaults(self):
        config = SimConfig(max_events=10)
        assert config.rule_rate == 0.5
        assert config.noise_rate == 0.0
        assert config.record_null_draws

    def test_from_noise_level(self):
        config = SimConfig.from_noise_level(0.1, max_events=10)
        assert config.noise_rate == 0.05

    def test_zero_rule_rate_allowed(self):
        SimConfig(rule_rate=0.0, noise_rate=0.1, max_events=1)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"rule_rate": -0.5, "max_events": 1},
            {"noise_rate": -0.1, "max_events": 1},
            {"max_events": 0},
            {"t_max": 0.0},
            {},  # unbounded
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SimConfig(**kwargs)

    def test_stop_at_consensus_is_a_bound(self):
        SimConfig(stop_at_consensus=True)


class TestPropensities:
    def test_rule_only(self):
        p = propensities(SwarmState(101, 0), SimConfig(rule_rate=0.5, max_events=1))
        assert (p.group_event, p.noise_x1_to_x2, p.noise_x2_to_x1) == (50.5, 0.0, 0.0)

    def test_noise_only(self):
        config = SimConfig(rule_rate=0.0, noise_rate=0.05, max_events=1)
        p = propensities(SwarmState(101, 101), config)
        assert p.group_event == 0.0
        assert p.noise_x1_to_x2 == pytest.approx(5.05, abs=1e-12)
        assert p.noise_x2_to_x1 == 0.0

    def test_total(self):
        config = SimConfig(rule_rate=0.5, noise_rate=0.01, max_events=1)
        p = propensities(SwarmState(101, 40), config)
        assert p.total == p.group_event + p.noise_x1_to_x2 + p.noise_x2_to_x1


class TestDrawGroupComposition:
    def test_bounds(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            draw_group_composition(rng, 5, 3, 7)
        assert draw_group_composition(rng, 7, 0, 3) == 0
        assert draw_group_composition(rng, 7, 7, 3) == 3

    def test_matches_hypergeometric_law(self):
        rng = np.random.default_rng(42)
        n, count, g = 11, 5, 3
        draws = 100_000
        counts = np.zeros(g + 1, dtype=int)
        for _ in range(draws):
            counts[draw_group_composition(rng, n, count, g)] += 1
        expected = pmf_table(n, count, g)
        for k in range(g + 1):
            assert abs(counts[k] / draws - expected[k]) < 0.01


class TestStep:
    def test_frozen_system(self):
        config = SimConfig(rule_rate=0.0, noise_rate=0.0, max_events=1)
        with pytest.raises(FrozenSystemError):
            step(SwarmState(101, 50), MMM, config, np.random.default_rng(0))

    def test_rules_required_when_rule_rate_positive(self):
        with pytest.raises(ValueError):
            step(SwarmState(101, 50), None, SimConfig(max_events=1), np.random.default_rng(0))

    def test_group_larger_than_swarm(self):
        with pytest.raises(ValueError):
            step(SwarmState(5, 2), MMM, SimConfig(max_events=1), np.random.default_rng(0))

    def test_consensus_without_noise_only_nulls(self):
        config = SimConfig(max_events=1)
        state = SwarmState(101, 101)
        rng = np.random.default_rng(3)
        for _ in range(50):
            dt, kind, new_state = step(state, MMM, config, rng)
            assert kind == NullDraw(7)
            assert new_state == state
            assert dt > 0

    def test_noise_only_steps(self):
        config = SimConfig(rule_rate=0.0, noise_rate=0.2, max_events=1)
        rng = np.random.default_rng(4)
        dt, kind, new_state = step(SwarmState(101, 101), None, config, rng)
        assert kind == NoiseFlip(FlipDirection.X1_TO_X2)
        assert new_state.count_x1 == 100

    def test_determinism(self):
        config = SimConfig(noise_rate=0.01, max_events=1)
        state = SwarmState(101, 51)
        results = []
        for _ in range(2):
            rng = np.random.default_rng(123)
            results.append([step(state, MMm, config, rng) for _ in range(200)])
        assert results[0] == results[1]

    @pytest.mark.slow
    def test_group_composition_conditional_law(self):
        # Reset to the same state every step; conditioned on a rule
        # firing, the composition must follow the hypergeometric table
        # renormalized over the interior compositions.
        n, g = 101, 7
        state = SwarmState(n, 51)
        config = SimConfig(max_events=1)
        rng = np.random.default_rng(2024)
        counts = np.zeros(g + 1, dtype=int)
        steps = 10**6
        for _ in range(steps):
            _, kind, _ = step(state, MMm, config, rng)
            if isinstance(kind, RuleFired):
                counts[kind.k] += 1
        table = pmf_table(n, state.count_x1, g)
        interior_mass = math.fsum(table.probabilities[1:g])
        fired = counts.sum()
        for k in range(1, g):
            observed = counts[k] / fired
            expected = table[k] / interior_mass
            assert abs(observed - expected) < 5e-3


class TestSimulate:
    def test_absorbing_consensus_stays(self):
        config = SimConfig(max_events=10_000)
        trajectory = simulate(SwarmState(101, 0), MMM, config, seed=0)
        assert trajectory.n_events == 10_000
        assert trajectory.final_state.count_x1 == 0
        assert all(event.count_x1 == 0 for event in trajectory.events)
        assert trajectory.final_time > 0

    def test_elided_nulls_still_advance_time_and_count(self):
        config = SimConfig(max_events=500, record_null_draws=False)
        trajectory = simulate(SwarmState(101, 0), MMM, config, seed=0)
        assert trajectory.events == ()
        assert trajectory.n_events == 500
        assert trajectory.final_time > 0

    def test_determinism_bit_identical(self):
        config = SimConfig(noise_rate=0.02, max_events=2_000)
        first = simulate(SwarmState(101, 51), MMm, config, seed=99)
        second = simulate(SwarmState(101, 51), MMm, config, seed=99)
        assert first == second

    def test_different_seeds_differ(self):
        config = SimConfig(max_events=200)
        a = simulate(SwarmState(101, 51), MMM, config, seed=1)
        b = simulate(SwarmState(101, 51), MMM, config, seed=2)
        assert a.events != b.events

    def test_trajectory_invariants_and_replay(self):
        config = SimConfig(noise_rate=0.05, max_events=5_000)
        trajectory = simulate(SwarmState(101, 51), MMm, config, seed=7)
        times = [event.time for event in trajectory.events]
        assert all(b > a for a, b in zip(times, times[1:]))
        counts = [trajectory.initial_state.count_x1] + [
            event.count_x1 for event in trajectory.events
        ]
        assert all(abs(b - a) <= 1 for a, b in zip(counts, counts[1:]))
        assert trajectory.final_state.n_agents == 101
        verify_trajectory(trajectory, MMm)

    def test_replay_detects_tampering(self):
        config = SimConfig(max_events=100)
        trajectory = simulate(SwarmState(101, 51), MMM, config, seed=7)
        event = trajectory.events[10]
        bad_event = TrajectoryEvent(event.time, event.kind, 100)
        tampered = replace(
            trajectory,
            events=trajectory.events[:10] + (bad_event,) + trajectory.events[11:],
        )
        with pytest.raises(ValueError):
            verify_trajectory(tampered, MMM)

    def test_absorption_from_center(self):
        config = SimConfig(max_events=10**6, stop_at_consensus=True)
        trajectory = simulate(SwarmState(101, 51), MMM, config, seed=7)
        assert trajectory.final_state.is_consensus
        assert trajectory.n_events < 10**6
        assert abs(trajectory.final_state.z) == 1.0

    def test_stop_at_consensus_immediately(self):
        config = SimConfig(stop_at_consensus=True)
        trajectory = simulate(SwarmState(101, 101), MMM, config, seed=0)
        assert trajectory.n_events == 0
        assert trajectory.events == ()

    def test_t_max_bound(self):
        config = SimConfig(noise_rate=0.01, t_max=2.0)
        trajectory = simulate(SwarmState(101, 51), MMM, config, seed=5)
        assert trajectory.final_time <= 2.0
        assert all(event.time <= 2.0 for event in trajectory.events)

    def test_frozen_propagates(self):
        config = SimConfig(rule_rate=0.0, noise_rate=0.0, max_events=10)
        with pytest.raises(FrozenSystemError):
            simulate(SwarmState(101, 51), None, config, seed=0)

    def test_noise_only_mean_decays_exponentially(self):
        # E[z(t)] = z(0) * exp(-2 c t); at t = ln(2)/(2c) the mean halves.
        c = 0.1
        t_half = math.log(2.0) / (2.0 * c)
        config = SimConfig(rule_rate=0.0, noise_rate=c, t_max=t_half)
        initial = SwarmState(101, 91)
        replicates = 10_000
        finals = np.empty(replicates)
        for i in range(replicates):
            finals[i] = simulate(initial, None, config, seed=5000 + i).final_state.z
        mean = finals.mean()
        stderr = finals.std(ddof=1) / math.sqrt(replicates)
        assert abs(mean - initial.z / 2.0) <= 3.0 * stderr

    @pytest.mark.slow
    def test_all_minority_hovers_at_center(self):
        rules = parse_polarity_string("mmm", 7)
        config = SimConfig(max_events=10**6)
        trajectory = simulate(SwarmState(101, 51), rules, config, seed=11)
        t_prev, z_prev, acc = 0.0, trajectory.initial_state.z, 0.0
        for event in trajectory.events:
            acc += z_prev * (event.time - t_prev)
            t_prev = event.time
            z_prev = 2.0 * event.count_x1 / 101 - 1.0
        time_average = acc / trajectory.final_time
        assert -0.15 <= time_average <= 0.15


class TestTrajectoryCsv:
    def test_format(self):
        config = SimConfig(noise_rate=0.05, max_events=200)
        trajectory = simulate(SwarmState(101, 51), MMM_G5, config, seed=13)
        lines = list(trajectory_csv_lines(trajectory, "# provenance"))
        assert lines[0] == "# provenance"
        assert lines[1] == "time,event,k,count_x1,z"
        labels = set()
        for row in lines[2:]:
            time_s, label, k_s, count_s, z_s = row.split(",")
            labels.add(label)
            assert float(time_s) > 0
            if label in ("noise12", "noise21"):
                assert k_s == ""
            else:
                assert 0 <= int(k_s) <= 5
            assert 0 <= int(count_s) <= 101
            assert -1.0 <= float(z_s) <= 1.0
        assert "rule" in labels

    def test_seventeen_significant_digits(self):
        config = SimConfig(max_events=5)
        trajectory = simulate(SwarmState(101, 51), MMM, config, seed=1)
        row = list(trajectory_csv_lines(trajectory))[1]
        time_s = row.split(",")[0]
        assert float(time_s) == trajectory.events[0].time

    def test_event_labels(self):
        assert event_label(RuleFired(3)) == "rule"
        assert event_label(NullDraw(0)) == "null"
        assert event_label(NoiseFlip(FlipDirection.X1_TO_X2)) == "noise12"
        assert event_label(NoiseFlip(FlipDirection.X2_TO_X1)) == "noise21"
