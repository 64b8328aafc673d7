import json
import math

import pytest

from swarmdec.cli import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    main,
)

MMm_SCHEMA = """\
X1+6X2 -> 7X2
2X1+5X2 -> X1+6X2
3X1+4X2 -> 4X1+3X2
4X1+3X2 -> 3X1+4X2
5X1+2X2 -> 6X1+X2
6X1+X2 -> 7X1
"""


def read_csv(path):
    comments, header, rows = [], None, []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            comments.append(line)
        elif header is None:
            header = line
        else:
            rows.append(line.split(","))
    return comments, header, rows


def read_json_with_header(path):
    text = path.read_text()
    comment, _, body = text.partition("\n")
    assert comment.startswith("# swarmdec ")
    return comment, json.loads(body)


class TestDrift:
    def test_analytic_curve(self, tmp_path):
        out = tmp_path / "mmm0.csv"
        code = main(
            [
                "drift", "--agents", "101", "--group", "7", "--rules", "MMM",
                "--epsilon", "0", "--grid", "201", "--out", str(out),
            ]
        )
        assert code == EXIT_OK
        comments, header, rows = read_csv(out)
        assert header == "z,dzdt"
        assert len(rows) == 201
        assert comments[0].startswith("# swarmdec ")
        assert "agents=101" in comments[0]
        assert "rules=MMM" in comments[0]
        assert float(rows[0][0]) == -1.0 and float(rows[0][1]) == 0.0
        assert float(rows[-1][0]) == 1.0 and float(rows[-1][1]) == 0.0

    def test_complement_rowwise_negation(self, tmp_path):
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        base = ["--agents", "101", "--epsilon", "0", "--grid", "201"]
        assert main(["drift", "--rules", "MMM", *base, "--out", str(out_a)]) == EXIT_OK
        assert main(["drift", "--rules", "mmm", *base, "--out", str(out_b)]) == EXIT_OK
        _, _, rows_a = read_csv(out_a)
        _, _, rows_b = read_csv(out_b)
        for row_a, row_b in zip(rows_a, rows_b):
            assert row_a[0] == row_b[0]
            assert float(row_a[1]) == -float(row_b[1])

    def test_pure_noise_rules_none(self, tmp_path):
        out = tmp_path / "noise.csv"
        code = main(
            ["drift", "--rules", "none", "--epsilon", "0.1", "--grid", "21",
             "--out", str(out)]
        )
        assert code == EXIT_OK
        _, _, rows = read_csv(out)
        assert float(rows[0][1]) == 0.1   # drift(-1) = +eps
        assert float(rows[-1][1]) == -0.1  # drift(+1) = -eps

    def test_empirical_sibling(self, tmp_path):
        out = tmp_path / "curve.csv"
        code = main(
            ["drift", "--agents", "21", "--rules", "M", "--epsilon", "0.1",
             "--samples", "5000", "--seed", "3", "--empirical", "--out", str(out)]
        )
        assert code == EXIT_OK
        sibling = tmp_path / "curve.empirical.csv"
        assert sibling.exists()
        _, header, rows = read_csv(sibling)
        assert header == "z,dzdt"
        assert len(rows) == 22  # one row per lattice state

    def test_polarity_length_mismatch(self, tmp_path, capsys):
        code = main(
            ["drift", "--rules", "MM", "--group", "7", "--out",
             str(tmp_path / "x.csv")]
        )
        assert code == EXIT_CONFIG
        assert "length" in capsys.readouterr().err

    def test_missing_out(self):
        assert main(["drift", "--rules", "MMM"]) == EXIT_CONFIG

    def test_missing_rules(self, tmp_path):
        assert main(["drift", "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG

    def test_io_error(self, tmp_path):
        code = main(
            ["drift", "--rules", "MMM", "--out",
             str(tmp_path / "no_such_dir" / "x.csv")]
        )
        assert code == EXIT_IO

    def test_plot_script(self, tmp_path):
        out = tmp_path / "d.csv"
        script = tmp_path / "d.gp"
        code = main(
            ["drift", "--rules", "MMM", "--grid", "11", "--out", str(out),
             "--plot-script", str(script)]
        )
        assert code == EXIT_OK
        assert "plot" in script.read_text()


class TestProbs:
    def test_rows_normalized(self, tmp_path):
        out = tmp_path / "p7.csv"
        code = main(["probs", "--agents", "101", "--group", "7", "--out", str(out)])
        assert code == EXIT_OK
        _, header, rows = read_csv(out)
        assert header == "z," + ",".join(f"p{k}" for k in range(8))
        assert len(rows) == 102
        for row in rows:
            total = math.fsum(float(cell) for cell in row[1:])
            assert abs(total - 1.0) <= 1e-12

    def test_epsilon_does_not_change_output(self, tmp_path):
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert main(["probs", "--agents", "101", "--group", "7", "--out", str(out_a)]) == EXIT_OK
        assert main(
            ["probs", "--agents", "101", "--group", "7", "--epsilon", "0.1",
             "--out", str(out_b)]
        ) == EXIT_OK
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_empirical_sibling_close_to_analytic(self, tmp_path):
        out = tmp_path / "p.csv"
        code = main(
            ["probs", "--agents", "101", "--group", "7", "--empirical",
             "--samples", "20000", "--seed", "42", "--out", str(out)]
        )
        assert code == EXIT_OK
        _, _, analytic_rows = read_csv(out)
        _, _, sampled_rows = read_csv(tmp_path / "p.empirical.csv")
        assert len(sampled_rows) == 102
        for row_a, row_e in zip(analytic_rows, sampled_rows):
            for cell_a, cell_e in zip(row_a[1:], row_e[1:]):
                assert abs(float(cell_a) - float(cell_e)) < 0.02

    def test_group_required(self, tmp_path):
        assert main(["probs", "--out", str(tmp_path / "p.csv")]) == EXIT_CONFIG


class TestSimulate:
    def test_absorbs_and_reports(self, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        code = main(
            ["simulate", "--rules", "MMM", "--group", "7", "--epsilon", "0",
             "--events", "100000", "--seed", "7", "--init-z", "0.0099",
             "--out", str(out)]
        )
        assert code == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert abs(summary["final_z"]) == 1.0
        assert summary["n_events"] == 100000
        counts = summary["event_counts"]
        assert counts["rule"] + counts["noise12"] + counts["noise21"] + counts["null"] == 100000
        _, header, rows = read_csv(out)
        assert header == "time,event,k,count_x1,z"
        assert len(rows) == 100000

    def test_byte_identical_reruns(self, tmp_path):
        args = [
            "simulate", "--rules", "MMm", "--epsilon", "0.05", "--events",
            "5000", "--seed", "21",
        ]
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert main([*args, "--out", str(out_a)]) == EXIT_OK
        assert main([*args, "--out", str(out_b)]) == EXIT_OK
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_init_z_out_of_range(self, tmp_path):
        code = main(
            ["simulate", "--rules", "MMM", "--init-z", "2.0", "--out",
             str(tmp_path / "t.csv")]
        )
        assert code == EXIT_CONFIG

    def test_init_k_and_z_conflict(self, tmp_path):
        code = main(
            ["simulate", "--rules", "MMM", "--init-z", "0.0", "--init-k", "51",
             "--out", str(tmp_path / "t.csv")]
        )
        assert code == EXIT_CONFIG

    def test_frozen_config_rejected(self, tmp_path):
        code = main(
            ["simulate", "--rules", "none", "--epsilon", "0", "--events", "10",
             "--out", str(tmp_path / "t.csv")]
        )
        assert code == EXIT_CONFIG

    def test_stop_at_consensus_and_elide_nulls(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        code = main(
            ["simulate", "--rules", "MMM", "--seed", "3", "--init-k", "51",
             "--stop-at-consensus", "--elide-nulls", "--events", "1000000",
             "--out", str(out)]
        )
        assert code == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert abs(summary["final_z"]) == 1.0
        _, _, rows = read_csv(out)
        assert all(row[1] != "null" for row in rows)


class TestFixedPoints:
    def test_all_minority(self, tmp_path):
        out = tmp_path / "fp.json"
        code = main(
            ["fixed-points", "--rules", "mmm", "--epsilon", "0", "--out", str(out)]
        )
        assert code == EXIT_OK
        _, points = read_json_with_header(out)
        assert [p["stability"] for p in points] == ["unstable", "stable", "unstable"]
        assert points[0]["z"] == -1.0
        assert abs(points[1]["z"]) <= 1e-6
        assert points[2]["z"] == 1.0
        assert all(p["bracket"][0] <= p["z"] <= p["bracket"][1] for p in points)

    def test_all_majority(self, tmp_path):
        out = tmp_path / "fp.json"
        assert main(["fixed-points", "--rules", "MMM", "--out", str(out)]) == EXIT_OK
        _, points = read_json_with_header(out)
        assert [p["stability"] for p in points] == ["stable", "unstable", "stable"]

    def test_noise_pushes_roots_inside(self, tmp_path):
        out = tmp_path / "fp.json"
        code = main(
            ["fixed-points", "--rules", "MMM", "--epsilon", "0.1", "--out", str(out)]
        )
        assert code == EXIT_OK
        _, points = read_json_with_header(out)
        stable = [p for p in points if p["stability"] == "stable"]
        assert stable
        assert all(abs(p["z"]) < 1.0 for p in stable)


class TestRulesets:
    def test_g7_listing(self, capsys):
        assert main(["rulesets", "--group", "7"]) == EXIT_OK
        out = capsys.readouterr().out
        for label in ("MMM", "MMm", "MmM", "Mmm", "mMM", "mMm", "mmM", "mmm"):
            assert f"{label}\n" in out
        assert "X1+6X2 -> 7X2" in out
        assert "6X1+X2 -> 5X1+2X2" in out

    def test_g5_count(self, capsys):
        assert main(["rulesets", "--group", "5"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.count("->") == 4 * 4  # 4 rule sets, 4 reactions each

    def test_even_group(self):
        assert main(["rulesets", "--group", "4"]) == EXIT_CONFIG

    def test_written_file_gets_provenance(self, tmp_path):
        out = tmp_path / "rules.txt"
        assert main(["rulesets", "--group", "3", "--out", str(out)]) == EXIT_OK
        assert out.read_text().startswith("# swarmdec ")


class TestValidate:
    def test_passes(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(["validate", "--out", str(out)])
        assert code == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["passed"] is True
        names = {check["name"] for check in report["checks"]}
        assert names == {
            "pmf-bruteforce-agreement",
            "lattice-antisymmetry",
            "complement-negation",
            "noise-superposition",
        }
        _, file_report = read_json_with_header(out)
        assert file_report["passed"] is True


class TestConfigFileAndEnvironment:
    def test_config_file_supplies_defaults(self, tmp_path):
        out = tmp_path / "c.csv"
        config = tmp_path / "run.json"
        config.write_text(json.dumps({
            "agents": 51, "rules": "Mm", "epsilon": 0.05, "grid": 11,
            "out": str(out), "seed": 4,
        }))
        assert main(["drift", "--config", str(config)]) == EXIT_OK
        comments, _, rows = read_csv(out)
        assert "agents=51" in comments[0]
        assert "rules=Mm" in comments[0]
        assert "seed=4" in comments[0]
        assert len(rows) == 11

    def test_flags_override_config(self, tmp_path):
        out = tmp_path / "c.csv"
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"rules": "Mm", "grid": 11, "out": str(out)}))
        assert main(["drift", "--config", str(config), "--rules", "mm"]) == EXIT_OK
        comments, _, _ = read_csv(out)
        assert "rules=mm" in comments[0]

    def test_unknown_config_key(self, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"agent": 51}))
        assert main(["drift", "--config", str(config)]) == EXIT_CONFIG

    def test_malformed_config(self, tmp_path):
        config = tmp_path / "run.json"
        config.write_text("{not json")
        assert main(["drift", "--config", str(config)]) == EXIT_CONFIG

    def test_seed_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SWARMDEC_SEED", "77")
        out = tmp_path / "c.csv"
        assert main(["drift", "--rules", "M", "--grid", "11", "--out", str(out)]) == EXIT_OK
        comments, _, _ = read_csv(out)
        assert "seed=77" in comments[0]

    def test_seed_flag_beats_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SWARMDEC_SEED", "77")
        out = tmp_path / "c.csv"
        assert main(
            ["drift", "--rules", "M", "--grid", "11", "--seed", "5", "--out", str(out)]
        ) == EXIT_OK
        comments, _, _ = read_csv(out)
        assert "seed=5" in comments[0]

    def test_invalid_env_seed(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SWARMDEC_SEED", "not-a-number")
        assert main(
            ["drift", "--rules", "M", "--out", str(tmp_path / "c.csv")]
        ) == EXIT_CONFIG


class TestSchemaFileInput:
    def test_schema_file(self, tmp_path):
        schema_path = tmp_path / "rules.txt"
        schema_path.write_text(MMm_SCHEMA)
        out = tmp_path / "d.csv"
        code = main(["drift", "--schema", str(schema_path), "--out", str(out)])
        assert code == EXIT_OK
        comments, _, _ = read_csv(out)
        assert "rules=MMm" in comments[0]
        assert "group=7" in comments[0]

    def test_schema_and_rules_conflict(self, tmp_path):
        schema_path = tmp_path / "rules.txt"
        schema_path.write_text(MMm_SCHEMA)
        code = main(
            ["drift", "--schema", str(schema_path), "--rules", "MMM", "--out",
             str(tmp_path / "d.csv")]
        )
        assert code == EXIT_CONFIG

    def test_invalid_schema_file(self, tmp_path):
        schema_path = tmp_path / "rules.txt"
        schema_path.write_text("X1+6X2 -> 7X2\n")
        code = main(
            ["drift", "--schema", str(schema_path), "--out", str(tmp_path / "d.csv")]
        )
        assert code == EXIT_CONFIG


class TestArgparseBehaviour:
    def test_unknown_command(self):
        assert main(["frobnicate"]) == EXIT_CONFIG

    def test_unknown_flag(self):
        assert main(["drift", "--definitely-not-a-flag"]) == EXIT_CONFIG
