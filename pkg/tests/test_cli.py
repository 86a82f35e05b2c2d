import json
import socket
from pathlib import Path

import pytest
from click.testing import CliRunner

from persona.arguments import save_trace
from persona.cli import main

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def dataset_dir(tmp_path, small_cohort):
    d = tmp_path / "dataset"
    d.mkdir()
    for trace in small_cohort:
        save_trace(trace, d / f"{trace.participant_id}.json")
    return d


@pytest.fixture()
def walkthrough_file(tmp_path, walkthrough_trace):
    path = tmp_path / "walkthrough.json"
    save_trace(walkthrough_trace, path)
    return path


class TestReplay:
    def test_walkthrough_values_printed(self, runner, walkthrough_file):
        result = runner.invoke(
            main, ["replay", str(walkthrough_file), "--params", "0.5", "1.5"]
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(result.output)
        states = doc["states"]
        assert states[0]["probs"][6] == pytest.approx(0.335, abs=1e-3)
        assert states[1]["probs"][0] == pytest.approx(0.45, abs=1e-3)
        assert states[1]["probs"][6] == pytest.approx(0.038, abs=1e-3)
        assert states[1]["probs"][1] == pytest.approx(0.006, abs=1e-3)

    def test_sbu_equals_identity_params(self, runner, walkthrough_file):
        sbu = runner.invoke(main, ["replay", str(walkthrough_file), "--method", "sbu"])
        weighted = runner.invoke(
            main, ["replay", str(walkthrough_file), "--params", "0.5", "1.0"]
        )
        sbu_states = json.loads(sbu.output)["states"]
        weighted_states = json.loads(weighted.output)["states"]
        for left, right in zip(sbu_states, weighted_states):
            assert left["probs"] == pytest.approx(right["probs"], abs=1e-12)

    def test_hm2_on_four_world_trace(self, runner, tmp_path, four_world_trace):
        path = tmp_path / "four.json"
        save_trace(four_world_trace, path)
        result = runner.invoke(main, ["replay", str(path), "--method", "hm2"])
        assert result.exit_code == 0, result.output
        final = json.loads(result.output)["states"][-1]["probs"]
        assert final == [0.0, 1.0, 0.0, 0.0]  # all mass on the a=F, b=T world

    def test_ha_table(self, runner, tmp_path, four_world_trace):
        path = tmp_path / "four.json"
        save_trace(four_world_trace, path)
        result = runner.invoke(main, ["replay", str(path), "--method", "ha"])
        assert json.loads(result.output)["argument_beliefs"] == {"A1": 0.2, "A2": 0.6}

    def test_invalid_trace_exit_code(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"schema": "persona-trace/v1", "participant": "x"}))
        result = runner.invoke(main, ["replay", str(bad)])
        assert result.exit_code == 2


class TestLearnCommand:
    def test_per_participant_output(self, runner, dataset_dir, tmp_path):
        out = tmp_path / "learned.json"
        result = runner.invoke(
            main, ["learn", str(dataset_dir), "--k", "3", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(out.read_text())
        assert len(doc) == 8
        for entry in doc:
            assert set(entry) >= {"participant", "k", "s", "r", "objective", "maximizers"}
        assert (tmp_path / "manifest.json").exists()

    def test_pooled_single_participant_matches_unpooled(self, runner, tmp_path, small_cohort):
        d = tmp_path / "solo"
        d.mkdir()
        save_trace(small_cohort[0], d / "p.json")
        solo = runner.invoke(main, ["learn", str(d), "--k", "2"])
        pooled = runner.invoke(main, ["learn", str(d), "--k", "2", "--pooled"])
        solo_doc = json.loads(solo.output)[0]
        pooled_doc = json.loads(pooled.output)[0]
        assert (solo_doc["s"], solo_doc["r"]) == (pooled_doc["s"], pooled_doc["r"])
        assert pooled_doc["participant"] == "pooled"

    def test_grid_override(self, runner, dataset_dir):
        result = runner.invoke(
            main,
            ["learn", str(dataset_dir), "--k", "1", "--grid", "0.5;1,2"],
        )
        assert result.exit_code == 0, result.output
        for entry in json.loads(result.output):
            assert entry["s"] == 0.5
            assert entry["r"] in (1.0, 2.0)


class TestExperimentCommand:
    def test_experiment_1_reports_and_determinism(self, runner, dataset_dir, tmp_path):
        out1 = tmp_path / "run1"
        out2 = tmp_path / "run2"
        for out in (out1, out2):
            result = runner.invoke(
                main,
                ["experiment", str(dataset_dir), "--which", "1", "--out", str(out), "--seed", "5"],
            )
            assert result.exit_code == 0, result.output
        for name in ("experiment1_buckets.csv", "experiment1_ttests.csv", "experiment1_rhos.csv", "experiment1.md"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        manifest = json.loads((out1 / "manifest.json").read_text())
        assert manifest["seed"] == 5
        assert manifest["dataset_hash"] == json.loads((out2 / "manifest.json").read_text())["dataset_hash"]

    def test_experiment_21_writes_per_round(self, runner, dataset_dir, tmp_path):
        out = tmp_path / "e21"
        result = runner.invoke(
            main,
            ["experiment", str(dataset_dir), "--which", "2.1", "--rounds", "2,3", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        assert (out / "experiment21_round2_buckets.csv").exists()
        assert (out / "experiment21_round3_ttests.csv").exists()
        assert (out / "exclusions.json").exists()

    def test_experiment_22_filter_reported(self, runner, dataset_dir, tmp_path):
        out = tmp_path / "e22"
        result = runner.invoke(
            main, ["experiment", str(dataset_dir), "--which", "2.2", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        exclusions = json.loads((out / "exclusions.json").read_text())
        assert "filtered_traces" in exclusions

    def test_strict_flags_degenerate_cells(self, runner, dataset_dir, tmp_path):
        # 2.1 on this dataset has degenerate redistribution columns
        result = runner.invoke(
            main,
            [
                "experiment", str(dataset_dir), "--which", "2.1",
                "--rounds", "4", "--out", str(tmp_path / "strict"), "--strict",
            ],
        )
        assert result.exit_code == 3


class TestSimulateCommand:
    def test_seed_determinism_byte_level(self, runner, tmp_path):
        scenario = SCENARIO_DIR / "teambuilding.json"
        out1, out2 = tmp_path / "c1", tmp_path / "c2"
        for out in (out1, out2):
            result = runner.invoke(
                main,
                ["simulate", str(scenario), "--n", "2", "--seed", "11", "--out", str(out)],
            )
            assert result.exit_code == 0, result.output
        for name in ("p000.json", "p001.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_simulated_dataset_feeds_learn_and_experiment(self, runner, tmp_path):
        # composed flow: the simulate output dir (which carries its own
        # manifest.json sidecar) must load cleanly as a dataset
        scenario = SCENARIO_DIR / "teambuilding.json"
        cohort = tmp_path / "cohort"
        result = runner.invoke(
            main, ["simulate", str(scenario), "--n", "2", "--seed", "6", "--out", str(cohort)]
        )
        assert result.exit_code == 0, result.output
        out = tmp_path / "learned.json"
        result = runner.invoke(
            main, ["learn", str(cohort), "--k", "3", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(out.read_text())
        assert len(doc) == 2
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert "skipped_rounds_total" in manifest["config"]
        result = runner.invoke(
            main,
            ["experiment", str(cohort), "--which", "1", "--out", str(tmp_path / "exp")],
        )
        assert result.exit_code == 0, result.output

    def test_fixed_params_cohort(self, runner, tmp_path):
        scenario = SCENARIO_DIR / "teambuilding.json"
        out = tmp_path / "fixed"
        result = runner.invoke(
            main,
            [
                "simulate", str(scenario), "--n", "1", "--true-params", "0.3", "3",
                "--seed", "2", "--out", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        doc = json.loads((out / "p000.json").read_text())
        assert doc["metadata"]["planted_params"] == {"s": 0.3, "r": 3.0}


class TestPlotWeighting:
    def test_default_pairs_and_shape(self, runner):
        result = runner.invoke(main, ["plot-weighting", "--step", "0.01"])
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "s,r,p,confidence"
        assert len(lines) == 1 + 5 * 101

    def test_curves_pass_through_crossover_and_identity(self, runner):
        result = runner.invoke(main, ["plot-weighting", "--step", "0.01"])
        rows = [line.split(",") for line in result.output.strip().splitlines()[1:]]
        for s, r, p, sigma in rows:
            if p == "0.5":
                assert float(sigma) == pytest.approx(float(s), abs=1e-12)
            if (s, r) == ("0.5", "1"):
                assert float(sigma) == pytest.approx(float(p), abs=1e-12)

    def test_samplewise_monotone(self, runner):
        result = runner.invoke(main, ["plot-weighting", "--step", "0.001"])
        rows = [line.split(",") for line in result.output.strip().splitlines()[1:]]
        by_pair = {}
        for s, r, p, sigma in rows:
            by_pair.setdefault((s, r), []).append(float(sigma))
        assert len(by_pair) == 5
        for sigmas in by_pair.values():
            assert all(a <= b for a, b in zip(sigmas, sigmas[1:]))

    def test_custom_pairs(self, runner, tmp_path):
        out = tmp_path / "curve.csv"
        result = runner.invoke(
            main, ["plot-weighting", "--pairs", "0.2:4", "--step", "0.5", "--out", str(out)]
        )
        assert result.exit_code == 0
        assert out.read_text().splitlines()[1].startswith("0.2,4,")


class TestServeCommand:
    def test_refuses_busy_port(self, runner):
        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        blocker.bind(("127.0.0.1", 0))
        port = blocker.getsockname()[1]
        try:
            result = runner.invoke(
                main,
                ["serve", "--port", str(port), "--scenarios", str(SCENARIO_DIR)],
            )
            assert result.exit_code == 2
            assert "cannot bind" in result.output
        finally:
            blocker.close()
