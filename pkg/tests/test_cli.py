import json
import subprocess
import sys

import numpy as np
import pytest

from notesort.datasets import read_fvec, read_manifest
from notesort.head import load_head


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "notesort", *map(str, args)],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    ws = tmp_path_factory.mktemp("cli")
    gen = run_cli(
        "gen", "--classes", 5, "--dim", 8, "--per-class", 60, "--separation", 8,
        "--legacy-fraction", 0.1, "--cat1", 30, "--seed", 11,
        "--out", ws / "ds.fvec",
    )
    assert gen.returncode == 0, gen.stderr
    train = run_cli(
        "train", "--data", ws / "ds.fvec", "--episodes", 400, "--batch", 50,
        "--seed", 11, "--out", ws / "head.model",
    )
    assert train.returncode == 0, train.stderr
    return ws


class TestGen:
    def test_writes_files_and_manifest(self, workspace):
        assert (workspace / "ds.fvec").exists()
        doc = read_manifest(workspace / "ds.manifest.json")
        assert doc["n_classes"] == 5
        assert doc["config"]["seed"] == 11

    def test_missing_out_is_usage_error(self):
        result = run_cli("gen", "--classes", 5, "--dim", 8)
        assert result.returncode == 2

    def test_byte_identical_reruns(self, tmp_path):
        args = ("gen", "--classes", 4, "--dim", 6, "--per-class", 10, "--seed", 3)
        run_cli(*args, "--out", tmp_path / "a.fvec")
        run_cli(*args, "--out", tmp_path / "b.fvec")
        assert (tmp_path / "a.fvec").read_bytes() == (tmp_path / "b.fvec").read_bytes()

    def test_config_echoed(self, tmp_path):
        result = run_cli("gen", "--classes", 4, "--dim", 6, "--per-class", 10,
                         "--seed", 3, "--out", tmp_path / "a.fvec")
        assert "# notesort gen" in result.stdout
        assert "seed=3" in result.stdout


class TestTrain:
    def test_model_written(self, workspace):
        params = load_head(workspace / "head.model")
        assert params.n_classes == 5
        assert params.dim == 8
        history = (workspace / "head.model.loss.csv").read_text().splitlines()
        assert history[0] == "episode,loss"
        episode, value = history[1].split(",")
        assert episode == "0"
        assert float(value) > 0.0 and "(" not in value

    def test_zero_episodes_is_zero_init(self, workspace, tmp_path):
        result = run_cli("train", "--data", workspace / "ds.fvec", "--episodes", 0,
                         "--out", tmp_path / "z.model")
        assert result.returncode == 0
        params = load_head(tmp_path / "z.model")
        assert np.all(params.W == 0.0) and np.all(params.b == 0.0)

    def test_corrupt_input_exits_one(self, tmp_path):
        bad = tmp_path / "bad.fvec"
        bad.write_bytes(b"FVEXjunkjunkjunk")
        result = run_cli("train", "--data", bad, "--out", tmp_path / "m.model")
        assert result.returncode == 1
        assert "bad magic" in result.stderr

    def test_deterministic_model_and_reports(self, workspace, tmp_path):
        outs = []
        for name in ("r1", "r2"):
            result = run_cli(
                "train", "--data", workspace / "ds.fvec", "--episodes", 50,
                "--batch", 20, "--seed", 5, "--out", tmp_path / f"{name}.model",
                "--history", tmp_path / f"{name}.csv",
            )
            outs.append(result.stdout.replace(name, "X"))
        assert (tmp_path / "r1.model").read_bytes() == (tmp_path / "r2.model").read_bytes()
        assert (tmp_path / "r1.csv").read_bytes() == (tmp_path / "r2.csv").read_bytes()
        assert outs[0] == outs[1]


class TestCalibrate:
    def test_prints_threshold_and_ecdf(self, workspace, tmp_path):
        result = run_cli(
            "calibrate", "--model", workspace / "head.model", "--data", workspace / "ds.fvec",
            "--quantile", 0.5, "--seed", 11, "--ecdf-out", tmp_path / "ecdf.csv",
        )
        assert result.returncode == 0, result.stderr
        line = next(l for l in result.stdout.splitlines() if l.startswith("threshold:"))
        t = float(line.split()[1])
        assert 0.0 < t <= 1.0
        ecdf = (tmp_path / "ecdf.csv").read_text().splitlines()
        assert ecdf[0] == "value,cumulative_probability"

    def test_quantile_bounds_are_usage_errors(self, workspace):
        for q in (0, 1):
            result = run_cli("calibrate", "--model", workspace / "head.model",
                             "--data", workspace / "ds.fvec", "--quantile", q)
            assert result.returncode == 2

    def test_no_legacy_samples_exits_one(self, tmp_path):
        run_cli("gen", "--classes", 4, "--dim", 6, "--per-class", 30, "--seed", 2,
                "--out", tmp_path / "plain.fvec")
        run_cli("train", "--data", tmp_path / "plain.fvec", "--episodes", 10,
                "--out", tmp_path / "plain.model")
        result = run_cli("calibrate", "--model", tmp_path / "plain.model",
                         "--data", tmp_path / "plain.fvec", "--quantile", 0.5)
        assert result.returncode == 1
        assert "no legacy-rejected samples" in result.stderr


class TestSweep:
    def test_four_row_table(self, workspace, tmp_path):
        result = run_cli(
            "sweep", "--model", workspace / "head.model", "--data", workspace / "ds.fvec",
            "--thresholds", "0.9986,0.9972,0.9932,0.9803", "--seed", 11,
            "--out", tmp_path / "sweep.csv",
        )
        assert result.returncode == 0, result.stderr
        lines = (tmp_path / "sweep.csv").read_text().splitlines()
        data_lines = [l for l in lines if l and not l.startswith("#")]
        assert data_lines[0] == "threshold,reject_rate_pct,cat1_accepted,genuine_wrong_class"
        assert len(data_lines) == 5

    def test_deterministic_report(self, workspace):
        args = ("sweep", "--model", workspace / "head.model", "--data", workspace / "ds.fvec",
                "--thresholds", "0.9,0.5", "--seed", 11)
        assert run_cli(*args).stdout == run_cli(*args).stdout


class TestSort:
    def test_perfect_deck_all_fit(self, workspace, tmp_path):
        run_cli("gen", "--classes", 5, "--dim", 8, "--per-class", 40, "--separation", 12,
                "--seed", 11, "--out", tmp_path / "fit.fvec")
        run_cli("train", "--data", tmp_path / "fit.fvec", "--episodes", 600,
                "--batch", 50, "--seed", 11, "--out", tmp_path / "fit.model")
        result = run_cli(
            "sort", "--model", tmp_path / "fit.model", "--deck", tmp_path / "fit.fvec",
            "--threshold", 0.2, "--out", tmp_path / "sort.json",
        )
        assert result.returncode == 0, result.stderr
        doc = json.loads((tmp_path / "sort.json").read_text())
        assert doc["histogram"]["4a"] == 200
        assert sum(doc["histogram"].values()) == 200

    def test_ecb_mode(self, workspace, tmp_path):
        for name, extra in (
            ("cf", ["--separation", 12]),
            ("unfit", ["--separation", 12]),
            ("fit", ["--separation", 12]),
        ):
            run_cli("gen", "--classes", 5, "--dim", 8, "--per-class", 25, *extra,
                    "--seed", 11, "--out", tmp_path / f"{name}.fvec")
        run_cli("train", "--data", tmp_path / "fit.fvec", "--episodes", 600,
                "--batch", 50, "--seed", 11, "--out", tmp_path / "m.model")
        result = run_cli(
            "sort", "--model", tmp_path / "m.model", "--threshold", 0.2,
            "--counterfeit", tmp_path / "cf.fvec", "--unfit", tmp_path / "unfit.fvec",
            "--fit", tmp_path / "fit.fvec", "--out", tmp_path / "ecb.json",
        )
        assert result.returncode == 0, result.stderr
        doc = json.loads((tmp_path / "ecb.json").read_text())
        assert set(doc) >= {"counterfeit", "unfit", "fit", "criteria", "pass"}
        assert doc["pass"] is True  # clean decks sort perfectly

    def test_requires_deck_or_all_three(self, workspace):
        result = run_cli("sort", "--model", workspace / "head.model", "--threshold", 0.5)
        assert result.returncode == 2


class TestEvaluate:
    def test_model_mode(self, workspace):
        result = run_cli("evaluate", "--data", workspace / "ds.fvec",
                         "--model", workspace / "head.model", "--seed", 11)
        assert result.returncode == 0, result.stderr
        assert "test accuracy:" in result.stdout

    def test_grid_mode(self, workspace, tmp_path):
        result = run_cli(
            "evaluate", "--data", workspace / "ds.fvec", "--grid",
            "--images-per-class", "10,all", "--episodes", "50,150",
            "--batch", 20, "--seed", 11, "--out", tmp_path / "grid.csv",
        )
        assert result.returncode == 0, result.stderr
        lines = [l for l in (tmp_path / "grid.csv").read_text().splitlines()
                 if not l.startswith("#")]
        assert lines[0] == "images_per_class,50,150"
        assert len(lines) == 3

    def test_needs_model_without_grid(self, workspace):
        result = run_cli("evaluate", "--data", workspace / "ds.fvec")
        assert result.returncode == 2


class TestSplitConsistency:
    def test_commands_share_one_partition(self, workspace, tmp_path):
        """With category-1 samples present, every subcommand must derive the
        same per-class partition from (data, seed, ratios); the confusion
        matrix reported by evaluate pins the test-split membership."""
        from notesort.datasets import stratified_split
        from notesort.evaluation import confusion
        from notesort.head import forward

        data = read_fvec(workspace / "ds.fvec", n_classes=5)
        _, _, test_part = stratified_split(data, 0.10, 0.10, seed=11)
        expected_test = test_part.banknotes()
        params = load_head(workspace / "head.model")
        predicted = np.argmax(forward(expected_test.features, params), axis=1) + 1
        expected = confusion(predicted, expected_test.labels, 5)

        result = run_cli("evaluate", "--data", workspace / "ds.fvec",
                         "--model", workspace / "head.model", "--seed", 11,
                         "--out", tmp_path / "conf.csv")
        assert result.returncode == 0, result.stderr
        rows = [l.split(",")[1:] for l in (tmp_path / "conf.csv").read_text().splitlines()
                if l and not l.startswith("#")][1:]
        reported = np.array([[int(v) for v in row] for row in rows])
        assert np.array_equal(reported, expected)


class TestBench:
    def test_quick_run(self, workspace):
        result = run_cli(
            "bench", "--data", workspace / "ds.fvec", "--model", workspace / "head.model",
            "--reps", 3, "--calls", 500,
        )
        assert result.returncode == 0, result.stderr
        assert "per-image inference" in result.stdout
        assert "throughput" in result.stdout
