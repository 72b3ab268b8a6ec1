import json

import numpy as np
import pytest

from curalloc.cli import main
from curalloc.ingest import load_dataset, load_matrix_csv


@pytest.fixture(scope="module")
def dataset_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("data") / "ds"
    code = main(
        [
            "synth",
            "--out", str(out),
            "--objects", "30",
            "--locations", "8",
            "--users", "300",
            "--skew", "0.7",
            "--seed", "3",
        ]
    )
    assert code == 0
    return out


class TestSynth:
    def test_writes_all_artifacts(self, dataset_dir):
        names = {p.name for p in dataset_dir.iterdir()}
        assert {
            "schema.json",
            "collection.csv",
            "locations.csv",
            "users.csv",
            "assignment.csv",
            "occupancy.json",
        } <= names
        ds = load_dataset(dataset_dir)
        assert len(ds.collection) == 30

    def test_occupancy_wire_format(self, dataset_dir):
        occupancy = json.loads((dataset_dir / "occupancy.json").read_text())
        ds = load_dataset(dataset_dir)
        assert set(occupancy) == set(ds.location_ids)
        assert all(isinstance(v, list) for v in occupancy.values())


class TestSolve:
    def test_writes_assignment_and_report(self, dataset_dir, tmp_path):
        out = tmp_path / "run"
        code = main(
            [
                "solve",
                "--dataset", str(dataset_dir),
                "--beta", "100",
                "--lambda-bar", "1",
                "--tau-bar", "1",
                "--init", "uniform",
                "--seed", "0",
                "--out", str(out),
            ]
        )
        assert code == 0
        matrix, loc_ids, obj_ids = load_matrix_csv(out / "assignment.csv")
        ds = load_dataset(dataset_dir)
        assert loc_ids == ds.location_ids
        assert obj_ids == ds.object_ids
        assert np.abs(matrix.sum(axis=1) - ds.location_capacities).max() < 1e-9
        report = json.loads((out / "report.json").read_text())
        assert report["iterations_run"] == 1000
        assert len(report["objective_trace"]) == 1000
        assert report["initialization"] == "uniform"
        assert report["hyperparams"]["beta"] == 100

    def test_deterministic_given_seed(self, dataset_dir, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            main(
                [
                    "solve",
                    "--dataset", str(dataset_dir),
                    "--seed", "7",
                    "--out", str(out),
                ]
            )
            outs.append(load_matrix_csv(out / "assignment.csv")[0])
        assert (outs[0] == outs[1]).all()

    def test_missing_dataset_exits_one(self, tmp_path, capsys):
        code = main(["solve", "--dataset", str(tmp_path / "nope"), "--out", str(tmp_path / "o")])
        assert code == 1
        err = json.loads(capsys.readouterr().err)
        assert "message" in err

    def test_bad_flag_exits_two(self, dataset_dir, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(["solve", "--dataset", str(dataset_dir), "--init", "psychic"])
        assert info.value.code == 2


class TestEvaluate:
    def test_fifty_round_statistics(self, dataset_dir, tmp_path):
        out = tmp_path / "eval"
        code = main(
            [
                "evaluate",
                "--dataset", str(dataset_dir),
                "--rounds", "50",
                "--seed", "1",
                "--out", str(out),
            ]
        )
        assert code == 0
        payload = json.loads((out / "fairness.json").read_text())
        label = next(iter(payload))
        cell = next(iter(payload[label].values()))
        assert len(cell["gap_per_round"]) == 50
        assert (out / "fairness.txt").exists()

    def test_custom_group_and_assignment(self, dataset_dir, tmp_path):
        run = tmp_path / "run"
        main(["solve", "--dataset", str(dataset_dir), "--seed", "0", "--out", str(run)])
        out = tmp_path / "eval"
        code = main(
            [
                "evaluate",
                "--dataset", str(dataset_dir),
                "--rounds", "3",
                "--assignment", str(run / "assignment.csv"),
                "--group", "dim0=d0c1",
                "--seed", "1",
                "--out", str(out),
            ]
        )
        assert code == 0
        payload = json.loads((out / "fairness.json").read_text())
        assert len(payload) == 2  # baseline + provided assignment
        assert all("dim0:d0c1" in cells for cells in payload.values())


class TestSweep:
    def test_nine_cell_grid(self, dataset_dir, tmp_path):
        out = tmp_path / "sweep"
        code = main(
            [
                "sweep",
                "--dataset", str(dataset_dir),
                "--beta", "10,100,1000",
                "--tau-bar", "1,100,10000",
                "--rounds", "2",
                "--step-mode", "theoretical",
                "--iters", "300",
                "--seed", "0",
                "--out", str(out),
            ]
        )
        assert code == 0
        rows = (out / "sweep.csv").read_text().strip().splitlines()
        assert len(rows) == 10  # header + 9 cells
        assert (out / "plot_results.py").exists()


class TestEmbed:
    def test_embedding_artifacts(self, dataset_dir, tmp_path):
        runs = []
        for i, tau in enumerate(("1", "10000")):
            out = tmp_path / f"run{i}"
            main(
                [
                    "solve",
                    "--dataset", str(dataset_dir),
                    "--tau-bar", tau,
                    "--step-mode", "theoretical",
                    "--seed", "0",
                    "--out", str(out),
                ]
            )
            runs.append(str(out / "assignment.csv"))
        out = tmp_path / "embed"
        code = main(
            [
                "embed",
                "--assignment", runs[0],
                "--assignment", runs[1],
                "--assignment", runs[0],
                "--out", str(out),
            ]
        )
        assert code == 0
        lines = (out / "embedding.csv").read_text().strip().splitlines()
        assert len(lines) == 4  # header + 3 points


class TestConfig:
    def test_config_overrides_defaults(self, dataset_dir, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"max_iters": 17}))
        out = tmp_path / "run"
        code = main(
            [
                "--config", str(config),
                "solve",
                "--dataset", str(dataset_dir),
                "--seed", "0",
                "--out", str(out),
            ]
        )
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["iterations_run"] == 17
