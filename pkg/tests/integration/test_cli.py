import json

import pandas as pd
import pytest

from kerrkit.integrations import storage
from kerrkit.main import main


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("KERRKIT_DATA_DIR", str(tmp_path / "no-data"))


@pytest.fixture
def moons_csv(tmp_path, small_moons):
    csv_path, _ = storage.write_dataset(small_moons, tmp_path / "inputs" / "moons-small.csv")
    return csv_path


def _spec(tmp_path, family, **params):
    path = tmp_path / f"{family}.json"
    path.write_text(json.dumps({"family": family, "params": params}))
    return path


def _read(path):
    return json.loads(path.read_text())


def test_gen_data_is_reproducible(tmp_path):
    assert main(["gen-data", "moons", "--version", "v1", "--seed", "7", "--out", "a"]) == 0
    assert main(["gen-data", "moons", "--version", "v1", "--seed", "7", "--out", "b"]) == 0

    csv_a = tmp_path / "a" / "moons-v1.csv"
    assert len(csv_a.read_text().splitlines()) == 401
    assert csv_a.read_bytes() == (tmp_path / "b" / "moons-v1.csv").read_bytes()
    assert (tmp_path / "a" / "manifest.json").read_bytes() == (tmp_path / "b" / "manifest.json").read_bytes()

    manifest = _read(tmp_path / "a" / "manifest.json")
    assert manifest["command"] == "gen-data"
    assert manifest["seeds"] == {"seed": 7}
    assert manifest["outputs"] == ["moons-v1.csv", "moons-v1.json", "summary.json"]
    assert "out" not in manifest["arguments"]


def test_gen_data_disks_preset(tmp_path):
    assert main(["gen-data", "disks", "--preset", "double", "--out", "d"]) == 0
    frame = pd.read_csv(tmp_path / "d" / "disks-double.csv")
    assert len(frame) == 95


@pytest.mark.parametrize(
    "argv",
    [
        ["gen-data", "spirals"],
        ["gen-data", "moons", "--preset", "double"],
        ["gen-data", "disks", "--version", "v1"],
        ["gen-data", "moons", "--factor", "0.3"],
        ["gen-data", "moons", "--fetch"],
        ["--workers", "many", "gen-data", "moons"],
        [],
    ],
)
def test_usage_errors_exit_one(argv, capsys):
    assert main(argv) == 1
    assert "kerrkit: error:" in capsys.readouterr().err


def test_breastmnist_without_archive_exits_three(capsys):
    assert main(["gen-data", "breastmnist", "--out", "bm"]) == 3
    assert "breastmnist.npz" in capsys.readouterr().err


def test_gram_is_worker_invariant(tmp_path, moons_csv):
    spec = _spec(tmp_path, "KerrPhaseNeg", c=0.5, **{"lambda": -2.0}, j=2.0)
    assert main(["gram", "--data", str(moons_csv), "--spec", str(spec), "--audit", "--workers", "1", "--out", "w1"]) == 0
    assert main(["gram", "--data", str(moons_csv), "--spec", str(spec), "--audit", "--workers", "2", "--out", "w2"]) == 0

    assert (tmp_path / "w1" / "gram.kgrm").read_bytes() == (tmp_path / "w2" / "gram.kgrm").read_bytes()
    audit = _read(tmp_path / "w1" / "audit.json")
    assert audit["pass"] is True
    assert audit["n"] == 60
    assert audit["repaired"] is False
    assert _read(tmp_path / "w1" / "manifest.json")["outputs"] == ["audit.json", "gram.kgrm"]


def test_gram_qec_is_repaired(tmp_path, moons_csv):
    spec = _spec(tmp_path, "QEC", l=1.0, **{"lambda": -2.0}, j=1.0)
    assert main(["gram", "--data", str(moons_csv), "--spec", str(spec), "--audit", "--out", "q"]) == 0
    audit = _read(tmp_path / "q" / "audit.json")
    assert audit["repaired"] is True
    assert audit["pass"] is True


def test_corrupt_spec_exits_one(tmp_path, moons_csv, capsys):
    spec = tmp_path / "broken.json"
    spec.write_text('{"family": ')
    assert main(["gram", "--data", str(moons_csv), "--spec", str(spec)]) == 1
    assert "kerrkit: error:" in capsys.readouterr().err


def test_train_writes_model_result_and_boundary(tmp_path, moons_csv):
    spec = _spec(tmp_path, "RBF", sigma=0.5)
    argv = ["train", "--data", str(moons_csv), "--spec", str(spec), "--c-reg", "10",
            "--boundary-grid", "5x4", "--format", "csv", "--out", "t"]
    assert main(argv) == 0

    result = _read(tmp_path / "t" / "result.json")
    assert 0.0 <= result["f1_test"] <= 1.0
    assert result["solver_status"] == "converged"
    assert (tmp_path / "t" / "model.json").exists()
    boundary = pd.read_csv(tmp_path / "t" / "boundary.csv")
    assert len(boundary) == 20
    assert list(boundary.columns) == ["x0", "x1", "decision", "label"]


def test_train_reuses_cached_gram(tmp_path, moons_csv):
    spec = _spec(tmp_path, "RBF", sigma=0.5)
    assert main(["gram", "--data", str(moons_csv), "--spec", str(spec), "--out", "g"]) == 0
    assert main(["train", "--data", str(moons_csv), "--spec", str(spec), "--out", "fresh"]) == 0
    assert main(["train", "--data", str(moons_csv), "--spec", str(spec),
                 "--gram", str(tmp_path / "g" / "gram.kgrm"), "--out", "cached"]) == 0
    assert _read(tmp_path / "fresh" / "result.json")["f1_test"] == pytest.approx(
        _read(tmp_path / "cached" / "result.json")["f1_test"]
    )


def test_dataset_without_labels_exits_one(tmp_path):
    data = tmp_path / "unlabelled.csv"
    data.write_text("f0,f1\n0.1,0.2\n0.3,0.4\n")
    spec = _spec(tmp_path, "RBF", sigma=1.0)
    assert main(["train", "--data", str(data), "--spec", str(spec)]) == 1


def test_grid_search_cv_with_trace(tmp_path, moons_csv):
    argv = ["grid-search", "--data", str(moons_csv), "--family", "RBF", "--grid", '{"sigma": [0.5, 1.0]}',
            "--c-reg", "1,10", "--scenario", "cv", "--trace", "--out", "s"]
    assert main(argv) == 0

    result = _read(tmp_path / "s" / "result.json")
    assert 0.0 <= result["f1_cv"] <= 1.0
    assert result["best_c_reg"] in (1.0, 10.0)
    trace = pd.read_csv(tmp_path / "s" / "trace.csv")
    assert len(trace) == 4


def test_grid_search_rejects_bad_grid(moons_csv):
    assert main(["grid-search", "--data", str(moons_csv), "--family", "RBF", "--grid", "[0.5]"]) == 1


def test_lattice_negative_preset_revives(tmp_path):
    assert main(["lattice", "--preset", "fig7-neg", "--out", "l"]) == 0
    summary = _read(tmp_path / "l" / "lattice.json")
    assert summary["revival"]["revival_residual"] < 1e-6
    assert summary["revival"]["transfer_residual"] < 1e-6
    assert summary["unitarity_residual"] < 1e-10
    frame = pd.read_csv(tmp_path / "l" / "intensities.csv")
    assert len(frame) == 41
    assert frame.columns[0] == "z"


def test_lattice_single_point_at_origin(tmp_path):
    argv = ["lattice", "--lambda", "2", "--j", "1", "--z-max", "0", "--z-points", "1", "--out", "z0"]
    assert main(argv) == 0
    frame = pd.read_csv(tmp_path / "z0" / "intensities.csv")
    assert len(frame) == 1
    assert frame.loc[0, "guide_0"] == pytest.approx(1.0)
    assert frame.drop(columns=["z", "guide_0"]).to_numpy().max() == pytest.approx(0.0, abs=1e-15)


def test_lattice_invalid_index_exits_one():
    assert main(["lattice", "--lambda", "-2", "--j", "0.7", "--z-max", "1"]) == 1
    assert main(["lattice", "--preset", "fig7-neg", "--lambda", "-2"]) == 1


def test_bench_table_five_without_archive(tmp_path):
    assert main(["bench", "--table", "5", "--quick", "--format", "csv", "--out", "b"]) == 0
    frame = pd.read_csv(tmp_path / "b" / "table5.csv")
    assert set(frame["status"]) == {"skipped", "reference"}


@pytest.mark.slow
def test_verify_fault_exits_two_and_keeps_manifest(tmp_path):
    assert main(["verify", "--fault", "zeta0-lemma", "--out", "v"]) == 2
    report = _read(tmp_path / "v" / "verify.json")
    assert report["passed"] is False
    assert "gaussian_decomposition" in report["failed_checks"]
    assert _read(tmp_path / "v" / "manifest.json")["outputs"] == ["verify.json"]


def test_train_qec_matches_unrepaired_cached_gram(tmp_path, moons_csv):
    spec = _spec(tmp_path, "QEC", l=0.5, **{"lambda": -2.0}, j=1.0)
    assert main(["gram", "--data", str(moons_csv), "--spec", str(spec), "--no-repair", "--out", "g"]) == 0
    assert main(["train", "--data", str(moons_csv), "--spec", str(spec), "--out", "fresh"]) == 0
    assert main(["train", "--data", str(moons_csv), "--spec", str(spec),
                 "--gram", str(tmp_path / "g" / "gram.kgrm"), "--out", "cached"]) == 0

    fresh = _read(tmp_path / "fresh" / "result.json")
    cached = _read(tmp_path / "cached" / "result.json")
    assert fresh["f1_test"] == pytest.approx(cached["f1_test"])
    assert fresh["clipped_mass"] == pytest.approx(cached["clipped_mass"])
    assert fresh["clipped_mass"] >= 0.0
