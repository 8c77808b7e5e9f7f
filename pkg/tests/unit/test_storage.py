import json

import numpy as np
import pytest

from kerrkit.integrations import storage
from kerrkit.models.schemas import KernelFamily, KernelSpec, RunManifest
from kerrkit.services.svm import train_svm
from kerrkit.utils.errors import DatasetUnavailableError, SchemaError


def test_dataset_csv_with_sidecar(tmp_path, small_moons):
    csv_path, sidecar = storage.write_dataset(small_moons, tmp_path / "moons.csv")
    header = csv_path.read_text().splitlines()[0]
    assert header == "f0,f1,label"
    assert b"\r\n" not in csv_path.read_bytes()
    assert json.loads(sidecar.read_text())["test_idx"] == small_moons.test_idx

    loaded = storage.read_dataset(csv_path)
    assert loaded.fingerprint == small_moons.fingerprint
    assert loaded.name == "moons-small"
    assert loaded.test_idx == small_moons.test_idx


def test_dataset_without_sidecar(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("f0,label\n0.1,0\n0.2,1\n")
    data = storage.read_dataset(path)
    assert data.name == "plain"
    assert data.test_idx is None


def test_missing_dataset(tmp_path):
    with pytest.raises(DatasetUnavailableError):
        storage.read_dataset(tmp_path / "nope.csv")


@pytest.mark.parametrize(
    "content,field",
    [
        ("f0,f1\n0.1,0.2\n", "label"),
        ("f0,g1,label\n0.1,0.2,0\n0.3,0.4,1\n", "g1"),
        ("f0,label\nabc,0\n0.3,1\n", "f0"),
    ],
)
def test_malformed_dataset_names_field(tmp_path, content, field):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(SchemaError) as exc:
        storage.read_dataset(path)
    assert exc.value.field == field


def test_bad_labels_are_schema_errors(tmp_path):
    path = tmp_path / "labels.csv"
    path.write_text("f0,label\n0.1,0\n0.2,3\n")
    with pytest.raises(SchemaError) as exc:
        storage.read_dataset(path)
    assert exc.value.field == "labels"


def test_spec_roundtrip_and_errors(tmp_path):
    spec = KernelSpec(family=KernelFamily.KERR_PHASE_NEG, params={"c": 0.5, "lambda": -2.0, "j": 2.0})
    path = storage.write_json(tmp_path / "spec.json", spec.to_json_dict())
    assert storage.read_spec(path) == spec

    (tmp_path / "broken.json").write_text("{\"family\": ")
    with pytest.raises(SchemaError):
        storage.read_spec(tmp_path / "broken.json")

    (tmp_path / "unknown.json").write_text(json.dumps({"family": "Laplace"}))
    with pytest.raises(SchemaError) as exc:
        storage.read_spec(tmp_path / "unknown.json")
    assert exc.value.field == "family"

    (tmp_path / "list.json").write_text("[1, 2]")
    with pytest.raises(SchemaError):
        storage.read_spec(tmp_path / "list.json")


def test_model_roundtrip(tmp_path):
    spec = KernelSpec(family=KernelFamily.RBF, params={"sigma": 1.0})
    model = train_svm(np.eye(2), [0, 1], 10.0, spec=spec, train_ref="abc")
    path = storage.write_model(model, tmp_path / "model.json")
    loaded = storage.read_model(path)
    np.testing.assert_array_equal(loaded.dual_coefs, model.dual_coefs)
    assert loaded.spec == spec
    assert loaded.train_ref == "abc"


def test_model_missing_field(tmp_path):
    (tmp_path / "model.json").write_text(json.dumps({"bias": 0.0}))
    with pytest.raises(SchemaError) as exc:
        storage.read_model(tmp_path / "model.json")
    assert exc.value.field == "dual_coefs"


def test_json_is_sorted_and_stable(tmp_path):
    payload = {"b": np.float64(1.5), "a": np.arange(3)}
    first = storage.write_json(tmp_path / "one.json", payload).read_bytes()
    second = storage.write_json(tmp_path / "two.json", payload).read_bytes()
    assert first == second
    assert first.decode().index('"a"') < first.decode().index('"b"')


def test_manifest(tmp_path):
    manifest = RunManifest(
        command="gram",
        arguments={"audit": True},
        settings={"seed": 0},
        library_version="0.1.0",
        seeds={"seed": 0},
        outputs=["gram.kgrm"],
    )
    path = storage.write_manifest(manifest, tmp_path)
    assert path.name == "manifest.json"
    assert json.loads(path.read_text())["outputs"] == ["gram.kgrm"]
