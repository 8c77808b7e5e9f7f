import httpx
import numpy as np
import pytest

from kerrkit.integrations import breastmnist
from kerrkit.services.datasets import load_breastmnist
from kerrkit.utils.errors import DatasetUnavailableError, ParseError


def _archive(path, with_val=True):
    rng = np.random.default_rng(0)
    arrays = {
        "train_images": rng.integers(0, 256, size=(12, 28, 28), dtype=np.uint8),
        "train_labels": np.array([[0], [1]] * 6, dtype=np.uint8),
        "test_images": rng.integers(0, 256, size=(3, 28, 28), dtype=np.uint8),
        "test_labels": np.array([[0], [1], [1]], dtype=np.uint8),
    }
    if with_val:
        arrays["val_images"] = rng.integers(0, 256, size=(4, 28, 28), dtype=np.uint8)
        arrays["val_labels"] = np.array([[1], [0], [1], [0]], dtype=np.uint8)
    np.savez(path, **arrays)
    return path


def test_missing_archive_is_dataset_unavailable(settings):
    with pytest.raises(DatasetUnavailableError) as exc:
        load_breastmnist()
    assert exc.value.exit_code == 3
    assert exc.value.path.endswith("breastmnist.npz")


def test_loads_val_partition_as_test(tmp_path):
    data = breastmnist.load_archive(_archive(tmp_path / "breastmnist.npz"))
    assert data.d == 784
    assert (data.n_train, data.n_test) == (12, 4)
    assert data.test_idx == list(range(12, 16))
    assert 0.0 <= data.features.min() and data.features.max() <= 1.0


def test_falls_back_to_test_partition(tmp_path):
    data = breastmnist.load_archive(_archive(tmp_path / "b.npz", with_val=False))
    assert data.n_test == 3


def test_default_path_under_data_dir(settings):
    settings.data_dir.mkdir(parents=True)
    _archive(settings.data_dir / "breastmnist.npz")
    assert load_breastmnist().n == 16


def test_not_a_zip(tmp_path):
    path = tmp_path / "breastmnist.npz"
    path.write_bytes(b"not an archive")
    with pytest.raises(ParseError):
        breastmnist.load_archive(path)


def test_missing_arrays(tmp_path):
    path = tmp_path / "partial.npz"
    np.savez(path, train_images=np.zeros((2, 28, 28)))
    with pytest.raises(ParseError):
        breastmnist.load_archive(path)


def test_failed_download_leaves_nothing(tmp_path, monkeypatch):
    def offline(url, dest, timeout):
        raise httpx.ConnectError("offline")

    monkeypatch.setattr(breastmnist, "_download", offline)
    dest = tmp_path / "breastmnist.npz"
    with pytest.raises(DatasetUnavailableError):
        breastmnist.fetch_archive(dest, url="https://example.invalid/breastmnist.npz")
    assert not dest.exists()
    assert not dest.with_suffix(".part").exists()


def test_download_moves_partial_into_place(tmp_path, monkeypatch):
    source = _archive(tmp_path / "source.npz")

    def copy(url, dest, timeout):
        dest.write_bytes(source.read_bytes())

    monkeypatch.setattr(breastmnist, "_download", copy)
    dest = breastmnist.fetch_archive(tmp_path / "data" / "breastmnist.npz")
    assert breastmnist.load_archive(dest).n == 16
