import pytest

from kerrkit.payloads.reference_scores import BREASTMNIST_BASELINES, KERNEL_COLUMNS, TEST_TRAIN_F1
from kerrkit.payloads.presets import SYNTHETIC_DATASETS
from kerrkit.services.benchmark import BenchmarkRunner
from kerrkit.utils.errors import DomainError


def test_reference_tables_cover_every_cell():
    for name in SYNTHETIC_DATASETS:
        assert set(TEST_TRAIN_F1[name]) == set(KERNEL_COLUMNS)


def test_unknown_table(settings):
    with pytest.raises(DomainError):
        BenchmarkRunner(settings, workers=1, quick=True).run(7)
    with pytest.raises(DomainError):
        BenchmarkRunner(settings, workers=1, quick=True).run(6, noise=-0.1)


def test_breastmnist_rows_skipped_without_archive(settings):
    frame = BenchmarkRunner(settings, workers=1, quick=True).run(5)
    kernel_rows = frame[frame["status"] == "skipped"]
    assert list(kernel_rows["kernel"]) == list(KERNEL_COLUMNS)
    assert kernel_rows["test_accuracy"].isna().all()
    references = frame[frame["status"] == "reference"]
    assert set(references["kernel"]) == set(BREASTMNIST_BASELINES)


@pytest.mark.slow
def test_periodic_table_quick(settings):
    frame = BenchmarkRunner(settings, workers=0, quick=True, seed=0).run(4)
    assert len(frame) == 4 * 7
    assert frame["test_f1"].between(0.0, 100.0).all()
    assert (frame["status"] == "ok").all()


@pytest.mark.slow
def test_test_driven_table_quick(settings):
    frame = BenchmarkRunner(settings, workers=0, quick=True, seed=0).run(2)
    assert len(frame) == len(SYNTHETIC_DATASETS) * len(KERNEL_COLUMNS)
    moons = frame[(frame["dataset"] == "moons-v1") & (frame["kernel"] == "RBF")].iloc[0]
    assert moons["test_f1"] > 85.0
    assert moons["ref_test_f1"] == pytest.approx(93.88)
