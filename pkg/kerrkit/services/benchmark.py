"""
Benchmark tables: grid-searched scores per (dataset, kernel) next to the
published reference figures

Tables: 2 test-driven F1, 3 cross-validation-driven F1, 4 periodic
datasets, 5 BreastMNIST accuracy, 6 amplitude-noise F1.
"""

from typing import Any, Dict, List, Optional

import pandas as pd

from ..config import Settings, get_settings
from ..models.schemas import Dataset, KernelFamily, NoisePlan, NoiseTarget, Scenario
from ..payloads.grids import default_c_reg, default_grid
from ..payloads.presets import PERIODIC_DATASETS, SYNTHETIC_DATASETS
from ..payloads.reference_scores import (
    BREASTMNIST_ACCURACY,
    BREASTMNIST_BASELINES,
    CV_TEST_TRAIN_F1,
    KERNEL_COLUMNS,
    NOISY_TEST_TRAIN_F1,
    PERIODIC_COLUMNS,
    PERIODIC_TEST_F1,
    TEST_TRAIN_F1,
)
from ..utils.errors import DatasetUnavailableError, DomainError
from ..utils.logging import LogContext, get_logger
from .datasets import load_breastmnist, make_preset
from .search_strategy import GridSearchStrategy

logger = get_logger(__name__)

TABLES = (2, 3, 4, 5, 6)
DEFAULT_NOISE = {5: 0.0, 6: 0.10}


def _pct(value: Optional[float]) -> Optional[float]:
    return None if value is None else 100.0 * value


class BenchmarkRunner:
    """Runs one benchmark table"""

    def __init__(self, settings: Optional[Settings] = None, workers: Optional[int] = None, quick: bool = False,
                 seed: Optional[int] = None):
        self.settings = settings or get_settings()
        self.quick = quick
        self.seed = self.settings.seed if seed is None else seed
        self.strategy = GridSearchStrategy(self.settings, workers)

    def _search(self, dataset: Dataset, family: KernelFamily, scenario: Scenario, noise: Optional[NoisePlan] = None):
        return self.strategy.search(
            dataset,
            family,
            grid=default_grid(family, self.quick),
            c_values=default_c_reg(self.quick),
            scenario=scenario,
            seed=self.seed,
            noise=noise,
        )

    def _datasets(self, names) -> Dict[str, Dataset]:
        return {name: make_preset(name, self.seed) for name in names}

    @staticmethod
    def _best(result) -> Dict[str, Any]:
        return {"best_spec": result.best_spec.label(), "best_c_reg": result.best_c_reg, "status": "ok"}

    def table_test_driven(self) -> List[Dict[str, Any]]:
        rows = []
        for name, data in self._datasets(SYNTHETIC_DATASETS).items():
            for column, family in KERNEL_COLUMNS.items():
                result = self._search(data, family, Scenario.TEST_DRIVEN)
                ref_test, ref_train = TEST_TRAIN_F1[name][column]
                rows.append({
                    "dataset": name, "kernel": column, "family": family.value,
                    "test_f1": _pct(result.scores["test"].f1), "train_f1": _pct(result.scores["train"].f1),
                    "ref_test_f1": ref_test, "ref_train_f1": ref_train,
                    **self._best(result),
                })
        return rows

    def table_cross_validated(self) -> List[Dict[str, Any]]:
        rows = []
        for name, data in self._datasets(SYNTHETIC_DATASETS).items():
            for column, family in KERNEL_COLUMNS.items():
                result = self._search(data, family, Scenario.CROSS_VAL_DRIVEN)
                best_cv = next(
                    c.cv_f1 for c in result.trace if c.spec == result.best_spec and c.c_reg == result.best_c_reg
                )
                ref_cv, ref_test, ref_train = CV_TEST_TRAIN_F1[name][column]
                rows.append({
                    "dataset": name, "kernel": column, "family": family.value,
                    "cv_f1": _pct(best_cv), "test_f1": _pct(result.scores["test"].f1),
                    "train_f1": _pct(result.scores["train"].f1),
                    "ref_cv_f1": ref_cv, "ref_test_f1": ref_test, "ref_train_f1": ref_train,
                    **self._best(result),
                })
        return rows

    def table_periodic(self) -> List[Dict[str, Any]]:
        rows = []
        for name, data in self._datasets(PERIODIC_DATASETS).items():
            for column, family in PERIODIC_COLUMNS.items():
                result = self._search(data, family, Scenario.TEST_DRIVEN)
                rows.append({
                    "dataset": name, "kernel": column, "family": family.value,
                    "test_f1": _pct(result.scores["test"].f1), "train_f1": _pct(result.scores["train"].f1),
                    "ref_test_f1": PERIODIC_TEST_F1[name][column],
                    **self._best(result),
                })
        return rows

    def table_breastmnist(self, noise: float) -> List[Dict[str, Any]]:
        reference = BREASTMNIST_ACCURACY.get(noise, {})
        rows: List[Dict[str, Any]] = []
        try:
            data = load_breastmnist(self.settings.data_dir / "breastmnist.npz")
        except DatasetUnavailableError as e:
            logger.warning(f"BreastMNIST rows skipped: {e.message}")
            data = None

        plan = NoisePlan(level=noise, target=NoiseTarget.ENCODING_AMPLITUDE, seed=self.seed) if noise > 0 else None
        for column, family in KERNEL_COLUMNS.items():
            row = {"dataset": "breastmnist", "kernel": column, "family": family.value, "noise": noise,
                   "ref_test_accuracy": reference.get(column)}
            if data is None:
                rows.append({**row, "test_accuracy": None, "status": "skipped"})
                continue
            result = self._search(data, family, Scenario.TEST_DRIVEN, plan)
            rows.append({
                **row, "test_accuracy": _pct(result.scores["test"].accuracy),
                "test_f1": _pct(result.scores["test"].f1), **self._best(result),
            })
        if noise == 0.0:
            for model, accuracy in BREASTMNIST_BASELINES.items():
                rows.append({"dataset": "breastmnist", "kernel": model, "family": None, "noise": 0.0,
                             "ref_test_accuracy": accuracy, "test_accuracy": None, "status": "reference"})
        return rows

    def table_noisy(self, noise: float) -> List[Dict[str, Any]]:
        rows = []
        plan = NoisePlan(level=noise, target=NoiseTarget.ENCODING_AMPLITUDE, seed=self.seed)
        for name, data in self._datasets(SYNTHETIC_DATASETS).items():
            for column, family in KERNEL_COLUMNS.items():
                clean = self._search(data, family, Scenario.TEST_DRIVEN)
                noisy = self._search(data, family, Scenario.TEST_DRIVEN, plan)
                ref_test, ref_train = NOISY_TEST_TRAIN_F1[name][column]
                clean_f1, noisy_f1 = _pct(clean.scores["test"].f1), _pct(noisy.scores["test"].f1)
                rows.append({
                    "dataset": name, "kernel": column, "family": family.value, "noise": noise,
                    "clean_test_f1": clean_f1, "test_f1": noisy_f1, "train_f1": _pct(noisy.scores["train"].f1),
                    "f1_drop": clean_f1 - noisy_f1, "ref_test_f1": ref_test, "ref_train_f1": ref_train,
                    **self._best(noisy),
                })
        return rows

    def run(self, table: int, noise: Optional[float] = None) -> pd.DataFrame:
        """
        Build one table

        Args:
            table: 2-6
            noise: amplitude-noise level for tables 5 and 6

        Returns:
            DataFrame, one row per (dataset, kernel)
        """

        if table not in TABLES:
            raise DomainError(f"unknown benchmark table {table}; choose from {list(TABLES)}", parameter="table")
        if noise is not None and noise < 0:
            raise DomainError("noise level must be nonnegative", parameter="noise")
        if noise is not None and table not in DEFAULT_NOISE:
            logger.warning(f"--noise ignored for table {table}")
        level = DEFAULT_NOISE.get(table, 0.0) if noise is None else noise

        with LogContext(table=table):
            logger.info(f"Benchmark table {table}", extra={"quick": self.quick, "noise": level})
            if table == 2:
                rows = self.table_test_driven()
            elif table == 3:
                rows = self.table_cross_validated()
            elif table == 4:
                rows = self.table_periodic()
            elif table == 5:
                rows = self.table_breastmnist(level)
            else:
                rows = self.table_noisy(level)
        return pd.DataFrame(rows)


def run_benchmark(table: int, noise: Optional[float] = None, quick: bool = False, seed: Optional[int] = None,
                  workers: Optional[int] = None) -> pd.DataFrame:
    return BenchmarkRunner(workers=workers, quick=quick, seed=seed).run(table, noise)
