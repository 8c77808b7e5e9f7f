"""
Grid search over kernel hyperparameters and the SVM box constraint

One raw Gram is computed per kernel cell over all points and reused for every
c_reg value, every CV fold and the train/test evaluation. PSD repair runs on
each training block separately, never on held-out rows.
"""

import itertools
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from ..config import Settings, activate_settings, get_settings
from ..models.schemas import (
    Dataset,
    EvalReport,
    GridCell,
    GridSearchResult,
    KernelFamily,
    KernelSpec,
    NoisePlan,
    Realify,
    Scenario,
    SplitPlan,
    SplitTag,
)
from ..payloads.grids import default_c_reg, default_grid
from ..utils.errors import DomainError, KerrKitError
from ..utils.logging import LogContext, get_logger
from .datasets import apply_noise, scale_for, split
from .kernels import gram as build_gram
from .kernels import fit_blocks
from .svm import evaluate as _evaluate
from .svm import f1_score, train_svm

logger = get_logger(__name__)


def cell_seed(seed: int, index: int) -> int:
    """Independent RNG stream per grid cell"""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def expand_grid(family: KernelFamily, grid: Dict[str, List[float]], realify: Realify) -> List[KernelSpec]:
    """Cartesian product of a parameter grid, in key order then value order"""
    keys = list(grid.keys())
    specs = []
    for values in itertools.product(*(grid[k] for k in keys)):
        specs.append(KernelSpec(family=family, params=dict(zip(keys, values)), realify=realify))
    return specs


def _tie_key(cell: GridCell, scenario: Scenario) -> Tuple[float, float, float, float]:
    p = cell.spec.params
    return (-cell.objective(scenario), p.get("j", 0.0), abs(p.get("lambda", 0.0)), cell.c_reg)


def prepare_features(dataset: Dataset, spec: KernelSpec, noise: Optional[NoisePlan]):
    """Scaled (and optionally perturbed) features plus per-point encoding moduli"""
    scaled = scale_for(dataset, spec)
    return apply_noise(noise, scaled.features, spec)


class GridSearchStrategy:
    """Exhaustive (kernel cell × c_reg) search under one of two objectives"""

    def __init__(self, settings: Optional[Settings] = None, workers: Optional[int] = None):
        self.settings = settings or get_settings()
        self.n_jobs = self.settings.n_jobs if workers is None else (-1 if workers <= 0 else workers)

    def _train(self, k, labels, c_reg, spec, seed):
        return train_svm(
            k,
            labels,
            c_reg,
            tol=self.settings.smo_tol,
            max_passes=self.settings.smo_max_passes,
            seed=seed,
            spec=spec,
            assume_psd=True,
        )

    def _evaluate_cell(
        self,
        index: int,
        spec: KernelSpec,
        dataset: Dataset,
        plan: SplitPlan,
        c_values: List[float],
        noise: Optional[NoisePlan],
        seed: int,
        in_worker: bool = False,
    ) -> Dict[str, Any]:
        if in_worker:
            # worker processes start from env defaults
            activate_settings(self.settings)
        with LogContext(family=spec.family.value, cell=index):
            try:
                features, amplitudes = prepare_features(dataset, spec, noise)
                gram = build_gram(features, spec, amplitudes=amplitudes, workers=1, repair=False)
                train_block, k_test = fit_blocks(gram, plan.train_idx, plan.test_idx)
                folds = [
                    (np.asarray(f), np.asarray(v), *fit_blocks(gram, f, v)) for f, v in (plan.cv_folds or [])
                ]
            except (DomainError, np.linalg.LinAlgError) as e:
                reason = e.message if isinstance(e, KerrKitError) else str(e)
                logger.warning(f"Skipping grid cell {spec.label()}: {reason}")
                return {"index": index, "skipped": {"spec": spec.to_json_dict(), "reason": reason}}

            labels = dataset.labels
            train, test = np.asarray(plan.train_idx), np.asarray(plan.test_idx)
            k_train = train_block.values
            rows = []
            for c_reg in c_values:
                model = self._train(k_train, labels[train], c_reg, spec, cell_seed(seed, index))
                train_report = _evaluate(model, k_train, labels[train], SplitTag.TRAIN)
                test_report = _evaluate(model, k_test, labels[test], SplitTag.TEST)
                cv_f1, cv_report = self._cross_validate(folds, labels, spec, c_reg, seed, index)
                rows.append({
                    "c_reg": c_reg,
                    "train": train_report,
                    "test": test_report,
                    "cv": cv_report,
                    "cv_f1": cv_f1,
                })
            return {"index": index, "spec": spec, "rows": rows}

    def _cross_validate(self, folds, labels, spec, c_reg, seed, index):
        """Mean fold F1 and the pooled out-of-fold report; folds carry per-fit repaired blocks"""
        if not folds:
            return None, None
        fold_f1 = []
        pooled = np.zeros((2, 2), dtype=int)
        for fit, val, k_fit, k_val in folds:
            model = self._train(k_fit.values, labels[fit], c_reg, spec, cell_seed(seed, index))
            fold_report = _evaluate(model, k_val, labels[val], SplitTag.CROSS_VAL)
            fold_f1.append(fold_report.f1)
            pooled += np.asarray(fold_report.confusion)
        pooled_report = EvalReport(
            f1=f1_score(pooled),
            accuracy=float(np.trace(pooled) / pooled.sum()),
            confusion=pooled.tolist(),
            split_tag=SplitTag.CROSS_VAL,
        )
        return float(np.mean(fold_f1)), pooled_report

    def search(
        self,
        dataset: Dataset,
        family: KernelFamily,
        grid: Optional[Dict[str, List[float]]] = None,
        c_values: Optional[List[float]] = None,
        scenario: Scenario = Scenario.TEST_DRIVEN,
        seed: Optional[int] = None,
        realify: Realify = Realify.SQUARED_MODULUS,
        noise: Optional[NoisePlan] = None,
        with_cv: bool = False,
    ) -> GridSearchResult:
        """
        Evaluate every grid cell and pick the best under the scenario objective

        Args:
            dataset: Dataset carrying its train/test partition
            family: Kernel family
            grid: Parameter grid (defaults per family)
            c_values: Box-constraint values
            scenario: TestDriven maximizes test F1, CrossValDriven mean fold F1
            seed: Base seed for per-cell streams and folds
            with_cv: Compute CV scores even for the TestDriven scenario

        Returns:
            GridSearchResult with the full trace
        """

        seed = self.settings.seed if seed is None else seed
        grid = default_grid(family) if grid is None else grid
        c_values = default_c_reg() if c_values is None else list(c_values)
        specs = expand_grid(family, grid, realify)
        if not specs or not c_values:
            raise DomainError("grid search needs a non-empty grid", parameter="grid")

        folds = self.settings.cv_folds if (scenario == Scenario.CROSS_VAL_DRIVEN or with_cv) else None
        plan = split(dataset, k_folds=folds, seed=seed)
        logger.info(
            f"Grid search {family.value} on {dataset.name}: {len(specs)} kernel cells x {len(c_values)} c_reg",
            extra={"scenario": scenario.value, "n_jobs": self.n_jobs},
        )

        if self.n_jobs == 1 or len(specs) == 1:
            outcomes = [
                self._evaluate_cell(i, spec, dataset, plan, c_values, noise, seed) for i, spec in enumerate(specs)
            ]
        else:
            outcomes = Parallel(n_jobs=self.n_jobs)(
                delayed(self._evaluate_cell)(i, spec, dataset, plan, c_values, noise, seed, True)
                for i, spec in enumerate(specs)
            )
        outcomes.sort(key=lambda o: o["index"])

        trace: List[GridCell] = []
        reports: List[Dict[str, Any]] = []
        skipped = []
        for outcome in outcomes:
            if "skipped" in outcome:
                skipped.append(outcome["skipped"])
                continue
            for row in outcome["rows"]:
                trace.append(GridCell(
                    spec=outcome["spec"],
                    c_reg=row["c_reg"],
                    cv_f1=row["cv_f1"],
                    test_f1=row["test"].f1,
                    train_f1=row["train"].f1,
                ))
                reports.append(row)

        if not trace:
            raise DomainError(f"every grid cell was skipped for {family.value}", parameter="grid")

        best_pos = min(range(len(trace)), key=lambda k: _tie_key(trace[k], scenario))
        best = trace[best_pos]
        row = reports[best_pos]
        scores = {"train": row["train"], "test": row["test"]}
        if row["cv"] is not None:
            scores["cv"] = row["cv"]

        logger.info(
            f"Best {best.spec.label()} c_reg={best.c_reg:g}: test F1 {best.test_f1:.4f}",
            extra={"skipped": len(skipped)},
        )
        return GridSearchResult(
            dataset=dataset.name,
            best_spec=best.spec,
            best_c_reg=best.c_reg,
            scenario=scenario,
            scores=scores,
            trace=trace,
            skipped=skipped,
        )


def grid_search(
    dataset: Dataset,
    family: KernelFamily,
    grid: Optional[Dict[str, List[float]]] = None,
    c_values: Optional[List[float]] = None,
    scenario: Scenario = Scenario.TEST_DRIVEN,
    seed: Optional[int] = None,
    realify: Realify = Realify.SQUARED_MODULUS,
    noise: Optional[NoisePlan] = None,
    workers: Optional[int] = None,
    with_cv: bool = False,
) -> GridSearchResult:
    """Functional entry point around GridSearchStrategy"""
    strategy = GridSearchStrategy(workers=workers)
    return strategy.search(dataset, family, grid, c_values, scenario, seed, realify, noise, with_cv)
