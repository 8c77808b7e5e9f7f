import pytest

from kerrkit.models.schemas import KernelFamily, NoiseTarget, Realify, Scenario
from kerrkit.payloads.grids import default_grid
from kerrkit.services.datasets import add_amplitude_noise
from kerrkit.services.search_strategy import GridSearchStrategy, cell_seed, expand_grid, grid_search
from kerrkit.utils.errors import DomainError

RBF_GRID = {"sigma": [0.3, 1.0]}


def _objective(cell, scenario):
    return cell.cv_f1 if scenario == Scenario.CROSS_VAL_DRIVEN else cell.test_f1


def test_cell_seed_streams():
    assert cell_seed(7, 3) == cell_seed(7, 3)
    assert cell_seed(7, 3) != cell_seed(7, 4)
    assert cell_seed(7, 3) != cell_seed(8, 3)


def test_expand_grid_order():
    specs = expand_grid(KernelFamily.KERR_PHASE_POS, {"c": [0.5, 1.0], "lambda": [2.0], "j": [1.0, 2.0]}, Realify.REAL_PART)
    assert [(s.params["c"], s.params["j"]) for s in specs] == [(0.5, 1.0), (0.5, 2.0), (1.0, 1.0), (1.0, 2.0)]
    assert all(s.realify == Realify.REAL_PART for s in specs)


def test_parameterless_family_has_one_cell():
    specs = expand_grid(KernelFamily.SQUEEZED_AMP, default_grid(KernelFamily.SQUEEZED_AMP), Realify.SQUARED_MODULUS)
    assert len(specs) == 1


def test_test_driven_search_picks_best_test_f1(small_moons):
    result = grid_search(small_moons, KernelFamily.RBF, RBF_GRID, [1.0, 10.0], seed=1, workers=1)
    assert len(result.trace) == 4
    best_f1 = max(cell.test_f1 for cell in result.trace)
    assert result.scores["test"].f1 == pytest.approx(best_f1)
    assert "cv" not in result.scores
    assert all(cell.cv_f1 is None for cell in result.trace)


def test_cross_val_driven_search(small_moons):
    result = grid_search(
        small_moons, KernelFamily.RBF, RBF_GRID, [1.0, 10.0], scenario=Scenario.CROSS_VAL_DRIVEN, seed=1, workers=1
    )
    best = max(_objective(cell, Scenario.CROSS_VAL_DRIVEN) for cell in result.trace)
    winner = next(c for c in result.trace if c.spec == result.best_spec and c.c_reg == result.best_c_reg)
    assert winner.cv_f1 == pytest.approx(best)
    assert result.scores["cv"].split_tag.value == "CrossVal"


def test_ties_prefer_smaller_c_reg(small_moons):
    # identical c_reg values give identical scores; the first (smallest) wins
    result = grid_search(small_moons, KernelFamily.RBF, {"sigma": [1.0]}, [1.0, 1.0, 5.0], seed=1, workers=1)
    top = max(cell.test_f1 for cell in result.trace)
    tied = [cell.c_reg for cell in result.trace if cell.test_f1 == top]
    assert result.best_c_reg == min(tied)


def test_search_is_deterministic_across_workers(small_moons):
    grid = {"c": [0.5, 1.0], "lambda": [-2.0], "j": [1.0, 2.0]}
    serial = grid_search(small_moons, KernelFamily.KERR_PHASE_NEG, grid, [1.0], seed=3, workers=1)
    parallel = grid_search(small_moons, KernelFamily.KERR_PHASE_NEG, grid, [1.0], seed=3, workers=2)
    assert serial.to_json_dict() == parallel.to_json_dict()


def test_cells_outside_domain_are_skipped(small_moons):
    grid = {"c": [0.5, 1.6], "lambda": [-2.0], "j": [1.0]}
    result = grid_search(small_moons, KernelFamily.KERR_PHASE_NEG, grid, [1.0], seed=0, workers=1)
    assert len(result.trace) == 1
    assert len(result.skipped) == 1
    assert result.skipped[0]["spec"]["params"]["c"] == 1.6


def test_every_cell_skipped(small_moons):
    grid = {"c": [1.6], "lambda": [-2.0], "j": [1.0]}
    with pytest.raises(DomainError):
        grid_search(small_moons, KernelFamily.KERR_PHASE_NEG, grid, [1.0], workers=1)


def test_empty_c_values(small_moons):
    with pytest.raises(DomainError):
        grid_search(small_moons, KernelFamily.RBF, RBF_GRID, [], workers=1)


def test_noisy_search_runs(small_moons, settings):
    noise = add_amplitude_noise(0.2, NoiseTarget.ENCODING_AMPLITUDE, seed=4)
    strategy = GridSearchStrategy(settings, workers=1)
    result = strategy.search(
        small_moons,
        KernelFamily.KERR_PHASE_POS,
        {"c": [0.5], "lambda": [2.0], "j": [1.0]},
        [1.0],
        seed=2,
        noise=noise,
    )
    assert 0.0 <= result.scores["test"].f1 <= 1.0
    assert result.to_json_dict()["scenario"] == "TestDriven"
