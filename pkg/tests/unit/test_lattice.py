import math

import numpy as np
import pandas as pd
import pytest

from kerrkit.services import lattice
from kerrkit.utils.errors import DomainError, TruncationOverflowError


def test_coupling_coefficients():
    pos = lattice.make_config(2.0, 20.0, [0.5], n_guides=4)
    assert lattice.coupling_coeffs(pos)[0] == pytest.approx(math.sqrt(40.0))
    neg = lattice.make_config(-2.0, 0.5, [0.5])
    assert neg.n_guides == 2
    np.testing.assert_allclose(lattice.coupling_coeffs(neg), [1.0])


def test_coupling_matrix_is_tridiagonal():
    config = lattice.make_config(-2.0, 3.0, [1.0])
    h = lattice.coupling_matrix(config)
    np.testing.assert_array_equal(h, h.T)
    np.testing.assert_allclose(np.diag(h, k=1), lattice.coupling_coeffs(config))
    assert np.count_nonzero(np.triu(h, k=2)) == 0


def test_spacings_realize_couplings():
    config = lattice.make_config(-2.0, 4.0, [1.0], c1=0.5, d0=12.0, kappa=2.0)
    spacings = lattice.guide_spacings(config)
    np.testing.assert_allclose(lattice.couplings_from_spacings(config, spacings), lattice.coupling_coeffs(config))
    # stronger coupling means closer guides
    order = np.argsort(lattice.coupling_coeffs(config))
    assert np.all(np.diff(spacings[order]) <= 1e-12)


@pytest.mark.parametrize("lam,j,z_max", [(-2.0, 20.0, math.pi), (2.0, 2.0, 0.6), (-0.5, 2.5, 2.0)])
def test_propagation_matches_closed_form(lam, j, z_max):
    config = lattice.make_config(lam, j, np.linspace(0.0, z_max, 9).tolist())
    intensities = lattice.intensity_map(config)
    closed = lattice.closed_form_intensities(config)
    assert np.max(np.abs(intensities - closed)) < 1e-8
    assert lattice.unitarity_residual(intensities) < 1e-10


def test_initial_column_is_guide_zero():
    config = lattice.make_config(2.0, 1.0, [0.0])
    intensities = lattice.intensity_map(config)
    assert intensities[0, 0] == pytest.approx(1.0)
    np.testing.assert_allclose(intensities[1:, 0], 0.0, atol=1e-15)
    np.testing.assert_allclose(lattice.propagate_ode(config)[:, 0], np.eye(config.n_guides)[0])


def test_ode_agrees_with_eigendecomposition():
    config = lattice.make_config(-2.0, 2.0, np.linspace(0.0, 2.0, 5).tolist())
    field = lattice.propagate(config)
    ode = lattice.propagate_ode(config)
    assert np.max(np.abs(np.abs(ode) ** 2 - np.abs(field) ** 2)) < 1e-8


def test_negative_preset_transfer_and_revival():
    config = lattice.preset_config("fig7-neg")
    assert config.n_guides == 41
    assert len(config.z_grid) == 41
    report = lattice.revival_report(config)
    assert report["revival_z"] == pytest.approx(math.pi)
    assert report["transfer_residual"] < 1e-6
    assert report["revival_residual"] < 1e-6


def test_positive_preset_has_no_revival():
    config = lattice.preset_config("fig7-pos")
    assert config.z_grid[-1] == pytest.approx(1.0)
    with pytest.raises(DomainError):
        lattice.revival_distances(config.params)


def test_unknown_preset():
    with pytest.raises(DomainError):
        lattice.preset_config("fig8")


def test_leakage_past_truncation():
    config = lattice.make_config(2.0, 2.0, [0.5, 2.0], n_guides=4)
    with pytest.raises(TruncationOverflowError) as exc:
        lattice.propagate(config)
    assert exc.value.cap == 4


def test_config_validation():
    with pytest.raises(ValueError):
        lattice.make_config(-2.0, 1.0, [0.0], n_guides=5)
    with pytest.raises(ValueError):
        lattice.make_config(2.0, 1.0, [1.0, 0.5])
    with pytest.raises(ValueError):
        lattice.make_config(2.0, 1.0, [])


def test_intensity_csv_export(tmp_path):
    config = lattice.make_config(-2.0, 1.0, [0.0, 0.5, 1.0])
    path = lattice.export_intensity_csv(config, tmp_path / "out" / "intensities.csv")
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["z", "guide_0", "guide_1", "guide_2"]
    assert len(frame) == 3
    np.testing.assert_allclose(frame.drop(columns="z").sum(axis=1), 1.0, atol=1e-12)
