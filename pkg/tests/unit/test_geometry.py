import math

import pytest

from kerrkit.models.schemas import KerrParams, PolarAmplitude, QuadratureConfig
from kerrkit.services import geometry
from kerrkit.utils.errors import DomainError, QuadratureResolutionError

PARAMS = [KerrParams.of(2.0, 1.0), KerrParams.of(0.5, 2.5), KerrParams.of(-2.0, 2.0), KerrParams.of(-4.0, 1.5)]


def test_metric_closed_form_values():
    metric = geometry.metric_closed_form(KerrParams.of(2.0, 1.0), 1.0)
    assert metric.g_rr == pytest.approx(2.0)
    assert metric.g_phiphi == pytest.approx(0.5 * math.sinh(2.0) ** 2)
    assert metric.g_rphi == 0.0

    metric = geometry.metric_closed_form(KerrParams.of(-2.0, 1.0), 0.5)
    assert metric.g_phiphi == pytest.approx(0.5 * math.sin(1.0) ** 2)


def test_metric_outside_domain():
    params = KerrParams.of(-2.0, 1.0)
    with pytest.raises(DomainError):
        geometry.metric_closed_form(params, params.domain_radius + 0.1)


@pytest.mark.parametrize("params", PARAMS, ids=lambda p: f"lam={p.lam},j={p.j}")
def test_metric_numeric_matches_closed_form(params):
    point = PolarAmplitude(r=0.5, phi=1.0)
    numeric = geometry.metric_numeric(params, point)
    closed = geometry.metric_closed_form(params, 0.5, 1.0)
    assert numeric.g_rr == pytest.approx(closed.g_rr, rel=1e-6)
    assert numeric.g_phiphi == pytest.approx(closed.g_phiphi, rel=1e-6)
    assert abs(numeric.g_rphi) < 1e-6


def test_metric_numeric_rejects_step():
    with pytest.raises(DomainError):
        geometry.metric_numeric(PARAMS[0], PolarAmplitude(r=0.5), h=1e-2)


def test_ricci_scalar_values():
    assert geometry.ricci_scalar(KerrParams.of(2.0, 1.0)) == pytest.approx(-4.0)
    assert geometry.ricci_scalar(KerrParams.of(-2.0, 1.5)) == pytest.approx(8.0 / 3.0)
    # printed form agrees only at |lambda| = 2
    assert geometry.ricci_scalar_printed(KerrParams.of(2.0, 1.0)) == pytest.approx(-4.0)
    assert geometry.ricci_scalar_printed(KerrParams.of(0.5, 1.0)) == pytest.approx(-1.0)


@pytest.mark.parametrize("params", PARAMS, ids=lambda p: f"lam={p.lam},j={p.j}")
def test_ricci_numeric_is_constant(params):
    expected = geometry.ricci_scalar(params)
    samples = [r for r in (0.3, 0.6) if params.in_domain(r + 0.01)]
    for value in geometry.ricci_numeric(params, samples):
        assert value == pytest.approx(expected, rel=1e-4)


def test_ricci_numeric_rejects_origin():
    with pytest.raises(DomainError):
        geometry.ricci_numeric(PARAMS[0], [0.01])


@pytest.mark.parametrize("params", PARAMS, ids=lambda p: f"lam={p.lam},j={p.j}")
def test_christoffel_from_metric_derivative(params):
    r, h = 0.4, 1e-5
    g_rr = params.j * abs(params.lam)
    d_g = (
        geometry.metric_closed_form(params, r + h).g_phiphi - geometry.metric_closed_form(params, r - h).g_phiphi
    ) / (2.0 * h)
    gamma_phi, gamma_r = geometry.christoffel_closed_form(params, r)
    assert gamma_r == pytest.approx(-d_g / (2.0 * g_rr), rel=1e-7)
    assert gamma_phi == pytest.approx(d_g / (2.0 * geometry.metric_closed_form(params, r).g_phiphi), rel=1e-7)


def test_christoffel_printed_differs_off_unit_scale():
    params = KerrParams.of(2.0, 1.0)
    assert geometry.christoffel_printed(params, 0.4)[1] != pytest.approx(geometry.christoffel_closed_form(params, 0.4)[1])


def test_embedding_origin_and_quadric():
    params = KerrParams.of(2.0, 3.0)
    assert geometry.embed(params, 0.0, 1.0) == pytest.approx((math.sqrt(1.5), 0.0, 0.0))
    for p in PARAMS:
        for r in (0.2, 0.7):
            if p.in_domain(r):
                assert geometry.quadric_residual(p, r, 2.0) < 1e-12


@pytest.mark.parametrize("params", PARAMS, ids=lambda p: f"lam={p.lam},j={p.j}")
def test_pullback_metric_matches_closed_form(params):
    g_rr, g_pp, g_rp = geometry.pullback_metric(params, 0.6, 0.8)
    closed = geometry.metric_closed_form(params, 0.6, 0.8)
    assert g_rr == pytest.approx(closed.g_rr, rel=1e-8)
    assert g_pp == pytest.approx(closed.g_phiphi, rel=1e-8)
    assert abs(g_rp) < 1e-8


def test_negative_resolution_of_identity():
    params = KerrParams.of(-2.0, 2.0)
    q = geometry.default_quadrature(params, projector_count=5)
    assert geometry.resolution_residual(params, q) < 1e-10


def test_positive_resolution_of_identity():
    params = KerrParams.of(2.0, 1.0)
    q = geometry.default_quadrature(params)
    assert geometry.resolution_residual(params, q) < 1e-6


def test_positive_resolution_unavailable_at_half():
    params = KerrParams.of(2.0, 0.5)
    with pytest.raises(DomainError):
        geometry.resolution_residual(params, geometry.default_quadrature(params))


def test_resolution_tail_shrinks_with_cutoff():
    params = KerrParams.of(2.0, 2.0)
    tails = [geometry.resolution_tail(params, r_max, 3) for r_max in (0.5, 1.0, 2.0, 4.0)]
    assert all(0.0 <= t <= 1.0 for t in tails)
    assert tails == sorted(tails, reverse=True)


@pytest.mark.parametrize("lam,j", [(-2.0, 2.0), (2.0, 1.0)])
def test_reproducing_property(lam, j):
    params = KerrParams.of(lam, j)
    q = QuadratureConfig(radial_nodes=64, angular_nodes=128)
    a1, a2 = PolarAmplitude(r=0.3, phi=0.4), PolarAmplitude(r=0.5, phi=2.0)
    assert geometry.reproducing_residual(a1, a2, params, q, check_resolution=False) < 1e-6


def test_under_resolved_quadrature_is_reported():
    params = KerrParams.of(-2.0, 2.0)
    q = QuadratureConfig(radial_nodes=8, angular_nodes=8, projector_count=1)
    a1, a2 = PolarAmplitude(r=0.3, phi=0.4), PolarAmplitude(r=0.5, phi=2.0)
    with pytest.raises(QuadratureResolutionError) as exc:
        geometry.reproducing_residual(a1, a2, params, q)
    assert exc.value.exit_code == 2
