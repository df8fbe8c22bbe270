import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from manhattan_emf.quadrature import (
    NumericalFailure,
    PanelGrid,
    QuadratureSpec,
    adaptive_gk,
    geometric_edges,
    gil_pelaez_cdf,
)


def test_unit_exponential_at_one():
    p = gil_pelaez_cdf(lambda t: 1.0 / (1.0 - 1j * t), 1.0)
    assert abs(p - (1 - math.exp(-1))) < 1e-6


def test_point_mass_above_atom():
    c = 2.0
    p = gil_pelaez_cdf(lambda t: np.exp(1j * c * t), [2.5, 4.0, 10.0])
    np.testing.assert_allclose(p, 1.0, atol=1e-3)


def test_gaussian_median():
    mu, sig = 3.0, 0.7
    p = gil_pelaez_cdf(lambda t: np.exp(1j * mu * t - 0.5 * sig**2 * t * t), mu)
    assert abs(p - 0.5) < 1e-6


def test_gamma_vector_thresholds():
    x = np.linspace(0.1, 8, 30)
    p = gil_pelaez_cdf(lambda t: (1 - 1j * t) ** -3, x, scale=3.0)
    np.testing.assert_allclose(p, stats.gamma(3).cdf(x), atol=1e-6)


def test_report_fields():
    rep = gil_pelaez_cdf(lambda t: 1.0 / (1.0 - 1j * t), 1.0, report=True)
    assert rep.error_estimate < 1e-6
    assert rep.truncation > 0


@given(st.floats(0.2, 5.0), st.floats(0.05, 10.0))
def test_exponential_any_rate(rate, x):
    p = gil_pelaez_cdf(lambda t: rate / (rate - 1j * t), x, scale=1 / rate)
    assert abs(p - (1 - math.exp(-rate * x))) < 1e-6


def test_adaptive_gk_vector_integrand():
    f = lambda x: np.vstack([np.sin(x), x**2])  # noqa: E731
    val, err = adaptive_gk(f, [0.0, 1.0, math.pi])
    np.testing.assert_allclose(val, [2.0, math.pi**3 / 3], rtol=1e-9)
    assert err < 1e-6


def test_adaptive_gk_budget():
    with pytest.raises(NumericalFailure) as e:
        adaptive_gk(lambda x: np.sin(1e4 * x) / (x + 1e-9), [0.0, 100.0], 1e-14, 1e-14, budget=4)
    assert np.isfinite(e.value.error_estimate)


def test_panel_grid_integral_and_tail():
    g = PanelGrid(geometric_edges(0.0, 50.0, 0.01, 2.0))
    v = np.exp(-g.nodes)
    assert abs(g.integral(v) - (1 - math.exp(-50))) < 1e-12
    tail = g.tail(v)
    np.testing.assert_allclose(tail, np.exp(-g.nodes) - math.exp(-50), atol=1e-12)
    pts = np.array([0.3, 7.0, 20.0])
    np.testing.assert_allclose(g.tail_evaluator(pts)(v), np.exp(-pts) - math.exp(-50), atol=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(relative_tolerance=0)
    with pytest.raises(ValueError):
        QuadratureSpec(inner_ratio=1.0)


def test_thresholds_near_zero():
    # the truncated tail of a slowly decaying CF must not leak into the left tail
    x = np.array([0.0, 1e-12, 1e-8, 1e-4])
    p = gil_pelaez_cdf(lambda t: 1.0 / (1.0 - 1j * t), x)
    np.testing.assert_allclose(p, -np.expm1(-x), rtol=0, atol=1e-11)
