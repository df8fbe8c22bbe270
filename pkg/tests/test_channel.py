import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from manhattan_emf import FadingSpec, PropagationParams, berg_distance, make_rng, path_loss
from manhattan_emf.channel import Category, fading_cf, sample_fading_power

SPECS = [FadingSpec.rice(6.0), FadingSpec.rayleigh(), FadingSpec.exponential(1.66), FadingSpec.constant()]


def test_berg_examples():
    p0 = PropagationParams(q_lambda=0.0)
    assert berg_distance(30.0, 70.0, math.pi / 2, p0) == 100.0
    p = PropagationParams(frequency=3.6e9, q_lambda=0.031)
    assert p.k_f == pytest.approx(0.6101, abs=1e-4)
    assert berg_distance(50.0, 50.0, math.pi / 2, p) == pytest.approx(100 + p.k_f * 2500)
    assert berg_distance(50.0, 50.0, math.pi / 2, p) == pytest.approx(1625.3, abs=0.5)
    with pytest.raises(ValueError):
        berg_distance(0.0, 1.0, 1.0, p)


def test_path_loss_examples():
    p = PropagationParams(alpha_L=2.0, kappa_L=1.0)
    assert path_loss("L", 0.0, 4.5, p) == pytest.approx(1 / 4.5**2)
    assert path_loss("L", 10.0, 4.5, p.replace(alpha_L=2.5)) < path_loss("L", 10.0, 4.5, p)
    q = PropagationParams(frequency=3.6e9, alpha_D=3.5)
    assert q.kappa("D") == pytest.approx(2.277e4, rel=1e-3)
    assert path_loss("D", 1625.3, 4.5, q) == pytest.approx(1625.3**-3.5 / q.kappa("D"), rel=1e-12)
    with pytest.raises(ValueError):
        path_loss("L", 10.0, 1.0, p)
    with pytest.raises(RuntimeError):
        path_loss("D", 1e-3, 4.5, PropagationParams(kappa_D=1.0))


@given(st.floats(0, 1e4), st.floats(0.1, 100), st.floats(1.1, 4), st.floats(0.01, 1))
def test_path_loss_monotone(d, dd, a, da):
    p = PropagationParams(alpha_N=a)
    assert path_loss("N", d + dd, 4.5, p) < path_loss("N", d, 4.5, p)
    assert path_loss("N", d, 4.5, p.replace(alpha_N=a + da)) < path_loss("N", d, 4.5, p)


@given(st.floats(1, 1e3), st.floats(1, 1e3), st.floats(0.1, 3.0), st.floats(0.01, 1.0))
def test_berg_monotone(s1, s2, theta, ds):
    p = PropagationParams()
    b = berg_distance(s1, s2, theta, p)
    assert berg_distance(s1 + ds, s2, theta, p) > b
    assert berg_distance(s1, s2 + ds, theta, p) > b
    assert berg_distance(s1, s2, min(theta + 0.01, math.pi), p) > b
    assert berg_distance(s1, s2, theta, p.replace(q_lambda=p.q_lambda * 1.1)) > b


def test_fading_cf_examples():
    for s in SPECS:
        assert fading_cf(s, 0.0) == 1.0
    t = np.linspace(-5, 5, 11)
    np.testing.assert_allclose(fading_cf(FadingSpec.rice(0.0), t), 1 / (1 - 1j * t))
    with pytest.raises(ValueError):
        fading_cf(FadingSpec.rayleigh(), -1j)


def test_rice_cf_against_samples():
    spec = FadingSpec.rice(6.0)
    x = sample_fading_power(spec, make_rng(7), 1_000_000)
    for t in (0.5, 1.0, 3.0):
        e = np.exp(1j * t * x)
        se = math.sqrt((e.real.var() + e.imag.var()) / x.size)
        assert abs(e.mean() - fading_cf(spec, t)) < 3 * se


def test_sample_means():
    x = sample_fading_power(FadingSpec.rayleigh(), make_rng(8), 1_000_000)
    assert abs(x.mean() - 1) < 3 * x.std() / 1000
    y = sample_fading_power(FadingSpec.exponential(1.66), make_rng(9), 1_000_000)
    assert abs(y.mean() - 1 / 1.66) < 3 * y.std() / 1000
    z = sample_fading_power(FadingSpec.rice(6.0), make_rng(10), 1_000_000)
    assert abs(z.mean() - 1) < 3 * z.std() / 1000
    assert sample_fading_power(FadingSpec.constant(), 0) == 1.0


@given(st.sampled_from(SPECS), st.floats(-50, 50))
def test_cf_symmetry_and_bound(spec, t):
    v = fading_cf(spec, t)
    assert abs(v) <= 1 + 1e-12
    assert abs(fading_cf(spec, -t) - np.conj(v)) < 1e-12


@given(st.sampled_from(SPECS[:3]), st.floats(0.0, 50), st.floats(0.01, 5))
def test_laplace_argument_real_decreasing(spec, s, ds):
    a = fading_cf(spec, 1j * s)
    b = fading_cf(spec, 1j * (s + ds))
    assert abs(a.imag) < 1e-12 and 0 < a.real <= 1
    assert b.real < a.real


def test_spec_parse_roundtrip():
    for s in SPECS:
        assert FadingSpec.parse(str(s)) == s
    with pytest.raises(ValueError):
        FadingSpec.parse("lognormal:3")


def test_default_fading_per_category():
    p = PropagationParams(rice_K=6.0)
    assert p.fading(Category.LOS) == FadingSpec.rice(6.0)
    assert p.fading("D") == FadingSpec.rayleigh()
