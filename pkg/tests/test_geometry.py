import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from manhattan_emf import (
    BlockageParams,
    ManhattanScene,
    NetworkConfig,
    UserType,
    los_probability,
    make_rng,
    sample_scene,
    serving_distance_pdf,
)


def test_config_invariants():
    with pytest.raises(ValueError):
        NetworkConfig(user_height=1.5, bs_height=2.4)
    with pytest.raises(ValueError):
        NetworkConfig(crossroad_probability=1.5)
    with pytest.raises(ValueError):
        NetworkConfig(street_density=-1)
    with pytest.raises(ValueError):
        NetworkConfig(exclusion_radius=0)
    assert NetworkConfig().delta_h == 4.5


def test_no_streets_only_typical():
    cfg = NetworkConfig(half_size=2000.0, street_density=0.0, bs_density=5e-3)
    counts = []
    for i in range(2000):
        sc = sample_scene(cfg, UserType.STREET, make_rng(1, i))
        assert len(sc.streets) == 1 and sc.streets[0].typical
        counts.append(sc.streets[0].bs.size)
    mean, sd = np.mean(counts), np.std(counts) / math.sqrt(len(counts))
    assert abs(mean - 2 * 2000 * 5e-3) < 3 * sd


def test_vertical_street_count_poisson_mean():
    cfg = NetworkConfig(half_size=2000.0, street_density=5e-3, bs_density=0.0)
    n = [len(sample_scene(cfg, 1, make_rng(2, i)).vertical_street_abscissas) for i in range(10_000)]
    # exclusion segment removes a negligible 2 r_s lambda_S = 0.01
    expected = 2 * (2000 - cfg.exclusion_radius) * 5e-3
    assert abs(np.mean(n) - expected) < 3 * math.sqrt(expected / len(n))


def test_crossroad_has_two_typical_streets():
    sc = sample_scene(NetworkConfig(half_size=1000.0), UserType.CROSSROAD, 3)
    t = sc.typical_streets
    assert len(t) == 2 and {s.axis for s in t} == {"h", "v"}
    assert all(s.coord == 0.0 for s in t)


def test_exclusion_zone_respected():
    cfg = NetworkConfig(half_size=500.0, street_density=0.2, exclusion_radius=3.0)
    for i in range(50):
        sc = sample_scene(cfg, 1, make_rng(4, i))
        assert np.all(np.abs(sc.vertical_street_abscissas) > 3.0)


def test_seed_determinism_and_text_roundtrip():
    cfg = NetworkConfig(half_size=800.0)
    a = sample_scene(cfg, 2, 11)
    b = sample_scene(cfg, 2, 11)
    assert a.to_text() == b.to_text()
    assert sample_scene(cfg, 2, 12).to_text() != a.to_text()
    c = ManhattanScene.from_text(a.to_text())
    assert c.to_text() == a.to_text()


def test_distinct_seeds_independent_counts():
    # chi-square homogeneity of BS counts from two disjoint seed families
    cfg = NetworkConfig(half_size=300.0, street_density=0.0)
    x = [sample_scene(cfg, 1, make_rng(20, i)).streets[0].bs.size for i in range(3000)]
    y = [sample_scene(cfg, 1, make_rng(21, i)).streets[0].bs.size for i in range(3000)]
    hx = np.bincount(np.clip(x, 0, 9), minlength=10)
    hy = np.bincount(np.clip(y, 0, 9), minlength=10)
    keep = (hx + hy) > 0
    _, p, _, _ = stats.chi2_contingency(np.vstack([hx[keep], hy[keep]]))
    assert p > 0.001


def test_serving_pdf_examples():
    assert serving_distance_pdf(1e-12, 1, 5e-3) == pytest.approx(0.01, rel=1e-9)
    lam, R = 3e-3, 700.0
    tot = integrate.quad(lambda r: serving_distance_pdf(r, 2, lam, R), 1e-12, R - 1e-12, epsabs=1e-13)[0]
    assert abs(tot - 1) < 1e-10
    r = np.array([1.0, 50.0, 300.0])
    np.testing.assert_allclose(serving_distance_pdf(r, 2, lam, R), serving_distance_pdf(r, 1, 2 * lam, R), rtol=1e-14)
    with pytest.raises(ValueError):
        serving_distance_pdf(0.0, 1, lam)
    with pytest.raises(ValueError):
        serving_distance_pdf(800.0, 1, lam, R)


def test_serving_distance_histogram_ks():
    cfg = NetworkConfig(half_size=2000.0, street_density=0.0, bs_density=5e-3)
    d = []
    for i in range(100_000):
        x = sample_scene(cfg, 1, make_rng(5, i)).typical_distances()
        if x.size:
            d.append(x.min())
    rate, R = 2 * 5e-3, 2000.0
    cdf = lambda r: -np.expm1(-rate * r) / -math.expm1(-rate * R)  # noqa: E731
    assert stats.kstest(d, cdf).statistic < 0.01


def test_los_probability_examples():
    assert los_probability(0.0, BlockageParams(0.3, 2.0)) == 1.0
    np.testing.assert_array_equal(los_probability([0, 10, 1e5], BlockageParams()), 1.0)
    assert los_probability(100.0, BlockageParams(0.004, 0.85)) == pytest.approx(
        math.exp(-0.004 * 100**0.85), rel=1e-12
    )
    assert los_probability(100.0, BlockageParams(0.004, 0.85)) == pytest.approx(0.818, abs=1e-3)
    with pytest.raises(ValueError):
        los_probability(-1.0, BlockageParams())


@given(st.floats(1.01, 1e4), st.floats(0, 0.1), st.floats(0.1, 3), st.floats(0, 100))
def test_los_monotone(r, beta, gamma, dr):
    b = BlockageParams(beta, gamma)
    assert 0 <= los_probability(r, b) <= 1  # may underflow to 0
    assert los_probability(r + dr, b) <= los_probability(r, b)
    assert los_probability(r, BlockageParams(beta * 1.5, gamma)) <= los_probability(r, b)
    assert los_probability(r, BlockageParams(beta, gamma * 1.2)) <= los_probability(r, b)
