import math

import numpy as np
import pytest

from manhattan_emf import BlockageParams, FadingSpec, NetworkConfig, PropagationParams, montecarlo
from manhattan_emf.channel import path_loss
from manhattan_emf.geometry import ManhattanScene, Street, UserType, make_rng

NO_FADE = dict(fading_L=FadingSpec.constant(), fading_N=FadingSpec.constant(), fading_D=FadingSpec.constant())


def test_single_pinned_link():
    cfg = NetworkConfig(half_size=1000.0, street_density=0.0, bs_density=0.0)
    p = PropagationParams(**NO_FADE)
    sc = ManhattanScene(1000.0, UserType.STREET, [Street("h", 0.0, np.array([100.0]), True)])
    pd = montecarlo.power_decomposition(sc, cfg, p, BlockageParams(), make_rng(0))
    assert pd.S == pytest.approx(p.tx_power * path_loss("L", 100.0, cfg.delta_h, p), rel=1e-15)
    assert pd.I_L == pd.I_N == pd.I_D == 0.0
    assert pd.serving_is_los and pd.serving_distance == 100.0


def test_heavy_blockage_kills_los():
    cfg = NetworkConfig(half_size=2000.0, street_density=0.0)
    rec = montecarlo.simulate_records(300, cfg, PropagationParams(), BlockageParams(50.0), 0.0, 3, workers=1)
    assert not rec["serving_is_los"].any()
    assert np.all(rec["I_L"] == 0.0)


def test_crossroad_doubles_bs_count():
    cfg = NetworkConfig(half_size=1000.0, street_density=0.0, bs_density=5e-3)
    n1 = [montecarlo.sample_scene(cfg, 1, make_rng(5, i)).typical_distances().size for i in range(4000)]
    n2 = [montecarlo.sample_scene(cfg, 2, make_rng(6, i)).typical_distances().size for i in range(4000)]
    se = math.sqrt(np.var(n1) / 4000 + np.var(n2) / 4000 / 4)
    assert abs(np.mean(n2) / 2 - np.mean(n1)) < 3 * se


def test_n_equals_one():
    cfg = NetworkConfig(half_size=3000.0)
    res = montecarlo.estimate_metrics(1, [0.5, 2.0], [1e-6, 1e-3], cfg, PropagationParams(), BlockageParams(), 0.1, 7)
    assert set(np.unique(res.coverage.value)) <= {0.0, 1.0}
    assert set(np.unique(res.exposure_cdf.value)) <= {0.0, 1.0}
    np.testing.assert_array_equal(res.coverage.stderr, 0.0)


def test_joint_below_marginals():
    cfg = NetworkConfig(half_size=5000.0)
    tc, te = np.logspace(-1, 2, 6), np.logspace(-7, -3, 5)
    res = montecarlo.estimate_metrics(2000, tc, te, cfg, PropagationParams(), BlockageParams(0.01), 0.1, 8)
    assert np.all(res.joint.value <= res.coverage.value[:, None] + 1e-15)
    assert np.all(res.joint.value <= res.exposure_cdf.value[None, :] + 1e-15)


def test_worker_independence():
    cfg = NetworkConfig(half_size=4000.0)
    args = (400, cfg, PropagationParams(), BlockageParams(0.01), 0.3, 9)
    a = montecarlo.simulate_records(*args, workers=1)
    b = montecarlo.simulate_records(*args, workers=3)
    for k in montecarlo.RECORD_FIELDS:
        np.testing.assert_array_equal(a[k], b[k])


def test_diffraction_trim_bound():
    cfg = NetworkConfig(half_size=128_000.0)
    ext, bound = montecarlo.diffraction_extent(cfg, PropagationParams())
    assert cfg.exclusion_radius < ext < cfg.half_size
    assert bound <= 1e-6


def test_link_records_layout():
    cfg = NetworkConfig(half_size=1000.0)
    rec = montecarlo.link_records(50, cfg, PropagationParams(), BlockageParams(0.004, 0.85), 10)
    n = rec["power"].size
    assert n > 0 and all(v.size == n for v in rec.values())
    assert set(np.unique(rec["category"])) <= {"L", "N"}
    np.testing.assert_array_equal(rec["category"] == "L", rec["los"])


def test_requires_finite_network():
    with pytest.raises(ValueError):
        montecarlo.simulate_records(10, NetworkConfig(), PropagationParams(), BlockageParams(), 0.1, 0)
    with pytest.raises(ValueError):
        montecarlo.simulate_records(0, NetworkConfig(half_size=10.0), PropagationParams(), BlockageParams(), 0.1, 0)
