"""Brute-force simulation of the stochastic-geometry model.

Each realisation ``i`` draws from its own Philox stream keyed by
``(seed_base, i)``, so results do not depend on how realisations are split
across worker processes.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .channel import Category, path_loss
from .geometry import ManhattanScene, UserType, los_probability, make_rng, sample_scene

log = logging.getLogger(__name__)

DEFAULT_HALF_SIZE = 128_000.0
RECORD_FIELDS = ("S", "I_L", "I_N", "I_D", "serving_distance", "serving_is_los", "user_type")


@dataclass
class PowerDecomposition:
    S: float
    I_L: float
    I_N: float
    I_D: float
    serving_distance: float
    serving_is_los: bool
    user_type: UserType

    @property
    def interference(self):
        return self.I_L + self.I_N + self.I_D

    @property
    def exposure(self):
        return self.S + self.I_L + self.I_N + self.I_D

    def sinr(self, noise=0.0):
        den = self.interference + noise
        return math.inf if den == 0 else self.S / den


@dataclass
class McEstimate:
    value: np.ndarray
    stderr: np.ndarray
    n: int
    seed_base: int

    def __post_init__(self):
        self.value = np.asarray(self.value, dtype=float)
        self.stderr = np.asarray(self.stderr, dtype=float)


def _prob_estimate(indicator, n, seed_base):
    p = indicator.mean(axis=0)
    return McEstimate(p, np.sqrt(p * (1.0 - p) / n), n, seed_base)


def _mean_estimate(x, seed_base):
    n = x.shape[0]
    sd = x.std(axis=0, ddof=1) if n > 1 else np.zeros(x.shape[1:])
    return McEstimate(x.mean(axis=0), sd / math.sqrt(n), n, seed_base)


# ---------------------------------------------------------------------------
# trimming of negligible diffraction contributors


def _restricted_diffraction_mean(config, params, extent):
    """Campbell mean of the corner-diffracted power from streets ``|y| <= extent``
    carrying BSs at ``|x| <= extent`` (per typical street, unit prefactor)."""
    a = params.alpha_D
    k = params.k_f
    rs = config.exclusion_radius
    if extent <= rs:
        return 0.0

    def inner(y):
        m = 1.0 + k * y
        return (y ** (1.0 - a) - (y + m * extent) ** (1.0 - a)) / ((a - 1.0) * m)

    pts = [p for p in (10 * rs, 100 * rs, 1000 * rs) if rs < p < extent]
    return integrate.quad(inner, rs, extent, points=pts or None, limit=400, epsabs=0, epsrel=1e-10)[0]


def diffraction_extent(config, params, rel_tol=1e-6):
    """Smallest extent whose excluded Campbell mean is below ``rel_tol`` of the total.

    Restricting a Poisson process to a subset is still a Poisson process, so
    sampling only the retained streets and BSs is exact for everything inside
    and drops a contribution bounded (in mean) by the returned ``bound``.
    """
    R = config.half_size
    if config.street_density == 0 or config.bs_density == 0 or abs(params.alpha_D - 1.0) < 1e-12:
        return R, 0.0
    full = _restricted_diffraction_mean(config, params, R)
    lo, hi = math.log(config.exclusion_radius * 2), math.log(R)
    if full - _restricted_diffraction_mean(config, params, math.exp(lo)) <= rel_tol * full:
        return math.exp(lo), rel_tol
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if full - _restricted_diffraction_mean(config, params, math.exp(mid)) <= rel_tol * full:
            hi = mid
        else:
            lo = mid
    ext = math.exp(hi)
    bound = (full - _restricted_diffraction_mean(config, params, ext)) / full
    return ext, max(bound, 0.0)


# ---------------------------------------------------------------------------
# single realisation


def power_decomposition(scene, config, params, blockage, rng):
    """Received powers at the origin for a given scene."""
    P = params.tx_power
    dh = config.delta_h
    d = scene.typical_distances()
    S = I_L = I_N = I_D = 0.0
    r_serv, serv_los = math.inf, False
    if d.size:
        los = rng.random(d.size) < los_probability(d, blockage)
        hL = params.fading(Category.LOS).sample(rng, d.size)
        hN = params.fading(Category.NLOS).sample(rng, d.size)
        pw = np.where(
            los,
            P * hL * path_loss(Category.LOS, d, dh, params),
            P * hN * path_loss(Category.NLOS, d, dh, params),
        )
        i = int(np.argmin(d))
        r_serv, serv_los, S = float(d[i]), bool(los[i]), float(pw[i])
        rest = np.ones(d.size, dtype=bool)
        rest[i] = False
        I_L = float(pw[rest & los].sum())
        I_N = float(pw[rest & ~los].sum())
    perp = scene.perpendicular_streets()
    if perp:
        s1 = np.concatenate([np.full(s.bs.size, abs(s.coord)) for s in perp])
        s2 = np.abs(np.concatenate([s.bs for s in perp]))
        if s1.size:
            berg = s1 + s2 + params.k_f * s1 * s2
            h = params.fading(Category.DIFFRACTION).sample(rng, s1.size)
            I_D = float((P * h * path_loss(Category.DIFFRACTION, berg, dh, params)).sum())
    return PowerDecomposition(S, I_L, I_N, I_D, r_serv, serv_los, scene.user_type)


def simulate_realization(config, params, blockage, user_type, seed, extent=None):
    """One realisation: sample the scene, then blockage states and fading.

    ``extent`` limits the sampled non-typical streets and their BSs (see
    :func:`diffraction_extent`); ``None`` samples the whole network.
    """
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    scene = sample_scene(config, user_type, rng, street_extent=extent, bs_extent=extent)
    return power_decomposition(scene, config, params, blockage, rng)


def _simulate_chunk(args):
    config, params, blockage, eta, seed_base, start, stop, extent = args
    out = np.empty((stop - start, len(RECORD_FIELDS)))
    for row, i in enumerate(range(start, stop)):
        rng = make_rng(seed_base, i)
        ut = UserType.CROSSROAD if rng.random() < eta else UserType.STREET
        pd = simulate_realization(config, params, blockage, ut, rng, extent)
        out[row] = (
            pd.S, pd.I_L, pd.I_N, pd.I_D, pd.serving_distance, float(pd.serving_is_los), int(ut),
        )
    return out


def worker_count(requested=None):
    cap = os.environ.get("THREADS")
    n = requested or (int(cap) if cap else os.cpu_count() or 1)
    if cap:
        n = min(n, int(cap))
    return max(1, int(n))


def simulate_records(n, config, params, blockage, eta, seed_base, workers=None, extent="auto"):
    """Per-realisation records as a dict of arrays, in realisation order."""
    if n < 1:
        raise ValueError("need at least one realisation")
    if math.isinf(config.half_size):
        raise ValueError("Monte Carlo needs a finite half_size")
    bound = 0.0
    if extent == "auto":
        extent, bound = diffraction_extent(config, params)
        log.info("diffraction trimmed at %.1f m (excluded mean fraction <= %.2g)", extent, bound)
    workers = worker_count(workers)
    chunk = max(1, min(2000, -(-n // (4 * workers))))
    tasks = [
        (config, params, blockage, eta, int(seed_base), s, min(n, s + chunk), extent)
        for s in range(0, n, chunk)
    ]
    if workers == 1 or len(tasks) == 1:
        parts = [_simulate_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_simulate_chunk, tasks))
    arr = np.concatenate(parts, axis=0)
    rec = {k: arr[:, j] for j, k in enumerate(RECORD_FIELDS)}
    rec["serving_is_los"] = rec["serving_is_los"].astype(bool)
    rec["user_type"] = rec["user_type"].astype(int)
    rec["_trim_extent"] = extent
    rec["_trim_bound"] = bound
    return rec


# ---------------------------------------------------------------------------
# estimates


@dataclass
class McResults:
    theta_c: np.ndarray
    theta_e: np.ndarray
    coverage: McEstimate
    exposure_cdf: McEstimate
    joint: McEstimate
    mean_capacity: McEstimate
    mean_exposure: dict
    n: int
    seed_base: int
    meta: dict = field(default_factory=dict)
    records: dict | None = None


def estimates_from_records(rec, theta_c, theta_e, params, seed_base=0):
    theta_c = np.atleast_1d(np.asarray(theta_c, dtype=float))
    theta_e = np.atleast_1d(np.asarray(theta_e, dtype=float))
    S = rec["S"]
    I = rec["I_L"] + rec["I_N"] + rec["I_D"]
    E = S + I
    den = I + params.noise
    with np.errstate(divide="ignore", invalid="ignore"):
        sinr = np.where(den > 0, S / den, np.where(S > 0, np.inf, 0.0))
    n = S.size
    cov_ind = sinr[:, None] > theta_c[None, :]
    exp_ind = E[:, None] < theta_e[None, :]
    joint_ind = (cov_ind[:, :, None] & exp_ind[:, None, :]).reshape(n, -1)
    joint = _prob_estimate(joint_ind, n, seed_base)
    joint.value = joint.value.reshape(theta_c.size, theta_e.size)
    joint.stderr = joint.stderr.reshape(theta_c.size, theta_e.size)
    cap = params.bandwidth * np.log2(1.0 + sinr)
    los = rec["serving_is_los"]
    comps = {
        "L": np.where(los, S, 0.0) + rec["I_L"],
        "N": np.where(los, 0.0, S) + rec["I_N"],
        "D": rec["I_D"],
        "total": E,
    }
    mean_exp = {k: _mean_estimate(v[:, None], seed_base) for k, v in comps.items()}
    for v in mean_exp.values():
        v.value, v.stderr = v.value[0], v.stderr[0]
    mc = _mean_estimate(cap[:, None], seed_base)
    mc.value, mc.stderr = mc.value[0], mc.stderr[0]
    return McResults(
        theta_c,
        theta_e,
        _prob_estimate(cov_ind, n, seed_base),
        _prob_estimate(exp_ind, n, seed_base),
        joint,
        mc,
        mean_exp,
        n,
        seed_base,
    )


def estimate_metrics(
    n, theta_c, theta_e, config, params, blockage, eta, seed_base, workers=None, keep_records=False
):
    """Empirical coverage, exposure CDF, joint probability, capacity and mean exposure.

    The user type of each realisation is drawn Bernoulli(``eta``).
    """
    rec = simulate_records(n, config, params, blockage, eta, seed_base, workers)
    res = estimates_from_records(rec, theta_c, theta_e, params, seed_base)
    res.meta = {"trim_extent": rec["_trim_extent"], "trim_bound": rec["_trim_bound"]}
    if keep_records:
        res.records = {k: rec[k] for k in RECORD_FIELDS}
    return res


LINK_FIELDS = ("realization", "bs", "category", "distance", "los", "power", "paths", "user_type")


def link_records(n, config, params, blockage, seed_base, eta=0.0):
    """Per-link records of typical-street BSs, in the ray tracer's column layout.

    Feeds the parameter fitting with data of known ground truth.
    """
    if math.isinf(config.half_size):
        raise ValueError("Monte Carlo needs a finite half_size")
    cols = {k: [] for k in LINK_FIELDS}
    P, dh = params.tx_power, config.delta_h
    for i in range(n):
        rng = make_rng(seed_base, i)
        ut = UserType.CROSSROAD if rng.random() < eta else UserType.STREET
        scene = sample_scene(config, ut, rng, street_extent=0.0)
        d = scene.typical_distances()
        if d.size == 0:
            continue
        los = rng.random(d.size) < los_probability(d, blockage)
        hL = params.fading(Category.LOS).sample(rng, d.size)
        hN = params.fading(Category.NLOS).sample(rng, d.size)
        pw = np.where(
            los,
            P * hL * path_loss(Category.LOS, d, dh, params),
            P * hN * path_loss(Category.NLOS, d, dh, params),
        )
        cols["realization"].append(np.full(d.size, i))
        cols["bs"].append(np.arange(d.size))
        cols["category"].append(np.where(los, "L", "N"))
        cols["distance"].append(d)
        cols["los"].append(los)
        cols["power"].append(pw)
        cols["paths"].append(np.ones(d.size, dtype=int))
        cols["user_type"].append(np.full(d.size, int(ut)))
    dtypes = {"realization": int, "bs": int, "category": "<U1", "distance": float,
              "los": bool, "power": float, "paths": int, "user_type": int}
    return {
        k: (np.concatenate(v).astype(dtypes[k]) if v else np.empty(0, dtype=dtypes[k]))
        for k, v in cols.items()
    }


def empirical_cf(samples, t):
    """Sample CF and its standard error (per real/imaginary part, combined)."""
    x = np.asarray(samples, dtype=float)
    z = np.exp(1j * np.multiply.outer(np.asarray(t, dtype=float), x))
    m = z.mean(axis=-1)
    se = np.sqrt((z.real.var(axis=-1) + z.imag.var(axis=-1)) / x.size)
    return m, se


__all__ = [
    "DEFAULT_HALF_SIZE",
    "ManhattanScene",
    "McEstimate",
    "McResults",
    "PowerDecomposition",
    "diffraction_extent",
    "empirical_cf",
    "estimate_metrics",
    "estimates_from_records",
    "link_records",
    "power_decomposition",
    "simulate_realization",
    "simulate_records",
    "worker_count",
]
