"""Stochastic-geometry metrics for the Manhattan network: characteristic
functions of useful and interfering powers, coverage and exposure
distributions, average capacity, mean exposure and the BS density optimum.

All spatial integrals run on fixed Chebyshev panel grids (see
:mod:`.quadrature`), so one evaluation of the interference exponent yields its
value for every conditioning distance at once.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .channel import Category, fading_cf, path_loss
from .geometry import UserType, los_probability
from .quadrature import (
    NumericalFailure,
    PanelGrid,
    QuadratureSpec,
    adaptive_gk,
    geometric_edges,
    gil_pelaez_cdf,
)

log = logging.getLogger(__name__)

_REACH_CAP = 1e12
_CHUNK = 1_500_000


class DomainError(ValueError):
    """Parameters for which the requested quantity does not exist."""


# ---------------------------------------------------------------------------
# result containers


@dataclass
class MetricResult:
    """A metric on a threshold grid (or a scalar moment when ``grid`` is empty)."""

    name: str
    grid: np.ndarray
    values: np.ndarray
    engine: str = "analytic"
    stderr: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.ndim == 1 and self.grid.size > 1 and np.any(np.diff(self.grid) <= 0):
            raise ValueError("metric grid must be strictly increasing")


@dataclass(frozen=True)
class MeanExposure:
    L: float
    N: float
    D: float

    @property
    def total(self):
        return self.L + self.N + self.D

    def scaled(self, factor):
        return MeanExposure(factor * self.L, factor * self.N, factor * self.D)


@dataclass
class OptimumResult:
    bs_density: float
    capacity: float
    at_boundary: bool
    grid: np.ndarray
    values: np.ndarray

    def __iter__(self):
        return iter((self.bs_density, self.capacity))


# ---------------------------------------------------------------------------
# helpers


def _q_of(q):
    return int(UserType.coerce(q))


def _is_arbitrary(q):
    return isinstance(q, str) and q.lower() in ("arbitrary", "mixed", "any")


def _per_user(q, config, fn):
    """Evaluate ``fn(q)`` for a street/crossroad user or mix the two."""
    if _is_arbitrary(q):
        eta = config.crossroad_probability
        a = np.asarray(fn(1))
        if eta == 0.0:
            return a
        b = np.asarray(fn(2))
        return (1.0 - eta) * a + eta * b
    return fn(_q_of(q))


def _reach(coeff, alpha, floor_power):
    """Distance where ``coeff * d**-alpha`` drops to ``floor_power``."""
    if coeff <= 0 or floor_power <= 0:
        return 0.0
    return min(_REACH_CAP, (coeff / floor_power) ** (1.0 / alpha))


def cf_useful(p, t, r, params, config):
    """CF of the serving power conditioned on distance ``r`` and state ``p``."""
    c = Category.coerce(p)
    if c is Category.DIFFRACTION:
        raise ValueError("useful power is LOS or NLOS")
    if np.any(np.asarray(r) <= 0):
        raise ValueError("serving distance must be positive")
    a = params.tx_power * path_loss(c, r, config.delta_h, params)
    return fading_cf(params.fading(c), np.asarray(t) * a)


# ---------------------------------------------------------------------------
# the model


class _Model:
    """Panel grids and cached gains for one parameter set."""

    def __init__(self, params, blockage, config, quad):
        self.params = params
        self.blockage = blockage
        self.config = config
        self.quad = quad
        self.R = config.half_size
        self.infinite = math.isinf(self.R)
        dh = config.delta_h
        P = params.tx_power
        self.ref_power = P / params.kappa("L") * dh ** (-params.alpha_L)
        floor = quad.inner_tolerance * self.ref_power
        cats = []
        if config.typical_density > 0 and P > 0:
            cats.append(Category.LOS)
            if blockage.beta > 0:
                cats.append(Category.NLOS)
        self.categories = cats
        self._check_domain()

        # typical-street radial grid
        if self.infinite:
            r_end = max(
                [_reach(P / params.kappa(c), params.alpha(c), floor) for c in cats] + [100 * dh]
            )
            r_end = max(r_end, 60.0 / max(config.typical_density, 1e-300))
            r_end = min(r_end, _REACH_CAP)
        else:
            r_end = self.R
        self.r_end = r_end
        edges = geometric_edges(0.0, r_end, 1e-2 * dh, quad.inner_ratio)
        self.rgrid = PanelGrid(edges, quad.inner_order)
        r = self.rgrid.nodes
        self.r = r
        pl = los_probability(r, blockage)
        self.prob = {Category.LOS: pl, Category.NLOS: 1.0 - pl}
        self.gain = {c: P * path_loss(c, r, dh, params) for c in (Category.LOS, Category.NLOS)}
        self.fading = {c: params.fading(c) for c in Category}
        self.r_tail = {}
        for c in cats:
            if self.infinite:
                self.r_tail[c] = self._radial_tail(c, r_end)
            else:
                self.r_tail[c] = 0.0

        # diffraction grids
        self.k = params.k_f  # Berg coefficient at a right-angle corner
        self.has_d = config.street_density > 0 and config.bs_density > 0 and P > 0
        if self.has_d:
            rs = config.exclusion_radius
            self.cD = P / params.kappa("D")
            if self.infinite:
                u_end = max(_reach(self.cD, params.alpha_D, floor), 100 * rs)
                y_end = u_end
                anchors = ()
            else:
                y_end = self.R
                u_end = self.R * (2.0 + self.k * self.R)
                anchors = (self.R,)
            edges = geometric_edges(rs, u_end, 1e-2 * rs, quad.inner_ratio, anchors)
            self.ugrid = PanelGrid(edges, quad.inner_order)
            u = self.ugrid.nodes
            self.u = u
            self.ny = int(np.searchsorted(u, y_end))
            y = u[: self.ny]
            self.m = 1.0 + self.k * y
            # outer weights restricted to panels below y_end
            self.wy = self.ugrid.weights[: self.ny]
            self.u_end = u_end
            self.gD = self.cD * u ** (-params.alpha_D)
            if self.infinite:
                self.far = None
                aD = params.alpha_D
                self.J = integrate.quad(
                    lambda yy: yy ** (1 - aD) / ((aD - 1) * (1 + self.k * yy)),
                    u_end,
                    np.inf,
                    epsabs=0,
                    epsrel=1e-10,
                    limit=200,
                )[0]
            else:
                self.far = self.ugrid.tail_evaluator(np.minimum(y + self.m * self.R, u_end))
                self.J = 0.0

    # -- domain -------------------------------------------------------------

    def _check_domain(self):
        p, b, c = self.params, self.blockage, self.config
        if not self.infinite or p.tx_power == 0:
            return
        if c.typical_density > 0:
            if b.beta == 0 and p.alpha_L <= 1:
                raise DomainError("alpha_L must exceed 1 for an infinite network")
            if b.beta > 0 and p.alpha_N <= 1:
                raise DomainError("alpha_N must exceed 1 for an infinite network")
        if c.street_density > 0 and c.bs_density > 0:
            need = 1.0 if p.q_lambda > 0 else 2.0
            if p.alpha_D <= need:
                raise DomainError(f"alpha_D must exceed {need:g} for an infinite network")

    def _radial_tail(self, c, start):
        dh = self.config.delta_h
        P = self.params.tx_power
        a = self.params.alpha(c)
        pr = (lambda x: 1.0 - los_probability(x, self.blockage)) if c is Category.NLOS else (
            lambda x: los_probability(x, self.blockage)
        )
        # integrate in log r; the integrand decays like r**(1 - alpha)
        def f(v):
            x = start * math.exp(v)
            return pr(x) * P * path_loss(c, x, dh, self.params) * x

        span = min(60.0 / max(a - 1.0, 1e-3), math.log(1e300 / start))
        b = self.blockage
        if c is Category.LOS and b.beta > 0:
            # exp(-beta x**gamma) < 1e-300 beyond this point, whatever alpha_L is
            span = min(span, max(math.log((700.0 / b.beta) ** (1.0 / b.gamma) / start), 0.0))
        return integrate.quad(f, 0.0, span, epsabs=0, epsrel=1e-10, limit=400)[0]

    # -- CF building blocks ------------------------------------------------

    def useful(self, t, mode="cf"):
        """Mixture over serving state at every radial node: (M, N)."""
        out = np.zeros((t.size, self.r.size), dtype=complex)
        if self.params.tx_power == 0:
            return out + (1.0 if mode == "cf" else 0.0)
        for c in (Category.LOS, Category.NLOS):
            p = self.prob[c]
            if not np.any(p > 0):
                continue
            phi = fading_cf(self.fading[c], np.multiply.outer(t, self.gain[c]))
            out += p * (phi if mode == "cf" else 1.0 - phi)
        return out

    def typical_exponent(self, s, points=None):
        """log CF (one typical street) of the L+N interference beyond each radial node."""
        lam = self.config.typical_density
        M = s.size
        npts = self.r.size if points is None else len(points)
        out = np.zeros((M, npts), dtype=complex)
        ev = None if points is None else self.rgrid.tail_evaluator(points)
        for c in self.categories:
            vals = self.prob[c] * (
                fading_cf(self.fading[c], np.multiply.outer(s, self.gain[c])) - 1.0
            )
            tail = self.rgrid.tail(vals) if ev is None else ev(vals)
            out += 2.0 * lam * tail
            if self.r_tail[c]:
                out += (2.0 * lam * 1j * self.fading[c].mean * self.r_tail[c]) * s[:, None]
        return out

    def diffraction_exponent(self, s):
        """log CF (one typical street) of the corner-diffracted interference."""
        if not self.has_d:
            return np.zeros(s.size, dtype=complex)
        lamB, lamS = self.config.bs_density, self.config.street_density
        aD = self.params.alpha_D
        g = 1.0 - fading_cf(self.fading[Category.DIFFRACTION], np.multiply.outer(s, self.gD))
        G = self.ugrid.tail(g)[:, : self.ny]
        lin = -1j * s * self.cD * self.fading[Category.DIFFRACTION].mean  # first-order slope
        if self.infinite:
            G = G + (lin * self.u_end ** (1 - aD) / (aD - 1))[:, None]
        else:
            G = G - self.far(g)
        inner = 2.0 * lamB * G / self.m
        outer = (-np.expm1(-inner)) @ self.wy
        if self.infinite:
            outer = outer + 2.0 * lamB * lin * self.J
        return -2.0 * lamS * outer

    def serving_weights(self, q):
        lam = self.config.typical_density
        rate = 2.0 * q * lam
        norm = 1.0 if self.infinite else -math.expm1(-rate * self.R)
        return self.rgrid.weights * rate * np.exp(-rate * self.r) / norm

    # -- assembled transforms ---------------------------------------------

    def transform(self, q, t_useful, s_interf, useful="cf", interference=True):
        """Sum over serving distance of useful-term x interference CF.

        ``useful`` is ``"cf"``, ``"one_minus"`` or ``None`` (drop the useful term).
        """
        t_useful = np.asarray(t_useful)
        s_interf = np.asarray(s_interf)
        n = max(1, _CHUNK // max(self.r.size, 1))
        out = np.empty(t_useful.size, dtype=complex)
        w = self.serving_weights(q)
        for i in range(0, t_useful.size, n):
            sl = slice(i, i + n)
            if useful is None:
                U = np.ones((t_useful[sl].size, self.r.size))
            else:
                U = self.useful(t_useful[sl], useful)
            if interference:
                E = q * self.typical_exponent(s_interf[sl])
                U = U * np.exp(E)
                d = np.exp(q * self.diffraction_exponent(s_interf[sl]))
            else:
                d = 1.0
            out[sl] = (U @ w) * d
        return out

    def interference_cf(self, q, s):
        """CF of the total interference (serving distance averaged out)."""
        return self.transform(q, s, s, useful=None)

    # -- moments -----------------------------------------------------------

    def mean_useful(self, q):
        w = self.serving_weights(q)
        m = sum(
            self.prob[c] * self.gain[c] * self.fading[c].mean for c in (Category.LOS, Category.NLOS)
        )
        return float(m @ w) if self.params.tx_power > 0 else 0.0


@functools.lru_cache(maxsize=64)
def _model(params, blockage, config, quad):
    return _Model(params, blockage, config, quad)


def _get(params, blockage, config, quad):
    return _model(params, blockage, config, quad or QuadratureSpec())


# ---------------------------------------------------------------------------
# public CFs


def cf_interference(category, q, t, r, params, blockage, config, quad=None):
    """CF of the interference of one category.

    L and N are conditioned on the serving distance ``r``; D ignores ``r``.
    """
    c = Category.coerce(category)
    qn = _q_of(q)
    t = np.atleast_1d(np.asarray(t))
    m = _get(params, blockage, config, quad)
    if c is Category.DIFFRACTION:
        e = m.diffraction_exponent(t)
    else:
        if r < 0 or (not m.infinite and r > m.R):
            raise ValueError("conditioning distance outside [0, R]")
        if c not in m.categories:
            e = np.zeros(t.size, dtype=complex)
        else:
            e = _single_category_exponent(m, c, t, float(r))
    out = np.exp(e) ** qn
    return out if out.size > 1 else complex(out[0])


def _single_category_exponent(m, c, s, r):
    lam = m.config.typical_density
    ev = m.rgrid.tail_evaluator([min(r, m.r_end)])
    vals = m.prob[c] * (fading_cf(m.fading[c], np.multiply.outer(s, m.gain[c])) - 1.0)
    out = 2.0 * lam * ev(vals)[:, 0]
    if m.r_tail[c]:
        out = out + 2.0 * lam * 1j * m.fading[c].mean * m.r_tail[c] * s
    return out


# ---------------------------------------------------------------------------
# distributions


def _mean_interference(params, blockage, config, q):
    try:
        return mean_exposure(q, params, blockage, config).total
    except DomainError:
        return 0.0


def coverage_probability(theta_c, q, params, blockage, config, quad=None):
    """P[SINR > theta_c] (``theta_c`` linear, scalar or array)."""
    theta = np.atleast_1d(np.asarray(theta_c, dtype=float))
    if np.any(theta <= 0):
        raise ValueError("SINR threshold must be positive")

    def one(qn):
        m = _get(params, blockage, config, quad)
        if params.tx_power == 0:
            return np.zeros(theta.size)
        es = m.mean_useful(qn)
        ei = _mean_interference(params, blockage, config, qn)
        out = np.empty(theta.size)
        for i, th in enumerate(theta):
            cf = lambda t, th=th: m.transform(qn, t, -th * t)  # noqa: E731
            cdf = gil_pelaez_cdf(cf, th * params.noise, m.quad, scale=es + th * ei)
            out[i] = 1.0 - cdf
        return out

    out = np.clip(_per_user(q, config, one), 0.0, 1.0)
    return out if np.ndim(theta_c) else float(out[0])


def exposure_cdf(theta_e, q, params, blockage, config, quad=None):
    """P[S + I_L + I_N + I_D <= theta_e] (watts)."""
    theta = np.atleast_1d(np.asarray(theta_e, dtype=float))
    if np.any(theta <= 0):
        raise ValueError("exposure threshold must be positive")

    def one(qn):
        if params.tx_power == 0:
            return np.ones(theta.size)
        m = _get(params, blockage, config, quad)
        scale = m.mean_useful(qn) + _mean_interference(params, blockage, config, qn)
        cf = lambda t: m.transform(qn, t, t)  # noqa: E731
        return gil_pelaez_cdf(cf, theta, m.quad, scale=scale)

    out = np.clip(_per_user(q, config, one), 0.0, 1.0)
    return out if np.ndim(theta_e) else float(out[0])


def useful_power_ccdf(theta, q, params, blockage, config, quad=None):
    """P[S > theta]."""
    th = np.atleast_1d(np.asarray(theta, dtype=float))

    def one(qn):
        m = _get(params, blockage, config, quad)
        if params.tx_power == 0:
            return np.zeros(th.size)
        cf = lambda t: m.transform(qn, t, t, useful="cf", interference=False)  # noqa: E731
        return 1.0 - gil_pelaez_cdf(cf, th, m.quad, scale=m.mean_useful(qn))

    out = np.clip(_per_user(q, config, one), 0.0, 1.0)
    return out if np.ndim(theta) else float(out[0])


def interference_ccdf(theta, q, params, blockage, config, quad=None):
    """P[I_L + I_N + I_D > theta]."""
    th = np.atleast_1d(np.asarray(theta, dtype=float))

    def one(qn):
        m = _get(params, blockage, config, quad)
        ei = _mean_interference(params, blockage, config, qn) or m.ref_power
        if params.tx_power == 0:
            return np.zeros(th.size)
        cf = lambda t: m.interference_cf(qn, t)  # noqa: E731
        return 1.0 - gil_pelaez_cdf(cf, th, m.quad, scale=ei)

    out = np.clip(_per_user(q, config, one), 0.0, 1.0)
    return out if np.ndim(theta) else float(out[0])


def joint_lower_bound(theta_c, theta_e, q, params, blockage, config, quad=None):
    """Frechet lower bound on P[SINR > theta_c, exposure < theta_e].

    Returns an array of shape ``(len(theta_c), len(theta_e))``.
    """
    pc = np.atleast_1d(coverage_probability(theta_c, q, params, blockage, config, quad))
    pe = np.atleast_1d(exposure_cdf(theta_e, q, params, blockage, config, quad))
    return frechet_bound(pc, pe)


def frechet_bound(pc, pe):
    pc = np.asarray(pc, dtype=float)
    pe = np.asarray(pe, dtype=float)
    return np.maximum(0.0, np.add.outer(pc, pe) - 1.0)


# ---------------------------------------------------------------------------
# capacity


def average_capacity(q, params, blockage, config, quad=None):
    """Mean Shannon rate B E[log2(1 + SINR)] in bit/s."""

    def one(qn):
        if params.tx_power == 0:
            return 0.0
        m = _get(params, blockage, config, quad)
        quad_ = m.quad
        W = params.noise
        scale = m.mean_useful(qn) + _mean_interference(params, blockage, config, qn)
        if not scale > 0:
            scale = m.ref_power

        def integrand(u):
            z = np.exp(u) / scale
            s = 1j * z
            val = m.transform(qn, s, s, useful="one_minus")
            return np.real(val) * np.exp(-z * W)

        lo = math.log(quad_.inner_tolerance)
        hi = _capacity_upper(integrand, quad_)
        bps = np.linspace(lo, hi, max(8, int(hi - lo) + 1))
        val, err = adaptive_gk(
            integrand, bps, quad_.absolute_tolerance, quad_.relative_tolerance, quad_.panel_budget
        )
        return params.bandwidth / math.log(2.0) * float(val)

    out = _per_user(q, config, one)
    return float(out)


def _capacity_upper(integrand, quad):
    u = np.arange(0.0, math.log(quad.truncation_T) + 1.0, 1.0)
    v = integrand(u)
    if np.any(v < -1e3 * quad.absolute_tolerance):
        raise NumericalFailure("negative capacity integrand", float(-v.min()))
    small = v < 1e-3 * quad.absolute_tolerance
    for i in np.nonzero(small)[0]:
        if np.all(small[i:]):
            return float(u[i])
    raise NumericalFailure("capacity integrand does not decay (interference-free and noiseless?)", float(v[-1]))


# ---------------------------------------------------------------------------
# mean exposure


def mean_exposure(q, params, blockage, config):
    """Mean received power by category, serving link included."""
    if _is_arbitrary(q):
        one = mean_exposure(1, params, blockage, config)
        return one.scaled(1.0 + config.crossroad_probability)
    qn = _q_of(q)
    R = config.half_size
    inf = math.isinf(R)
    P = params.tx_power
    dh = config.delta_h
    lam_t = config.typical_density
    if P == 0:
        return MeanExposure(0.0, 0.0, 0.0)

    def typical(c):
        if lam_t == 0:
            return 0.0
        if c is Category.NLOS and blockage.beta == 0:
            return 0.0
        a = params.alpha(c)
        if inf and a <= 1 and (c is Category.NLOS or blockage.beta == 0):
            raise DomainError(f"alpha_{c.value} must exceed 1 for an infinite network")

        def f(r):
            p = los_probability(r, blockage)
            if c is Category.NLOS:
                p = 1.0 - p
            return p * path_loss(c, r, dh, params)

        upper = R if not inf else np.inf
        v = integrate.quad(f, 0.0, min(upper, 100 * dh), epsabs=0, epsrel=1e-12, limit=400)[0]
        if upper > 100 * dh:
            v += integrate.quad(f, 100 * dh, upper, epsabs=0, epsrel=1e-12, limit=400)[0]
        return 2.0 * lam_t * P * params.fading(c).mean * v

    def diffraction():
        lamS, lamB = config.street_density, config.bs_density
        if lamS == 0 or lamB == 0:
            return 0.0
        a = params.alpha_D
        k = params.k_f
        if inf and a <= (1.0 if k > 0 else 2.0):
            raise DomainError("alpha_D too small for an infinite network")
        rs = config.exclusion_radius
        if abs(a - 1.0) < 1e-12:
            raise DomainError("alpha_D = 1 is not supported")

        def inner(y):
            m = 1.0 + k * y
            far = 0.0 if inf else (y + m * R) ** (1.0 - a)
            return (y ** (1.0 - a) - far) / ((a - 1.0) * m)

        upper = np.inf if inf else R
        v = integrate.quad(inner, rs, min(upper, 100 * rs), epsabs=0, epsrel=1e-12, limit=400)[0]
        if upper > 100 * rs:
            v += integrate.quad(inner, 100 * rs, upper, epsabs=0, epsrel=1e-12, limit=400)[0]
        return 4.0 * lamS * lamB * P / params.kappa("D") * params.fading("D").mean * v

    one = MeanExposure(typical(Category.LOS), typical(Category.NLOS), diffraction())
    return one.scaled(float(qn)) if qn == 2 else one


# ---------------------------------------------------------------------------
# arbitrary user and density optimisation


def mix_arbitrary_user(metric_street, metric_crossroad, eta):
    """Law of total probability over the user type."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    if isinstance(metric_street, MetricResult):
        if metric_street.grid.shape != metric_crossroad.grid.shape or not np.allclose(
            metric_street.grid, metric_crossroad.grid, rtol=0, atol=0
        ):
            raise ValueError("metric grids differ")
        vals = (1.0 - eta) * metric_street.values + eta * metric_crossroad.values
        return MetricResult(
            metric_street.name,
            metric_street.grid,
            vals,
            metric_street.engine,
            params=dict(metric_street.params, eta=eta),
        )
    a = np.asarray(metric_street, dtype=float)
    b = np.asarray(metric_crossroad, dtype=float)
    if a.shape != b.shape:
        raise ValueError("metric grids differ")
    return (1.0 - eta) * a + eta * b


def with_bs_density(config, lam):
    """Config with BS density ``lam``, keeping any typical/other density ratio."""
    if config.typical_bs_density is None:
        return config.replace(bs_density=lam)
    ratio = config.typical_bs_density / config.bs_density if config.bs_density > 0 else 1.0
    return config.replace(bs_density=lam, typical_bs_density=lam * ratio)


def optimal_bs_density(
    params, blockage, config, search_range, quad=None, q="arbitrary", n_grid=9, metric=None
):
    """Maximise the average capacity over the BS density.

    A log-spaced scan brackets the maximum, golden-section search refines it.
    ``metric`` may replace the capacity (callable of the density).
    """
    lo, hi = map(float, search_range)
    if not (0 < lo < hi):
        raise ValueError("search range must be positive and increasing")
    if metric is None:

        def metric(lam):
            return average_capacity(q, params, blockage, with_bs_density(config, lam), quad)

    cache = {}

    def f(x):
        if x not in cache:
            cache[x] = float(metric(math.exp(x)))
        return cache[x]

    xs = np.linspace(math.log(lo), math.log(hi), n_grid)
    vals = np.array([f(x) for x in xs])
    i = int(np.argmax(vals))
    if i == 0 or i == n_grid - 1:
        return OptimumResult(math.exp(xs[i]), float(vals[i]), True, np.exp(xs), vals)
    a, b = xs[i - 1], xs[i + 1]
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - g * (b - a), a + g * (b - a)
    while b - a > 1e-4:
        if f(c) > f(d):
            b, d = d, c
            c = b - g * (b - a)
        else:
            a, c = c, d
            d = a + g * (b - a)
    best = max(cache, key=cache.get)
    return OptimumResult(math.exp(best), cache[best], False, np.exp(xs), vals)


__all__ = [
    "DomainError",
    "MeanExposure",
    "MetricResult",
    "NumericalFailure",
    "OptimumResult",
    "QuadratureSpec",
    "average_capacity",
    "cf_interference",
    "cf_useful",
    "coverage_probability",
    "exposure_cdf",
    "frechet_bound",
    "gil_pelaez_cdf",
    "interference_ccdf",
    "joint_lower_bound",
    "mean_exposure",
    "mix_arbitrary_user",
    "optimal_bs_density",
    "useful_power_ccdf",
    "with_bs_density",
]
