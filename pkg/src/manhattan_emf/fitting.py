"""Estimation of model parameters from per-link records, and sensitivity of
the analytic CDFs to errors in the fitted exponents.

Records are dicts of equal-length arrays with at least ``category``
(``L``/``N``/``D``), ``distance`` (1-D along the typical street), ``los`` and
``power`` (watts), as written by the Monte Carlo and ray-tracing engines.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .channel import FadingSpec, PropagationParams
from .geometry import BlockageParams

log = logging.getLogger(__name__)


class FitError(ValueError):
    """Not enough (or degenerate) data for the requested fit."""


@dataclass
class FadingFit:
    rate: float
    n: int
    ks_statistic: float
    ks_pvalue: float
    degenerate: bool = False
    histogram: tuple = ()

    @property
    def spec(self):
        return FadingSpec.exponential(self.rate)

    @property
    def ks_ok(self):
        return not self.degenerate and self.ks_pvalue >= 0.01


@dataclass
class FittedParams:
    beta: float
    gamma: float
    alpha_L: float
    alpha_N: float
    fading_L: FadingSpec
    fading_N: FadingSpec
    eta: float
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.alpha_L > 0 and self.alpha_N > 0 and self.gamma > 0):
            raise ValueError("fitted exponents must be positive")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")

    @property
    def blockage(self):
        return BlockageParams(self.beta, self.gamma)

    def apply(self, params, config):
        """(params, blockage, config) for the analytic engine; kappa stays as given."""
        p = params.replace(
            alpha_L=self.alpha_L,
            alpha_N=self.alpha_N,
            fading_L=self.fading_L,
            fading_N=self.fading_N,
        )
        return p, self.blockage, config.replace(crossroad_probability=self.eta)

    def to_text(self):
        lines = ["[fitted]"]
        for k in ("beta", "gamma", "alpha_L", "alpha_N"):
            lines.append(f"{k} = {getattr(self, k)!r}")
        lines.append(f"fading_L = {self.fading_L}")
        lines.append(f"fading_N = {self.fading_N}")
        lines.append(f"eta = {self.eta!r}")
        for k, v in self.notes.items():
            lines.append(f"# {k}: {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        vals = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith(("#", "[")):
                continue
            k, _, v = line.partition("=")
            vals[k.strip()] = v.strip()
        return cls(
            float(vals["beta"]),
            float(vals["gamma"]),
            float(vals["alpha_L"]),
            float(vals["alpha_N"]),
            FadingSpec.parse(vals["fading_L"]),
            FadingSpec.parse(vals["fading_N"]),
            float(vals["eta"]),
        )


def _typical(records, category=None):
    cat = np.asarray(records["category"])
    m = cat != "D"
    if category is not None:
        m &= cat == category
    return m


def dist3d(d, delta_h):
    d = np.asarray(d, dtype=float)
    return np.sqrt(d * d + delta_h * delta_h)


def fit_exponent(records, category, delta_h, params=None, min_records=30, method="slope"):
    """Path-loss exponent of one class by log-domain least squares.

    ``method="slope"`` regresses log10 P on log10 dist3D with a free offset,
    so a distance-independent gain law (fading mean, log-mean) does not bias
    the exponent; the offset is picked up later by the fading fit, with kappa
    kept at the value in ``params``.  ``method="through_kappa"`` forces the
    line through log10(P_B / kappa).
    """
    params = params or PropagationParams()
    m = _typical(records, category)
    P = np.asarray(records["power"], dtype=float)[m]
    d = np.asarray(records["distance"], dtype=float)[m]
    # links with no traced path carry zero power; the log fit cannot use them
    # (blockage and fading fits still do)
    heard = P > 0
    if not heard.all():
        log.info("class %s: %d zero-power records left out of the exponent fit", category, int((~heard).sum()))
        P, d = P[heard], d[heard]
    if P.size < min_records:
        raise FitError(f"{P.size} records with positive power in class {category}, need {min_records}")
    x = np.log10(dist3d(d, delta_h))
    y = np.log10(P)
    if method == "slope":
        xc = x - x.mean()
        if np.dot(xc, xc) == 0:
            raise FitError("no distance spread")
        return float(-np.dot(xc, y - y.mean()) / np.dot(xc, xc))
    if method == "through_kappa":
        y0 = y - math.log10(params.tx_power / params.kappa(category))
        return float(-np.dot(x, y0) / np.dot(x, x))
    raise ValueError(f"unknown method {method!r}")


def fit_pathloss(records, delta_h, params=None, min_records=30, method="slope"):
    """(alpha_L, alpha_N); see :func:`fit_exponent`."""
    return tuple(fit_exponent(records, c, delta_h, params, min_records, method) for c in ("L", "N"))


def fit_blockage(records, n_bins=20, allow_degenerate=False):
    """(beta, gamma) of exp(-beta r**gamma) from LOS flags of typical-street links.

    Distances are split into ``n_bins`` equal-count bins; bins with an
    empirical LOS fraction of 0 or 1 carry no information on the log-log
    scale and are dropped.  All-LOS data raise :class:`FitError` unless
    ``allow_degenerate``, in which case (0, 1) is returned.
    """
    m = _typical(records)
    los = np.asarray(records["los"], dtype=bool)[m]
    d = np.asarray(records["distance"], dtype=float)[m]
    if los.size == 0:
        raise FitError("no typical-street records")
    if los.all() or not los.any():
        if allow_degenerate and los.all():
            return 0.0, 1.0
        raise FitError("all links share one propagation condition")
    order = np.argsort(d, kind="stable")
    xs, ys = [], []
    for idx in np.array_split(order, min(n_bins, los.size)):
        p = los[idx].mean()
        r = d[idx].mean()
        if 0.0 < p < 1.0 and r > 0:
            xs.append(math.log(r))
            ys.append(math.log(-math.log(p)))
    if len(xs) < 2:
        raise FitError("fewer than two informative distance bins")
    gamma, logb = np.polyfit(xs, ys, 1)
    return float(math.exp(logb)), float(gamma)


def residual_gains(records, category, alpha, delta_h, params):
    m = _typical(records, category)
    P = np.asarray(records["power"], dtype=float)[m]
    d = np.asarray(records["distance"], dtype=float)[m]
    ref = params.tx_power / params.kappa(category) * dist3d(d, delta_h) ** (-alpha)
    return P / ref


def fit_fading(records, alphas, delta_h, params=None, bins=30):
    """Exponential laws for the residual gains of each class (ML rate = 1/mean)."""
    params = params or PropagationParams()
    out = {}
    for c, a in zip(("L", "N"), alphas):
        g = residual_gains(records, c, a, delta_h, params)
        if g.size == 0:
            raise FitError(f"no residuals in class {c}")
        out[c] = fading_from_residuals(g, bins)
    return out


def fading_from_residuals(g, bins=30):
    g = np.asarray(g, dtype=float)
    if g.size == 0:
        raise FitError("empty residual set")
    mean = g.mean()
    rate = 1.0 / mean
    degenerate = bool(np.ptp(g) <= 1e-12 * abs(mean))
    if degenerate:
        ks, pv = 1.0, 0.0
    else:
        res = stats.kstest(g, "expon", args=(0.0, mean))
        ks, pv = float(res.statistic), float(res.pvalue)
    hist = np.histogram(g, bins=bins)
    return FadingFit(float(rate), int(g.size), ks, pv, degenerate, hist)


def in_crossroad(point, h_streets, v_streets, street_width):
    """True when ``point`` lies inside an intersection square."""
    h = 0.5 * street_width
    x, y = point[0], point[1]
    return bool(
        np.any(np.abs(np.asarray(h_streets) - y) <= h) and np.any(np.abs(np.asarray(v_streets) - x) <= h)
    )


def estimate_eta(placements, street_width=None):
    """Fraction of user placements inside a crossroad footprint.

    ``placements`` holds booleans, or ``(point, h_streets, v_streets)``
    triples that are tested with ``street_width``.
    """
    flags = []
    for p in placements:
        if isinstance(p, (bool, np.bool_)):
            flags.append(bool(p))
        else:
            if street_width is None:
                raise ValueError("street_width needed for positional placements")
            flags.append(in_crossroad(p[0], p[1], p[2], street_width))
    if len(flags) < 100:
        log.warning("eta from only %d placements", len(flags))
    if not flags:
        raise FitError("no placements")
    return float(np.mean(flags))


def fit_all(records, crossroad_flags, delta_h, params=None, n_bins=20, method="slope"):
    """Chain the individual fits.  All-LOS data give beta = 0 and alpha_N = alpha_L."""
    params = params or PropagationParams()
    notes = {}
    try:
        beta, gamma = fit_blockage(records, n_bins)
    except FitError as exc:
        if not np.asarray(records["los"])[_typical(records)].all():
            raise
        beta, gamma = 0.0, 1.0
        notes["blockage"] = f"no NLOS links ({exc}); beta set to 0"
    n_nlos = int(_typical(records, "N").sum())
    if n_nlos >= 30:
        aL, aN = fit_pathloss(records, delta_h, params, method=method)
        fad = fit_fading(records, (aL, aN), delta_h, params)
    else:
        aL = fit_exponent(records, "L", delta_h, params, method=method)
        aN = aL
        fL = fading_from_residuals(residual_gains(records, "L", aL, delta_h, params))
        fad = {"L": fL, "N": fL}
        notes["nlos"] = f"{n_nlos} NLOS links; alpha_N and NLOS fading copied from LOS"
    eta = estimate_eta(list(crossroad_flags))
    for c in ("L", "N"):
        notes[f"ks_{c}"] = f"{fad[c].ks_statistic:.4g} (p={fad[c].ks_pvalue:.3g})"
    return FittedParams(beta, gamma, aL, aN, fad["L"].spec, fad["N"].spec, eta, notes)


# ---------------------------------------------------------------------------
# sensitivity


@dataclass
class SensitivityResult:
    delta: float
    useful_deviation: float
    interference_deviation: float
    useful_ccdf: np.ndarray
    interference_ccdf: np.ndarray


def sensitivity_sweep(
    params,
    blockage,
    config,
    theta_useful,
    theta_interference,
    perturbations=(-0.10, -0.05, 0.05, 0.10),
    q="arbitrary",
    quad=None,
):
    """Max |CCDF deviation| of S and I when alpha_L, alpha_N are scaled by (1 + delta)."""
    from .analytic import interference_ccdf, useful_power_ccdf

    base_s = np.atleast_1d(useful_power_ccdf(theta_useful, q, params, blockage, config, quad))
    base_i = np.atleast_1d(interference_ccdf(theta_interference, q, params, blockage, config, quad))
    out = []
    for d in perturbations:
        p = params.replace(alpha_L=params.alpha_L * (1 + d), alpha_N=params.alpha_N * (1 + d))
        s = np.atleast_1d(useful_power_ccdf(theta_useful, q, p, blockage, config, quad))
        i = np.atleast_1d(interference_ccdf(theta_interference, q, p, blockage, config, quad))
        out.append(
            SensitivityResult(
                float(d), float(np.max(np.abs(s - base_s))), float(np.max(np.abs(i - base_i))), s, i
            )
        )
    return out
