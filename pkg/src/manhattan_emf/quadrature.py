"""Numerical integration machinery shared by the analytic engine.

Three tools live here:

* :class:`PanelGrid` -- composite Chebyshev interpolation on a fixed set of
  panels.  Gives definite integrals *and* running tail integrals
  ``int_x^end f`` at every node (or at arbitrary points) from one set of
  samples, which is what the nested Poisson-functional integrals need.
* :func:`adaptive_gk` -- vectorised adaptive Gauss-Kronrod (G7/K15) on a list
  of breakpoints, for vector-valued integrands.
* :func:`gil_pelaez_cdf` -- CDF from a characteristic function.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy import integrate

log = logging.getLogger(__name__)


class NumericalFailure(RuntimeError):
    """Quadrature did not reach the requested tolerance."""

    def __init__(self, message, error_estimate=float("nan")):
        super().__init__(f"{message} (error estimate {error_estimate:.3g})")
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budgets for the analytic engine.

    ``truncation_T`` caps the Gil-Pelaez integration variable in scaled units
    (the integrand is scaled so that unit argument corresponds to the natural
    power scale of the problem).  The effective upper limit is found from the
    envelope decay and is never larger than this cap.
    """

    relative_tolerance: float = 1e-6
    absolute_tolerance: float = 1e-9
    truncation_T: float = 2.0**40
    panel_budget: int = 2000
    inner_tolerance: float = 1e-10
    inner_order: int = 16
    inner_ratio: float = 2.0

    def __post_init__(self):
        if not (self.relative_tolerance > 0 and self.absolute_tolerance > 0):
            raise ValueError("tolerances must be positive")
        if not self.truncation_T > 0:
            raise ValueError("truncation_T must be positive")
        if not self.inner_tolerance > 0:
            raise ValueError("inner_tolerance must be positive")
        if self.panel_budget < 1 or self.inner_order < 4 or self.inner_ratio <= 1:
            raise ValueError("invalid panel settings")


# ---------------------------------------------------------------------------
# Chebyshev panels


def _reference_matrices(n):
    x = np.sort(np.cos(np.pi * (2 * np.arange(n) + 1) / (2 * n)))
    V = C.chebvander(x, n - 1)
    Vinv = np.linalg.inv(V)
    # A maps interpolant coefficients to antiderivative coefficients (F(-1) = 0)
    A = np.zeros((n + 1, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        A[:, k] = C.chebint(e, lbnd=-1)
    M = A @ Vinv
    T_one = C.chebvander(np.array([1.0]), n)[0]
    T_nodes = C.chebvander(x, n)
    tail = (T_one[None, :] - T_nodes) @ M  # int_{x_i}^{1}
    weights = T_one @ M  # int_{-1}^{1}
    return x, tail, weights, M, T_one


class PanelGrid:
    """Composite Chebyshev rule on panels ``edges[i] .. edges[i+1]``.

    Sample values are laid out as ``(..., n_panels * order)`` in node order.
    """

    _cache: dict = {}

    def __init__(self, edges, order=16):
        edges = np.asarray(edges, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("panel edges must be strictly increasing")
        if order not in self._cache:
            self._cache[order] = _reference_matrices(order)
        x, self._tail, w, self._M, self._T_one = self._cache[order]
        self.order = order
        self.edges = edges
        self.n_panels = edges.size - 1
        self.half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        self.nodes = (mid[:, None] + self.half[:, None] * x[None, :]).ravel()
        self.weights = (self.half[:, None] * w[None, :]).ravel()

    @property
    def start(self):
        return self.edges[0]

    @property
    def end(self):
        return self.edges[-1]

    def integral(self, values):
        return np.asarray(values) @ self.weights

    def _panel_view(self, values):
        values = np.asarray(values)
        return values.reshape(values.shape[:-1] + (self.n_panels, self.order))

    def _suffix(self, panel_totals):
        # sum over panels strictly to the right of each panel
        rev = np.cumsum(panel_totals[..., ::-1], axis=-1)[..., ::-1]
        return rev - panel_totals

    def tail(self, values):
        """``int_{node}^{end} f`` at every node."""
        v = self._panel_view(values)
        within = np.einsum("...pj,ij->...pi", v, self._tail) * self.half[:, None]
        panel_totals = (v @ self._weights_ref()) * self.half
        out = within + self._suffix(panel_totals)[..., None]
        return out.reshape(np.asarray(values).shape)

    def _weights_ref(self):
        return self._T_one @ self._M

    def tail_evaluator(self, points):
        """Precompute the map ``values -> int_{point}^{end} f`` for fixed points."""
        return _TailEvaluator(self, np.asarray(points, dtype=float))


class _TailEvaluator:
    def __init__(self, grid, points):
        if np.any(points < grid.start - 1e-9 * abs(grid.start)) or np.any(
            points > grid.end * (1 + 1e-12)
        ):
            raise ValueError("tail points outside the panel grid")
        p = np.clip(np.searchsorted(grid.edges, points, side="right") - 1, 0, grid.n_panels - 1)
        xi = np.clip((points - (grid.edges[p] + grid.half[p])) / grid.half[p], -1.0, 1.0)
        T = C.chebvander(xi, grid.order)
        self.rows = (grid._T_one[None, :] - T) @ grid._M  # (m, n)
        self.panel = p
        self.grid = grid

    def __call__(self, values):
        g = self.grid
        v = g._panel_view(values)
        panel_totals = (v @ g._weights_ref()) * g.half
        suffix = g._suffix(panel_totals)
        local = np.einsum("...mj,mj->...m", v[..., self.panel, :], self.rows)
        return local * g.half[self.panel] + suffix[..., self.panel]


def geometric_edges(start, stop, first, ratio, anchors=()):
    """Panel edges from ``start`` to ``stop``: one panel of width ``first``
    then geometric growth by ``ratio``; ``anchors`` are forced to be edges."""
    if not stop > start:
        raise ValueError("stop must exceed start")
    edges = [start]
    x = start + first
    w = first
    while x < stop:
        edges.append(x)
        w *= ratio
        x += w
    edges.append(stop)
    edges = np.unique(np.concatenate([edges, [a for a in anchors if start < a < stop]]))
    # drop slivers created by anchors
    keep = np.concatenate([[True], np.diff(edges) > 1e-9 * np.maximum(1.0, edges[1:])])
    return edges[keep]


# ---------------------------------------------------------------------------
# adaptive Gauss-Kronrod

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_X15 = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_W15 = np.concatenate([_WGK[:-1], _WGK[::-1]])
_W7 = np.zeros(15)
_W7[1:7:2] = _WG[:3]
_W7[7] = _WG[3]
_W7[9:15:2] = _WG[2::-1]


def adaptive_gk(f, breakpoints, abs_tol=1e-9, rel_tol=1e-6, budget=2000):
    """Integrate a vector-valued ``f`` over ``[breakpoints[0], breakpoints[-1]]``.

    ``f`` takes a 1-D array of abscissae and returns an array whose last axis
    matches it.  Returns ``(integral, error_estimate)``; error is the max over
    components.  Raises :class:`NumericalFailure` when the panel budget runs out.
    """
    a = np.asarray(breakpoints[:-1], dtype=float)
    b = np.asarray(breakpoints[1:], dtype=float)
    done_val = 0.0
    done_err = 0.0
    n_panels = a.size
    while True:
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        x = (mid[:, None] + half[:, None] * _X15[None, :]).ravel()
        y = np.asarray(f(x))
        y = y.reshape(y.shape[:-1] + (a.size, 15))
        k = (y @ _W15) * half
        g = (y @ _W7) * half
        err = np.abs(k - g)
        if err.ndim > 1:
            err = err.reshape(-1, a.size).max(axis=0)
        total = done_val + k.sum(axis=-1)
        total_err = done_err + err.sum()
        tol = max(abs_tol, rel_tol * float(np.max(np.abs(total))))
        if total_err <= tol:
            return total, total_err
        # accept panels whose error is small relative to their share
        share = tol * 0.5 / max(n_panels, 1)
        order = np.argsort(err)
        cum = np.cumsum(err[order])
        accept = np.zeros(a.size, dtype=bool)
        accept[order[cum + done_err <= 0.5 * tol]] = True
        accept |= err <= share * 1e-3
        if n_panels + int((~accept).sum()) > budget:
            raise NumericalFailure("adaptive quadrature exceeded panel budget", total_err)
        done_val = done_val + k[..., accept].sum(axis=-1)
        done_err = done_err + err[accept].sum()
        ra, rb = a[~accept], b[~accept]
        rm = 0.5 * (ra + rb)
        a = np.concatenate([ra, rm])
        b = np.concatenate([rm, rb])
        n_panels += ra.size


# ---------------------------------------------------------------------------
# Gil-Pelaez


@dataclass
class InversionReport:
    value: np.ndarray
    error_estimate: float
    truncation: float
    tail_bound: float


def _truncation_point(envelope, tol, cap):
    """First power of two where ``envelope(tau)`` falls below ``tol``."""
    tau = 1.0
    grid = 2.0 ** np.arange(-4, 1 + int(math.log2(cap)))
    env = np.asarray(envelope(grid))
    below = np.nonzero(env < tol)[0]
    # require the envelope to stay below for the remaining probes
    for i in below:
        if np.all(env[i:] < tol):
            return float(grid[i]), float(env[i])
    tau = float(grid[-1])
    return tau, float(env[-1])


def gil_pelaez_cdf(cf, threshold, quad=None, scale=1.0, report=False, max_cycles=256):
    """``P[X <= threshold]`` from the characteristic function ``cf``.

    ``cf`` must accept a 1-D float array.  ``scale`` is a typical magnitude of
    X; the integration runs in ``tau = t * scale``.  ``threshold`` may be an
    array, in which case the CF samples are shared across thresholds.
    """
    quad = quad or QuadratureSpec()
    theta = np.atleast_1d(np.asarray(threshold, dtype=float)) / scale

    def phi(tau):
        return np.asarray(cf(np.asarray(tau) / scale), dtype=complex)

    T, env_T = _truncation_point(
        lambda tau: np.abs(phi(tau)) / tau, quad.absolute_tolerance, quad.truncation_T
    )
    T_env = T
    wmax = float(np.max(np.abs(theta)))
    if wmax * T > 2 * np.pi * max_cycles:
        # too many oscillations before the envelope decays: Fourier tail takes over
        T = 2 * np.pi * max_cycles / wmax
        env_T = float(np.abs(phi(np.array([T])))[0] / T)

    def integrand(tau):
        return np.imag(np.exp(-1j * np.outer(theta, tau)) * phi(tau)[None, :]) / tau[None, :]

    bps = _gp_breakpoints(T, theta)
    val, err = adaptive_gk(
        integrand, bps, quad.absolute_tolerance, quad.relative_tolerance, quad.panel_budget
    )
    # the dropped tail int_T^inf is at most env_T * T without oscillation and
    # about env_T / |theta| once exp(-j tau theta) oscillates
    with np.errstate(divide="ignore"):
        bounds = env_T * np.minimum(T, 2.0 / np.abs(theta))
    need = bounds >= quad.relative_tolerance
    if env_T >= quad.absolute_tolerance:
        need[:] = True
    if need.any():
        slow = need & (np.abs(theta) * T_env <= 1.0)
        if slow.any():
            val[slow] += _slow_tail(phi, T, theta[slow], quad)
        for i in np.nonzero(need & ~slow)[0]:
            val[i] += _fourier_tail(phi, T, theta[i], quad)
    tail_bound = float(np.max(bounds[~need], initial=0.0))
    log.debug("gil-pelaez: T=%.3g err=%.2g tail<=%.2g", T, err, tail_bound)
    p = np.clip(0.5 - val / np.pi, 0.0, 1.0)
    out = p if np.ndim(threshold) else p[0]
    if report:
        return InversionReport(out, err / np.pi, T / scale, tail_bound / np.pi)
    return out


def _gp_breakpoints(T, theta):
    # geometric near the origin, plus a cap on the panel width relative to the
    # fastest oscillation of exp(-j tau theta)
    edges = [0.0] + list(2.0 ** np.arange(-6, 1 + int(math.log2(T))))
    edges = np.array(sorted(set(e for e in edges if e <= T) | {T}))
    wmax = np.max(np.abs(theta)) if np.size(theta) else 0.0
    if wmax > 0:
        step = 2 * np.pi / wmax
        extra = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            n = int((hi - lo) / step)
            if n > 1:
                extra.extend(np.linspace(lo, hi, n + 1)[1:-1])
        edges = np.sort(np.concatenate([edges, extra]))
    return edges


def _slow_tail(phi, T, theta, quad):
    """``int_T^inf Im[exp(-j tau theta) phi(tau)] / tau`` when ``exp(-j tau theta)``
    barely turns before ``|phi|`` has decayed.

    With ``tau = T / u`` the integrand is smooth while ``tau |theta|`` stays
    below a few cycles; past ``8 pi / |theta|`` the rest is a plain Fourier
    tail.  At ``theta = 0`` the geometric panels run down to ``2**-40``.
    """
    out = np.empty(theta.size)
    for i, th in enumerate(theta):
        tau1 = 8 * np.pi / abs(th) if th != 0.0 else math.inf
        lo = T / tau1
        top = 2.0 ** np.arange(-40, 1)
        bps = np.concatenate([[lo], top[top > lo]])

        def f(u, th=th):
            tau = T / u
            return np.imag(np.exp(-1j * th * tau) * phi(tau)) / u

        v, _ = adaptive_gk(f, bps, quad.absolute_tolerance, quad.relative_tolerance, quad.panel_budget)
        if math.isfinite(tau1):
            v += _fourier_tail(phi, tau1, th, quad)
        out[i] = v
    return out


def _fourier_tail(phi, T, theta, quad):
    """``int_T^inf Im[exp(-j tau theta) phi(tau)] / tau`` via QUADPACK QAWF."""

    def re(tau):
        return float(np.real(phi(np.array([tau]))[0])) / tau

    def im(tau):
        return float(np.imag(phi(np.array([tau]))[0])) / tau

    if theta == 0.0:
        v, _ = integrate.quad(im, T, np.inf, epsabs=quad.absolute_tolerance, limit=200)
        return v
    w = abs(theta)
    sgn = math.copysign(1.0, theta)
    # Im[e^{-j w s tau} (a + j b)] = b cos(w tau) - s a sin(w tau)
    c, _ = integrate.quad(im, T, np.inf, weight="cos", wvar=w, epsabs=quad.absolute_tolerance)
    s, _ = integrate.quad(re, T, np.inf, weight="sin", wvar=w, epsabs=quad.absolute_tolerance)
    return c - sgn * s
