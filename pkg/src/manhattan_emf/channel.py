"""Path loss for the three power categories, Berg corner-diffraction distance,
and fading laws (samplers and characteristic functions)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


class Category(enum.Enum):
    LOS = "L"
    NLOS = "N"
    DIFFRACTION = "D"

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        v = str(value).upper()
        for c in cls:
            if v in (c.value, c.name):
                return c
        raise ValueError(f"unknown category {value!r}")


class FadingKind(enum.Enum):
    RICE = "rice"
    RAYLEIGH = "rayleigh"
    EXPONENTIAL = "exponential"
    CONSTANT = "constant"


@dataclass(frozen=True)
class FadingSpec:
    """Law of the squared fading gain |h|^2.

    Rice and Rayleigh are unit mean.  ``EXPONENTIAL`` has mean ``1/rate``.
    ``CONSTANT`` is the degenerate law |h|^2 = 1 (no fading).
    """

    kind: FadingKind = FadingKind.RAYLEIGH
    K: float = 0.0
    rate: float = 1.0

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("Rice K-factor must be non-negative")
        if not self.rate > 0:
            raise ValueError("exponential rate must be positive")

    @classmethod
    def rice(cls, K):
        return cls(FadingKind.RICE, K=float(K))

    @classmethod
    def rayleigh(cls):
        return cls(FadingKind.RAYLEIGH)

    @classmethod
    def exponential(cls, rate):
        return cls(FadingKind.EXPONENTIAL, rate=float(rate))

    @classmethod
    def constant(cls):
        return cls(FadingKind.CONSTANT)

    @property
    def mean(self):
        return 1.0 / self.rate if self.kind is FadingKind.EXPONENTIAL else 1.0

    def cf(self, t):
        return fading_cf(self, t)

    def sample(self, rng, size=None):
        return sample_fading_power(self, rng, size)

    def __str__(self):
        if self.kind is FadingKind.RICE:
            return f"rice:{self.K!r}"
        if self.kind is FadingKind.EXPONENTIAL:
            return f"exponential:{self.rate!r}"
        return self.kind.value

    @classmethod
    def parse(cls, text):
        kind, _, arg = str(text).strip().lower().partition(":")
        if kind == "rice":
            return cls.rice(float(arg))
        if kind == "exponential":
            return cls.exponential(float(arg))
        if kind in ("rayleigh", "constant"):
            return cls(FadingKind(kind))
        raise ValueError(f"unknown fading spec {text!r}")


def fading_cf(spec, t):
    """E[exp(j t |h|^2)].  Complex ``t`` needs ``Im(t) >= 0``."""
    t = np.asarray(t)
    if np.iscomplexobj(t) and np.any(t.imag < -1e-300):
        raise ValueError("fading CF diverges for Im(t) < 0")
    kind = spec.kind
    if kind is FadingKind.CONSTANT:
        out = np.exp(1j * t)
    elif kind is FadingKind.EXPONENTIAL:
        out = spec.rate / (spec.rate - 1j * t)
    else:
        K = spec.K if kind is FadingKind.RICE else 0.0
        d = K + 1.0 - 1j * t
        out = (K + 1.0) / d
        if K > 0:
            out = out * np.exp(1j * K * t / d)
    out = np.asarray(out, dtype=complex)
    return out if out.ndim else complex(out)


def sample_fading_power(spec, rng, size=None):
    """Draw squared gains; ``rng`` is a Generator or an integer seed."""
    if not isinstance(rng, np.random.Generator):
        from .geometry import make_rng

        rng = make_rng(rng)
    kind = spec.kind
    if kind is FadingKind.CONSTANT:
        return np.ones(size) if size is not None else 1.0
    if kind is FadingKind.EXPONENTIAL:
        return rng.exponential(1.0 / spec.rate, size)
    K = spec.K if kind is FadingKind.RICE else 0.0
    if K == 0.0:
        return rng.exponential(1.0, size)
    los = math.sqrt(K / (K + 1.0))
    sd = math.sqrt(0.5 / (K + 1.0))
    re = los + sd * rng.standard_normal(size)
    im = sd * rng.standard_normal(size)
    return re * re + im * im


@dataclass(frozen=True)
class PropagationParams:
    """Link-budget parameters.  Intercepts left as ``None`` default to (4 pi f / c)^2."""

    tx_power: float = 1.0
    frequency: float = 3.6e9
    alpha_L: float = 1.7
    alpha_N: float = 2.5
    alpha_D: float = 3.5
    kappa_L: float | None = None
    kappa_N: float | None = None
    kappa_D: float | None = None
    rice_K: float = 6.0
    q_lambda: float = 0.031
    nu: float = 1.0
    noise: float = 0.0
    bandwidth: float = 100e6
    # optional per-category fading overrides (default Rice(K), Rice(K), Rayleigh)
    fading_L: FadingSpec | None = field(default=None)
    fading_N: FadingSpec | None = field(default=None)
    fading_D: FadingSpec | None = field(default=None)

    def __post_init__(self):
        if self.tx_power < 0:
            raise ValueError("tx_power must be non-negative")
        if not self.frequency > 0:
            raise ValueError("frequency must be positive")
        for name in ("alpha_L", "alpha_N", "alpha_D"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("kappa_L", "kappa_N", "kappa_D"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive")
        if self.rice_K < 0 or self.q_lambda < 0 or self.noise < 0:
            raise ValueError("rice_K, q_lambda and noise must be non-negative")
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")

    @property
    def free_space_kappa(self):
        return (4.0 * math.pi * self.frequency / SPEED_OF_LIGHT) ** 2

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.frequency

    @property
    def k_f(self):
        return math.sqrt(self.q_lambda * self.frequency / SPEED_OF_LIGHT)

    def kappa(self, category):
        c = Category.coerce(category)
        v = getattr(self, "kappa_" + c.value)
        return self.free_space_kappa if v is None else v

    def alpha(self, category):
        return getattr(self, "alpha_" + Category.coerce(category).value)

    def fading(self, category):
        c = Category.coerce(category)
        v = getattr(self, "fading_" + c.value)
        if v is not None:
            return v
        if c is Category.DIFFRACTION:
            return FadingSpec.rayleigh()
        return FadingSpec.rice(self.rice_K)

    def replace(self, **changes):
        return replace(self, **changes)


def berg_distance(s1, s2, theta, params):
    """Berg recursive distance for one corner of angle ``theta``."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    if np.any(s1 <= 0) or np.any(s2 <= 0):
        raise ValueError("Berg distance legs must be positive")
    if np.any(np.asarray(theta) <= 0) or np.any(np.asarray(theta) > math.pi):
        raise ValueError("corner angle must lie in (0, pi]")
    bend = params.k_f * (np.asarray(theta) / (0.5 * math.pi)) ** params.nu
    out = s1 + s2 + bend * s1 * s2
    return out if np.ndim(out) else float(out)


def path_loss(category, geometry_arg, delta_h, params):
    """Deterministic gain kappa^-1 dist^-alpha (fading excluded).

    For LOS/NLOS ``geometry_arg`` is the horizontal distance and the 3-D
    distance uses ``delta_h``; for diffraction it is the Berg distance.
    """
    c = Category.coerce(category)
    x = np.asarray(geometry_arg, dtype=float)
    alpha = params.alpha(c)
    inv_kappa = 1.0 / params.kappa(c)
    if c is Category.DIFFRACTION:
        if np.any(x <= 0):
            raise ValueError("Berg distance must be positive")
        gain = inv_kappa * x ** (-alpha)
        if np.any(gain > 1.0):
            raise RuntimeError("diffraction gain exceeds 1; exclusion radius too small")
    else:
        if not delta_h > 1.0:
            raise ValueError("height difference must exceed 1 m")
        gain = inv_kappa * (x * x + delta_h * delta_h) ** (-0.5 * alpha)
    return gain if np.ndim(gain) else float(gain)
