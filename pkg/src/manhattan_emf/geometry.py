"""Manhattan Poisson line process: network configuration, scene sampling,
serving-distance and blockage laws."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np


class UserType(enum.IntEnum):
    """Typical-user location; the value is the number of typical streets."""

    STREET = 1
    CROSSROAD = 2

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            return cls[value.upper()]
        return cls(int(value))


@dataclass(frozen=True)
class NetworkConfig:
    """Geometry of the Manhattan network (lengths in metres, densities per metre).

    ``half_size`` may be ``math.inf`` for the analytic engine only.
    ``typical_bs_density`` overrides the BS density of the typical street(s).
    """

    half_size: float = math.inf
    street_density: float = 5e-3
    bs_density: float = 5e-3
    user_height: float = 1.5
    bs_height: float = 6.0
    exclusion_radius: float = 1.0
    crossroad_probability: float = 0.1
    typical_bs_density: float | None = None

    def __post_init__(self):
        if not self.half_size > 0:
            raise ValueError("half_size must be positive")
        if self.street_density < 0 or self.bs_density < 0:
            raise ValueError("densities must be non-negative")
        if self.typical_bs_density is not None and self.typical_bs_density < 0:
            raise ValueError("typical_bs_density must be non-negative")
        if not 0.0 <= self.crossroad_probability <= 1.0:
            raise ValueError("crossroad_probability must lie in [0, 1]")
        if not self.exclusion_radius > 0:
            raise ValueError("exclusion_radius must be positive")
        if not self.delta_h > 1.0:
            raise ValueError("bs_height - user_height must exceed 1 m")

    @property
    def delta_h(self):
        return self.bs_height - self.user_height

    @property
    def typical_density(self):
        if self.typical_bs_density is None:
            return self.bs_density
        return self.typical_bs_density

    @property
    def eta(self):
        return self.crossroad_probability

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class BlockageParams:
    """LOS probability ``exp(-beta r**gamma)`` for typical-street BSs."""

    beta: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")

    def los_probability(self, r):
        return los_probability(r, self)

    def nlos_probability(self, r):
        return 1.0 - los_probability(r, self)


def los_probability(r, blockage):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("distance must be non-negative")
    if blockage.beta == 0.0:
        out = np.ones_like(r)
    else:
        out = np.exp(-blockage.beta * r**blockage.gamma)
    return out if out.ndim else float(out)


def serving_distance_pdf(r, q, lambda_b, R=math.inf):
    """Density of the 1-D distance to the nearest BS on ``q`` typical streets.

    Each typical street carries BSs on both sides of the user, hence the
    nearest of ``2q`` independent half-line processes.
    """
    q = int(UserType.coerce(q))
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r >= R):
        raise ValueError("serving distance must lie in (0, R)")
    rate = 2.0 * q * lambda_b
    norm = 1.0 if math.isinf(R) else -math.expm1(-rate * R)
    out = rate * np.exp(-rate * r) / norm
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# scenes


def make_rng(seed, *keys):
    """Counter-based generator for the stream identified by ``(seed, *keys)``.

    Philox is keyed through a SeedSequence, so distinct keys give independent
    streams and the same keys reproduce the same stream on any worker.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


@dataclass
class Street:
    axis: str  # "h" (constant y) or "v" (constant x)
    coord: float
    bs: np.ndarray  # 1-D offsets along the street, metres
    typical: bool = False


@dataclass
class ManhattanScene:
    """One realisation of the network around a typical user at the origin."""

    half_size: float
    user_type: UserType
    streets: list = field(default_factory=list)

    @property
    def typical_streets(self):
        return [s for s in self.streets if s.typical]

    @property
    def horizontal_street_ordinates(self):
        return np.sort([s.coord for s in self.streets if s.axis == "h" and not s.typical])

    @property
    def vertical_street_abscissas(self):
        return np.sort([s.coord for s in self.streets if s.axis == "v" and not s.typical])

    @property
    def bs_positions(self):
        return [s.bs for s in self.streets]

    def perpendicular_streets(self):
        """Non-typical streets crossing a typical street (diffraction sources)."""
        axes = {"v" if s.axis == "h" else "h" for s in self.typical_streets}
        return [s for s in self.streets if not s.typical and s.axis in axes]

    def typical_distances(self):
        """1-D distances of all typical-street BSs to the user."""
        parts = [np.abs(s.bs) for s in self.typical_streets]
        return np.concatenate(parts) if parts else np.empty(0)

    def to_text(self):
        lines = [f"# manhattan-scene half_size={self.half_size!r} user_type={self.user_type.name}"]
        for s in self.streets:
            offsets = " ".join(repr(float(x)) for x in s.bs)
            lines.append(f"{s.axis} {float(s.coord)!r} {int(s.typical)} {offsets}".rstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = dict(kv.split("=") for kv in lines[0].lstrip("# ").split()[1:])
        scene = cls(float(head["half_size"]), UserType[head["user_type"]])
        for ln in lines[1:]:
            if ln.startswith("#"):
                continue
            parts = ln.split()
            bs = np.array([float(x) for x in parts[3:]])
            scene.streets.append(Street(parts[0], float(parts[1]), bs, bool(int(parts[2]))))
        return scene


def _uniform_ppp(rng, density, half_length):
    n = rng.poisson(2.0 * half_length * density) if density > 0 else 0
    return rng.uniform(-half_length, half_length, n)


def sample_scene(config, user_type, seed, street_extent=None, bs_extent=None):
    """Sample one MPLP realisation.

    ``street_extent`` limits non-typical streets to ``|coord| <= street_extent``
    and ``bs_extent`` limits BSs on non-typical streets to
    ``|offset| <= bs_extent``.  Both are exact restrictions of the Poisson
    processes (used to skip far, negligible contributors).
    """
    if math.isinf(config.half_size):
        raise ValueError("scene sampling needs a finite half_size")
    user_type = UserType.coerce(user_type)
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    R = config.half_size
    ext_s = R if street_extent is None else min(R, street_extent)
    ext_b = R if bs_extent is None else min(R, bs_extent)
    scene = ManhattanScene(R, user_type)
    scene.streets.append(Street("h", 0.0, _uniform_ppp(rng, config.typical_density, R), True))
    if user_type is UserType.CROSSROAD:
        scene.streets.append(Street("v", 0.0, _uniform_ppp(rng, config.typical_density, R), True))
    for axis in ("v", "h"):
        coords = _uniform_ppp(rng, config.street_density, ext_s)
        coords = np.sort(coords[np.abs(coords) > config.exclusion_radius])
        for c in coords:
            scene.streets.append(Street(axis, float(c), _uniform_ppp(rng, config.bs_density, ext_b)))
    return scene
