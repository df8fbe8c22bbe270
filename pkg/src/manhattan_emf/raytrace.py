"""Deterministic 2.5-D ray tracer for the Manhattan grid.

Streets are strips of width ``w_S``; everything outside the strips is a
building block, taller than every antenna, so horizontal visibility is a
2-D test against the union of strips.  Cars are axis-aligned boxes.

Paths carry at most two interactions, with diffraction (at the vertical
corners of street intersections) only as the last one, unless
``symmetric_diffraction`` is set, which also admits diffraction followed by a
reflection so that the path set is closed under reversal of the link.

Fields use the e^{-jkd} convention.  Reflections use Fresnel dyadics with
``e_par = e_perp x k``; diffraction uses Kouyoumjian-Pathak UTD coefficients
for a perfectly conducting right-angle wedge (n = 1.5).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special

from .channel import SPEED_OF_LIGHT
from .geometry import NetworkConfig, UserType, make_rng

log = logging.getLogger(__name__)

_TOL = 1e-6  # metres; strips are inflated by this much for visibility tests
_Z = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class RtSceneConfig:
    network: NetworkConfig = field(default_factory=lambda: NetworkConfig(half_size=2000.0))
    street_width: float = 35.0
    bs_wall_offset: float = 5.0
    obstacle_density: float = 20e-3
    obstacle_dimensions: tuple = (4.5, 1.8, 1.5)
    ground_permittivity: complex = 15 - 1.5j
    building_permittivity: complex = 5.3 - 0.42j
    n_lanes: int = 4
    polarization: tuple = (0.0, 0.0, 1.0)
    diffraction_cutoff: float = 300.0
    drop_relative_power: float = 1e-8
    symmetric_diffraction: bool = False
    grazing_clip: float = 1e-4

    def __post_init__(self):
        if not self.street_width > 2 * self.bs_wall_offset:
            raise ValueError("street width must exceed twice the BS wall offset")
        if self.bs_wall_offset <= 0 or self.obstacle_density < 0:
            raise ValueError("invalid offsets or densities")
        for eps in (self.ground_permittivity, self.building_permittivity):
            if complex(eps).imag > 0:
                raise ValueError("permittivity imaginary part must be non-positive")
        if self.n_lanes < 1:
            raise ValueError("need at least one lane")

    @property
    def sidewalk_offset(self):
        """Transverse offset of sidewalk antennas from the street axis."""
        return 0.5 * self.street_width - self.bs_wall_offset

    def lane_offsets(self):
        half_road = 0.5 * self.street_width - self.bs_wall_offset - 1.0
        edges = np.linspace(-half_road, half_road, self.n_lanes + 1)
        return 0.5 * (edges[1:] + edges[:-1])

    def replace(self, **changes):
        return replace(self, **changes)


# ---------------------------------------------------------------------------
# geometry primitives


@dataclass(frozen=True)
class Plane:
    normal: np.ndarray
    offset: float
    kind: str  # "wall" or "ground"
    eps: complex
    inward: np.ndarray | None = None  # for walls: unit vector pointing into the street

    def mirror(self, x):
        return x - 2.0 * (self.normal @ x - self.offset) * self.normal

    def side(self, x):
        return self.normal @ x - self.offset


@dataclass(frozen=True)
class Edge:
    """Vertical building corner.  ``ta`` and ``tb`` point along the two faces."""

    corner: np.ndarray  # (x, y)
    ta: np.ndarray
    tb: np.ndarray
    sigma: float  # +1 when the building lies counter-clockwise from ``ta``

    def angle(self, v):
        """Angle of horizontal vector ``v`` from face ``ta`` through free space."""
        cross = self.ta[0] * v[1] - self.ta[1] * v[0]
        ang = math.atan2(cross, self.ta @ v[:2])
        return (-self.sigma * ang) % (2.0 * math.pi)


@dataclass
class Interaction:
    point: np.ndarray
    kind: str  # "R" or "D"
    plane: Plane | None = None
    edge: Edge | None = None


@dataclass
class RayPath:
    source: np.ndarray
    target: np.ndarray
    interactions: list
    polarization: np.ndarray
    field: np.ndarray | None = None
    clipped: int = 0

    @property
    def points(self):
        return [self.source] + [i.point for i in self.interactions] + [self.target]

    @property
    def segment_lengths(self):
        pts = self.points
        return np.array([np.linalg.norm(b - a) for a, b in zip(pts[:-1], pts[1:])])

    @property
    def length(self):
        return float(self.segment_lengths.sum())

    @property
    def kinds(self):
        return "".join(i.kind for i in self.interactions) or "LOS"


# ---------------------------------------------------------------------------
# scene


@dataclass
class Scene3D:
    width: float
    h_streets: np.ndarray  # y of horizontal street axes
    v_streets: np.ndarray  # x of vertical street axes
    user: np.ndarray
    bs: np.ndarray  # (n, 3)
    bs_street: list  # (axis, coord) per BS
    cars_lo: np.ndarray  # (m, 3)
    cars_hi: np.ndarray
    ground_eps: complex
    building_eps: complex
    polarization: np.ndarray = field(default_factory=lambda: _Z.copy())
    symmetric: bool = False
    drop_relative_power: float = 1e-8
    grazing_clip: float = 1e-4
    typical: list = field(default_factory=list)  # (axis, coord) of the user's streets
    diffraction_cutoff: float = math.inf

    @property
    def half(self):
        return 0.5 * self.width

    @property
    def crossroad(self):
        return len(self.typical) > 1

    @property
    def user_type(self):
        return UserType.CROSSROAD if self.crossroad else UserType.STREET

    # -- free space ----------------------------------------------------

    def in_street(self, xy, shrink=0.0):
        h = self.half - shrink
        x, y = xy[0], xy[1]
        return bool(
            np.any(np.abs(self.h_streets - y) <= h) or np.any(np.abs(self.v_streets - x) <= h)
        )

    def streets_containing(self, xy):
        h = self.half + _TOL
        out = [("h", float(c)) for c in self.h_streets if abs(xy[1] - c) <= h]
        out += [("v", float(c)) for c in self.v_streets if abs(xy[0] - c) <= h]
        return out

    def _strip_intervals(self, p, q, centers, a):
        h = self.half + _TOL
        lo_b, hi_b = min(p[a], q[a]) - h, max(p[a], q[a]) + h
        c = centers[(centers >= lo_b) & (centers <= hi_b)]
        if c.size == 0:
            return np.empty(0), np.empty(0)
        d = q[a] - p[a]
        if abs(d) < 1e-12:
            inside = np.abs(p[a] - c) <= h
            return np.where(inside, 0.0, np.inf), np.where(inside, 1.0, -np.inf)
        t1 = (c - h - p[a]) / d
        t2 = (c + h - p[a]) / d
        return np.minimum(t1, t2), np.maximum(t1, t2)

    def clear_2d(self, p, q):
        """True when the horizontal projection of p->q stays inside the streets."""
        lo1, hi1 = self._strip_intervals(p, q, self.h_streets, 1)
        lo2, hi2 = self._strip_intervals(p, q, self.v_streets, 0)
        lo = np.concatenate([lo1, lo2])
        hi = np.concatenate([hi1, hi2])
        keep = (hi >= 0.0) & (lo <= 1.0) & (hi >= lo)
        lo, hi = lo[keep], hi[keep]
        if lo.size == 0:
            return False
        order = np.argsort(lo)
        lo, hi = lo[order], hi[order]
        eps = 1e-9
        if lo[0] > eps:
            return False
        reach = np.maximum.accumulate(hi)
        if np.any(lo[1:] > reach[:-1] + eps):
            return False
        return bool(reach[-1] >= 1.0 - eps)

    def clear_cars(self, p, q):
        if self.cars_lo.shape[0] == 0:
            return True
        bmin, bmax = np.minimum(p, q), np.maximum(p, q)
        sel = np.all(self.cars_hi >= bmin, axis=1) & np.all(self.cars_lo <= bmax, axis=1)
        if not np.any(sel):
            return True
        lo, hi = self.cars_lo[sel], self.cars_hi[sel]
        d = q - p
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (lo - p) / d
            t2 = (hi - p) / d
        tmin = np.where(d == 0, np.where((p >= lo) & (p <= hi), -np.inf, np.inf), np.minimum(t1, t2))
        tmax = np.where(d == 0, np.where((p >= lo) & (p <= hi), np.inf, -np.inf), np.maximum(t1, t2))
        enter = np.maximum(tmin.max(axis=1), 0.0)
        leave = np.minimum(tmax.min(axis=1), 1.0)
        return not np.any(leave - enter > 1e-9)

    def clear(self, p, q):
        return self.clear_2d(p, q) and self.clear_cars(p, q)

    def is_building(self, xy):
        return not self.in_street(xy, shrink=_TOL)

    # -- interaction candidates -------------------------------------------

    def wall_planes(self, street):
        axis, c = street
        h = self.half
        eps = self.building_eps
        if axis == "h":
            n = np.array([0.0, 1.0, 0.0])
            return [
                Plane(n, c + h, "wall", eps, -n),
                Plane(n, c - h, "wall", eps, n),
            ]
        n = np.array([1.0, 0.0, 0.0])
        return [Plane(n, c + h, "wall", eps, -n), Plane(n, c - h, "wall", eps, n)]

    def ground(self):
        return Plane(_Z.copy(), 0.0, "ground", self.ground_eps)

    def corners(self, s1, s2):
        """Building corners of the intersection of two perpendicular streets."""
        if s1[0] == s2[0]:
            return []
        xc = s1[1] if s1[0] == "v" else s2[1]
        yc = s1[1] if s1[0] == "h" else s2[1]
        h = self.half
        out = []
        for sx in (-1.0, 1.0):
            for sy in (-1.0, 1.0):
                c = np.array([xc + sx * h, yc + sy * h])
                if not self.is_building(c + 1e-3 * np.array([sx, sy])):
                    continue
                out.append(Edge(c, np.array([sx, 0.0]), np.array([0.0, sy]), sx * sy))
        return out

    def valid_reflection(self, q, plane):
        if plane.kind == "ground":
            return self.in_street(q) and abs(q[2]) < 1e-6
        if q[2] < 0:
            return False
        return self.is_building(q[:2] - 1e-3 * plane.inward[:2])


# ---------------------------------------------------------------------------
# scene construction


def build_rt_scene(scene, rt_config, seed):
    """Extrude a sampled network into the ray-tracing scene.

    BSs go on a randomly chosen sidewalk of their street; the user stands on
    the lower sidewalk of the horizontal typical street.  Cars are placed
    in the typical street(s) with Poisson longitudinal positions.
    """
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    cfg = rt_config
    net = cfg.network
    w = cfg.street_width
    off = cfg.sidewalk_offset
    h_streets = np.array(sorted(s.coord for s in scene.streets if s.axis == "h"))
    v_streets = np.array(sorted(s.coord for s in scene.streets if s.axis == "v"))
    user = np.array([0.0, -off, net.user_height])
    bs, bs_street = [], []
    for s in scene.streets:
        if s.bs.size == 0:
            continue
        side = np.where(rng.random(s.bs.size) < 0.5, -off, off)
        for along, t in zip(s.bs, side):
            if s.axis == "h":
                bs.append((along, s.coord + t, net.bs_height))
            else:
                bs.append((s.coord + t, along, net.bs_height))
            bs_street.append((s.axis, float(s.coord)))
    bs = np.array(bs, dtype=float).reshape(-1, 3)
    sc = Scene3D(
        w,
        h_streets,
        v_streets,
        user,
        bs,
        bs_street,
        np.empty((0, 3)),
        np.empty((0, 3)),
        complex(cfg.ground_permittivity),
        complex(cfg.building_permittivity),
        _unit(np.asarray(cfg.polarization, dtype=float)),
        cfg.symmetric_diffraction,
        cfg.drop_relative_power,
        cfg.grazing_clip,
        diffraction_cutoff=cfg.diffraction_cutoff,
    )
    sc.typical = sc.streets_containing(user)
    _place_cars(sc, cfg, rng, scene.half_size)
    return sc


def _place_cars(sc, cfg, rng, R):
    length, width, height = cfg.obstacle_dimensions
    lanes = cfg.lane_offsets()
    lo, hi = [], []
    for axis, c in sc.typical:
        n = rng.poisson(2.0 * R * cfg.obstacle_density) if cfg.obstacle_density > 0 else 0
        for _ in range(n):
            for _attempt in range(100):
                along = rng.uniform(-R, R)
                lane = c + lanes[rng.integers(lanes.size)]
                if axis == "h":
                    b_lo = np.array([along - length / 2, lane - width / 2, 0.0])
                    b_hi = np.array([along + length / 2, lane + width / 2, height])
                else:
                    b_lo = np.array([lane - width / 2, along - length / 2, 0.0])
                    b_hi = np.array([lane + width / 2, along + length / 2, height])
                if not _box_contains_xy(b_lo, b_hi, sc.user):
                    break
            lo.append(b_lo)
            hi.append(b_hi)
    if lo:
        sc.cars_lo = np.array(lo)
        sc.cars_hi = np.array(hi)


def _box_contains_xy(lo, hi, p, margin=0.5):
    return lo[0] - margin <= p[0] <= hi[0] + margin and lo[1] - margin <= p[1] <= hi[1] + margin


def free_space_scene(source, target, ground=True, ground_eps=15 - 1.5j, polarization=(0, 0, 1)):
    """Open scene (no buildings, no cars): for propagation oracles."""
    big = 1e7
    sc = Scene3D(
        2 * big,
        np.array([0.0]),
        np.empty(0),
        np.asarray(target, dtype=float),
        np.asarray(source, dtype=float).reshape(1, 3),
        [("h", 0.0)],
        np.empty((0, 3)),
        np.empty((0, 3)),
        complex(ground_eps),
        complex(1.0),
        _unit(np.asarray(polarization, dtype=float)),
    )
    sc.typical = [("h", 0.0)]
    sc._open = True
    sc._ground = ground
    return sc


# ---------------------------------------------------------------------------
# path enumeration


def _cross(a, b):
    return np.array(
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    )


def _unit(v):
    n = np.linalg.norm(v)
    return v / n


def _hit_plane(a, b, plane):
    """Intersection of segment a->b with ``plane`` (None if not crossing)."""
    da, db = plane.side(a), plane.side(b)
    if da * db >= 0 or da == db:
        return None
    t = da / (da - db)
    return a + t * (b - a)


def _edge_point(a, b, edge):
    """Diffraction point on a vertical edge for the unfolded pair a, b (Keller)."""
    c = edge.corner
    da = math.hypot(a[0] - c[0], a[1] - c[1])
    db = math.hypot(b[0] - c[0], b[1] - c[1])
    if da + db == 0:
        return None
    z = a[2] + (b[2] - a[2]) * da / (da + db)
    return np.array([c[0], c[1], z])


def _planes_for(sc, tx, rx):
    if getattr(sc, "_open", False):
        return [sc.ground()] if getattr(sc, "_ground", True) else []
    streets = []
    for s in sc.streets_containing(tx) + sc.streets_containing(rx):
        if s not in streets:
            streets.append(s)
    planes = [p for s in streets for p in sc.wall_planes(s)]
    uniq = []
    for p in planes:
        if not any(np.allclose(p.normal, u.normal) and abs(p.offset - u.offset) < 1e-9 for u in uniq):
            uniq.append(p)
    return uniq + [sc.ground()]


def _edges_for(sc, tx, rx):
    if getattr(sc, "_open", False):
        return []
    s_tx = sc.streets_containing(tx)
    s_rx = sc.streets_containing(rx)
    if set(s_tx) & set(s_rx):
        return []  # same street: no corner diffraction
    out = []
    for a in s_tx:
        for b in s_rx:
            out.extend(sc.corners(a, b))
    return out


def enumerate_paths(sc, bs_index=None, source=None, target=None):
    """Valid ray paths from a BS (or ``source``) to the user (or ``target``)."""
    tx = sc.bs[bs_index] if source is None else np.asarray(source, dtype=float)
    rx = sc.user if target is None else np.asarray(target, dtype=float)
    pol = sc.polarization
    paths = []

    def add(inters):
        paths.append(RayPath(tx, rx, inters, pol))

    if sc.clear(tx, rx):
        add([])
    planes = _planes_for(sc, tx, rx)
    # single reflections
    for p in planes:
        img = p.mirror(tx)
        q = _hit_plane(img, rx, p)
        if q is None or not sc.valid_reflection(q, p):
            continue
        if sc.clear(tx, q) and sc.clear(q, rx):
            add([Interaction(q, "R", plane=p)])
    # double reflections
    for p1 in planes:
        img1 = p1.mirror(tx)
        for p2 in planes:
            if p2 is p1:
                continue
            img2 = p2.mirror(img1)
            q2 = _hit_plane(img2, rx, p2)
            if q2 is None or not sc.valid_reflection(q2, p2):
                continue
            q1 = _hit_plane(img1, q2, p1)
            if q1 is None or not sc.valid_reflection(q1, p1):
                continue
            if sc.clear(tx, q1) and sc.clear(q1, q2) and sc.clear(q2, rx):
                add([Interaction(q1, "R", plane=p1), Interaction(q2, "R", plane=p2)])
    edges = _edges_for(sc, tx, rx)
    for e in edges:
        s = _edge_point(tx, rx, e)
        if s is not None and sc.clear(tx, s) and sc.clear(s, rx):
            add([Interaction(s, "D", edge=e)])
        for p in planes:
            # reflection then diffraction
            img = p.mirror(tx)
            s = _edge_point(img, rx, e)
            if s is not None:
                q = _hit_plane(img, s, p)
                if (
                    q is not None
                    and sc.valid_reflection(q, p)
                    and sc.clear(tx, q)
                    and sc.clear(q, s)
                    and sc.clear(s, rx)
                ):
                    add([Interaction(q, "R", plane=p), Interaction(s, "D", edge=e)])
            if sc.symmetric:
                # diffraction then reflection
                img = p.mirror(rx)
                s = _edge_point(tx, img, e)
                if s is None:
                    continue
                q = _hit_plane(s, img, p)
                if (
                    q is not None
                    and sc.valid_reflection(q, p)
                    and sc.clear(tx, s)
                    and sc.clear(s, q)
                    and sc.clear(q, rx)
                ):
                    add([Interaction(s, "D", edge=e), Interaction(q, "R", plane=p)])
    return paths


# ---------------------------------------------------------------------------
# field computation


def _tx_polarization(pol, k_dir):
    v = pol - (pol @ k_dir) * k_dir
    n = np.linalg.norm(v)
    if n < 1e-12:
        # polarisation along the ray: fall back to any transverse direction
        v = _cross(k_dir, [1.0, 0.0, 0.0])
        n = np.linalg.norm(v)
    return v / n


def fresnel_coefficients(cos_i, eps):
    """(R_perp, R_par) for incidence cosine ``cos_i`` on a half-space ``eps``."""
    sin2 = 1.0 - cos_i * cos_i
    root = np.sqrt(complex(eps) - sin2)
    r_perp = (cos_i - root) / (cos_i + root)
    r_par = (eps * cos_i - root) / (eps * cos_i + root)
    return r_perp, r_par


def _reflection_dyadic(k_in, k_out, normal, eps, clip):
    n = normal if normal @ k_in < 0 else -normal
    cos_i = float(-(k_in @ n))
    clipped = 0
    if cos_i < clip:
        cos_i = clip
        clipped = 1
    perp = _cross(k_in, n)
    nrm = np.linalg.norm(perp)
    if nrm < 1e-12:
        # normal incidence: any tangent direction
        perp = _cross(n, [1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else _cross(n, [0.0, 1.0, 0.0])
        nrm = np.linalg.norm(perp)
    perp = perp / nrm
    par_in = _cross(perp, k_in)
    par_out = _cross(perp, k_out)
    r_perp, r_par = fresnel_coefficients(cos_i, eps)
    M = r_perp * np.outer(perp, perp) + r_par * np.outer(par_out, par_in)
    return M, clipped


def transition_function(X):
    """Kouyoumjian-Pathak transition function F(X), X >= 0."""
    X = np.asarray(X, dtype=float)
    out = np.empty(X.shape, dtype=complex)
    big = X > 1e4
    small = ~big
    if np.any(small):
        x = X[small]
        u = np.sqrt(x) * math.sqrt(2.0 / math.pi)
        S, C = special.fresnel(u)
        tail = math.sqrt(math.pi / 2.0) * ((0.5 - C) - 1j * (0.5 - S))
        out[small] = 2j * np.sqrt(x) * np.exp(1j * x) * tail
    if np.any(big):
        x = X[big]
        out[big] = 1.0 + 1j / (2 * x) - 3.0 / (4 * x * x) - 15j / (8 * x**3)
    return out if out.ndim else complex(out)


def _cot_F(sign, beta, n, kL):
    """cot((pi + sign*beta)/2n) F(kL a^sign(beta)), with its shadow-boundary limit."""
    N = round((beta + sign * math.pi) / (2 * math.pi * n))
    eps = math.pi + sign * beta - 2 * math.pi * n * N
    if abs(eps) < 1e-6:
        return n * (
            math.sqrt(2 * math.pi * kL) * math.copysign(1.0, eps) - 2 * kL * eps * np.exp(0.25j * math.pi)
        ) * np.exp(0.25j * math.pi)
    a = 2.0 * math.cos((2 * math.pi * n * N - beta) / 2.0) ** 2
    return (1.0 / math.tan((math.pi + sign * beta) / (2 * n))) * transition_function(kL * a)


def utd_coefficients(phi, phi_p, beta0, L, k, n=1.5):
    """Soft and hard UTD diffraction coefficients of a perfectly conducting wedge."""
    pref = -np.exp(-0.25j * math.pi) / (2 * n * math.sqrt(2 * math.pi * k) * math.sin(beta0))
    kL = k * L
    dm = phi - phi_p
    dp = phi + phi_p
    t_i = _cot_F(+1, dm, n, kL) + _cot_F(-1, dm, n, kL)
    t_r = _cot_F(+1, dp, n, kL) + _cot_F(-1, dp, n, kL)
    return pref * (t_i - t_r), pref * (t_i + t_r)


def _diffraction_dyadic(k_in, k_out, prev, nxt, edge, s_in, s_out, k):
    e = _Z
    phi_p = edge.angle(prev[:2] - edge.corner)
    phi = edge.angle(nxt[:2] - edge.corner)
    sin_b = math.sqrt(max(1.0 - float(k_in @ e) ** 2, 1e-24))
    beta0 = math.asin(min(1.0, sin_b))  # only sin(beta0) enters
    L = s_in * s_out / (s_in + s_out) * sin_b * sin_b
    Ds, Dh = utd_coefficients(phi, phi_p, beta0, L, k)
    phi_hat_in = -_cross(e, k_in)
    phi_hat_in /= np.linalg.norm(phi_hat_in)
    beta_hat_in = _cross(k_in, phi_hat_in)
    phi_hat = _cross(e, k_out)
    phi_hat /= np.linalg.norm(phi_hat)
    beta_hat = _cross(k_out, phi_hat)
    M = -Ds * np.outer(beta_hat, beta_hat_in) - Dh * np.outer(phi_hat, phi_hat_in)
    return M


def _transfer(path, k):
    """Propagation dyadic (3x3), scalar amplitude and total length of a path."""
    pts = path.points
    seg = [b - a for a, b in zip(pts[:-1], pts[1:])]
    lens = [float(np.linalg.norm(s)) for s in seg]
    dirs = [s / ln for s, ln in zip(seg, lens)]
    total = sum(lens)
    M = np.eye(3, dtype=complex)
    clipped = 0
    diff_at = None
    for i, inter in enumerate(path.interactions):
        k_in, k_out = dirs[i], dirs[i + 1]
        if inter.kind == "R":
            Ri, c = _reflection_dyadic(k_in, k_out, inter.plane.normal, inter.plane.eps, path_clip(path))
            clipped += c
            M = Ri @ M
        else:
            s_in = sum(lens[: i + 1])
            s_out = total - s_in
            Di = _diffraction_dyadic(k_in, k_out, pts[i], pts[i + 2], inter.edge, s_in, s_out, k)
            M = Di @ M
            diff_at = (s_in, s_out)
    if diff_at is None:
        amp = 1.0 / total
    else:
        s_in, s_out = diff_at
        amp = 1.0 / math.sqrt(s_in * s_out * (s_in + s_out))
    return M, amp, total, dirs[0], dirs[-1], clipped


def path_clip(path):
    return getattr(path, "_clip", 1e-4)


def field_contribution(path, params):
    """Complex field vector at the target for a unit normalised source."""
    k = 2 * math.pi * params.frequency / SPEED_OF_LIGHT
    M, amp, total, d0, _, clipped = _transfer(path, k)
    e0 = _tx_polarization(path.polarization, d0)
    path.field = (M @ e0) * amp * np.exp(-1j * k * total)
    path.clipped = clipped
    return path.field


def path_voltage(path, params):
    """Polarisation-matched received amplitude of one path."""
    if path.field is None:
        field_contribution(path, params)
    pts = path.points
    arrival = _unit(pts[-1] - pts[-2])
    e_rx = _tx_polarization(path.polarization, -arrival)
    return complex(e_rx @ path.field)


def received_power_rt(paths, params, drop_relative_power=1e-8):
    """P_B (c / 4 pi f)^2 |sum of polarisation-matched path amplitudes|^2."""
    if not paths:
        return 0.0
    v = np.array([path_voltage(p, params) for p in paths])
    pw = np.abs(v) ** 2
    keep = pw >= drop_relative_power * pw.max()
    scale = params.tx_power * (SPEED_OF_LIGHT / (4 * math.pi * params.frequency)) ** 2
    return float(scale * abs(v[keep].sum()) ** 2)


def link_power(sc, params, bs_index=None, source=None, target=None):
    paths = enumerate_paths(sc, bs_index, source, target)
    for p in paths:
        p._clip = sc.grazing_clip
    return received_power_rt(paths, params, sc.drop_relative_power), paths


# ---------------------------------------------------------------------------
# link records


def link_records(sc, params, realization=0):
    """Per-BS records at the user: category, 1-D distance, LOS flag, power."""
    out = []
    typical = set(sc.typical)
    for i in range(sc.bs.shape[0]):
        street = sc.bs_street[i]
        b = sc.bs[i]
        if street in typical:
            category = None
            dist = abs(b[0] - sc.user[0]) if street[0] == "h" else abs(b[1] - sc.user[1])
        else:
            crosses = [t for t in typical if t[0] != street[0]]
            if not crosses:
                continue  # parallel street: no path with one final corner diffraction
            c = crosses[0][1]
            along = abs(b[1] - c) if street[0] == "v" else abs(b[0] - c)
            if along > sc.diffraction_cutoff:
                continue
            category = "D"
            dist = along
        los = sc.clear(b, sc.user)
        power, paths = link_power(sc, params, i)
        if category is None:
            category = "L" if los else "N"
        out.append(
            {
                "realization": realization,
                "bs": i,
                "category": category,
                "distance": float(dist),
                "los": bool(los),
                "power": power,
                "paths": len(paths),
                "user_type": int(sc.user_type),
            }
        )
    return out


def simulate_rt_realization(rt_config, params, seed_base, index):
    from .geometry import sample_scene

    rng = make_rng(seed_base, index)
    scene = sample_scene(rt_config.network, UserType.STREET, rng)
    sc = build_rt_scene(scene, rt_config, rng)
    return link_records(sc, params, index), sc.crossroad


def _rt_chunk(args):
    rt_config, params, seed_base, start, stop = args
    recs, flags = [], []
    for i in range(start, stop):
        r, c = simulate_rt_realization(rt_config, params, seed_base, i)
        recs.extend(r)
        flags.append(c)
    return recs, flags


def simulate_rt(n, rt_config, params, seed_base, workers=None):
    """Link records over ``n`` realisations plus per-realisation crossroad flags."""
    from concurrent.futures import ProcessPoolExecutor

    from .montecarlo import worker_count

    workers = worker_count(workers)
    chunk = max(1, min(50, -(-n // (4 * workers))))
    tasks = [(rt_config, params, int(seed_base), s, min(n, s + chunk)) for s in range(0, n, chunk)]
    if workers == 1 or len(tasks) == 1:
        parts = [_rt_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_rt_chunk, tasks))
    recs, flags = [], []
    for r, f in parts:
        recs.extend(r)
        flags.extend(f)
    return records_to_columns(recs), np.array(flags, dtype=bool)


RT_FIELDS = ("realization", "bs", "category", "distance", "los", "power", "paths", "user_type")


def records_to_columns(recs):
    cols = {k: [r[k] for r in recs] for k in RT_FIELDS}
    out = {
        "realization": np.array(cols["realization"], dtype=int),
        "bs": np.array(cols["bs"], dtype=int),
        "category": np.array(cols["category"], dtype="<U1"),
        "distance": np.array(cols["distance"], dtype=float),
        "los": np.array(cols["los"], dtype=bool),
        "power": np.array(cols["power"], dtype=float),
        "paths": np.array(cols["paths"], dtype=int),
        "user_type": np.array(cols["user_type"], dtype=int),
    }
    return out


def realization_metrics(cols, n, noise=0.0):
    """Per-realisation serving power, interference and exposure from link records.

    The serving BS is the nearest (1-D) typical-street BS.
    """
    S = np.zeros(n)
    I = np.zeros(n)
    r = cols["realization"]
    typical = cols["category"] != "D"
    for i in range(n):
        m = r == i
        if not np.any(m):
            continue
        pw = cols["power"][m]
        t = typical[m]
        if np.any(t):
            idx = np.nonzero(t)[0]
            j = idx[np.argmin(cols["distance"][m][idx])]
            S[i] = pw[j]
            I[i] = pw.sum() - pw[j]
        else:
            I[i] = pw.sum()
    exposure = S + I
    with np.errstate(divide="ignore"):
        sinr = np.where(I + noise > 0, S / (I + noise), np.inf)
    return {"S": S, "I": I, "exposure": exposure, "sinr": sinr}
