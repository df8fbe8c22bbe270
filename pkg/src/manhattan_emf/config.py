"""Experiment configuration: INI files with units in the key names.

Every physical quantity carries its unit in the key (``bs_density_per_km``,
``frequency_ghz``...).  ``resolve`` validates a parsed file against the
schema below and builds the engine objects; the resolved snapshot is what
gets embedded in result files, and a JSON result can be fed back as a
configuration.
"""

from __future__ import annotations

import configparser
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import FadingSpec, PropagationParams
from .geometry import BlockageParams, NetworkConfig
from .io import dbm_to_watts, from_db
from .quadrature import QuadratureSpec
from .raytrace import RtSceneConfig

ENGINES = ("analytic", "montecarlo", "raytrace", "fit", "compare", "sensitivity", "optimize")
REQUIRED = object()


class ConfigError(ValueError):
    """Schema violation; the message names the section, key and line."""


def _grid(text):
    """``start:stop:n`` (inclusive, linear) or a comma-separated list."""
    text = text.strip()
    if not text:
        return np.empty(0)
    if ":" in text:
        a, b, n = text.split(":")
        return np.linspace(float(a), float(b), int(n))
    return np.array([float(x) for x in text.split(",")])


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text):
    t = text.strip().lower()
    return None if t in ("", "none") else float(t)


def _str(text):
    return text.strip()


# section -> key -> (parser, default)
SCHEMA = {
    "experiment": {
        "engine": (_str, "analytic"),
        "user": (_str, "arbitrary"),
        "metrics": (_str, "coverage,exposure"),
        "theta_c_db": (_grid, "-10:30:21"),
        "theta_e_dbm": (_grid, "-60:-20:21"),
        "theta_p_dbm": (_grid, "-90:-30:25"),
        "realizations": (int, "10000"),
        "seed": (int, "12345"),
        "workers": (_opt_float, "none"),
        "strict_tolerance": (float, "0.01"),
        "records": (_str, ""),
    },
    "network": {
        "half_size_km": (float, "inf"),
        "mc_half_size_km": (float, "128"),
        "street_density_per_km": (float, REQUIRED),
        "bs_density_per_km": (float, REQUIRED),
        "typical_bs_density_per_km": (_opt_float, "none"),
        "user_height_m": (float, "1.5"),
        "bs_height_m": (float, "6"),
        "exclusion_radius_m": (float, "1"),
        "crossroad_probability": (float, "0.1"),
    },
    "propagation": {
        "tx_power_w": (float, "1"),
        "frequency_ghz": (float, "3.6"),
        "alpha_l": (float, "1.7"),
        "alpha_n": (float, "2.5"),
        "alpha_d": (float, "3.5"),
        "kappa_l_db": (_opt_float, "none"),
        "kappa_n_db": (_opt_float, "none"),
        "kappa_d_db": (_opt_float, "none"),
        "rice_k": (float, "6"),
        "q_lambda": (float, "0.031"),
        "nu": (float, "1"),
        "noise_dbm": (float, "-inf"),
        "bandwidth_mhz": (float, "100"),
        "fading_l": (_str, ""),
        "fading_n": (_str, ""),
        "fading_d": (_str, ""),
    },
    "blockage": {
        "beta": (float, "0"),
        "gamma": (float, "1"),
    },
    "raytrace": {
        "half_size_km": (float, "2"),
        "street_width_m": (float, "35"),
        "bs_wall_offset_m": (float, "5"),
        "obstacle_density_per_km": (float, "20"),
        "obstacle_length_m": (float, "4.5"),
        "obstacle_width_m": (float, "1.8"),
        "obstacle_height_m": (float, "1.5"),
        "ground_permittivity": (complex, "15-1.5j"),
        "building_permittivity": (complex, "5.3-0.42j"),
        "polarization": (_str, "vertical"),
        "diffraction_cutoff_m": (float, "300"),
        "symmetric_diffraction": (_bool, "false"),
        "drop_relative_power": (float, "1e-8"),
    },
    "fit": {
        "distance_bins": (int, "20"),
        "method": (_str, "slope"),
    },
    "quadrature": {
        "relative_tolerance": (float, "1e-6"),
        "absolute_tolerance": (float, "1e-9"),
        "truncation_t": (float, str(2.0**40)),
        "panel_budget": (int, "2000"),
        "inner_tolerance": (float, "1e-10"),
    },
    "optimize": {
        "bs_density_min_per_km": (float, "0.1"),
        "bs_density_max_per_km": (float, "100"),
        "points": (int, "9"),
    },
    "sensitivity": {
        "perturbations": (_grid, "-0.1,-0.05,0.05,0.1"),
    },
}


@dataclass
class Experiment:
    engine: str
    values: dict  # section -> key -> parsed value
    raw: dict  # section -> key -> text (resolved snapshot)
    network: NetworkConfig
    params: PropagationParams
    blockage: BlockageParams
    rt: RtSceneConfig
    quad: QuadratureSpec
    extra: dict = field(default_factory=dict)

    def get(self, section, key):
        return self.values[section][key]

    @property
    def user(self):
        u = self.values["experiment"]["user"].lower()
        return u if u == "arbitrary" else u.upper()

    @property
    def theta_c(self):
        return from_db(self.get("experiment", "theta_c_db"))

    @property
    def theta_e(self):
        return dbm_to_watts(self.get("experiment", "theta_e_dbm"))

    @property
    def mc_network(self):
        return self.network.replace(half_size=1e3 * self.get("network", "mc_half_size_km"))

    def snapshot(self):
        return {s: dict(kv) for s, kv in self.raw.items()}


def _line_numbers(text):
    """(section, key) -> line number in the source text."""
    out, section = {}, None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip().lower()
        elif s and not s.startswith(("#", ";")) and ("=" in s or ":" in s):
            key = s.split("=", 1)[0].split(":", 1)[0].strip().lower()
            out[(section, key)] = i
    return out


def read_text(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        payload = json.loads(text)
        cfg = payload.get("config", payload)
        lines = []
        for sec, kv in cfg.items():
            lines.append(f"[{sec}]")
            lines += [f"{k} = {v}" for k, v in kv.items()]
        text = "\n".join(lines) + "\n"
    return text


def parse(text, overrides=(), engine=None, source="<config>"):
    """Validate ``text`` (INI) plus ``section.key=value`` overrides."""
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str.lower
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    lines = _line_numbers(text)
    for ov in overrides:
        key, sep, val = ov.partition("=")
        sec, dot, k = key.strip().lower().partition(".")
        if not sep or not dot:
            raise ConfigError(f"override {ov!r}: expected section.key=value")
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, k, val.strip())
        lines[(sec, k)] = "override"
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"{source}: unknown section [{sec}]")
        for k in cp[sec]:
            if k not in SCHEMA[sec]:
                where = lines.get((sec, k), "?")
                raise ConfigError(f"{source}:{where}: unknown key '{k}' in [{sec}]")
    values, raw = {}, {}
    for sec, keys in SCHEMA.items():
        values[sec], raw[sec] = {}, {}
        for k, (conv, default) in keys.items():
            if cp.has_option(sec, k):
                text_v = cp.get(sec, k)
            elif default is REQUIRED:
                raise ConfigError(f"{source}: missing required field '{k}' in [{sec}]")
            else:
                text_v = default
            try:
                values[sec][k] = conv(text_v)
            except (ValueError, TypeError) as exc:
                where = lines.get((sec, k), "default")
                raise ConfigError(f"{source}:{where}: bad value for '{k}' in [{sec}]: {exc}") from None
            raw[sec][k] = text_v.strip()
    if engine is not None:
        values["experiment"]["engine"] = engine
        raw["experiment"]["engine"] = engine
    if values["experiment"]["engine"] not in ENGINES:
        raise ConfigError(f"{source}: engine must be one of {', '.join(ENGINES)}")
    try:
        return _build(values, raw)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def _kappa(v):
    return None if v is None else float(from_db(v))


def _build(v, raw):
    n, p, b, r, q = v["network"], v["propagation"], v["blockage"], v["raytrace"], v["quadrature"]
    tb = n["typical_bs_density_per_km"]
    network = NetworkConfig(
        half_size=n["half_size_km"] * 1e3,
        street_density=n["street_density_per_km"] * 1e-3,
        bs_density=n["bs_density_per_km"] * 1e-3,
        user_height=n["user_height_m"],
        bs_height=n["bs_height_m"],
        exclusion_radius=n["exclusion_radius_m"],
        crossroad_probability=n["crossroad_probability"],
        typical_bs_density=None if tb is None else tb * 1e-3,
    )
    noise = 0.0 if math.isinf(p["noise_dbm"]) and p["noise_dbm"] < 0 else float(dbm_to_watts(p["noise_dbm"]))
    fading = {c: (FadingSpec.parse(p[f"fading_{c}"]) if p[f"fading_{c}"] else None) for c in "lnd"}
    params = PropagationParams(
        tx_power=p["tx_power_w"],
        frequency=p["frequency_ghz"] * 1e9,
        alpha_L=p["alpha_l"],
        alpha_N=p["alpha_n"],
        alpha_D=p["alpha_d"],
        kappa_L=_kappa(p["kappa_l_db"]),
        kappa_N=_kappa(p["kappa_n_db"]),
        kappa_D=_kappa(p["kappa_d_db"]),
        rice_K=p["rice_k"],
        q_lambda=p["q_lambda"],
        nu=p["nu"],
        noise=noise,
        bandwidth=p["bandwidth_mhz"] * 1e6,
        fading_L=fading["l"],
        fading_N=fading["n"],
        fading_D=fading["d"],
    )
    blockage = BlockageParams(b["beta"], b["gamma"])
    pol = {"vertical": (0.0, 0.0, 1.0), "horizontal": (0.0, 1.0, 0.0)}.get(r["polarization"].lower())
    if pol is None:
        raise ValueError("polarization must be vertical or horizontal")
    rt = RtSceneConfig(
        network=network.replace(half_size=r["half_size_km"] * 1e3),
        street_width=r["street_width_m"],
        bs_wall_offset=r["bs_wall_offset_m"],
        obstacle_density=r["obstacle_density_per_km"] * 1e-3,
        obstacle_dimensions=(r["obstacle_length_m"], r["obstacle_width_m"], r["obstacle_height_m"]),
        ground_permittivity=r["ground_permittivity"],
        building_permittivity=r["building_permittivity"],
        polarization=pol,
        diffraction_cutoff=r["diffraction_cutoff_m"],
        symmetric_diffraction=r["symmetric_diffraction"],
        drop_relative_power=r["drop_relative_power"],
    )
    quad = QuadratureSpec(
        relative_tolerance=q["relative_tolerance"],
        absolute_tolerance=q["absolute_tolerance"],
        truncation_T=q["truncation_t"],
        panel_budget=q["panel_budget"],
        inner_tolerance=q["inner_tolerance"],
    )
    return Experiment(v["experiment"]["engine"], v, raw, network, params, blockage, rt, quad)


def load(path, overrides=(), engine=None):
    try:
        text = read_text(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return parse(text, overrides, engine, source=path)
