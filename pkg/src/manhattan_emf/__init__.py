"""Coverage, EMF exposure and capacity of cellular networks on a Manhattan
street grid: analytic (characteristic-function) engine, Monte Carlo
simulator, ray tracer and the parameter fitting that links them."""

__version__ = "0.1.0"

from .channel import Category, FadingKind, FadingSpec, PropagationParams, berg_distance, path_loss  # noqa: E402
from .geometry import (  # noqa: E402
    BlockageParams,
    ManhattanScene,
    NetworkConfig,
    UserType,
    los_probability,
    make_rng,
    sample_scene,
    serving_distance_pdf,
)
from .quadrature import NumericalFailure, QuadratureSpec, gil_pelaez_cdf  # noqa: E402

__all__ = [
    "BlockageParams",
    "Category",
    "FadingKind",
    "FadingSpec",
    "ManhattanScene",
    "NetworkConfig",
    "NumericalFailure",
    "PropagationParams",
    "QuadratureSpec",
    "UserType",
    "berg_distance",
    "gil_pelaez_cdf",
    "los_probability",
    "make_rng",
    "path_loss",
    "sample_scene",
    "serving_distance_pdf",
]
