"""Parameter sets shared by tests and acceptance checks."""

import math

from manhattan_emf import BlockageParams, FadingSpec, NetworkConfig, PropagationParams
from manhattan_emf.io import dbm_to_watts

MC_HALF_SIZE = 128_000.0

# coverage / exposure versus beta
BETA_SWEEP_NET = NetworkConfig(
    half_size=math.inf, street_density=5e-3, bs_density=5e-3, user_height=1.5, bs_height=6.0,
    crossroad_probability=0.1,
)
BETA_SWEEP_PARAMS = PropagationParams(alpha_L=1.7, alpha_N=2.5, alpha_D=3.5, rice_K=6.0, frequency=3.6e9)

# joint metric
JOINT_NET = BETA_SWEEP_NET
JOINT_PARAMS = BETA_SWEEP_PARAMS
JOINT_BLOCKAGE = BlockageParams(0.0004, 1.0)

# capacity versus density, street/crossroad comparison
CAPACITY_NET = BETA_SWEEP_NET.replace(bs_height=4.5)
CAPACITY_PARAMS = PropagationParams(
    alpha_L=2.0, alpha_N=2.25, alpha_D=3.5, rice_K=1.0, noise=float(dbm_to_watts(-93.0)), bandwidth=100e6
)
CAPACITY_BLOCKAGE = BlockageParams(0.004, 1.0)

# optimal density versus beta and P_B
OPTIMUM_NET = CAPACITY_NET
OPTIMUM_PARAMS = PropagationParams(
    alpha_L=2.5, alpha_N=2.75, alpha_D=3.5, rice_K=1.0, noise=float(dbm_to_watts(-93.0)), bandwidth=100e6
)

# fitted values reported for the ray-tracing comparison
FITTED_NET = NetworkConfig(half_size=2000.0, crossroad_probability=0.02)
FITTED_PARAMS = PropagationParams(
    alpha_L=1.66, alpha_N=1.93, alpha_D=3.5,
    fading_L=FadingSpec.exponential(1.66), fading_N=FadingSpec.exponential(0.33),
)
FITTED_BLOCKAGE = BlockageParams(0.004, 0.85)
