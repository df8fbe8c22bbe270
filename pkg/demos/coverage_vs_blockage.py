"""Coverage and exposure of a street user as the blockage factor grows.

Moderate blockage helps coverage (far interferers lose their LOS), heavy
blockage starts to cut the serving link too.  The analytic curves are checked
against a short Monte Carlo run at one beta.
"""

import math

import numpy as np

from manhattan_emf import BlockageParams, NetworkConfig, PropagationParams, analytic, montecarlo
from manhattan_emf.io import dbm_to_watts, from_db

net = NetworkConfig(half_size=math.inf, street_density=5e-3, bs_density=5e-3, crossroad_probability=0.1)
params = PropagationParams(alpha_L=1.7, alpha_N=2.5, alpha_D=3.5, rice_K=6.0, frequency=3.6e9)

theta_c_db = np.arange(-10, 31, 5.0)
theta_e_dbm = np.arange(-50, -19, 5.0)

print("P_c(theta_c) for the arbitrary user")
print("beta     " + " ".join(f"{t:7.0f}" for t in theta_c_db))
for beta in (0.0, 0.004, 0.012, 0.04):
    pc = analytic.coverage_probability(from_db(theta_c_db), "arbitrary", params, BlockageParams(beta), net)
    print(f"{beta:<8g} " + " ".join(f"{v:7.3f}" for v in pc))

# exposure: probability that the total received power stays below theta_e
b = BlockageParams(0.012)
pe = analytic.exposure_cdf(dbm_to_watts(theta_e_dbm), "arbitrary", params, b, net)
print("\nP_e(theta_e), beta = 0.012")
for t, v in zip(theta_e_dbm, pe):
    print(f"  {t:6.0f} dBm  {v:.3f}")

# a quick MC cross-check; 2000 drops give ~0.01 standard errors
mc = montecarlo.estimate_metrics(
    2000, from_db(theta_c_db), dbm_to_watts(theta_e_dbm), net.replace(half_size=20_000.0), params, b, 0.1, 1
)
pc = analytic.coverage_probability(from_db(theta_c_db), "arbitrary", params, b, net)
print("\nanalytic vs MC coverage (beta = 0.012)")
for t, a, m, s in zip(theta_c_db, pc, mc.coverage.value, mc.coverage.stderr):
    print(f"  {t:5.0f} dB  {a:.3f}  {m:.3f} +- {s:.3f}")
