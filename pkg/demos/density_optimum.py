"""Average capacity versus BS density, and where its maximum moves.

More BSs bring the serving BS closer but also add interference; with LOS
blockage the balance has an interior optimum.  Stronger blockage pushes it to
denser deployments, higher transmit power pulls it back.
"""

import math

import numpy as np

from manhattan_emf import BlockageParams, NetworkConfig, PropagationParams, analytic
from manhattan_emf.io import dbm_to_watts

net = NetworkConfig(half_size=math.inf, street_density=5e-3, bs_density=5e-3, bs_height=4.5)
params = PropagationParams(
    alpha_L=2.5, alpha_N=2.75, alpha_D=3.5, rice_K=1.0, noise=float(dbm_to_watts(-93.0)), bandwidth=100e6
)

res = analytic.optimal_bs_density(params, BlockageParams(0.004), net, (1e-4, 5e-2), n_grid=9)
print("lambda_B [/km]   mean capacity [Mbit/s]")
for lam, c in zip(res.grid, res.values):
    print(f"  {lam * 1e3:10.2f}   {c / 1e6:8.1f}")
print(f"optimum {res.bs_density * 1e3:.2f}/km, boundary: {res.at_boundary}\n")

print("optimal lambda_B [/km]   rows beta, columns P_B = 0.1, 1, 10 W")
for beta in (0.004, 0.012, 0.04):
    row = []
    for pb in (0.1, 1.0, 10.0):
        r = analytic.optimal_bs_density(params.replace(tx_power=pb), BlockageParams(beta), net, (1e-4, 5e-2), n_grid=9)
        row.append(r.bs_density * 1e3)
    print(f"  beta {beta:<6g} " + " ".join(f"{v:8.2f}" for v in row))
