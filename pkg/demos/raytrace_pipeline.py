"""Ray-traced street scenes, a stochastic-geometry fit, and how well it holds.

Ray tracing gives per-link powers for realistic (but still simple) streets;
path-loss exponents, blockage and fading are fitted from those records and
fed back to the analytic model.  With cars no taller than the handset the
direct ray is never blocked, so a taller obstacle is also tried.
"""

import numpy as np

from manhattan_emf import PropagationParams, analytic, fitting, raytrace
from manhattan_emf.cli import ks_distance

N = 40
params = PropagationParams()

for height in (1.5, 3.0):
    cfg = raytrace.RtSceneConfig(obstacle_dimensions=(4.5, 1.8, height))
    cols, flags = raytrace.simulate_rt(N, cfg, params, 2024)
    fp = fitting.fit_all(cols, flags, cfg.network.delta_h, params)
    print(f"obstacle height {height} m: {np.size(cols['power'])} links")
    print("  " + fp.to_text().replace("\n", "\n  "))

    p, b, net = fp.apply(params, cfg.network)
    m = raytrace.realization_metrics(cols, N)
    th = np.quantile(m["exposure"], np.linspace(0.05, 0.95, 19))
    ks = ks_distance(analytic.exposure_cdf(th, "arbitrary", p, b, net), th, m["exposure"])
    print(f"  KS distance, exposure CDF: {ks:.3f}\n")
