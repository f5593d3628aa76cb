"""
Atomic inversion for an excited atom in the vacuum field, with curvature of
either sign, against the fixed-position Jaynes-Cummings curve.

The closed-form Gaussian evaluation needs no CM truncation, so these
curves hold on the whole window.
"""

import numpy as np

from ultracold_jc import analytic as an
from ultracold_jc.config import load_config
from ultracold_jc.runner import jc_baseline

cfg = load_config("fig1a")
times = np.linspace(0, 6, 13)
curves = {}
for v in cfg.variants:
    s = v.scenario.with_(times=times)
    series = an.analytic_observables(s, v.initial.c_e, v.initial.c_g, v.initial.beta, [1.0])
    curves[v.label] = series.sigma_z
curves["jc"] = jc_baseline(cfg.variants[0], times)

print(f"{'t':>5} " + " ".join(f"{k:>9}" for k in curves))
for i, t in enumerate(times):
    print(f"{t:5.1f} " + " ".join(f"{curves[k][i]:9.4f}" for k in curves))

for label in ("g_plus", "g_minus"):
    d = np.abs(curves[label] - curves["jc"])
    print(f"{label}: |sigma_z - JC| is {d[times <= 1].max():.3f} up to t=1 and {d[times >= 3].max():.3f} after t=3")
