"""
How far a truncated CM basis can be trusted.

The inverted-oscillator branch stretches the wave packet like cosh(omega t),
so any fixed basis eventually fails. This script finds, for growing n_cm,
the last time at which the truncated propagator still matches the exact
Gaussian evaluation to 1e-6.
"""

import numpy as np

from ultracold_jc import analytic as an
from ultracold_jc.config import load_config
from ultracold_jc.dynamics import propagate_decomposed
from ultracold_jc.observables import atomic_inversion, initial_state

cfg = load_config("fig1a")
v = cfg.variants[1]
exact = an.analytic_observables(v.scenario, 1.0, 0.0, v.initial.beta, [1.0]).sigma_z
times = v.scenario.times

print("n_cm   trusted until   max |d sigma_z| on [0, 6]")
for n_cm in (24, 48, 96, 192, 384):
    c = cfg.with_dims(n_cm, 4).variants[1]
    psi = propagate_decomposed(c.scenario, initial_state(c.initial, c.scenario.dims))
    d = np.abs(atomic_inversion(psi, c.scenario.dims) - exact)
    bad = np.flatnonzero(d > 1e-6)
    until = times[-1] if bad.size == 0 else times[max(bad[0] - 1, 0)]
    print(f"{n_cm:5d}   t = {until:5.2f}       {d.max():.2e}")

# rough level count needed at time t: the packet width grows like cosh(t)
for t in (3.0, 6.0):
    print(f"t = {t}: width factor {np.cosh(t):.0f}, so roughly {np.cosh(t) ** 2:.0f} CM levels")
