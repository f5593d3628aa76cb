"""
Position excursions for two initial momenta in a coherent field.

Prints the running maximum of |<z>| for both atoms and the field Q-function
peak at a few times, from the bundled two-momentum scenario.
"""

import tempfile

import numpy as np

from ultracold_jc.config import load_config
from ultracold_jc.runner import run

cfg = load_config("fig2")
with tempfile.TemporaryDirectory() as out:
    report = run(cfg.with_method("analytic"), out)
    z = {label: outputs["analytic"].table[:, 2] for label, outputs in report.outputs.items()}
    t = cfg.scenario.times
    env = {label: np.maximum.accumulate(np.abs(series)) for label, series in z.items()}
    print(f"{'t':>4} {'p0=0.25':>10} {'p0=0.15':>10}")
    for i in range(0, t.size, 12):
        print(f"{t[i]:4.1f} {env['p0_025'][i]:10.3f} {env['p0_015'][i]:10.3f}")
    print("slower atom stays inside the faster one's envelope:", bool(np.all(env["p0_015"] <= env["p0_025"])))

    for tq in cfg.q_function.times:
        rows = np.loadtxt(f"{out}/p0_015.q_t{tq:g}.csv", delimiter=",", skiprows=1)
        peak = rows[np.argmax(rows[:, 2])]
        print(f"field Q-function at t={tq:g}: peak {peak[2]:.3f} at alpha = {peak[0]:+.2f}{peak[1]:+.2f}i")
