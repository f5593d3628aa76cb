"""
Walk through the right-unitary factorization on a small space.

Builds H_I, rebuilds it from the sector-diagonal auxiliary Hamiltonian and
shows why the spin-up top field level needs separate treatment.
"""

import numpy as np

from ultracold_jc.coupling import CouplingSpec, quadratic
from ultracold_jc.dynamics import (
    ScenarioParams,
    build_auxiliary_hamiltonian,
    build_interaction_hamiltonian,
    calibrate_rotation_sign,
    decomposed_unitary,
    verify_decomposition,
)
from ultracold_jc.hilbert import SpaceDims, susskind_glogower

dims = SpaceDims(24, 5)

v, vd = susskind_glogower(5)
print("V V_dag:\n", (v @ vd).real.astype(int))
print("V_dag V:\n", (vd @ v).real.astype(int))
print("V V_dag misses only the top level; V_dag V misses only the vacuum.\n")

for name, coupling in (("g+ quadratic", quadratic(1.0, 1.0, "+")), ("sech^2", CouplingSpec("sech2", params={"width": 1.0}))):
    s = ScenarioParams(coupling, dims, delta=0.5)
    res = verify_decomposition(s)
    print(f"{name:>13}: " + ", ".join(f"j={j} residual {r:.1e}" for j, r in res.items()))

sign, csign = calibrate_rotation_sign(ScenarioParams(quadratic(), SpaceDims(16, 4), delta=0.5))
print(f"\nrotation sign picked by calibration: {sign:+d}")

s = ScenarioParams(quadratic(1.0, 1.0, "-"), SpaceDims(8, 3), delta=0.3)
hz = build_auxiliary_hamiltonian(s).reshape(2, 8, 3, 2, 8, 3)
coupled = [(k, l) for k in range(3) for l in range(3) if np.any(hz[:, :, k, :, :, l])]
print("field sectors coupled by H_z:", coupled)

exact = np.linalg.eigh(build_interaction_hamiltonian(s))
u_exact = (exact[1] * np.exp(-1j * exact[0] * 1.3)) @ exact[1].conj().T
gap = np.max(np.abs(decomposed_unitary(s, 1.3) - u_exact))
print(f"sector-wise propagator vs full exponential on the whole truncated space: {gap:.1e}")
