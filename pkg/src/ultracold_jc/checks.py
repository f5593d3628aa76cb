"""
Invariant suite shared by the ``verify`` command and the test-suite.

Every check returns :class:`CheckResult` records: a measured residual, its
threshold and the verdict.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import analytic as an
from .coupling import CouplingSpec, quadratic
from .dynamics import ScenarioParams, build_interaction_hamiltonian, excitation_operator, propagate_decomposed, propagate_oracle, verify_decomposition
from .hilbert import SpaceDims, quadrature_ops, susskind_glogower
from .observables import InitialStateSpec, atomic_inversion, initial_state, jc_baseline_inversion, norm

DECOMPOSITION_TOL = {1: 1e-10, 2: 1e-9, 3: 1e-9}
LATTICE_TOL = 1e-9
SQUEEZE_TOL = 1e-8
UNITARITY_TOL = 1e-9
CONSERVATION_TOL = 1e-10
JC_TOL = 1e-8

# oracle runs are skipped above this many basis states
ORACLE_MAX_DIM = 2048


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.threshold)

    def to_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{verdict}  {self.name}: {self.value:.3e} <= {self.threshold:.1e}{extra}"


def standard_couplings(g0: float = 1.0) -> dict[str, CouplingSpec]:
    return {
        "quadratic": quadratic(g0, 1.0, "+"),
        "sech2": CouplingSpec("sech2", g0=g0, params={"width": 1.0}),
        "sinusoidal": CouplingSpec("sinusoidal", g0=g0, params={"wavenumber": 1.0}),
    }


def decomposition_checks(dims: SpaceDims = SpaceDims(48, 8), deltas=(0.0, 0.5), couplings: dict | None = None) -> list[CheckResult]:
    out = []
    for cname, spec in (couplings or standard_couplings()).items():
        for delta in deltas:
            s = ScenarioParams(spec, dims, delta=delta)
            for j, r in verify_decomposition(s).items():
                out.append(CheckResult(f"decomposition j={j} {cname} delta={delta:g}", r, DECOMPOSITION_TOL[j]))
    return out


def susskind_glogower_checks(dim: int = 48, guard: int = 2) -> list[CheckResult]:
    v, vd = susskind_glogower(dim)
    g = dim - guard
    right = np.max(np.abs((v @ vd)[:g, :g] - np.eye(g)))
    proj = np.eye(dim)
    proj[0, 0] = 0.0
    left = np.max(np.abs(vd @ v - proj))
    return [
        CheckResult("V V_dag = I (guarded)", float(right), 0.0),
        CheckResult("V_dag V = I - |0><0| (exact)", float(left), 0.0),
    ]


def disentangling_lattice_check(dim: int = 48, ks=(1, 2, 3, 4), ts=(0.1, 0.5, 1.0), lam: float = 1.0) -> CheckResult:
    """Largest elementwise gap between the factored and squeezed forms."""
    g = dim - dim // 4
    worst, where = 0.0, ""
    for k in ks:
        for t in ts:
            for sign, direct in (("+", an.s_plus_direct), ("-", an.s_minus_direct)):
                diff = np.max(np.abs(an.s_pm_factored(k, t, dim, sign, lam)[:g, :g] - direct(k, t, dim, lam)[:g, :g]))
                if diff >= worst:
                    worst, where = float(diff), f"k={k} t={t} sign={sign}"
    return CheckResult("disentangled form vs squeezed form", worst, LATTICE_TOL, f"worst at {where}")


def squeeze_action_checks(xis=(0.1, -0.1, 0.3, -0.3), dim: int = 48) -> list[CheckResult]:
    """``S z S^dagger = z e^xi`` and ``S p S^dagger = p e^-xi`` on the guarded block.

    Products of truncated operators are formed on a working basis four
    times larger than ``dim``.
    """
    work = 4 * dim
    g = dim - dim // 4
    _, _, z, p = quadrature_ops(work)
    out = []
    for xi in xis:
        s = an.squeeze_operator(xi, work)
        zr = np.max(np.abs((s @ z @ s.conj().T - z * np.exp(xi))[:g, :g]))
        pr = np.max(np.abs((s @ p @ s.conj().T - p * np.exp(-xi))[:g, :g]))
        out.append(CheckResult(f"squeeze action xi={xi:+g}", float(max(zr, pr)), SQUEEZE_TOL))
    return out


def working_basis_residual(build, dim: int, index, tol: float = 1e-13, max_dim: int = 1024) -> float:
    """``max|(U^dagger U)[index] - I|`` with ``U = build(w)`` on a working basis ``w >= 2 dim``.

    Closed-form matrix elements are exact, but the sums inside ``U^dagger U``
    run over every level, so the working basis is doubled until the
    residual settles.
    """
    w = 2 * dim
    prev = None
    while True:
        u = build(w)
        idx = index(w)
        r = float(np.max(np.abs((u.conj().T @ u)[np.ix_(idx, idx)] - np.eye(len(idx)))))
        if prev is not None and abs(r - prev) <= tol:
            return r
        if 2 * w > max_dim:
            return r
        prev, w = r, 2 * w


def sector_unitarity_checks(dim: int = 48, ks=(0, 1, 2, 3, 4), t: float = 0.5, lam: float = 1.0) -> list[CheckResult]:
    g = np.arange(dim - dim // 4)
    out = []
    for k in ks:
        for sign in an.SIGNS:
            r = working_basis_residual(lambda w: an.sector_propagator(k, t, w, sign, 1.0, lam).block, dim, lambda w: g)
            out.append(CheckResult(f"sector block unitary k={k} sign={sign} t={t:g}", r, UNITARITY_TOL))
    return out


def evolution_unitarity_check(dims: SpaceDims = SpaceDims(24, 5), t: float = 0.5) -> CheckResult:
    """Closed-form ``U_I(t)`` unitary on the guarded block of ``dims``."""
    coupling = quadratic(1.0, 1.0, "-")

    def build(w):
        return an.evolution_operator_quadratic(ScenarioParams(coupling, SpaceDims(w, dims.n_field)), t)

    def index(w):
        mask = np.zeros((2, w, dims.n_field), dtype=bool)
        mask[:, : dims.cm_guarded, : dims.field_guarded] = True
        return np.flatnonzero(mask.ravel())

    r = working_basis_residual(build, dims.n_cm, index, max_dim=192)
    return CheckResult(f"U_I(t={t:g}) unitary (guarded)", r, UNITARITY_TOL)


def conservation_checks(s: ScenarioParams, spec: InitialStateSpec, label: str = "") -> list[CheckResult]:
    """Norm and excitation drift of every applicable propagator."""
    dims = s.dims
    psi0 = initial_state(spec, dims)
    exc = excitation_operator(dims).diagonal().real
    runs = {"decomposed": lambda: propagate_decomposed(s, psi0)}
    if dims.total <= ORACLE_MAX_DIM:
        runs["oracle"] = lambda: propagate_oracle(build_interaction_hamiltonian(s), psi0, s.times)
    out = []
    for method, run in runs.items():
        psi = run()
        n = np.atleast_1d(norm(psi, dims))
        e = (np.abs(psi) ** 2) @ exc
        out.append(CheckResult(f"{label}{method} norm drift", float(np.max(np.abs(n - 1))), CONSERVATION_TOL))
        out.append(CheckResult(f"{label}{method} excitation drift", float(np.ptp(e)), CONSERVATION_TOL))
    if s.delta == 0 and s.coupling.kind == "quadratic":
        series = an.analytic_observables(s, spec.c_e, spec.c_g, spec.beta, field_amplitudes(spec))
        exc_a = series.field_n_mean + 0.5 * series.sigma_z
        out.append(CheckResult(f"{label}analytic norm drift", float(np.max(np.abs(series.norm - 1))), CONSERVATION_TOL))
        out.append(CheckResult(f"{label}analytic excitation drift", float(np.ptp(exc_a)), CONSERVATION_TOL))
    return out


def field_amplitudes(spec: InitialStateSpec) -> np.ndarray:
    """Field Fock amplitudes of the initial state, untruncated up to 1e-16 weight."""
    if spec.field_kind == "coherent":
        return an.coherent_field_amplitudes(spec.field_value)
    n = int(np.real(spec.field_value))
    amps = np.zeros(n + 1, dtype=complex)
    amps[n] = 1.0
    return amps


def jc_limit_checks(g0: float = 1.0, dims: SpaceDims = SpaceDims(32, 6), ns=(0, 2), beta: complex = (-0.25 + 0.25j) / np.sqrt(2)) -> list[CheckResult]:
    """``lam = 0``: inversion of ``|e, beta, n>`` is ``cos(2 g0 sqrt(n+1) t)``."""
    s = ScenarioParams(quadratic(g0, 0.0, "+"), dims)
    h = build_interaction_hamiltonian(s)
    out = []
    for n in ns:
        spec = InitialStateSpec(beta=beta, field_value=n)
        psi0 = initial_state(spec, dims)
        ref = jc_baseline_inversion(n, g0, s.times)
        for method, psi in (
            ("oracle", propagate_oracle(h, psi0, s.times)),
            ("decomposed", propagate_decomposed(s, psi0)),
        ):
            err = np.max(np.abs(atomic_inversion(psi, dims) - ref))
            out.append(CheckResult(f"JC limit n={n} {method}", float(err), JC_TOL))
        series = an.analytic_observables(s, 1.0, 0.0, beta, field_amplitudes(spec))
        out.append(CheckResult(f"JC limit n={n} analytic", float(np.max(np.abs(series.sigma_z - ref))), JC_TOL))
    return out


def full_suite(dims: SpaceDims = SpaceDims(48, 8), scenario: ScenarioParams | None = None, spec: InitialStateSpec | None = None) -> list[CheckResult]:
    g0 = scenario.coupling.g0 if scenario is not None else 1.0
    results = decomposition_checks(dims, couplings=standard_couplings(g0))
    results += susskind_glogower_checks(dims.n_field, dims.guard_field)
    results += susskind_glogower_checks(dims.n_cm, dims.guard_cm)
    results.append(disentangling_lattice_check(dims.n_cm))
    results += squeeze_action_checks(dim=dims.n_cm)
    results += sector_unitarity_checks(dims.n_cm)
    results.append(evolution_unitarity_check())
    results += jc_limit_checks(g0)
    if scenario is not None and spec is not None:
        results += conservation_checks(scenario, spec)
    return results
