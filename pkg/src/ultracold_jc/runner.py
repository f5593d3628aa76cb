"""
Simulation runs, verification reports and convergence studies on top of a
:class:`~ultracold_jc.config.RunConfig`. All files are written atomically.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytic as an
from .checks import CheckResult, conservation_checks, field_amplitudes, full_suite
from .config import RunConfig, Variant
from .dynamics import build_interaction_hamiltonian, propagate_decomposed, propagate_oracle
from .hilbert import SpaceDims
from .observables import (
    TEMPERATURE_NOTE,
    TimeSeriesRecord,
    convert_units,
    default_q_grid,
    husimi_q,
    initial_state,
    reduce_density,
    time_series,
)

log = logging.getLogger(__name__)

DEVIATION_TOL = 1e-6
NORM_TOL = 1e-8
TRUNCATION_WARN = 1e-8
CONVERGENCE_TOL = 1e-7


def fmt(x: float) -> str:
    return f"{x:.17g}"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: tuple[str, ...], rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def json_text(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def series_array(records: list[TimeSeriesRecord]) -> np.ndarray:
    return np.array([r.as_tuple() for r in records], dtype=float)


@dataclass
class MethodOutput:
    method: str
    table: np.ndarray  # columns TimeSeriesRecord.FIELDS
    states: np.ndarray | None = None

    @property
    def sigma_z(self) -> np.ndarray:
        return self.table[:, 1]


def jc_baseline(v: Variant, times) -> np.ndarray:
    """Jaynes-Cummings inversion for the variant's spin and field state, CM motion ignored.

    Each photon-number manifold Rabi-oscillates independently, so the
    inversion is a weighted sum over field Fock populations; detuning is
    included through the generalized Rabi frequency.
    """
    times = np.asarray(times, dtype=float)
    g0, delta = v.scenario.coupling.g0, v.scenario.delta
    probs = np.abs(field_amplitudes(v.initial)) ** 2
    pe, pg = abs(v.initial.c_e) ** 2, abs(v.initial.c_g) ** 2

    def excited(m):
        # |e, m> couples to |g, m+1>
        rabi2 = delta**2 + 4 * g0**2 * (m + 1)
        if rabi2 == 0:
            return np.ones_like(times)
        return 1 - 2 * (4 * g0**2 * (m + 1) / rabi2) * np.sin(0.5 * np.sqrt(rabi2) * times) ** 2

    def ground(m):
        rabi2 = delta**2 + 4 * g0**2 * m
        if m == 0 or rabi2 == 0:
            return -np.ones_like(times)
        return -(1 - 2 * (4 * g0**2 * m / rabi2) * np.sin(0.5 * np.sqrt(rabi2) * times) ** 2)

    out = np.zeros_like(times)
    for m, pm in enumerate(probs):
        if pm:
            out += pm * (pe * excited(m) + pg * ground(m))
    return out


def run_method(v: Variant, method: str) -> MethodOutput:
    s, spec = v.scenario, v.initial
    if method == "analytic":
        a = an.analytic_observables(s, spec.c_e, spec.c_g, spec.beta, field_amplitudes(spec))
        table = np.column_stack([a.t, a.sigma_z, a.z_mean, a.p_mean, a.field_n_mean, a.norm])
        return MethodOutput(method, table)
    psi0 = initial_state(spec, s.dims)
    if method == "oracle":
        psi = propagate_oracle(build_interaction_hamiltonian(s), psi0, s.times)
    elif method == "decomposed":
        psi = propagate_decomposed(s, psi0)
    else:
        raise ValueError(f"unknown method {method!r}")
    return MethodOutput(method, series_array(time_series(psi, s.times, s.dims)), psi)


def state_at(v: Variant, method: str, t: float) -> np.ndarray:
    """State on the truncated basis at a single time (analytic: exact state projected)."""
    s, spec = v.scenario, v.initial
    if method == "analytic":
        return an.analytic_state(s, spec.c_e, spec.c_g, spec.beta, field_amplitudes(spec), t)
    psi0 = initial_state(spec, s.dims)
    if method == "oracle":
        return propagate_oracle(build_interaction_hamiltonian(s), psi0, [t])[0]
    return propagate_decomposed(s, psi0, [t])[0]


def deviation_summary(v: Variant, outputs: dict[str, MethodOutput]) -> dict:
    """Pairwise max |d sigma_z|, min fidelity and the window over which all pairs agree."""
    methods = sorted(outputs)
    times = v.scenario.times
    pairs = {}
    agree = np.ones(times.size, dtype=bool)
    states = {}
    for m in methods:
        if outputs[m].states is not None:
            states[m] = outputs[m].states
        else:
            states[m] = np.array([state_at(v, m, t) for t in times])
    for i, a in enumerate(methods):
        for b in methods[i + 1 :]:
            d = np.abs(outputs[a].sigma_z - outputs[b].sigma_z)
            agree &= d <= DEVIATION_TOL
            fid = np.abs(np.einsum("ti,ti->t", states[a].conj(), states[b])) ** 2
            pairs[f"{a}-{b}"] = {
                "max_abs_delta_sigma_z": float(np.max(d)),
                "min_fidelity": float(np.min(fid)),
            }
    bad = np.flatnonzero(~agree)
    window_end = float(times[-1]) if bad.size == 0 else (float(times[bad[0] - 1]) if bad[0] > 0 else None)
    worst = max(p["max_abs_delta_sigma_z"] for p in pairs.values()) if pairs else 0.0
    return {
        "pairs": pairs,
        "tolerance": DEVIATION_TOL,
        "agreement_until": window_end,
        "within_tolerance": bool(worst <= DEVIATION_TOL),
    }


def units_summary(config: RunConfig) -> dict:
    u = config.units
    per_variant = {}
    for v in config.variants:
        z0, p0 = v.initial.z0, v.initial.p0
        per_variant[v.label] = {
            "z0_scaled": z0,
            "z0_nm": convert_units(z0, "length", units=u) * 1e9,
            "p0_scaled": p0,
            "temperature_numeral": convert_units(p0, "temperature", units=u) * 1e6,
        }
    return {
        "g_hz": u.g_hz,
        "mass_kg": u.mass_kg,
        "time_unit_ns": convert_units(1.0, "time", units=u) * 1e9,
        "length_unit_nm": u.length_unit * 1e9,
        "temperature_numeral_unit": "micro-kelvin",
        "temperature_note": TEMPERATURE_NOTE,
        "variants": per_variant,
    }


@dataclass
class RunReport:
    files: list[Path] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    outputs: dict[str, dict[str, MethodOutput]] = field(default_factory=dict)
    ok: bool = True


def run(config: RunConfig, out_dir: Path | None = None) -> RunReport:
    """Run every variant with the configured method(s) and write the data files.

    ``ok`` is False when a row breaks the norm tolerance or, for
    ``method = all``, when the methods disagree beyond ``DEVIATION_TOL``.
    """
    out = Path(out_dir) if out_dir is not None else config.output
    report = RunReport()
    summary: dict = {"name": config.name, "method": config.method, "config": config.raw, "variants": {}}
    for v in config.variants:
        info: dict = {}
        weights = v.initial.truncation_weights(v.scenario.dims)
        lost = {k: float(w) for k, w in weights.items()}
        info["truncation_weight_lost"] = lost
        for part, w in lost.items():
            if w > TRUNCATION_WARN:
                log.warning("%s: initial %s coherent state loses weight %.3e to truncation", v.label, part, w)
        outputs = {}
        for method in config.methods:
            log.info("%s: running %s", v.label, method)
            res = run_method(v, method)
            outputs[method] = res
            path = out / f"{v.label}.{method}.csv"
            write_atomic(path, csv_text(TimeSeriesRecord.FIELDS, res.table))
            report.files.append(path)
            norm_err = float(np.max(np.abs(res.table[:, 5] - 1)))
            info.setdefault("max_norm_error", {})[method] = norm_err
            if norm_err > NORM_TOL:
                log.error("%s/%s: norm error %.3e exceeds %.0e", v.label, method, norm_err, NORM_TOL)
                report.ok = False
        base = jc_baseline(v, v.scenario.times)
        path = out / f"{v.label}.jc_baseline.csv"
        write_atomic(path, csv_text(("t", "sigma_z"), zip(v.scenario.times, base)))
        report.files.append(path)
        if config.method == "all":
            dev = deviation_summary(v, outputs)
            info["deviation"] = dev
            if not dev["within_tolerance"]:
                log.error("%s: methods disagree beyond %.0e (agreement until t=%.6g)", v.label, DEVIATION_TOL, dev["agreement_until"])
                report.ok = False
        for t in config.q_function.times:
            method = "decomposed" if "decomposed" in config.methods else config.methods[0]
            psi = state_at(v, method, t)
            rho = reduce_density(psi / np.linalg.norm(psi), "field", v.scenario.dims)
            alpha0 = v.initial.field_value if v.initial.field_kind == "coherent" else 0.0
            grid = default_q_grid(alpha0, config.q_function.points)
            q = husimi_q(rho, grid)
            rows = zip(grid.real.ravel(), grid.imag.ravel(), q.ravel())
            path = out / f"{v.label}.q_t{fmt(t)}.csv"
            write_atomic(path, csv_text(("re_alpha", "im_alpha", "q"), rows))
            report.files.append(path)
        summary["variants"][v.label] = info
        report.outputs[v.label] = outputs
    summary["units"] = units_summary(config)
    summary["ok"] = report.ok
    path = out / "summary.json"
    write_atomic(path, json_text(summary))
    report.files.append(path)
    report.summary = summary
    return report


def verify(config: RunConfig | None = None, out_dir: Path | None = None) -> tuple[list[CheckResult], bool]:
    """Run the invariant suite and write ``verify.json`` and ``verify.txt``."""
    if config is None:
        results = full_suite()
        out = Path(out_dir) if out_dir is not None else Path("out/verify")
    else:
        v = config.variants[0]
        results = full_suite(v.scenario.dims, v.scenario, v.initial)
        for extra in config.variants[1:]:
            results += conservation_checks(extra.scenario, extra.initial, f"{extra.label} ")
        out = Path(out_dir) if out_dir is not None else config.output
    ok = all(r.passed for r in results)
    write_atomic(out / "verify.json", json_text({"ok": ok, "checks": [r.to_dict() for r in results]}))
    write_atomic(out / "verify.txt", "\n".join(r.line() for r in results) + f"\n{'ALL PASSED' if ok else 'FAILURES'}\n")
    return results, ok


@dataclass(frozen=True)
class ConvergenceStep:
    n_cm: int
    n_field: int
    max_delta: float | None  # against the previous step, per worst variant


def dims_ladder(start: SpaceDims, max_cm: int, max_field: int) -> list[tuple[int, int]]:
    if max_cm < start.n_cm or max_field < start.n_field:
        raise ValueError(f"caps ({max_cm}, {max_field}) must be >= the config dims ({start.n_cm}, {start.n_field})")
    ladder = [(start.n_cm, start.n_field)]
    while True:
        n_cm, n_field = ladder[-1]
        nxt = (min(2 * n_cm, max_cm), min(2 * n_field, max_field))
        if nxt == ladder[-1]:
            return ladder
        ladder.append(nxt)


def converge(config: RunConfig, max_cm: int, max_field: int, out_dir: Path | None = None) -> tuple[list[ConvergenceStep], bool]:
    """Double ``n_cm`` and ``n_field`` up to the caps using the decomposed propagator.

    Converged when the last step changes ``<sigma_z>`` by less than
    ``CONVERGENCE_TOL`` at every time point of every variant.
    """
    ladder = dims_ladder(config.scenario.dims, max_cm, max_field)
    steps = []
    prev = None
    for n_cm, n_field in ladder:
        cfg = config.with_dims(n_cm, n_field)
        cur = [run_method(v, "decomposed").sigma_z for v in cfg.variants]
        delta = None if prev is None else float(max(np.max(np.abs(a - b)) for a, b in zip(cur, prev)))
        steps.append(ConvergenceStep(n_cm, n_field, delta))
        log.info("dims (%d, %d): max |d sigma_z| = %s", n_cm, n_field, delta)
        prev = cur
    converged = len(steps) > 1 and steps[-1].max_delta < CONVERGENCE_TOL
    out = Path(out_dir) if out_dir is not None else config.output
    data = {
        "tolerance": CONVERGENCE_TOL,
        "converged": converged,
        "steps": [{"n_cm": s.n_cm, "n_field": s.n_field, "max_abs_delta_sigma_z": s.max_delta} for s in steps],
    }
    write_atomic(out / "converge.json", json_text(data))
    return steps, converged
