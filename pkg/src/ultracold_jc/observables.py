"""
Initial states, expectation values, reduced states, Husimi Q function and
conversion between scaled and physical units.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import constants
from scipy.special import gammaln

from .hilbert import SpaceDims, TruncationWarning, coherent_amplitudes, coherent_state, coherent_truncation_weight, fock_state, quadrature_ops


@dataclass(frozen=True)
class InitialStateSpec:
    """``(c_e |e> + c_g |g>) |beta>_CM |phi>_field``.

    ``field_kind`` is ``"fock"`` (``field_value`` = photon number) or
    ``"coherent"`` (``field_value`` = complex amplitude). ``beta`` is
    ``(z0 + i p0)/sqrt(2)``.
    """

    c_e: complex = 1.0
    c_g: complex = 0.0
    beta: complex = 0.0
    field_kind: str = "fock"
    field_value: complex = 0

    def __post_init__(self):
        norm = abs(self.c_e) ** 2 + abs(self.c_g) ** 2
        if abs(norm - 1) > 1e-12:
            raise ValueError(f"|c_e|^2 + |c_g|^2 must be 1, got {norm:.15g}")
        if self.field_kind not in ("fock", "coherent"):
            raise ValueError(f"field_kind must be 'fock' or 'coherent', got {self.field_kind!r}")
        if self.field_kind == "fock":
            n = self.field_value
            if int(np.real(n)) != n or int(np.real(n)) < 0:
                raise ValueError(f"Fock photon number must be a non-negative integer, got {n!r}")

    @classmethod
    def from_position_momentum(cls, z0: float, p0: float, **kw) -> "InitialStateSpec":
        return cls(beta=(z0 + 1j * p0) / np.sqrt(2), **kw)

    @property
    def z0(self) -> float:
        return float(np.sqrt(2) * np.real(self.beta))

    @property
    def p0(self) -> float:
        return float(np.sqrt(2) * np.imag(self.beta))

    def truncation_weights(self, dims: SpaceDims) -> dict[str, float]:
        """Weight lost by truncating the CM and field coherent states."""
        w = {"cm": coherent_truncation_weight(self.beta, dims.n_cm), "field": 0.0}
        if self.field_kind == "coherent":
            w["field"] = coherent_truncation_weight(self.field_value, dims.n_field)
        return w


def initial_state(spec: InitialStateSpec, dims: SpaceDims) -> np.ndarray:
    """Normalized product state in the order spin (x) CM (x) field."""
    spin = np.array([spec.c_e, spec.c_g], dtype=complex)
    cm = coherent_state(spec.beta, dims.n_cm, dims.guard_cm)
    if spec.field_kind == "fock":
        n = int(np.real(spec.field_value))
        fld = fock_state(n, dims.n_field)
        if n >= dims.field_guarded:
            warnings.warn(
                f"field Fock state {n} lies in the guard band (n_field={dims.n_field}, guard={dims.guard_field})",
                TruncationWarning,
                stacklevel=2,
            )
    else:
        fld = coherent_state(spec.field_value, dims.n_field, dims.guard_field)
    psi = np.kron(np.kron(spin, cm), fld)
    return psi / np.linalg.norm(psi)


def _as_batch(psi, dims: SpaceDims) -> tuple[np.ndarray, bool]:
    psi = np.asarray(psi, dtype=complex)
    single = psi.ndim == 1
    return psi.reshape((-1,) + dims.shape), single


def _out(values: np.ndarray, single: bool):
    values = np.asarray(values)
    return float(values[0]) if single else values


def _real(values: np.ndarray, what: str) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    if np.max(np.abs(values.imag), initial=0.0) > 1e-12 * scale:
        raise ValueError(f"{what} expectation has an imaginary part {np.max(np.abs(values.imag)):.3e}")
    return values.real


def norm(psi, dims: SpaceDims):
    batch, single = _as_batch(psi, dims)
    return _out(np.sqrt(np.sum(np.abs(batch) ** 2, axis=(1, 2, 3))), single)


def atomic_inversion(psi, dims: SpaceDims):
    """``<sigma_z>``: excited minus ground population."""
    batch, single = _as_batch(psi, dims)
    pops = np.sum(np.abs(batch) ** 2, axis=(2, 3))
    return _out(pops[:, 0] - pops[:, 1], single)


def _cm_expectation(batch: np.ndarray, op: np.ndarray, what: str) -> np.ndarray:
    val = np.einsum("tsjk,jl,tslk->t", batch.conj(), op, batch)
    return _real(val, what)


def mean_position(psi, dims: SpaceDims):
    batch, single = _as_batch(psi, dims)
    _, _, z, _ = quadrature_ops(dims.n_cm)
    return _out(_cm_expectation(batch, z, "position"), single)


def mean_momentum(psi, dims: SpaceDims):
    batch, single = _as_batch(psi, dims)
    _, _, _, p = quadrature_ops(dims.n_cm)
    return _out(_cm_expectation(batch, p, "momentum"), single)


def mean_photon_number(psi, dims: SpaceDims):
    batch, single = _as_batch(psi, dims)
    pops = np.sum(np.abs(batch) ** 2, axis=(1, 2))
    return _out(pops @ np.arange(dims.n_field), single)


def mean_excitation(psi, dims: SpaceDims):
    """``<a_dag a + sigma_z/2>``."""
    batch, single = _as_batch(psi, dims)
    n = np.sum(np.abs(batch) ** 2, axis=(1, 2)) @ np.arange(dims.n_field)
    pops = np.sum(np.abs(batch) ** 2, axis=(2, 3))
    return _out(n + 0.5 * (pops[:, 0] - pops[:, 1]), single)


def jc_baseline_inversion(n: int, g0: float, t):
    """Resonant Jaynes-Cummings inversion ``cos(2 g0 sqrt(n+1) t)`` for ``|e, n>``."""
    if n < 0:
        raise ValueError(f"photon number must be >= 0, got {n}")
    return np.cos(2 * g0 * np.sqrt(n + 1) * np.asarray(t, dtype=float))


def jc_baseline_coherent(alpha: complex, g0: float, t, n_max: int | None = None):
    """Resonant JC inversion for ``|e>`` and a coherent field: Poisson-weighted cosines."""
    if n_max is None:
        n_max = int(abs(alpha) ** 2 + 12 * abs(alpha) + 30)
    probs = np.abs(coherent_amplitudes(alpha, n_max)) ** 2
    t = np.asarray(t, dtype=float)
    cos = np.cos(2 * g0 * np.outer(np.atleast_1d(t), np.sqrt(np.arange(n_max) + 1)))
    out = cos @ probs
    return out if t.ndim else float(out[0])


def reduce_density(psi, subsystem: str, dims: SpaceDims) -> np.ndarray:
    """Reduced density matrix of ``spin``, ``cm`` or ``field`` for a pure state."""
    psi = np.asarray(psi, dtype=complex).reshape(dims.shape)
    axes = {"spin": 0, "cm": 1, "field": 2}
    if subsystem not in axes:
        raise ValueError(f"unknown subsystem {subsystem!r}")
    m = np.moveaxis(psi, axes[subsystem], 0).reshape(dims.shape[axes[subsystem]], -1)
    rho = m @ m.conj().T
    return 0.5 * (rho + rho.conj().T)


def default_q_grid(alpha0: complex = 0.0, points: int = 101) -> np.ndarray:
    """Square lattice ``|Re a|, |Im a| <= max(4, 2|alpha0| + 3)``."""
    half = max(4.0, 2 * abs(alpha0) + 3)
    axis = np.linspace(-half, half, points)
    return axis[None, :] + 1j * axis[:, None]


def husimi_q(rho: np.ndarray, grid) -> np.ndarray:
    """``Q(alpha) = <alpha| rho |alpha> / pi`` on a grid of complex points."""
    rho = np.asarray(rho, dtype=complex)
    grid = np.asarray(grid, dtype=complex)
    dim = rho.shape[0]
    n = np.arange(dim)
    flat = grid.ravel()
    # exact coherent amplitudes (not renormalized) for every grid point
    with np.errstate(divide="ignore", invalid="ignore"):
        logmag = -0.5 * np.abs(flat[:, None]) ** 2 + n * np.log(np.abs(flat[:, None])) - 0.5 * gammaln(n + 1)
    amps = np.exp(logmag) * np.exp(1j * n * np.angle(flat[:, None]))
    amps[flat == 0] = fock_state(0, dim)
    q = np.einsum("an,nm,am->a", amps.conj(), rho, amps).real / np.pi
    return np.clip(q, 0.0, None).reshape(grid.shape)


def q_normalization(q: np.ndarray, grid: np.ndarray) -> float:
    """Riemann sum of ``Q`` over a uniform lattice."""
    grid = np.asarray(grid)
    dx = abs(grid[0, 1] - grid[0, 0])
    dy = abs(grid[1, 0] - grid[0, 0])
    return float(np.sum(q) * dx * dy)


@dataclass(frozen=True)
class UnitSystem:
    """Scaled units built on the coupling strength ``g = 2 pi g_hz``.

    Length ``sqrt(hbar/(m g))``, momentum ``sqrt(hbar m g)``, time ``1/g``.
    The temperature attached to a scaled momentum is ``p^2 hbar g / (2 k_B)``,
    returned in kelvin.
    """

    g_hz: float = 16e6
    mass_kg: float = 85 * constants.atomic_mass
    hbar: float = constants.hbar
    k_b: float = constants.k

    def __post_init__(self):
        for name in ("g_hz", "mass_kg", "hbar", "k_b"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")

    @property
    def g(self) -> float:
        return 2 * np.pi * self.g_hz

    @property
    def length_unit(self) -> float:
        return float(np.sqrt(self.hbar / (self.mass_kg * self.g)))

    @property
    def momentum_unit(self) -> float:
        return float(np.sqrt(self.hbar * self.mass_kg * self.g))

    @property
    def time_unit(self) -> float:
        return 1.0 / self.g

    @property
    def energy_unit(self) -> float:
        return self.hbar * self.g

    def to_dict(self) -> dict:
        return {"g_hz": self.g_hz, "mass_kg": self.mass_kg}


QUANTITIES = ("length", "momentum", "time", "temperature")

TEMPERATURE_NOTE = (
    "temperature = p^2 hbar g / (2 k_B) from the scaled momentum p; the result is in kelvin "
    "(micro-kelvin scale for the default parameters, although the same numerals are often "
    "quoted as milli-kelvin)"
)


def convert_units(value, quantity: str, direction: str = "to_physical", units: UnitSystem | None = None):
    """Convert between scaled and SI values.

    ``length`` (m), ``momentum`` (kg m/s), ``time`` (s) scale linearly;
    ``temperature`` (K) maps a scaled momentum to ``p^2 hbar g / (2 k_B)``
    and back (the inverse returns the non-negative momentum).
    """
    units = UnitSystem() if units is None else units
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    if direction not in ("to_physical", "to_scaled"):
        raise ValueError(f"direction must be 'to_physical' or 'to_scaled', got {direction!r}")
    value = np.asarray(value, dtype=float)
    if quantity == "temperature":
        scale = units.energy_unit / (2 * units.k_b)
        out = value**2 * scale if direction == "to_physical" else np.sqrt(value / scale)
    else:
        unit = {"length": units.length_unit, "momentum": units.momentum_unit, "time": units.time_unit}[quantity]
        out = value * unit if direction == "to_physical" else value / unit
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TimeSeriesRecord:
    t: float
    sigma_z: float
    z_mean: float
    p_mean: float
    field_n_mean: float
    norm: float

    FIELDS = ("t", "sigma_z", "z_mean", "p_mean", "field_n_mean", "norm")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f) for f in self.FIELDS)


def time_series(psi_t: np.ndarray, times, dims: SpaceDims) -> list[TimeSeriesRecord]:
    """Observables for every row of ``psi_t`` (shape ``(len(times), dim)``)."""
    psi_t = np.atleast_2d(psi_t)
    cols = (
        np.asarray(times, dtype=float),
        np.atleast_1d(atomic_inversion(psi_t, dims)),
        np.atleast_1d(mean_position(psi_t, dims)),
        np.atleast_1d(mean_momentum(psi_t, dims)),
        np.atleast_1d(mean_photon_number(psi_t, dims)),
        np.atleast_1d(norm(psi_t, dims)),
    )
    return [TimeSeriesRecord(*map(float, row)) for row in zip(*cols)]
