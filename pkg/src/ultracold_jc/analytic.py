"""
Closed-form on-resonance evolution for the quadratic couplings
``g(z) = g0 +/- (lam/2) z^2``.

On resonance the auxiliary Hamiltonian splits into one harmonic and one
inverted oscillator per field Fock sector ``k``, both with frequency
``omega(k) = sqrt(lam sqrt(k))``:

    H_+ = (p^2 + omega^2 z^2)/2,    H_- = (p^2 - omega^2 z^2)/2.

Their propagators are squeezed free rotations / squeezed parametric
amplifiers, and the SU(1,1) structure of ``{b_dag b/2 + 1/4, b_dag^2/2,
b^2/2}`` disentangles each into

    exp(f b_dag^2) h^(2 b_dag b + 1) exp(f b^2)

with scalar coefficients ``f(k, t)`` and ``h(k, t)``.

Conventions. ``S_plus(k, t)`` and ``S_minus(k, t)`` always denote
``exp(-i H_+ t)`` and ``exp(-i H_- t)``. For the inverted oscillator this
means the middle factor of the squeezed form is
``exp(+(i/2) omega (b_dag^2 + b^2) t)``; the disentangled coefficients for
the minus branch describe this operator.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .coupling import CouplingSpec
from .dynamics import ScenarioParams, apply_spin, apply_t, apply_t_dag, propagate_sectors, spin_rotation
from .hilbert import SpaceDims, coherent_amplitudes, quadrature_ops
from .tensor import hermitian_spectral

SIGNS = ("+", "-")


class ConvergenceWarning(UserWarning):
    pass


def sector_frequency(k: int, lam: float) -> float:
    """``sqrt(lam sqrt(k))``."""
    if k < 0 or lam < 0:
        raise ValueError(f"need k >= 0 and lam >= 0, got k={k}, lam={lam}")
    return float(np.sqrt(lam * np.sqrt(k)))


@dataclass(frozen=True)
class SqueezeParameter:
    """Per-sector squeeze parameter ``xi = ln(omega)/2`` (real here)."""

    xi: complex

    def __post_init__(self):
        if not np.isfinite(self.xi):
            raise ValueError(f"squeeze parameter must be finite, got {self.xi}")

    @classmethod
    def for_frequency(cls, omega: float) -> "SqueezeParameter":
        if omega <= 0:
            raise ValueError(f"squeeze parameter needs omega > 0, got {omega}")
        return cls(0.5 * np.log(omega))


def squeeze_operator(xi, dim: int) -> np.ndarray:
    """``S(xi) = exp(-(xi b_dag^2 - conj(xi) b^2)/2)`` on ``dim`` levels.

    The generator is anti-Hermitian; ``i`` times it is diagonalized.
    """
    xi = complex(getattr(xi, "xi", xi))
    if not np.isfinite(xi):
        raise ValueError(f"squeeze parameter must be finite, got {xi}")
    b, bd, _, _ = quadrature_ops(dim)
    gen = -0.5 * (xi * (bd @ bd) - np.conj(xi) * (b @ b))
    # exp(G) = exp(-i H t) with H = i G, t = 1
    return hermitian_spectral(1j * gen).propagator(1.0)


def _direct_middle(sign: str, omega: float, t: float, dim: int) -> np.ndarray:
    b, bd, _, _ = quadrature_ops(dim)
    if sign == "+":
        return np.diag(np.exp(-1j * omega * (np.arange(dim) + 0.5) * t))
    # exp(+(i/2) omega (b_dag^2 + b^2) t) = exp(-i H t) with H = -(omega/2)(b_dag^2 + b^2)
    return hermitian_spectral(-0.5 * omega * (bd @ bd + b @ b)).propagator(t)


def _direct(sign: str, k: int, t: float, dim: int, lam: float, work_dim: int | None, tol: float, max_dim: int) -> np.ndarray:
    omega = sector_frequency(k, lam)
    if omega == 0:
        raise ValueError("the squeezed form needs omega(k) > 0 (k >= 1 and lam > 0)")
    xi = SqueezeParameter.for_frequency(omega)

    def build(w):
        s = squeeze_operator(xi, w)
        return (s @ _direct_middle(sign, omega, t, w) @ s.conj().T)[:dim, :dim]

    if work_dim is not None:
        return build(max(work_dim, dim))
    # Product of truncated factors: enlarge the working basis until the
    # requested block stops changing.
    w = max(2 * dim, 64)
    prev = build(w)
    while True:
        if 2 * w > max_dim:
            warnings.warn(
                f"direct S{sign}(k={k}, t={t}) not converged to {tol:g} at working dimension {w}",
                ConvergenceWarning,
                stacklevel=3,
            )
            return prev
        w *= 2
        cur = build(w)
        if np.max(np.abs(cur - prev)) <= tol:
            return cur
        prev = cur


def s_plus_direct(k: int, t: float, dim: int, lam: float = 1.0, work_dim: int | None = None, tol: float = 1e-12, max_dim: int = 2048) -> np.ndarray:
    """``S(xi_k) exp(-i omega_k (b_dag b + 1/2) t) S^dagger(xi_k)``, ``xi_k = ln(omega_k)/2``.

    The three factors are formed on a larger working basis and the leading
    ``dim x dim`` block is returned. Unless ``work_dim`` is given, the
    working basis is doubled until that block changes by less than ``tol``.
    """
    return _direct("+", k, t, dim, lam, work_dim, tol, max_dim)


def s_minus_direct(k: int, t: float, dim: int, lam: float = 1.0, work_dim: int | None = None, tol: float = 1e-12, max_dim: int = 2048) -> np.ndarray:
    """``S(xi_k) exp(+(i/2) omega_k (b_dag^2 + b^2) t) S^dagger(xi_k) = exp(-i H_- t)``.

    Working-basis handling as in :func:`s_plus_direct`.
    """
    return _direct("-", k, t, dim, lam, work_dim, tol, max_dim)


def _continuous_sqrt_phase(phi: float, ratio: float) -> float:
    """Unwrapped argument of ``cos(phi) + i ratio sin(phi)`` (ratio > 0)."""
    theta = np.arctan2(ratio * np.sin(phi), np.cos(phi))
    return theta + 2 * np.pi * np.round((phi - theta) / (2 * np.pi))


def f_h_coefficients(k: int, t: float, lam: float, sign: str) -> tuple[complex, complex]:
    """Disentangling coefficients ``(f, h)`` of ``S_sign(k, t)``.

    Uses the cot/coth expressions multiplied through by sin/sinh, which
    removes the poles at ``omega t = m pi``. ``h`` is the branch continuous
    in ``t`` with ``h(0) = 1``.
    """
    if sign not in SIGNS:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    w = sector_frequency(k, lam)
    if w == 0:
        raise ValueError("coefficients need omega(k) > 0 (k >= 1 and lam > 0)")
    phi = w * t
    if sign == "+":
        s, c = np.sin(phi), np.cos(phi)
        f = (1 - w**2) * s / (2 * ((1 + w**2) * s - 2j * w * c))
        den = 2 * w * c + 1j * (1 + w**2) * s
        theta = _continuous_sqrt_phase(phi, (1 + w**2) / (2 * w))
        h = np.sqrt(2 * w / abs(den)) * np.exp(-0.5j * theta)
    else:
        s, c = np.sinh(phi), np.cosh(phi)
        f = (1 + w**2) * s / (2 * ((1 - w**2) * s - 2j * w * c))
        # real part 2 w cosh > 0, so the principal root is continuous
        h = np.sqrt(2 * w / (2 * w * c + 1j * (1 - w**2) * s))
    return complex(f), complex(h)


def raising_exponential(f: complex, dim: int) -> np.ndarray:
    """``exp(f b_dag^2)`` on ``dim`` levels from its closed-form elements.

    ``<n + 2j| exp(f b_dag^2) |n> = f^j / j! sqrt((n + 2j)! / n!)``, evaluated
    in log space. Equals the truncated nilpotent series exactly.
    """
    out = np.zeros((dim, dim), dtype=complex)
    if f == 0:
        np.fill_diagonal(out, 1.0)
        return out
    n = np.arange(dim)
    logf, argf = np.log(abs(f)), np.angle(f)
    for j in range(0, (dim + 1) // 2):
        cols = n[: dim - 2 * j]
        logmag = j * logf - gammaln(j + 1) + 0.5 * (gammaln(cols + 2 * j + 1) - gammaln(cols + 1))
        out[cols + 2 * j, cols] = np.exp(logmag + 1j * j * argf)
    return out


def factored_form(f: complex, h: complex, dim: int) -> np.ndarray:
    """``exp(f b_dag^2) diag(h^(2j+1)) exp(f b^2)``; ``exp(f b^2)`` is the transpose of the raising factor."""
    j = np.arange(dim)
    middle = h * np.power(h * h, j)
    left = raising_exponential(f, dim)
    return (left * middle) @ left.T


def s_pm_factored(k: int, t: float, dim: int, sign: str, lam: float = 1.0) -> np.ndarray:
    """``S_sign(k, t)`` from the disentangled product.

    Matrix elements below ``dim`` are exact: the outer factors only connect
    levels of equal parity downwards/upwards, so no truncation enters.
    """
    f, h = f_h_coefficients(k, t, lam, sign)
    return factored_form(f, h, dim)


def free_propagator(t: float, dim: int) -> np.ndarray:
    """``exp(-i p^2 t / 2)`` on the truncated CM basis."""
    _, _, _, p = quadrature_ops(dim)
    return hermitian_spectral(0.5 * (p @ p)).propagator(t)


@dataclass(frozen=True)
class SectorPropagator:
    """Closed-form data for one (field sector, spin block) pair.

    ``u_block`` is the CM propagator ``S_sign(k, t)`` (or free propagation
    when ``omega_k = 0``); ``phase`` multiplies it in the evolution operator.
    """

    k: int
    t: float
    omega_k: float
    sign: str
    f: complex
    h: complex
    u_block: np.ndarray
    phase: complex

    @property
    def block(self) -> np.ndarray:
        return self.phase * self.u_block


def sector_propagator(k: int, t: float, dim: int, sign: str, g0: float, lam: float, phase_sign: int = -1) -> SectorPropagator:
    """Propagator of ``H_sign +/- g0 sqrt(k)`` in field sector ``k``.

    ``phase_sign = -1`` gives ``exp(-i g0 sqrt(k) t) S_sign`` (spin-up
    block), ``+1`` gives ``exp(+i g0 sqrt(k) t) S_sign`` (spin-down block).
    """
    w = sector_frequency(k, lam)
    phase = np.exp(phase_sign * 1j * g0 * np.sqrt(k) * t)
    if w == 0:
        return SectorPropagator(k, t, w, sign, 0j, 1 + 0j, free_propagator(t, dim), phase)
    f, h = f_h_coefficients(k, t, lam, sign)
    return SectorPropagator(k, t, w, sign, f, h, factored_form(f, h, dim), phase)


def _flip(sign: str) -> str:
    return "-" if sign == "+" else "+"


def _check_quadratic(s: ScenarioParams) -> CouplingSpec:
    if s.delta != 0:
        raise ValueError("the closed form is on resonance only (delta = 0); use the numerical propagators")
    if s.coupling.kind != "quadratic":
        raise ValueError(f"the closed form needs a quadratic coupling, got {s.coupling.kind!r}")
    return s.coupling


def sector_blocks_at(s: ScenarioParams, t: float) -> list[tuple[np.ndarray, np.ndarray]]:
    """(spin-up, spin-down) CM propagators per field sector at time ``t``."""
    c = _check_quadratic(s)
    n = s.dims.n_cm
    out = []
    for k in range(s.dims.n_field):
        up = sector_propagator(k, t, n, c.sign, c.g0, c.lam, -1)
        down = sector_propagator(k, t, n, _flip(c.sign), c.g0, c.lam, +1)
        out.append((up.block, down.block))
    return out


def evolution_operator_quadratic(s: ScenarioParams, t: float) -> np.ndarray:
    """Full-space ``U_I(t)`` assembled from the closed-form sector blocks.

    ``T R diag(exp(-i g0 sqrt(k) t) S_sign(k,t), exp(+i g0 sqrt(k) t) S_-sign(k,t)) R^dagger T^dagger``
    plus free propagation of the spin-up top field level, which ``T^dagger``
    annihilates on a truncated basis. The vacuum sector (``omega = 0``)
    propagates freely.
    """
    dims = s.dims
    n, nf = dims.n_cm, dims.n_field
    blocks = sector_blocks_at(s, t)
    d = np.zeros((2, n, nf, 2, n, nf), dtype=complex)
    for k, (up, down) in enumerate(blocks):
        d[0, :, k, 0, :, k] = up
        d[1, :, k, 1, :, k] = down
    d = d.reshape(dims.total, dims.total)
    r = spin_rotation()
    eye = np.eye(dims.total, dtype=complex).reshape((dims.total,) + dims.shape)
    # columns of R^dagger T^dagger, then D, then T R
    cols = apply_spin(r.conj().T, apply_t_dag(eye)).reshape(dims.total, dims.total).T
    mid = (d @ cols).T.reshape((dims.total,) + dims.shape)
    u = apply_t(apply_spin(r, mid)).reshape(dims.total, dims.total).T
    top = np.zeros(dims.shape, dtype=bool)
    top[0, :, -1] = True
    idx = np.flatnonzero(top.ravel())
    u[np.ix_(idx, idx)] += free_propagator(t, n)
    return u


def propagate_analytic(s: ScenarioParams, psi0: np.ndarray, times=None) -> np.ndarray:
    """Apply the closed-form ``U_I(t)`` to ``psi0`` on every time of the grid."""
    c = _check_quadratic(s)
    times = s.times if times is None else times
    n = s.dims.n_cm

    def evolve(k, chi, ts):
        out = np.zeros((ts.size, 2, n), dtype=complex)
        for i, t in enumerate(ts):
            if np.any(chi[0]):
                out[i, 0] = sector_propagator(k, t, n, c.sign, c.g0, c.lam, -1).block @ chi[0]
            if np.any(chi[1]):
                out[i, 1] = sector_propagator(k, t, n, _flip(c.sign), c.g0, c.lam, +1).block @ chi[1]
        return out

    psi_t = propagate_sectors(s, psi0, times, evolve)
    return psi_t


def sigma_z_fock_closed_form(n: int, beta: complex, t: float, s: ScenarioParams, sign: str | None = None, cm_dim: int | None = None, return_error: bool = False):
    """Atomic inversion for the initial state ``|e>|beta>|n>`` on resonance.

        <sigma_z(t)> = Re[ exp(2 i g0 sqrt(n+1) t)
                           sum_{j,k} conj(c_j) c_k <j| S_sign^dagger S_-sign |k> ]

    with ``c_j`` the coherent amplitudes of ``beta`` and both ``S`` taken in
    field sector ``n + 1`` from the disentangled form. For ``omega(n+1) = 1``
    and the ``+`` coupling, ``S_+`` is the diagonal ``exp(-i (j+1/2) t)``
    and the sum collapses to phases times ``<j|S_-|k>``.

    The double sum is truncated at ``cm_dim`` CM levels (default: the
    guarded CM dimension); the truncation error is estimated by doubling.
    """
    c = _check_quadratic(s)
    sign = c.sign if sign is None else sign
    dim = s.dims.cm_guarded if cm_dim is None else cm_dim
    k = n + 1

    def value(d):
        amps = coherent_amplitudes(beta, d)
        up = sector_propagator(k, t, d, sign, c.g0, c.lam, -1).block @ amps
        down = sector_propagator(k, t, d, _flip(sign), c.g0, c.lam, +1).block @ amps
        return float(np.real(np.vdot(up, down)))

    v = value(dim)
    if not return_error:
        return v
    return v, abs(value(2 * dim) - v)


def u_unitarity_residual(u: np.ndarray, dims: SpaceDims) -> float:
    """``max|U U^dagger - I|`` on the guarded sub-block."""
    mask = dims.guarded_mask()
    prod = u @ u.conj().T
    return float(np.max(np.abs(prod[np.ix_(mask, mask)] - np.eye(mask.sum()))))


# Gaussian-ket evaluation. Every factor of the disentangled form maps a
# coherent state to a ket c exp(f b_dag^2 + gamma b_dag)|0>, whose overlaps
# and first moments are Gaussian integrals in the Bargmann representation.
# This gives observables with no CM truncation at all.


def free_coefficients(t: float) -> tuple[complex, complex]:
    """``(f, h)`` of ``exp(-i p^2 t / 2)``: the ``omega -> 0`` limit of the plus branch."""
    return complex(t / (2 * t - 4j)), complex(1 / np.sqrt(1 + 0.5j * t))


def coefficient_gap(k: int, t: float, lam: float, sign: str) -> float:
    """``1 - 4|f|^2`` without cancellation.

    For the inverted branch ``|f| -> 1/2`` exponentially fast, so forming
    ``1 - 4|f|^2`` from ``f`` loses all digits by ``omega t ~ 10``.
    """
    w = sector_frequency(k, lam)
    if w == 0:
        return 4 / (t * t + 4)
    phi = w * t
    if sign == "+":
        return 4 * w * w / ((1 + w * w) ** 2 * np.sin(phi) ** 2 + 4 * w * w * np.cos(phi) ** 2)
    return 4 * w * w / ((1 - w * w) ** 2 * np.sinh(phi) ** 2 + 4 * w * w * np.cosh(phi) ** 2)


@dataclass(frozen=True)
class GaussianKet:
    """``c exp(f b_dag^2 + gamma b_dag)|0>`` with ``|f| < 1/2``.

    ``gap`` optionally carries an accurate ``1 - 4|f|^2``.
    """

    f: complex
    gamma: complex
    c: complex
    gap: float | None = None

    @classmethod
    def coherent(cls, beta: complex) -> "GaussianKet":
        return cls(0j, complex(beta), complex(np.exp(-0.5 * abs(beta) ** 2)))

    def squeezed_by(self, f: complex, h: complex, gap: float | None = None) -> "GaussianKet":
        """Apply ``exp(f b_dag^2) h^(2n+1) exp(f b^2)``; the ket must be coherent (``f = 0``)."""
        if self.f != 0:
            raise ValueError("only coherent kets can be propagated in closed form")
        return GaussianKet(f, h * h * self.gamma, self.c * h * np.exp(f * self.gamma**2), gap)

    def amplitudes(self, dim: int) -> np.ndarray:
        """First ``dim`` Fock amplitudes (exact, not renormalized)."""
        out = np.zeros(dim, dtype=complex)
        out[0] = self.c
        if dim > 1:
            out[1] = self.gamma * self.c
        for n in range(2, dim):
            out[n] = (self.gamma * out[n - 1] + 2 * self.f * np.sqrt(n - 1) * out[n - 2]) / np.sqrt(n)
        return out


def _moments(k1: GaussianKet, k2: GaussianKet) -> tuple[complex, complex]:
    """``<k1|k2>`` and ``<k1|b|k2>``."""
    a, bb = k2.f, np.conj(k1.f)
    c, d = k2.gamma, np.conj(k1.gamma)
    den = k1.gap if k1 is k2 and k1.gap is not None else 1 - 4 * a * bb
    # Re(den) > 0 because |f| < 1/2, so the principal root is continuous
    ov = np.conj(k1.c) * k2.c * np.exp((a * d * d + bb * c * c + c * d) / den) / np.sqrt(den)
    return ov, (2 * a * d + c) * ov / den


def coherent_field_amplitudes(alpha: complex, tail: float = 1e-16) -> np.ndarray:
    """Coherent amplitudes cut where the remaining weight drops below ``tail``."""
    n = int(abs(alpha) ** 2 + 10 * abs(alpha) + 10)
    while True:
        amps = coherent_amplitudes(alpha, n)
        if 1 - np.sum(np.abs(amps) ** 2) < tail:
            return amps
        n *= 2


Components = dict[tuple[int, int], list[tuple[complex, GaussianKet]]]


def analytic_components(s: ScenarioParams, c_e: complex, c_g: complex, beta: complex, field, t: float) -> Components:
    """Exact state at ``t`` as ``{(spin, field index): [(coefficient, ket), ...]}``.

    Initial state ``(c_e|e> + c_g|g>)|beta>|field>`` with ``field`` the field
    Fock amplitudes. Sector ``k`` contributes ``exp(-i g0 sqrt(k) t) S_sign|beta>``
    and ``exp(+i g0 sqrt(k) t) S_-sign|beta>``, recombined by ``T R``. The
    vacuum sector moves freely. No sector or CM level is dropped.
    """
    c = _check_quadratic(s)
    field = np.asarray(field, dtype=complex)
    r = spin_rotation()
    coherent = GaussianKet.coherent(beta)
    comps: Components = {}
    for k in range(field.size + 1):
        up_in = c_e * field[k - 1] if k >= 1 else 0.0
        dn_in = c_g * field[k] if k < field.size else 0.0
        if k == 0:
            if dn_in != 0:
                free = coherent.squeezed_by(*free_coefficients(t), coefficient_gap(0, t, c.lam, "+"))
                comps.setdefault((1, 0), []).append((dn_in, free))
            continue
        u, d = r.conj().T @ np.array([up_in, dn_in], dtype=complex)
        kets = []
        for amp, col, sign, phase_sign in ((u, 0, c.sign, -1), (d, 1, _flip(c.sign), +1)):
            if amp == 0:
                continue
            f, h = f_h_coefficients(k, t, c.lam, sign) if c.lam > 0 else free_coefficients(t)
            phase = np.exp(phase_sign * 1j * c.g0 * np.sqrt(k) * t)
            ket = coherent.squeezed_by(f, h, coefficient_gap(k, t, c.lam, sign))
            kets.append((amp * phase, col, ket))
        for spin, fld in ((0, k - 1), (1, k)):
            terms = [(r[spin, col] * a, ket) for a, col, ket in kets if r[spin, col] != 0]
            if terms:
                comps.setdefault((spin, fld), []).extend(terms)
    return comps


@dataclass(frozen=True)
class AnalyticSeries:
    t: np.ndarray
    sigma_z: np.ndarray
    z_mean: np.ndarray
    p_mean: np.ndarray
    field_n_mean: np.ndarray
    norm: np.ndarray


def analytic_observables(s: ScenarioParams, c_e: complex, c_g: complex, beta: complex, field, times=None) -> AnalyticSeries:
    """Exact observables on the time grid from :func:`analytic_components`."""
    times = np.atleast_1d(np.asarray(s.times if times is None else times, dtype=float))
    keys = ("sigma_z", "z_mean", "p_mean", "field_n_mean", "norm")
    out = {key: np.zeros(times.size) for key in keys}
    for i, t in enumerate(times):
        tot = sz = nf = 0.0
        low = 0j
        for (spin, fld), terms in analytic_components(s, c_e, c_g, beta, field, t).items():
            w_norm = w_low = 0j
            for a1, k1 in terms:
                for a2, k2 in terms:
                    ov, lower = _moments(k1, k2)
                    w_norm += np.conj(a1) * a2 * ov
                    w_low += np.conj(a1) * a2 * lower
            tot += w_norm.real
            sz += w_norm.real if spin == 0 else -w_norm.real
            nf += fld * w_norm.real
            low += w_low
        out["norm"][i] = np.sqrt(tot)
        out["sigma_z"][i] = sz
        out["field_n_mean"][i] = nf
        out["z_mean"][i] = np.sqrt(2) * low.real
        out["p_mean"][i] = np.sqrt(2) * low.imag
    return AnalyticSeries(times, **out)


def analytic_state(s: ScenarioParams, c_e: complex, c_g: complex, beta: complex, field, t: float) -> np.ndarray:
    """Exact state at ``t`` projected onto the truncated basis of ``s.dims`` (not renormalized)."""
    dims = s.dims
    psi = np.zeros(dims.shape, dtype=complex)
    for (spin, fld), terms in analytic_components(s, c_e, c_g, beta, field, t).items():
        if fld < dims.n_field:
            for a, ket in terms:
                psi[spin, :, fld] += a * ket.amplitudes(dims.n_cm)
    return psi.ravel()
