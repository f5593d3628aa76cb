"""
Truncated spin (x) center-of-mass (x) field Hilbert space and its operators.

The factor order is fixed everywhere as ``spin (x) CM (x) field`` so the field
Fock index varies fastest. Spin index 0 is the excited state (sigma_z = +1)
and index 1 the ground state.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammainc, gammaln

from .tensor import kron_all

SLOTS = ("spin", "cm", "field")


class TruncationWarning(UserWarning):
    """A coherent state loses noticeable weight to basis truncation."""


@dataclass(frozen=True)
class SpaceDims:
    """Dimensions of the truncated composite space.

    ``guard_cm`` and ``guard_field`` count the top levels of each truncated
    oscillator that are excluded from accuracy claims. ``guard_cm`` defaults
    to ``n_cm // 4`` and ``guard_field`` to 2.
    """

    n_cm: int
    n_field: int
    guard_cm: int | None = None
    guard_field: int = 2

    def __post_init__(self):
        if self.guard_cm is None:
            object.__setattr__(self, "guard_cm", self.n_cm // 4)
        if self.n_cm < 8:
            raise ValueError(f"n_cm must be >= 8, got {self.n_cm}")
        if self.n_field < 2:
            raise ValueError(f"n_field must be >= 2, got {self.n_field}")
        if not 0 <= self.guard_cm < self.n_cm:
            raise ValueError(
                f"guard_cm must satisfy 0 <= guard_cm < n_cm, got {self.guard_cm} (n_cm={self.n_cm})"
            )
        if not 0 <= self.guard_field < self.n_field:
            raise ValueError(
                f"guard_field must satisfy 0 <= guard_field < n_field, "
                f"got {self.guard_field} (n_field={self.n_field})"
            )

    @property
    def spin(self) -> int:
        return 2

    @property
    def total(self) -> int:
        return 2 * self.n_cm * self.n_field

    @property
    def shape(self) -> tuple[int, int, int]:
        return (2, self.n_cm, self.n_field)

    def slot_dim(self, slot: str) -> int:
        return dict(zip(SLOTS, self.shape))[_check_slot(slot)]

    @property
    def cm_guarded(self) -> int:
        """Number of CM levels inside the accuracy region."""
        return self.n_cm - self.guard_cm

    @property
    def field_guarded(self) -> int:
        return self.n_field - self.guard_field

    def guarded_mask(self) -> np.ndarray:
        """Boolean mask over the full space selecting the guarded sub-block."""
        mask = np.zeros(self.shape, dtype=bool)
        mask[:, : self.cm_guarded, : self.field_guarded] = True
        return mask.ravel()

    def index(self, spin: int, cm: int, fld: int) -> int:
        return (spin * self.n_cm + cm) * self.n_field + fld

    def scaled(self, cm_factor: int = 1, field_factor: int = 1) -> "SpaceDims":
        """Dimensions enlarged by integer factors, guard bands rescaled."""
        n_cm = self.n_cm * cm_factor
        return SpaceDims(n_cm, self.n_field * field_factor, n_cm // 4, self.guard_field)


def _check_slot(slot: str) -> str:
    if slot not in SLOTS:
        raise ValueError(f"unknown slot {slot!r}; expected one of {SLOTS}")
    return slot


def _check_dim(dim: int) -> None:
    if dim < 2:
        raise ValueError(f"dimension must be >= 2, got {dim}")


def ladder_ops(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated annihilation and creation operators ``(a, a_dag)``."""
    _check_dim(dim)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    return a, a.conj().T.copy()


def number_op(dim: int) -> np.ndarray:
    _check_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def sqrt_number_op(dim: int) -> np.ndarray:
    _check_dim(dim)
    return np.diag(np.sqrt(np.arange(dim, dtype=float))).astype(complex)


def susskind_glogower(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Bare phase operators ``(V, V_dag)`` with ``V|n> = |n-1>`` and ``V|0> = 0``."""
    _check_dim(dim)
    v = np.eye(dim, k=1, dtype=complex)
    return v, v.conj().T.copy()


def quadrature_ops(dim: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(b, b_dag, z, p)`` with ``z = (b + b_dag)/sqrt 2`` and
    ``p = (b - b_dag)/(i sqrt 2)``."""
    b, bd = ladder_ops(dim)
    z = (b + bd) / np.sqrt(2.0)
    p = (b - bd) / (1j * np.sqrt(2.0))
    return b, bd, z, p


def pauli() -> dict[str, np.ndarray]:
    """Spin matrices in the (excited, ground) basis."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    sp = np.array([[0, 1], [0, 0]], dtype=complex)
    return {
        "sigma_x": sx,
        "sigma_y": sy,
        "sigma_z": sz,
        "sigma_plus": sp,
        "sigma_minus": sp.T.copy(),
    }


@dataclass(frozen=True)
class OperatorSet:
    """Operators acting on the individual factors (not embedded)."""

    a: np.ndarray
    a_dag: np.ndarray
    n_hat: np.ndarray
    sqrt_n: np.ndarray
    v: np.ndarray
    v_dag: np.ndarray
    b: np.ndarray
    b_dag: np.ndarray
    z_op: np.ndarray
    p_op: np.ndarray
    sigma_x: np.ndarray
    sigma_y: np.ndarray
    sigma_z: np.ndarray
    sigma_plus: np.ndarray
    sigma_minus: np.ndarray
    dims: SpaceDims = field(repr=False)

    @classmethod
    def build(cls, dims: SpaceDims) -> "OperatorSet":
        a, ad = ladder_ops(dims.n_field)
        v, vd = susskind_glogower(dims.n_field)
        b, bd, z, p = quadrature_ops(dims.n_cm)
        return cls(
            a=a,
            a_dag=ad,
            n_hat=number_op(dims.n_field),
            sqrt_n=sqrt_number_op(dims.n_field),
            v=v,
            v_dag=vd,
            b=b,
            b_dag=bd,
            z_op=z,
            p_op=p,
            dims=dims,
            **pauli(),
        )


def embed(op: np.ndarray, slot: str, dims: SpaceDims) -> np.ndarray:
    """Embed a single-factor operator into the full space with identities elsewhere."""
    _check_slot(slot)
    op = np.asarray(op, dtype=complex)
    d = dims.slot_dim(slot)
    if op.shape != (d, d):
        raise ValueError(f"operator shape {op.shape} does not match slot {slot!r} of dimension {d}")
    factors = [np.eye(n, dtype=complex) for n in dims.shape]
    factors[SLOTS.index(slot)] = op
    return kron_all(*factors)


def embed_product(dims: SpaceDims, spin=None, cm=None, fld=None) -> np.ndarray:
    """``spin (x) cm (x) fld`` with identity for any factor left as ``None``."""
    ops = []
    for op, n in zip((spin, cm, fld), dims.shape):
        ops.append(np.eye(n, dtype=complex) if op is None else np.asarray(op, dtype=complex))
    return kron_all(*ops)


def fock_state(n: int, dim: int) -> np.ndarray:
    if not 0 <= n < dim:
        raise ValueError(f"Fock index {n} out of range for dimension {dim}")
    psi = np.zeros(dim, dtype=complex)
    psi[n] = 1.0
    return psi


def coherent_amplitudes(zeta: complex, dim: int) -> np.ndarray:
    """Exact (unnormalized after truncation) coherent-state amplitudes ``c_0..c_{dim-1}``."""
    n = np.arange(dim)
    zeta = complex(zeta)
    if zeta == 0:
        return fock_state(0, dim)
    logmag = -0.5 * abs(zeta) ** 2 + n * np.log(abs(zeta)) - 0.5 * gammaln(n + 1)
    return np.exp(logmag) * np.exp(1j * n * np.angle(zeta))


def coherent_truncation_weight(zeta: complex, dim: int) -> float:
    """Weight ``sum_{n >= dim} |c_n|^2`` discarded by truncating at ``dim`` levels."""
    x = abs(complex(zeta)) ** 2
    if x == 0:
        return 0.0
    return float(gammainc(dim, x))


def coherent_state(zeta: complex, dim: int, guard: int = 0, return_weight: bool = False):
    """Coherent state ``|zeta>`` truncated to ``dim`` levels and renormalized.

    Warns with :class:`TruncationWarning` when ``|zeta|^2 > dim - guard``.
    With ``return_weight=True`` returns ``(psi, discarded_weight)``.
    """
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    if abs(zeta) ** 2 > dim - guard:
        warnings.warn(
            f"|zeta|^2 = {abs(zeta) ** 2:.3g} exceeds dim - guard = {dim - guard}",
            TruncationWarning,
            stacklevel=2,
        )
    psi = coherent_amplitudes(zeta, dim)
    psi = psi / np.linalg.norm(psi)
    if return_weight:
        return psi, coherent_truncation_weight(zeta, dim)
    return psi
