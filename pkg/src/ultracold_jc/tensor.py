"""
Dense complex linear algebra used by every other module.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128`` stored in
C (row-major) order. All functions are pure: inputs are never modified.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12


class NotHermitianError(ValueError):
    """Raised when a generator expected to be Hermitian is not."""

    def __init__(self, asymmetry: float, tol: float = HERMITIAN_TOL):
        self.asymmetry = asymmetry
        self.tol = tol
        super().__init__(
            f"matrix is not Hermitian: max|A - A^dagger| = {asymmetry:.3e} "
            f"exceeds {tol:.1e}"
        )


def as_matrix(a) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def hermitian_asymmetry(a: np.ndarray) -> float:
    """Return ``max|A - A^dagger|``."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)))


def check_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    asym = hermitian_asymmetry(a)
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if asym > tol * scale:
        raise NotHermitianError(asym, tol)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product ``a (x) b`` with shape ``(ra*rb, ca*cb)``."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*factors: np.ndarray) -> np.ndarray:
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_matrix(f))
    return out


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-decomposition ``A = U diag(e) U^dagger`` of a Hermitian matrix.

    Eigenvalues are real and ascending; the columns of ``eigenvectors`` are
    orthonormal (a real array when the input was real symmetric). The eigenvector basis inside degenerate eigenspaces is
    whatever LAPACK returns and is not canonicalized.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T

    def function(self, fn) -> np.ndarray:
        """Apply a scalar function to the spectrum: ``U diag(fn(e)) U^dagger``."""
        u = self.eigenvectors
        return (u * fn(self.eigenvalues)) @ u.conj().T

    def propagator(self, t: float) -> np.ndarray:
        return self.function(lambda e: np.exp(-1j * e * t))

    def evolve(self, psi: np.ndarray, times) -> np.ndarray:
        """Return ``exp(-i A t) psi`` for every ``t`` in ``times``, shape (nt, dim)."""
        u = self.eigenvectors
        psi = np.asarray(psi, dtype=complex)
        times = np.asarray(times, dtype=float)
        phases = np.exp(-1j * np.outer(times, self.eigenvalues))
        if np.isrealobj(u):
            # two real products instead of promoting u to complex
            # (.real/.imag views are strided; BLAS needs contiguous copies)
            coeffs = u.T @ np.ascontiguousarray(psi.real) + 1j * (u.T @ np.ascontiguousarray(psi.imag))
            z = phases * coeffs
            out = np.empty(z.shape, dtype=complex)
            out.real = np.ascontiguousarray(z.real) @ u.T
            out.imag = np.ascontiguousarray(z.imag) @ u.T
            return out
        return (phases * (u.conj().T @ psi)) @ u.T


def hermitian_spectral(a: np.ndarray, tol: float = HERMITIAN_TOL) -> SpectralDecomposition:
    """Diagonalize a Hermitian matrix.

    Raises
    ------
    NotHermitianError
        If ``max|A - A^dagger|`` exceeds ``tol`` (relative to ``max|A|`` when
        that is larger than one).
    """
    a = as_matrix(a)
    check_hermitian(a, tol)
    # symmetrize so rounding noise in the lower triangle is not silently dropped
    h = 0.5 * (a + a.conj().T)
    if not np.any(h.imag):
        # real symmetric input keeps real (orthogonal) eigenvectors
        e, u = np.linalg.eigh(np.ascontiguousarray(h.real))
    else:
        e, u = np.linalg.eigh(h)
    return SpectralDecomposition(e, u)


def unitary_from_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)`` computed from the spectral decomposition of ``H``."""
    return hermitian_spectral(h).propagator(t)


def exp_nilpotent(n: np.ndarray, c: complex = 1.0) -> np.ndarray:
    """Exact exponential ``exp(c N)`` of a nilpotent matrix.

    The power series is summed until a power of ``c N`` vanishes identically,
    which for a nilpotent matrix happens after at most ``dim`` terms.

    Raises
    ------
    ValueError
        If the series has not terminated after ``dim`` steps.
    """
    n = as_matrix(n)
    dim = n.shape[0]
    if n.shape != (dim, dim):
        raise ValueError(f"expected a square matrix, got shape {n.shape}")
    cn = c * n
    out = np.eye(dim, dtype=complex)
    term = np.eye(dim, dtype=complex)
    for j in range(1, dim + 1):
        term = term @ cn / j
        if not np.any(term):
            return out
        out = out + term
    raise ValueError(f"matrix is not nilpotent: series did not terminate in {dim} steps")


def frobenius_distance(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum(np.abs(a - b) ** 2)))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a
