"""
Atom-field coupling ``g(z)`` as an operator on the center-of-mass space.

Positions are in scaled units ``sqrt(hbar / (m g))`` and couplings in units
of ``g``. Polynomial couplings are built as exact matrix polynomials in
``z_op``; everything else goes through the spectrum of ``z_op``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import expression as ex
from .tensor import check_hermitian, hermitian_spectral

KINDS = ("quadratic", "mesa", "sech2", "sinusoidal", "expression")


@dataclass(frozen=True)
class CouplingSpec:
    """Description of a coupling function.

    kind
        ``quadratic``: ``g0 +/- (lam/2) z^2``.
        ``mesa``: ``g0`` for ``|z| <= params["width"]/2``, else 0.
        ``sech2``: ``g0 sech^2(z / params["width"])``.
        ``sinusoidal``: ``g0 cos(params["wavenumber"] z)``.
        ``expression``: ``expr`` parsed with :func:`expression.parse_coupling`.
    """

    kind: str = "quadratic"
    g0: float = 1.0
    lam: float = 0.0
    sign: str = "+"
    params: dict[str, float] = field(default_factory=dict)
    expr: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown coupling kind {self.kind!r}; expected one of {KINDS}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0 (curvature magnitude), got {self.lam}")
        if self.sign not in ("+", "-"):
            raise ValueError(f"sign must be '+' or '-', got {self.sign!r}")
        if self.kind == "expression":
            if not self.expr:
                raise ValueError("kind='expression' requires expr")
            # fail early on bad text
            ex.parse_coupling(self.expr)
        if self.kind in ("mesa", "sech2") and self.params.get("width", 1.0) <= 0:
            raise ValueError("width must be positive")

    # frozen dataclass with a dict field: hash on the immutable parts only
    def __hash__(self):
        return hash((self.kind, self.g0, self.lam, self.sign, tuple(sorted(self.params.items())), self.expr))

    @property
    def ast(self) -> ex.Node | None:
        if self.kind == "quadratic":
            return ex.quadratic_expr(self.g0, self.lam, self.sign)
        if self.kind == "expression":
            return ex.parse_coupling(self.expr)
        return None

    @property
    def polynomial_degree(self) -> int | None:
        node = self.ast
        return None if node is None else ex.polynomial_degree(node)

    def function(self):
        """Scalar (vectorized) callable ``z -> g(z)``."""
        g0 = self.g0
        if self.kind in ("quadratic", "expression"):
            node = self.ast
            return lambda z: ex.evaluate(node, z)
        if self.kind == "mesa":
            half = self.params.get("width", 1.0) / 2
            return lambda z: np.where(np.abs(z) <= half, g0, 0.0)
        if self.kind == "sech2":
            w = self.params.get("width", 1.0)
            return lambda z: g0 / np.cosh(np.asarray(z) / w) ** 2
        k = self.params.get("wavenumber", 1.0)
        return lambda z: g0 * np.cos(k * np.asarray(z))

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind}
        if self.kind == "expression":
            d["expr"] = self.expr
            return d
        d["g0"] = self.g0
        if self.kind == "quadratic":
            d["lambda"] = self.lam
            d["sign"] = self.sign
        if self.params:
            d["params"] = dict(sorted(self.params.items()))
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CouplingSpec":
        d = dict(d)
        lam = d.pop("lambda", d.pop("lam", 0.0))
        return cls(lam=float(lam), **d)


def quadratic(g0: float = 1.0, lam: float = 1.0, sign: str = "+") -> CouplingSpec:
    return CouplingSpec("quadratic", g0=g0, lam=lam, sign=sign)


def coupling_operator(spec: CouplingSpec, z_op: np.ndarray) -> np.ndarray:
    """Matrix of ``g(z_op)``.

    Polynomial couplings use the exact matrix polynomial; other shapes apply
    ``g`` to the eigenvalues of ``z_op``.

    Raises
    ------
    expression.DomainError
        If the coupling is not finite at some eigenvalue of ``z_op``.
    """
    check_hermitian(z_op)
    node = spec.ast
    if node is not None and ex.polynomial_degree(node) is not None:
        g = ex.evaluate_matrix(node, z_op)
    else:
        g = spectral_coupling(spec, z_op)
    return 0.5 * (g + g.conj().T)


def spectral_coupling(spec: CouplingSpec, z_op: np.ndarray) -> np.ndarray:
    """``U diag(g(e)) U^dagger`` from the eigen-decomposition of ``z_op``."""
    dec = hermitian_spectral(z_op)
    values = np.asarray(spec.function()(dec.eigenvalues), dtype=float)
    return dec.function(lambda _e: values)
