import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ultracold_jc.coupling import CouplingSpec, coupling_operator, quadratic, spectral_coupling
from ultracold_jc.expression import DomainError, ExpressionSyntaxError
from ultracold_jc.hilbert import quadrature_ops

DIM = 24


@pytest.fixture
def z_op():
    return quadrature_ops(DIM)[2]


@pytest.mark.parametrize("sign, s", [("+", 1), ("-", -1)])
def test_quadratic_is_exact_polynomial(z_op, sign, s):
    g = coupling_operator(quadratic(1.0, 0.8, sign), z_op)
    assert np.allclose(g, np.eye(DIM) + s * 0.4 * z_op @ z_op, atol=1e-14)


def test_expression_polynomial_equals_quadratic(z_op):
    a = coupling_operator(CouplingSpec("expression", expr="1 + 0.5*z^2"), z_op)
    b = coupling_operator(quadratic(1.0, 1.0, "+"), z_op)
    assert np.allclose(a, b, atol=1e-14)


def test_nonpolynomial_shapes_use_spectrum(z_op):
    spec = CouplingSpec("sech2", g0=2.0, params={"width": 1.5})
    g = coupling_operator(spec, z_op)
    e, u = np.linalg.eigh(z_op)
    assert np.allclose(g, (u * (2.0 / np.cosh(e / 1.5) ** 2)) @ u.conj().T, atol=1e-12)
    assert np.allclose(g, g.conj().T)


def test_spectral_route_agrees_with_polynomial_for_polynomials(z_op):
    spec = quadratic(1.0, 1.0, "-")
    # z^2 from the spectrum of z equals (z_op)^2 exactly only up to rounding
    assert np.allclose(spectral_coupling(spec, z_op), coupling_operator(spec, z_op), atol=1e-10)


@pytest.mark.parametrize(
    "spec, z, value",
    [
        (CouplingSpec("mesa", g0=1.5, params={"width": 2.0}), [0.5, 1.5], [1.5, 0.0]),
        (CouplingSpec("sinusoidal", g0=1.0, params={"wavenumber": 2.0}), [0.0, np.pi / 4], [1.0, 0.0]),
        (CouplingSpec("sech2", g0=1.0), [0.0], [1.0]),
        (quadratic(1.0, 2.0, "-"), [1.0], [0.0]),
    ],
)
def test_scalar_functions(spec, z, value):
    assert np.allclose(spec.function()(np.array(z)), value, atol=1e-15)


@given(
    kind=st.sampled_from(["quadratic", "mesa", "sech2", "sinusoidal"]),
    g0=st.floats(-3, 3),
    lam=st.floats(0, 3),
    sign=st.sampled_from("+-"),
)
def test_dict_round_trip(kind, g0, lam, sign):
    if kind == "quadratic":
        spec = CouplingSpec(kind, g0=g0, lam=lam, sign=sign)
    else:
        spec = CouplingSpec(kind, g0=g0, params={"width": 1.0} if kind != "sinusoidal" else {"wavenumber": 1.0})
    assert CouplingSpec.from_dict(spec.to_dict()) == spec
    assert hash(CouplingSpec.from_dict(spec.to_dict())) == hash(spec)


@pytest.mark.parametrize(
    "kwargs, exc",
    [
        ({"kind": "gaussian"}, ValueError),
        ({"lam": -1.0}, ValueError),
        ({"sign": "*"}, ValueError),
        ({"kind": "expression"}, ValueError),
        ({"kind": "expression", "expr": "1 +"}, ExpressionSyntaxError),
        ({"kind": "mesa", "params": {"width": 0.0}}, ValueError),
    ],
)
def test_invalid_specs(kwargs, exc):
    with pytest.raises(exc):
        CouplingSpec(**kwargs)


def test_domain_error_propagates(z_op):
    with pytest.raises(DomainError):
        coupling_operator(CouplingSpec("expression", expr="sqrt(z)"), quadrature_ops(5)[2])
