import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from conftest import BETA_FIG1
from test_dynamics import FROZEN_SIGMA_Z, TIMES
from ultracold_jc import analytic as an
from ultracold_jc.coupling import CouplingSpec, quadratic
from ultracold_jc.dynamics import ScenarioParams, propagate_decomposed
from ultracold_jc.hilbert import SpaceDims, coherent_amplitudes, quadrature_ops
from ultracold_jc.observables import InitialStateSpec, atomic_inversion, initial_state, mean_momentum, mean_position
from ultracold_jc.tensor import exp_nilpotent

# <z>, <p> of |e>|beta>|0> at t = 0.5, 1.0 (identical for both signs),
# brute-force spectral propagation at dims (128, 6)
FROZEN_Z = [-0.12558596037484668, -0.008338845278947309]
FROZEN_P = [0.24544234502590564, 0.21870659148094676]


def scenario(sign="+", dims=SpaceDims(64, 6), lam=1.0, times=TIMES):
    return ScenarioParams(quadratic(1.0, lam, sign), dims, times=times)


@pytest.mark.parametrize("sign", ["+", "-"])
def test_coefficients_at_zero_time(sign):
    f, h = an.f_h_coefficients(2, 0.0, 1.0, sign)
    assert f == 0 and h == 1


@pytest.mark.parametrize("sign", ["+", "-"])
@pytest.mark.parametrize("k, t", [(1, 0.5), (3, 1.0)])
def test_squeezed_form_equals_sector_hamiltonian(sign, k, t):
    # S_+ = exp(-i (p^2 + w^2 z^2) t / 2), S_- = exp(-i (p^2 - w^2 z^2) t / 2)
    w = an.sector_frequency(k, 1.0)
    work, dim = 256, 24
    _, _, z, p = quadrature_ops(work)
    s = 1 if sign == "+" else -1
    ref = expm(-0.5j * t * (p @ p + s * w * w * z @ z))[:dim, :dim]
    direct = (an.s_plus_direct if sign == "+" else an.s_minus_direct)(k, t, dim)
    assert np.max(np.abs(direct - ref)) <= 1e-9
    assert np.max(np.abs(an.s_pm_factored(k, t, dim, sign) - ref)) <= 1e-9


@given(re=st.floats(-0.49, 0.49), im=st.floats(-0.49, 0.49))
def test_raising_exponential_equals_series(re, im):
    f = complex(re, im)
    _, bd, _, _ = quadrature_ops(20)
    assert np.allclose(an.raising_exponential(f, 20), exp_nilpotent(bd @ bd, f), atol=1e-12, rtol=1e-12)


@pytest.mark.parametrize("sign", ["+", "-"])
@pytest.mark.parametrize("t", [0.3, 2.0, 6.0])
def test_coefficient_gap_matches_direct_form(sign, t):
    f, _ = an.f_h_coefficients(2, t, 1.0, sign)
    gap = an.coefficient_gap(2, t, 1.0, sign)
    assert abs(gap - (1 - 4 * abs(f) ** 2)) <= 1e-12 + 1e-6 * gap


def test_free_coefficients_reproduce_free_propagator():
    f, h = an.free_coefficients(1.3)
    dim = 40
    assert np.max(np.abs(an.factored_form(f, h, 256)[:dim, :dim] - an.free_propagator(1.3, 256)[:dim, :dim])) <= 1e-10


@given(beta_re=st.floats(-1, 1), beta_im=st.floats(-1, 1), t=st.floats(0, 4), sign=st.sampled_from("+-"))
def test_gaussian_ket_amplitudes_match_factored_form(beta_re, beta_im, t, sign):
    beta = complex(beta_re, beta_im)
    f, h = an.f_h_coefficients(2, t, 1.0, sign)
    ket = an.GaussianKet.coherent(beta).squeezed_by(f, h)
    dim = 48
    ref = an.factored_form(f, h, 200)[:dim] @ coherent_amplitudes(beta, 200)
    assert np.allclose(ket.amplitudes(dim), ref, atol=1e-12)


def test_gaussian_moments_match_amplitudes():
    f1, h1 = an.f_h_coefficients(2, 1.2, 1.0, "+")
    f2, h2 = an.f_h_coefficients(2, 1.2, 1.0, "-")
    k1 = an.GaussianKet.coherent(0.3 - 0.1j).squeezed_by(f1, h1)
    k2 = an.GaussianKet.coherent(-0.2 + 0.4j).squeezed_by(f2, h2)
    dim = 200
    b = quadrature_ops(dim)[0]
    v1, v2 = k1.amplitudes(dim), k2.amplitudes(dim)
    ov, low = an._moments(k1, k2)
    assert np.isclose(ov, np.vdot(v1, v2), atol=1e-12)
    assert np.isclose(low, np.vdot(v1, b @ v2), atol=1e-12)
    with pytest.raises(ValueError):
        k1.squeezed_by(f2, h2)


@pytest.mark.parametrize("sign", ["+", "-"])
@pytest.mark.parametrize("n", [0, 2])
def test_analytic_observables_match_frozen_oracle(sign, n):
    field = np.eye(n + 1, dtype=complex)[n]
    series = an.analytic_observables(scenario(sign), 1.0, 0.0, BETA_FIG1, field)
    assert np.max(np.abs(series.sigma_z - FROZEN_SIGMA_Z[sign, n])) <= 1e-8
    if n == 0:
        assert np.max(np.abs(series.z_mean[:2] - FROZEN_Z)) <= 1e-10
        assert np.max(np.abs(series.p_mean[:2] - FROZEN_P)) <= 1e-10


@pytest.mark.parametrize("sign", ["+", "-"])
def test_sigma_z_fock_closed_form(sign):
    s = scenario(sign)
    for t, ref in zip(TIMES, FROZEN_SIGMA_Z[sign, 0]):
        assert an.sigma_z_fock_closed_form(0, BETA_FIG1, t, s) == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("sign", ["+", "-"])
def test_exact_norm_and_excitation_to_long_times(sign):
    times = np.linspace(0, 6, 25)
    field = an.coherent_field_amplitudes(1.0)
    series = an.analytic_observables(scenario(sign, times=times), np.sqrt(0.5), np.sqrt(0.5) * 1j, 0.2, field)
    assert np.max(np.abs(series.norm - 1)) <= 1e-12
    assert np.ptp(series.field_n_mean + 0.5 * series.sigma_z) <= 1e-12


def test_closed_form_blocks_reproduce_exact_state():
    # exact matrix elements applied to a negligibly truncated input
    s = scenario("-", SpaceDims(48, 5))
    psi0 = initial_state(InitialStateSpec(beta=BETA_FIG1, field_value=1), s.dims)
    a = an.propagate_analytic(s, psi0)
    for row, t in zip(a, TIMES):
        assert np.max(np.abs(row - an.analytic_state(s, 1.0, 0.0, BETA_FIG1, [0.0, 1.0], t))) <= 1e-12


def test_closed_form_agrees_with_decomposed_before_leakage():
    s = scenario("-", SpaceDims(96, 5), times=[0.25, 0.5, 1.0])
    psi0 = initial_state(InitialStateSpec(beta=BETA_FIG1, field_kind="coherent", field_value=0.7), s.dims)
    a = an.propagate_analytic(s, psi0)
    d = propagate_decomposed(s, psi0)
    assert np.max(np.abs(atomic_inversion(a, s.dims) - atomic_inversion(d, s.dims))) <= 1e-10


def test_lam_zero_closed_form_is_free_motion():
    s = scenario("+", SpaceDims(32, 4), lam=0.0)
    series = an.analytic_observables(s, 1.0, 0.0, BETA_FIG1, [1.0])
    assert np.allclose(series.sigma_z, np.cos(2 * TIMES), atol=1e-13)
    assert np.allclose(series.p_mean, np.sqrt(2) * BETA_FIG1.imag, atol=1e-13)
    assert np.allclose(series.z_mean, np.sqrt(2) * (BETA_FIG1.real + BETA_FIG1.imag * TIMES), atol=1e-13)


def test_analytic_state_projection():
    s = scenario("+", SpaceDims(64, 4))
    psi = an.analytic_state(s, 1.0, 0.0, BETA_FIG1, [1.0], 1.0)
    assert np.isclose(np.linalg.norm(psi), 1.0, atol=1e-12)
    assert atomic_inversion(psi, s.dims) == pytest.approx(FROZEN_SIGMA_Z["+", 0][1], abs=1e-10)
    assert mean_position(psi, s.dims) == pytest.approx(FROZEN_Z[1], abs=1e-8)
    assert mean_momentum(psi, s.dims) == pytest.approx(FROZEN_P[1], abs=1e-8)


def test_closed_form_preconditions():
    s = scenario()
    with pytest.raises(ValueError):
        an.analytic_observables(s.with_(delta=0.1), 1.0, 0.0, 0.0, [1.0])
    with pytest.raises(ValueError):
        an.analytic_observables(s.with_(coupling=CouplingSpec("sech2")), 1.0, 0.0, 0.0, [1.0])
    with pytest.raises(ValueError):
        an.f_h_coefficients(0, 1.0, 1.0, "+")
    with pytest.raises(ValueError):
        an.SqueezeParameter.for_frequency(0.0)


def test_evolution_operator_unitary_on_guarded_block():
    from ultracold_jc.checks import evolution_unitarity_check

    assert evolution_unitarity_check(SpaceDims(16, 4), t=0.4).passed


def test_truncated_evolution_operator_is_not_unitary():
    # exact elements, truncated sums: U U^dagger needs a working basis
    s = scenario("-", SpaceDims(24, 4))
    assert an.u_unitarity_residual(an.evolution_operator_quadratic(s, 0.2), s.dims) > 1e-3
