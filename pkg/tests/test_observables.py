import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ultracold_jc.hilbert import SpaceDims, TruncationWarning, coherent_state
from ultracold_jc.observables import (
    InitialStateSpec,
    TEMPERATURE_NOTE,
    TimeSeriesRecord,
    UnitSystem,
    atomic_inversion,
    convert_units,
    default_q_grid,
    husimi_q,
    initial_state,
    jc_baseline_coherent,
    jc_baseline_inversion,
    mean_excitation,
    mean_momentum,
    mean_photon_number,
    mean_position,
    norm,
    q_normalization,
    reduce_density,
    time_series,
)

DIMS = SpaceDims(32, 6)


def random_state(seed, dims=DIMS):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=dims.total) + 1j * rng.normal(size=dims.total)
    return psi / np.linalg.norm(psi)


def test_initial_state_product_structure():
    spec = InitialStateSpec.from_position_momentum(0.3, -0.2, c_e=0.6, c_g=0.8, field_value=2)
    psi = initial_state(spec, DIMS)
    assert norm(psi, DIMS) == pytest.approx(1.0)
    assert atomic_inversion(psi, DIMS) == pytest.approx(0.36 - 0.64)
    assert mean_position(psi, DIMS) == pytest.approx(0.3, abs=1e-12)
    assert mean_momentum(psi, DIMS) == pytest.approx(-0.2, abs=1e-12)
    assert mean_photon_number(psi, DIMS) == pytest.approx(2.0)
    assert mean_excitation(psi, DIMS) == pytest.approx(2.0 + 0.5 * (0.36 - 0.64))
    assert (spec.z0, spec.p0) == pytest.approx((0.3, -0.2))


@pytest.mark.parametrize(
    "kwargs",
    [{"c_e": 1.0, "c_g": 1.0}, {"field_kind": "thermal"}, {"field_value": -1}, {"field_value": 1.5}],
)
def test_initial_state_validation(kwargs):
    with pytest.raises(ValueError):
        InitialStateSpec(**kwargs)


def test_guard_band_fock_warns():
    with pytest.warns(TruncationWarning):
        initial_state(InitialStateSpec(field_value=5), DIMS)


def test_truncation_weights():
    w = InitialStateSpec(beta=2.0, field_kind="coherent", field_value=1.5).truncation_weights(SpaceDims(8, 3))
    assert w["cm"] > 1e-3 and w["field"] > 1e-2


@given(seed=st.integers(0, 2**32 - 1), subsystem=st.sampled_from(["spin", "cm", "field"]))
def test_reduce_density_trace_and_positivity(seed, subsystem):
    dims = SpaceDims(8, 3)
    rho = reduce_density(random_state(seed, dims), subsystem, dims)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.allclose(rho, rho.conj().T)
    assert np.min(np.linalg.eigvalsh(rho)) >= -1e-12


def test_reduce_density_rejects_unknown_subsystem():
    with pytest.raises(ValueError):
        reduce_density(random_state(0), "photon", DIMS)


def test_batched_expectations_match_single():
    psi = np.array([random_state(1), random_state(2)])
    z = mean_position(psi, DIMS)
    assert z.shape == (2,)
    assert z[1] == pytest.approx(mean_position(psi[1], DIMS))
    recs = time_series(psi, [0.0, 1.0], DIMS)
    assert [r.t for r in recs] == [0.0, 1.0]
    assert recs[0].as_tuple()[1] == pytest.approx(atomic_inversion(psi[0], DIMS))
    assert TimeSeriesRecord.FIELDS == ("t", "sigma_z", "z_mean", "p_mean", "field_n_mean", "norm")


def test_jc_baselines():
    t = np.linspace(0, 3, 7)
    assert np.allclose(jc_baseline_inversion(2, 1.0, t), np.cos(2 * np.sqrt(3) * t))
    assert np.allclose(jc_baseline_coherent(0.0, 1.0, t), np.cos(2 * t))
    with pytest.raises(ValueError):
        jc_baseline_inversion(-1, 1.0, t)
    assert jc_baseline_coherent(1.0, 1.0, 0.0) == pytest.approx(1.0)


def test_husimi_vacuum_and_coherent():
    rho = np.zeros((20, 20), dtype=complex)
    rho[0, 0] = 1.0
    q = husimi_q(rho, np.array([0.0, 1.0]))
    assert q == pytest.approx([1 / np.pi, np.exp(-1) / np.pi])
    psi = coherent_state(1.0 + 0.5j, 30)
    grid = default_q_grid(1.0 + 0.5j)
    q = husimi_q(np.outer(psi, psi.conj()), grid)
    assert grid.shape == (101, 101)
    assert q_normalization(q, grid) == pytest.approx(1.0, abs=1e-4)
    assert np.all(q >= 0) and np.all(np.isfinite(q))
    peak = grid.ravel()[np.argmax(q)]
    assert abs(peak - (1.0 + 0.5j)) <= 0.1


def test_default_grid_extent():
    assert default_q_grid(0.0)[0, 0] == -4 - 4j
    assert default_q_grid(3.0)[-1, -1] == 9 + 9j


def test_unit_numerals():
    u = UnitSystem()
    assert convert_units(1.0, "time", units=u) * 1e9 == pytest.approx(9.9471, rel=5e-4)
    assert convert_units(0.25, "length", units=u) * 1e9 == pytest.approx(0.6819, rel=5e-3)
    t25 = convert_units(0.25, "temperature", units=u) * 1e6
    t15 = convert_units(0.15, "temperature", units=u) * 1e6
    assert t15 / t25 == pytest.approx(0.36, rel=1e-12)
    assert t25 == pytest.approx(23.9937, rel=2e-4)
    assert "kelvin" in TEMPERATURE_NOTE


@given(x=st.one_of(st.just(0.0), st.floats(1e-100, 10)), quantity=st.sampled_from(["length", "momentum", "time", "temperature"]))
def test_unit_round_trip(x, quantity):
    back = convert_units(convert_units(x, quantity), quantity, "to_scaled")
    assert back == pytest.approx(x, rel=1e-12, abs=1e-300)


def test_unit_validation():
    with pytest.raises(ValueError):
        UnitSystem(g_hz=0.0)
    with pytest.raises(ValueError):
        convert_units(1.0, "energy")
    with pytest.raises(ValueError):
        convert_units(1.0, "length", "sideways")


def test_imaginary_expectation_is_an_error():
    # a non-normalizable odd state cannot make <z> complex, so check the guard directly
    from ultracold_jc.observables import _real

    with pytest.raises(ValueError):
        _real(np.array([1.0 + 1e-6j]), "test")
