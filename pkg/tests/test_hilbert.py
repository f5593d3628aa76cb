import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ultracold_jc.hilbert import (
    OperatorSet,
    SpaceDims,
    TruncationWarning,
    coherent_amplitudes,
    coherent_state,
    coherent_truncation_weight,
    embed,
    embed_product,
    fock_state,
    ladder_ops,
    pauli,
    quadrature_ops,
    susskind_glogower,
)


def test_space_dims_defaults_and_layout():
    d = SpaceDims(48, 8)
    assert (d.guard_cm, d.guard_field) == (12, 2)
    assert d.total == 768 and d.shape == (2, 48, 8)
    assert (d.cm_guarded, d.field_guarded) == (36, 6)
    assert d.guarded_mask().sum() == 2 * 36 * 6
    assert d.index(1, 2, 3) == (48 + 2) * 8 + 3


@pytest.mark.parametrize("args", [(8, 2), (4, 4), (16, 1), (16, 4, 16), (16, 4, None, 4)])
def test_space_dims_guard_validation(args):
    with pytest.raises(ValueError):
        SpaceDims(*args)


def test_scaled_keeps_guard_fraction():
    d = SpaceDims(24, 4).scaled(2, 2)
    assert (d.n_cm, d.n_field, d.guard_cm) == (48, 8, 12)


@given(dim=st.integers(4, 40))
def test_canonical_commutator_on_guarded_block(dim):
    a, ad = ladder_ops(dim)
    c = a @ ad - ad @ a
    g = dim - 1
    assert np.allclose(c[:g, :g], np.eye(g), atol=1e-13)
    _, _, z, p = quadrature_ops(dim)
    zp = z @ p - p @ z
    assert np.allclose(zp[:g, :g], 1j * np.eye(g), atol=1e-13)


@given(dim=st.integers(2, 40))
def test_susskind_glogower_identities(dim):
    v, vd = susskind_glogower(dim)
    proj = np.eye(dim)
    proj[0, 0] = 0
    assert np.array_equal(vd @ v, proj)
    assert np.array_equal((v @ vd)[:-1, :-1], np.eye(dim - 1))
    assert not np.any(v @ fock_state(0, dim))


def test_pauli_algebra():
    p = pauli()
    assert np.allclose(p["sigma_x"] @ p["sigma_y"], 1j * p["sigma_z"])
    assert np.allclose(p["sigma_plus"] @ np.array([0, 1]), [1, 0])


def test_embed_matches_product():
    d = SpaceDims(8, 3)
    ops = OperatorSet.build(d)
    full = embed(ops.a, "field", d)
    assert np.allclose(full, embed_product(d, fld=ops.a))
    assert full.shape == (d.total, d.total)
    with pytest.raises(ValueError):
        embed(ops.a, "cm", d)
    with pytest.raises(ValueError):
        embed(ops.a, "motion", d)


@given(re=st.floats(-2, 2), im=st.floats(-2, 2))
def test_coherent_state_is_eigenvector(re, im):
    zeta = complex(re, im)
    dim = 60
    psi = coherent_state(zeta, dim)
    a, _ = ladder_ops(dim)
    assert np.isclose(np.linalg.norm(psi), 1.0)
    assert np.allclose((a @ psi)[:40], zeta * psi[:40], atol=1e-10)


def test_coherent_truncation_weight_closed_form():
    zeta = 1.5
    dim = 6
    kept = np.sum(np.abs(coherent_amplitudes(zeta, dim)) ** 2)
    assert np.isclose(coherent_truncation_weight(zeta, dim), 1 - kept, rtol=1e-12)
    _, w = coherent_state(zeta, dim, return_weight=True)
    assert np.isclose(w, 1 - kept, rtol=1e-12)


def test_coherent_state_warns_in_guard_band():
    with pytest.warns(TruncationWarning):
        coherent_state(3.0, 10, guard=2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        coherent_state(1.0, 10, guard=2)
