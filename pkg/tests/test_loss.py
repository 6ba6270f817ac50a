import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multisteer import (
    DenseState,
    GhzSpec,
    LossModel,
    Scenario,
    apply_channel_dense,
    build_ghz,
    dense_moment,
    factorized_moment,
    per_site_kraus,
)
from multisteer.errors import EncodingError, MultisteerError
from multisteer.loss import dual_rail_loss_kraus, fock_loss_kraus, loss_kraus
from multisteer.observables import ladder, mermin_settings, number, schwinger


@pytest.mark.parametrize("eta", [0, 0.25, 0.5, 0.75, 1])
@pytest.mark.parametrize("make,dim", [(fock_loss_kraus, 2), (dual_rail_loss_kraus, 3)])
def test_completeness(make, dim, eta):
    total = sum(k.conj().T @ k for k in make(eta))
    assert np.abs(total - np.eye(dim)).max() <= 1e-12


def test_fock_unit_efficiency():
    k0, k1 = fock_loss_kraus(1.0)
    assert np.array_equal(k0, np.eye(2))
    assert not k1.any()


def test_fock_total_loss():
    one = DenseState((2,), np.array([0, 1], dtype=complex))
    out = apply_channel_dense(one, 0, fock_loss_kraus(0.0))
    assert np.allclose(out.data, np.diag([1, 0]))


def test_fock_detected_number():
    one = DenseState((2,), np.array([0, 1], dtype=complex))
    out = apply_channel_dense(one, 0, fock_loss_kraus(0.64))
    assert dense_moment(out, [number()]).real == pytest.approx(0.64, abs=1e-12)


def test_dual_rail_unit_efficiency_is_identity():
    for k, ref in zip(dual_rail_loss_kraus(1.0), (np.eye(3), None, None)):
        if ref is None:
            assert not k.any()
        else:
            assert np.allclose(k, ref)


def test_dual_rail_half_loss():
    up = DenseState((3,), np.array([0, 1, 0], dtype=complex))
    out = apply_channel_dense(up, 0, dual_rail_loss_kraus(0.5))
    assert np.allclose(out.data, np.diag([0.5, 0.5, 0.0]), atol=1e-14)


@pytest.mark.parametrize("eta", [0.0, 0.3, 1.0])
def test_vacuum_fixed_point(eta):
    vac = DenseState((3,), np.array([1, 0, 0], dtype=complex))
    out = apply_channel_dense(vac, 0, dual_rail_loss_kraus(eta))
    assert np.allclose(out.data, np.diag([1.0, 0, 0]))


@pytest.mark.parametrize("eta", [-0.1, 1.2])
def test_efficiency_out_of_range(eta):
    with pytest.raises(MultisteerError):
        fock_loss_kraus(eta)
    with pytest.raises(MultisteerError):
        dual_rail_loss_kraus(eta)


def test_ideal_qubit_loss_rejected():
    with pytest.raises(EncodingError, match="dual-rail"):
        loss_kraus(0.9, "ideal-qubit")


def test_per_site_assignment():
    sc = Scenario(3, {0}, "cv-fock")
    sets = per_site_kraus(LossModel(1.0, 0.8), sc)
    assert np.allclose(sets[0][0], fock_loss_kraus(1.0)[0])
    for j in (1, 2):
        assert np.allclose(sets[j][0], fock_loss_kraus(0.8)[0])


def test_uniform_override():
    sc = Scenario(3, {0}, "dual-rail")
    model = LossModel(1.0, 0.5, {0: 0.9, 1: 0.9, 2: 0.9})
    sets = per_site_kraus(model, sc)
    for s in sets:
        assert np.allclose(s[0], dual_rail_loss_kraus(0.9)[0])


def test_override_on_missing_site():
    with pytest.raises(MultisteerError, match="nonexistent"):
        per_site_kraus(LossModel(overrides={5: 0.5}), Scenario(3, {0}, "cv-fock"))


def test_empty_scenario():
    with pytest.raises(MultisteerError):
        per_site_kraus(LossModel(), Scenario(0))


@settings(max_examples=30, deadline=None)
@given(N=st.integers(2, 8), data=st.data())
def test_cv_moment_scales_with_sqrt_eta(N, data):
    r = data.draw(st.integers(1, N - 1))
    etas = data.draw(st.lists(st.floats(0.01, 1.0), min_size=N, max_size=N))
    state = build_ghz(GhzSpec(N, r, encoding="cv-fock"))
    obs = [ladder("+")] * r + [ladder("-")] * (N - r)
    lossless = factorized_moment(state, obs)
    lossy = factorized_moment(state, obs, [fock_loss_kraus(e) for e in etas])
    assert abs(abs(lossy) - np.prod(np.sqrt(etas)) * abs(lossless)) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(N=st.integers(2, 8), data=st.data())
def test_dual_rail_moment_scales_with_eta(N, data):
    etas = data.draw(st.lists(st.floats(0.0, 1.0), min_size=N, max_size=N))
    state = build_ghz(GhzSpec(N, N, encoding="dual-rail"))
    ops = mermin_settings(N, encoding="dual-rail").operators()
    lossless = factorized_moment(state, ops)
    lossy = factorized_moment(state, ops, [dual_rail_loss_kraus(e) for e in etas])
    assert abs(lossy - np.prod(etas) * lossless) <= 1e-9


@pytest.mark.parametrize("make,dim", [(fock_loss_kraus, 2), (dual_rail_loss_kraus, 3)])
@pytest.mark.parametrize("e1,e2", [(0.3, 0.7), (0.9, 0.5), (1.0, 0.2)])
def test_loss_composes(make, dim, e1, e2):
    rng = np.random.default_rng(7)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    state = DenseState((dim,), v / np.linalg.norm(v))
    twice = apply_channel_dense(apply_channel_dense(state, 0, make(e1)), 0, make(e2))
    once = apply_channel_dense(state, 0, make(e1 * e2))
    assert np.abs(twice.data - once.data).max() <= 1e-10


def test_schwinger_z_after_loss_counts_only_detected():
    up = DenseState((3,), np.array([0, 1, 0], dtype=complex))
    out = apply_channel_dense(up, 0, dual_rail_loss_kraus(0.3))
    assert dense_moment(out, [schwinger("z")]).real == pytest.approx(0.3)
