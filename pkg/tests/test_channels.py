import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from povmres import channels as chn
from povmres import measurement as ms
from povmres.errors import ValidationError
from povmres.rng import random_density, random_psd

PLUS = np.full((2, 2), 0.5)
PHI_PLUS = np.zeros((4, 4))
PHI_PLUS[np.ix_([0, 3], [0, 3])] = 0.5


def test_apply_examples():
    rho = random_density(3, np.random.default_rng(1))
    np.testing.assert_allclose(chn.apply(chn.identity_channel(3), rho), rho, atol=1e-15)
    np.testing.assert_allclose(chn.apply(chn.dephasing_channel(2), PLUS), np.diag([0.5, 0.5]))
    plus0 = np.kron(PLUS, np.diag([1.0, 0.0]))
    np.testing.assert_allclose(chn.apply(chn.cnot_unitary(2), plus0), PHI_PLUS, atol=1e-15)


def test_adjoint_examples():
    rng = np.random.default_rng(2)
    m = random_psd(2, rng)
    np.testing.assert_allclose(chn.adjoint_apply(chn.identity_channel(2), m), m, atol=1e-15)
    h = chn.hadamard_channel()
    np.testing.assert_allclose(chn.adjoint_apply(h, m), h.u.conj().T @ m @ h.u, atol=1e-15)
    np.testing.assert_allclose(chn.adjoint_apply(chn.dephasing_channel(2), m), np.diag(np.diag(m)), atol=1e-15)


def test_adjoint_duality_on_random_channel():
    rng = np.random.default_rng(4)
    ch = chn.random_channel(3, 2, rng, rank=3)
    rho, m = random_density(3, rng), random_psd(2, rng)
    lhs = np.trace(chn.apply(ch, rho) @ m)
    rhs = np.trace(rho @ chn.adjoint_apply(ch, m))
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_pre_process_examples():
    m = ms.random_povm(2, 3, 9)
    assert chn.pre_process(m, chn.identity_channel(2)).allclose(m)
    u = chn.hadamard_channel().u
    rotated = chn.pre_process(m, chn.hadamard_channel())
    np.testing.assert_allclose(rotated.effects, [u.conj().T @ e @ u for e in m.effects], atol=1e-15)


def test_cnot_dagger_turns_plus_minus_into_bell():
    prod = ms.tensor_povm(ms.plus_minus_povm(), ms.computational_povm(2))
    out = chn.pre_process(prod, chn.cnot_dagger_channel(2))
    bell = ms.bell_povm().effects
    # (+,0) -> phi+, (+,1) -> psi+, (-,0) -> phi-, (-,1) -> psi-
    for eff, target in zip(out.effects, bell[[0, 2, 1, 3]]):
        np.testing.assert_allclose(eff, target, atol=1e-15)


def test_unitality_examples():
    assert chn.is_unital(chn.hadamard_channel())
    assert chn.is_unital(chn.dephasing_channel(3))
    damp = chn.amplitude_damping_channel(0.5)
    assert not chn.is_unital(damp)
    assert chn.unitality_residual(damp) == pytest.approx(0.5)


def test_detection_incoherence_examples():
    assert chn.is_detection_incoherent(chn.dephasing_channel(2))
    assert chn.is_detection_incoherent(chn.cnot_dagger_channel(2))
    assert chn.is_detection_incoherent(chn.cnot_dagger_channel(3))
    forward, adjoint = chn.detection_incoherence_residuals(chn.hadamard_channel())
    assert forward == pytest.approx(0.5)
    assert adjoint == pytest.approx(0.5)
    assert not chn.is_detection_incoherent(chn.hadamard_channel())


def test_cnot_examples():
    np.testing.assert_array_equal(
        chn.cnot_unitary(2).u.real,
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    )
    np.testing.assert_array_equal(chn.cnot_unitary(1).u, [[1]])
    u3 = chn.cnot_unitary(3).u
    # |1,1> (index 4) -> |1,2> (index 5)
    assert u3[5, 4] == 1


def test_shift_examples():
    np.testing.assert_array_equal(chn.shift_unitary(2, 1).u.real, [[0, 1], [1, 0]])
    np.testing.assert_array_equal(chn.shift_unitary(4, 0).u, np.eye(4))
    s = chn.shift_unitary(3, 2).u
    np.testing.assert_array_equal(s @ np.array([1, 0, 0]), [0, 0, 1])


def test_non_tp_kraus_rejected():
    with pytest.raises(ValidationError):
        chn.KrausChannel([np.eye(2), np.eye(2)])
    with pytest.raises(ValidationError):
        chn.UnitaryChannel([[1, 1], [0, 1]])


def test_superoperator_matches_apply():
    rng = np.random.default_rng(6)
    ch = chn.random_channel(2, 3, rng)
    rho = random_density(2, rng)
    np.testing.assert_allclose(chn.superoperator(ch) @ rho.ravel(), chn.apply(ch, rho).ravel(), atol=1e-14)
    np.testing.assert_allclose(chn.superoperator(chn.dephasing_channel(3)), chn.dephasing_superoperator(3))


def test_measurement_channel_is_classical():
    m = ms.random_povm(3, 2, 3)
    q = chn.measurement_channel(m)
    rho = random_density(3, np.random.default_rng(0))
    out = chn.apply(q, rho)
    np.testing.assert_allclose(out, np.diag(ms.apply_statistics(m, rho)), atol=1e-12)


def test_channel_json_round_trip():
    ch = chn.random_channel(2, 2, 3)
    back = chn.KrausChannel.from_json(ch.to_json())
    np.testing.assert_array_equal(back.kraus, ch.kraus)


def test_udi_sampler_is_seeded():
    a, b = chn.random_udi_channel(4, 17), chn.random_udi_channel(4, 17)
    np.testing.assert_array_equal(a.kraus, b.kraus)


@pytest.mark.parametrize("d", [2, 3, 4, 9])
def test_udi_sampler_outputs_are_free(d):
    for seed in range(100):
        ch = chn.random_udi_channel(d, seed)
        assert chn.is_unital(ch)
        assert chn.is_detection_incoherent(ch)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 4))
def test_udi_preserves_incoherent_povms(seed, d):
    ch = chn.random_udi_channel(d, seed)
    inc = ms.random_incoherent_povm(d, 3, seed)
    assert ms.max_off_diagonal(chn.pre_process(inc, ch)) <= 1e-9
