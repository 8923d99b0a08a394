import numpy as np
import pytest

from povmres import channels as chn
from povmres import conversion as cv
from povmres import measurement as ms
from povmres import monotones as mo
from povmres.errors import FreeOperationError


def test_ancilla_examples():
    np.testing.assert_array_equal(cv.ancilla_incoherent_povm(2, 2).effects, ms.computational_povm(2).effects)
    padded = cv.ancilla_incoherent_povm(2, 4).effects
    np.testing.assert_array_equal(padded[:2], ms.computational_povm(2).effects)
    assert not padded[2:].any()
    short = cv.ancilla_incoherent_povm(3, 2).effects
    np.testing.assert_array_equal(short[0], np.diag([1, 0, 0]))
    np.testing.assert_array_equal(short[1], np.diag([0, 1, 1]))


def test_plus_minus_converts_to_bell():
    out = cv.cnot_conversion(ms.plus_minus_povm())
    assert out.dims_split == (2, 2)
    bell = {tuple(np.round(e.ravel(), 12)) for e in ms.bell_povm().effects}
    assert {tuple(np.round(e.ravel(), 12)) for e in out.effects} == bell


def test_incoherent_input_gives_separable_output():
    m = ms.random_incoherent_povm(3, 3, 2)
    for seed in range(5):
        out = cv.convert(m, chn.random_udi_channel(9, seed))
        assert ms.is_separable_effectwise(out) is ms.Separability.DECIDED_TRUE
        assert mo.entanglement_monotone_bracket(out) == mo.ZERO


def test_trivial_measurement_conversion():
    out = cv.cnot_conversion(ms.trivial_povm(2))
    assert out.outcomes == 1
    np.testing.assert_allclose(out.effects[0], np.eye(4), atol=1e-15)
    assert mo.entanglement_monotone_bracket(out) == mo.ZERO


def test_convert_rejects_non_free_channels():
    m = ms.plus_minus_povm()
    h2 = chn.UnitaryChannel(np.kron(chn.hadamard_channel().u, np.eye(2)))
    with pytest.raises(FreeOperationError, match="detection-incoherence"):
        cv.convert(m, h2)
    with pytest.raises(FreeOperationError):
        cv.convert(m, chn.identity_channel(3))


def test_theorem1_examples():
    assert cv.verify_theorem1(ms.plus_minus_povm(), 100, 0)
    assert cv.verify_theorem1(ms.random_povm(2, 2, 3), 100, 1)
    inc = ms.random_incoherent_povm(2, 3, 4)
    for _, c, b in cv.theorem1_sweep(inc, 20, 2):
        assert c == 0.0 and b == mo.ZERO


def test_theorem2_plus_minus():
    r = cv.verify_theorem2(ms.plus_minus_povm())
    assert r.input_cm == pytest.approx(1.0, abs=1e-12)
    assert r.output_em.exact
    assert r.output_em.lower == pytest.approx(1.0, abs=1e-9)
    assert r.regime is cv.Regime.N_GE_D


def test_theorem2_rank_one_informationally_complete_scale():
    m = ms.random_povm(3, 9, 31, rank=1)
    r = cv.verify_theorem2(m)
    assert r.output_em.exact
    assert r.output_em.lower == pytest.approx(r.input_cm, abs=1e-7)


def test_theorem2_fourier_sandwich():
    m = ms.fourier_povm(3, 2)
    r = cv.verify_theorem2(m)
    assert r.regime is cv.Regime.N_LT_D
    assert r.bound_lower == pytest.approx(mo.coherence_monotone(m) / 3)
    assert r.output_em.lower >= r.bound_lower - 1e-8
    assert r.output_em.upper <= r.input_cm + 1e-8


def test_induced_coherence_examples():
    assert cv.induced_coherence(ms.plus_minus_povm(), 10, 0) == pytest.approx(1.0, abs=1e-9)
    assert cv.induced_coherence(ms.random_incoherent_povm(2, 3, 5), 10, 0) == 0.0
    m = ms.random_povm(2, 2, 6)
    assert cv.induced_coherence(m, 10, 0) == pytest.approx(mo.coherence_monotone(m), abs=1e-7)
    with pytest.raises(ValueError):
        cv.induced_coherence(ms.trivial_povm(2), 10, 0)


def test_structural_identities():
    m = ms.random_povm(3, 4, 12)
    assert cv.shift_relabel_residual(m) <= 1e-9
    assert cv.maximally_correlated_violation(m) <= 1e-12
    assert cv.sandwich_gap(ms.random_povm(4, 2, 1)) >= -1e-8


def test_conversion_result_json():
    r = cv.verify_theorem2(ms.plus_minus_povm())
    js = r.to_json()
    assert js["regime"] == "n_ge_d"
    assert js["channel_id"] == "cnot_dagger"
    assert js["output_em"]["exact"] is True
