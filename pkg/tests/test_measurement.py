import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from povmres import measurement as ms
from povmres.errors import ValidationError

PLUS = np.full((2, 2), 0.5)
MINUS = np.array([[0.5, -0.5], [-0.5, 0.5]])
KET0 = np.diag([1.0, 0.0])
KET1 = np.diag([0.0, 1.0])


def test_born_rule_examples():
    np.testing.assert_allclose(ms.apply_statistics(ms.computational_povm(2), PLUS), [0.5, 0.5])
    np.testing.assert_allclose(ms.apply_statistics(ms.trivial_povm(3), np.eye(3) / 3), [1.0])
    np.testing.assert_allclose(ms.apply_statistics(ms.plus_minus_povm(), KET0), [0.5, 0.5])


def test_plus_minus_effects():
    np.testing.assert_allclose(ms.plus_minus_povm().effects, [PLUS, MINUS], atol=1e-15)


def test_incompleteness_is_reported():
    effects = np.array([KET0, 0.9 * KET1])
    problems = ms.diagnose(effects)
    assert [p.invariant for p in problems] == ["completeness"]
    assert problems[0].residual == pytest.approx(0.1)
    with pytest.raises(ValidationError, match="completeness"):
        ms.Povm(effects)


def test_negative_effect_is_reported():
    effects = np.array([np.diag([1.2, 0.5]), np.diag([-0.2, 0.5])])
    assert any(p.invariant == "positivity" and p.index == 1 for p in ms.diagnose(effects))


def test_incoherence_examples():
    half = np.diag([0.5, 0.5])
    assert ms.is_incoherent(ms.Povm([half, half]))
    assert not ms.is_incoherent(ms.plus_minus_povm())
    assert not ms.is_incoherent(ms.bell_povm())


def test_separability_examples():
    assert ms.is_separable_effectwise(ms.bell_povm()) is ms.Separability.DECIDED_FALSE
    scaled = ms.Povm([np.eye(4) / 4, 3 * np.eye(4) / 4], dims_split=(2, 2))
    assert ms.is_separable_effectwise(scaled) is ms.Separability.DECIDED_TRUE
    inc = ms.random_incoherent_povm(4, 3, 8, dims_split=(2, 2))
    assert ms.is_separable_effectwise(inc) is ms.Separability.DECIDED_TRUE


def test_separability_undecided_beyond_ppt_range():
    # isotropic-like mixture in 3x3: PPT (partial transpose eigenvalues >= 1/9 - 0.01/3)
    # and full rank, so no exact certificate applies
    phi = np.zeros(9)
    phi[[0, 4, 8]] = 1 / np.sqrt(3)
    x = np.eye(9) / 9 + 0.01 * np.outer(phi, phi)
    assert ms.effect_separability(x, (3, 3)) is ms.Separability.UNDECIDED
    assert ms.effect_separability(np.outer(phi, phi), (3, 3)) is ms.Separability.DECIDED_FALSE


def test_post_processing_examples():
    m = ms.random_povm(2, 3, 4)
    assert ms.post_process(m, ms.StochasticMap.identity(3)).allclose(m)
    merged = ms.post_process(m, ms.StochasticMap(np.ones((1, 3))))
    np.testing.assert_allclose(merged.effects, [np.eye(2)], atol=1e-12)
    uniform = ms.post_process(ms.computational_povm(2), ms.StochasticMap(np.full((2, 2), 0.5)))
    np.testing.assert_allclose(uniform.effects, [np.eye(2) / 2] * 2)


def test_stochastic_map_validation():
    with pytest.raises(ValidationError):
        ms.StochasticMap([[0.5, 1.0], [0.4, 0.0]])
    with pytest.raises(ValidationError):
        ms.StochasticMap([[1.5, 1.0], [-0.5, 0.0]])


def test_random_povm_examples():
    p = ms.random_povm(2, 2, 7)
    assert np.max(np.abs(p.effects.sum(axis=0) - np.eye(2))) <= 1e-9
    scalars = ms.random_povm(1, 3, 0)
    assert scalars.effects.shape == (3, 1, 1)
    assert np.all(scalars.effects.real >= 0)
    assert scalars.effects.sum() == pytest.approx(1.0)
    assert ms.random_povm(3, 2, 1).dim == 3


def test_random_povm_is_seeded():
    np.testing.assert_array_equal(ms.random_povm(3, 4, 12).effects, ms.random_povm(3, 4, 12).effects)


def test_bell_povm_projectors():
    b = ms.bell_povm()
    for e in b.effects:
        np.testing.assert_allclose(e @ e, e, atol=1e-15)
        assert np.trace(e).real == pytest.approx(1.0)


def test_tensor_povm_ordering():
    t = ms.tensor_povm(ms.computational_povm(2), ms.plus_minus_povm())
    np.testing.assert_allclose(t.effects[1], np.kron(KET0, MINUS))
    np.testing.assert_allclose(t.effects[2], np.kron(KET1, PLUS))
    assert t.dims_split == (2, 2)


def test_povm_json_round_trip():
    p = ms.random_povm(3, 2, 5).with_dims(None)
    q = ms.Povm.from_json(p.to_json())
    np.testing.assert_array_equal(p.effects, q.effects)


def test_fourier_povm_bins():
    f = ms.fourier_povm(3, 2)
    assert f.outcomes == 2
    # the first bin holds Fourier projectors k=0 and k=2
    np.testing.assert_allclose(np.trace(f.effects[0]).real, 2.0)
    assert not ms.is_incoherent(f)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 4), n=st.integers(1, 5), k=st.integers(1, 4))
def test_post_processing_preserves_validity(seed, d, n, k):
    m = ms.random_povm(d, n, seed)
    s = ms.StochasticMap.random(k, n, seed + 1)
    out = ms.post_process(m, s)
    assert out.outcomes == k
    assert not ms.diagnose(out.effects)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 4), n=st.integers(1, 5))
def test_statistics_are_probabilities(seed, d, n):
    rng = np.random.default_rng(seed)
    m = ms.random_povm(d, n, rng)
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    p = ms.apply_statistics(m, np.outer(v, v.conj()) / np.vdot(v, v).real)
    assert np.all(p >= -1e-12)
    assert p.sum() == pytest.approx(1.0, abs=1e-10)
