"""Seeded property suites behind ``povmres suite``.

Each property is a function of a generator returning a nonnegative
residual; an instance passes when the residual is at most the property's
tolerance.  Instance ``i`` of property ``p`` draws from
``generator(seed, p, i)``, so results do not depend on execution order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import channels as chn
from . import conversion as cv
from . import measurement as ms
from . import monotones as mo
from . import operators as ops
from .rng import generator, random_density, random_psd, random_unitary

FAIL = math.inf


@dataclass(frozen=True)
class Property:
    name: str
    check: Callable[[np.random.Generator], float]
    tol: float


@dataclass(frozen=True)
class PropertyOutcome:
    name: str
    passed: int
    total: int
    max_residual: float
    tol: float
    failing_instance: int | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "passed": self.passed,
            "total": self.total,
            "max_residual": self.max_residual if math.isfinite(self.max_residual) else None,
            "tol": self.tol,
            "failing_instance": self.failing_instance,
            "error": self.error,
        }


def _pick(rng, seq):
    return seq[int(rng.integers(len(seq)))]


def _dn(rng):
    return _pick(rng, (2, 3)), _pick(rng, (2, 3, 4))


def _pair(rng):
    d, n = _dn(rng)
    return ms.random_povm(d, n, rng), ms.random_povm(d, n, rng)


def _random_separable(dims, rng, terms=3):
    dA, dB = dims
    w = rng.random(terms) + 0.1
    return sum(wi * np.kron(random_psd(dA, rng), random_psd(dB, rng)) for wi in w)


# operator core


def scaling_identity(rng):
    d = _pick(rng, (2, 3, 4))
    p = random_psd(d, rng, rank=int(rng.integers(1, d + 1)))
    q = random_psd(d, rng)
    a, b = rng.uniform(0.1, 3, size=2)
    lhs = ops.relative_entropy(a * p, b * q)
    rhs = a * ops.relative_entropy(p, q) + a * math.log2(a / b) * np.trace(p).real
    return abs(lhs - rhs)


def subadditivity(rng):
    d = _pick(rng, (2, 3, 4))
    p0, p1, q0, q1 = (random_psd(d, rng) for _ in range(4))
    gap = ops.relative_entropy(p0 + p1, q0 + q1) - ops.relative_entropy(p0, q0) - ops.relative_entropy(p1, q1)
    return max(gap, 0.0)


def unitary_invariance(rng):
    d = _pick(rng, (2, 3, 4))
    m, n = random_psd(d, rng), random_psd(d, rng)
    u = random_unitary(d, rng)
    rot = ops.relative_entropy(u @ m @ u.conj().T, u @ n @ u.conj().T)
    return abs(rot - ops.relative_entropy(m, n))


def dephasing_entropy(rng):
    d = _pick(rng, (2, 3, 4))
    m = random_psd(d, rng, rank=int(rng.integers(1, d + 1)))
    idem = float(np.max(np.abs(ops.dephase(ops.dephase(m)) - ops.dephase(m))))
    return max(ops.von_neumann_entropy(m) - ops.von_neumann_entropy(ops.dephase(m)), idem, 0.0)


def reduction_map(rng):
    dims = _pick(rng, ((2, 2), (2, 3)))
    x = random_psd(dims[0] * dims[1], rng)
    y = _random_separable(dims, rng)
    s = ops.von_neumann_entropy(x)
    dxy = ops.relative_entropy(x, y)
    worst = 0.0
    for keep in ("A", "B"):
        xs, ys = ops.partial_trace(x, keep, dims), ops.partial_trace(y, keep, dims)
        gap = ops.von_neumann_entropy(xs) - s - (dxy - ops.relative_entropy(xs, ys))
        worst = max(worst, gap)
    return worst


# measurement


def incoherent_post_processing(rng):
    d, n = _dn(rng)
    p = ms.random_incoherent_povm(d, n, rng)
    s = ms.StochasticMap.random(_pick(rng, (1, 2, 3, 5)), n, rng)
    return ms.max_off_diagonal(ms.post_process(p, s))


def separable_post_processing(rng):
    p = ms.tensor_povm(ms.random_povm(2, 2, rng), ms.random_povm(2, 2, rng))
    s = ms.StochasticMap.random(_pick(rng, (2, 3, 4)), 4, rng)
    return 0.0 if ms.is_separable_effectwise(ms.post_process(p, s)) is ms.Separability.DECIDED_TRUE else FAIL


def statistics_ignore_coherence(rng):
    d, n = _dn(rng)
    p = ms.random_incoherent_povm(d, n, rng)
    rho = random_density(d, rng)
    return float(np.max(np.abs(ms.apply_statistics(p, rho) - ms.apply_statistics(p, ops.dephase(rho)))))


def post_processing_composition(rng):
    d, n = _dn(rng)
    p = ms.random_povm(d, n, rng)
    k = _pick(rng, (2, 3))
    s1 = ms.StochasticMap.random(k, n, rng)
    s2 = ms.StochasticMap.random(_pick(rng, (2, 3)), k, rng)
    twice = ms.post_process(ms.post_process(p, s1), s2)
    once = ms.post_process(p, s2 @ s1)
    return float(np.max(np.abs(twice.effects - once.effects)))


# channels


def adjoint_duality(rng):
    d = _pick(rng, (2, 3, 4))
    d_out = _pick(rng, (2, 3))
    ch = chn.random_channel(d, d_out, rng, rank=-(-d // d_out) + int(rng.integers(2)))
    m = random_psd(ch.out_dim, rng)
    rho = random_density(d, rng)
    lhs = np.trace(m @ chn.apply(ch, rho))
    rhs = np.trace(chn.adjoint_apply(ch, m) @ rho)
    return abs(lhs - rhs)


def pre_processing_validity(rng):
    d, n = _dn(rng)
    p = ms.random_povm(d, n, rng)
    ch = chn.random_channel(_pick(rng, (2, 3)), d, rng)
    effects = np.array([chn.adjoint_apply(ch, m) for m in p.effects])
    return 0.0 if not ms.diagnose(effects) else FAIL


def udi_preserves_incoherence(rng):
    d, n = _pick(rng, (2, 3, 4)), _pick(rng, (2, 3, 4))
    ch = chn.random_udi_channel(d, rng)
    if not chn.is_udi(ch):
        return FAIL
    return ms.max_off_diagonal(chn.pre_process(ms.random_incoherent_povm(d, n, rng), ch))


def classical_iff_incoherent(rng):
    d, n = _dn(rng)
    worst = 0.0
    for p, incoherent in ((ms.random_incoherent_povm(d, n, rng), True), (ms.random_povm(d, n, rng), False)):
        s = chn.superoperator(chn.measurement_channel(p))
        din, dout = chn.dephasing_superoperator(d), chn.dephasing_superoperator(n)
        worst = max(worst, float(np.max(np.abs(dout @ s - s))))
        classical = float(np.max(np.abs(dout @ s @ din - s)))
        if incoherent:
            worst = max(worst, classical)
        elif classical <= 1e-6 or ms.is_incoherent(p, 1e-6):
            return FAIL
    return worst


def bipartite_incoherent_separable(rng):
    dims = _pick(rng, ((2, 2), (2, 3), (3, 3)))
    p = ms.random_incoherent_povm(dims[0] * dims[1], _pick(rng, (2, 3, 4)), rng, dims)
    return 0.0 if ms.is_separable_effectwise(p) is ms.Separability.DECIDED_TRUE else FAIL


# measurement relative entropy


def lemma_faithfulness(rng):
    m, n = _pair(rng)
    dmn = mo.measurement_relative_entropy(m, n)
    if dmn <= 1e-8 and np.max(np.abs(m.effects - n.effects)) > 1e-8:
        return FAIL
    return max(-dmn, abs(mo.measurement_relative_entropy(m, m)))


def lemma_unital(rng):
    m, n = _pair(rng)
    ch = chn.random_unital_channel(m.dim, rng)
    after = mo.measurement_relative_entropy(chn.pre_process(m, ch), chn.pre_process(n, ch))
    return max(after - mo.measurement_relative_entropy(m, n), 0.0)


def lemma_unitary(rng):
    m, n = _pair(rng)
    ch = chn.UnitaryChannel(random_unitary(m.dim, rng))
    after = mo.measurement_relative_entropy(chn.pre_process(m, ch), chn.pre_process(n, ch))
    return abs(after - mo.measurement_relative_entropy(m, n))


def lemma_post_processing(rng):
    m, n = _pair(rng)
    s = ms.StochasticMap.random(_pick(rng, (1, 2, 3, 4)), m.outcomes, rng)
    after = mo.measurement_relative_entropy(ms.post_process(m, s), ms.post_process(n, s))
    return max(after - mo.measurement_relative_entropy(m, n), 0.0)


def lemma_additivity(rng):
    m, k = _pair(rng)
    n, l = _pair(rng)
    joint = mo.measurement_relative_entropy(ms.tensor_povm(m, n), ms.tensor_povm(k, l))
    return abs(joint - mo.measurement_relative_entropy(m, k) - mo.measurement_relative_entropy(n, l))


def lemma_convexity(rng):
    d, n = _dn(rng)
    m, nn, k, l = (ms.random_povm(d, n, rng) for _ in range(4))
    p = rng.random()
    lhs = mo.measurement_relative_entropy(ms.mix_povms(p, m, nn), ms.mix_povms(p, k, l))
    rhs = p * mo.measurement_relative_entropy(m, k) + (1 - p) * mo.measurement_relative_entropy(nn, l)
    return max(lhs - rhs, 0.0)


# coherence


def coherence_monotonicity(rng):
    d, n = _dn(rng)
    m = ms.random_povm(d, n, rng)
    ch = chn.random_udi_channel(d, rng)
    s = ms.StochasticMap.random(_pick(rng, (1, 2, 3, 4)), n, rng)
    after = mo.coherence_monotone(ms.post_process(chn.pre_process(m, ch), s))
    return max(after - mo.coherence_monotone(m), 0.0)


def coherence_faithfulness(rng):
    d, n = _dn(rng)
    inc = ms.random_incoherent_povm(d, n, rng)
    coh = ms.random_povm(d, n, rng)
    if mo.coherence_monotone(coh) <= 1e-8 or ms.is_incoherent(coh, 1e-6):
        return FAIL
    return mo.coherence_monotone(inc)


def coherence_closed_form(rng):
    d, n = _dn(rng)
    m = ms.random_povm(d, n, rng)
    if not mo.coherence_oracle_check(m, 50, rng):
        return FAIL
    return abs(mo.coherence_monotone(m) - mo.measurement_relative_entropy(m, ms.dephased(m)))


# conversion theorems


def theorem1(rng):
    d = _pick(rng, (2, 3))
    m = ms.random_povm(d, _pick(rng, (2, 3, 4)), rng)
    c = mo.coherence_monotone(m)
    b = mo.entanglement_monotone_bracket(cv.convert(m, chn.random_udi_channel(d * d, rng)))
    return max(b.lower - c, (b.upper - c) if b.exact else 0.0, 0.0)


def theorem2_equality(rng):
    d = _pick(rng, (2, 3))
    n = _pick(rng, (d, d + 1, d * d))
    m = ms.random_povm(d, n, rng, rank=_pick(rng, (None, 1)))
    c = mo.coherence_monotone(m)
    b = mo.entanglement_monotone_bracket(cv.cnot_conversion(m))
    if not b.exact:
        return FAIL
    return abs(cv.induced_coherence(m, 2, int(rng.integers(2**31))) - c)


def theorem2_sandwich(rng):
    d, n = _pick(rng, ((3, 2), (4, 2), (4, 3)))
    m = ms.random_povm(d, n, rng)
    c = mo.coherence_monotone(m)
    b = mo.entanglement_monotone_bracket(cv.cnot_conversion(m))
    return max(cv.lower_bound_factor(d, n) * c - b.lower, b.upper - c, 0.0)


def theorem3_induced(rng):
    d, n = _dn(rng)
    inc = ms.random_incoherent_povm(d, n, rng)
    m = ms.random_povm(d, n, rng)
    zero = cv.induced_coherence(inc, 2, int(rng.integers(2**31)))
    excess = cv.induced_coherence(m, 2, int(rng.integers(2**31))) - mo.coherence_monotone(m)
    return max(abs(zero), excess, 0.0)


def shift_relabel(rng):
    d = _pick(rng, (2, 3))
    return cv.shift_relabel_residual(ms.random_povm(d, _pick(rng, (2, 3)), rng))


def correlated_pattern(rng):
    d = _pick(rng, (2, 3, 4))
    return cv.maximally_correlated_violation(ms.random_povm(d, _pick(rng, (2, 3, 4)), rng))


def bracket_consistency(rng):
    dims = _pick(rng, ((2, 2), (2, 3), (3, 3)))
    x = random_psd(dims[0] * dims[1], rng, rank=_pick(rng, (1, 2, None)))
    b = mo.entanglement_relative_entropy_bracket(x, dims)
    y = _random_separable(dims, rng)
    y = y * np.trace(x).real / np.trace(y).real
    # any trace-matched separable operator is a feasible point
    return max(b.lower - b.upper, b.lower - ops.relative_entropy(x, y), 0.0)


PROPERTIES = [
    Property("relative entropy scaling", scaling_identity, 1e-8),
    Property("relative entropy subadditivity", subadditivity, 1e-8),
    Property("relative entropy unitary invariance", unitary_invariance, 1e-8),
    Property("dephasing entropy monotonicity", dephasing_entropy, 1e-9),
    Property("reduction-map bound", reduction_map, 1e-8),
    Property("incoherence closed under post-processing", incoherent_post_processing, 1e-12),
    Property("separability closed under post-processing", separable_post_processing, 0.0),
    Property("incoherent statistics ignore coherence", statistics_ignore_coherence, 1e-10),
    Property("post-processing composition", post_processing_composition, 1e-10),
    Property("adjoint duality", adjoint_duality, 1e-10),
    Property("pre-processing preserves validity", pre_processing_validity, 0.0),
    Property("UDI channels preserve incoherence", udi_preserves_incoherence, 1e-9),
    Property("measurement channel classical iff incoherent", classical_iff_incoherent, 1e-10),
    Property("bipartite incoherent measurements are separable", bipartite_incoherent_separable, 0.0),
    Property("D_m nonnegativity and faithfulness", lemma_faithfulness, 1e-8),
    Property("D_m monotone under unital pre-processing", lemma_unital, 1e-8),
    Property("D_m invariant under unitary pre-processing", lemma_unitary, 1e-8),
    Property("D_m monotone under post-processing", lemma_post_processing, 1e-8),
    Property("D_m additive under tensor products", lemma_additivity, 1e-8),
    Property("D_m jointly convex", lemma_convexity, 1e-8),
    Property("C_m monotone under free operations", coherence_monotonicity, 1e-8),
    Property("C_m faithfulness", coherence_faithfulness, 1e-8),
    Property("C_m closed form is the minimum", coherence_closed_form, 1e-9),
    Property("E_m at most C_m under free conversion", theorem1, 1e-8),
    Property("CNOT conversion attains C_m when n >= d", theorem2_equality, 1e-7),
    Property("CNOT conversion sandwich when n < d", theorem2_sandwich, 1e-8),
    Property("induced coherence bounds", theorem3_induced, 1e-7),
    Property("shift-relabel symmetry", shift_relabel, 1e-9),
    Property("maximally correlated pattern", correlated_pattern, 1e-12),
    Property("E_R bracket consistency", bracket_consistency, 1e-8),
]


def _instance(prop: Property, seed: int, i: int) -> tuple[float, str | None]:
    try:
        r = float(prop.check(generator(seed, prop.name, i)))
    except Exception as exc:  # a crash is a failed instance, reported by name
        return FAIL, f"{type(exc).__name__}: {exc}"
    return (FAIL if math.isnan(r) else r), None


def run_property(prop: Property, seed: int, trials: int) -> PropertyOutcome:
    passed, worst, failing, error = 0, 0.0, None, None
    for i in range(trials):
        r, err = _instance(prop, seed, i)
        worst = max(worst, r)
        if r <= prop.tol:
            passed += 1
        elif failing is None:
            failing, error = i, err
    return PropertyOutcome(prop.name, passed, trials, worst, prop.tol, failing, error)


def run_suite(seed: int = 0, trials: int = 100, jobs: int = 1, properties=None) -> list[PropertyOutcome]:
    """Run every property; outcomes come back in the canonical property order."""
    if seed < 0 or trials < 1:
        raise ValueError("seed must be nonnegative and trials positive")
    props = PROPERTIES if properties is None else properties
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(lambda p: run_property(p, seed, trials), props))
    return [run_property(p, seed, trials) for p in props]
