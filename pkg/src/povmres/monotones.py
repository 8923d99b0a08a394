"""Measurement relative entropy and the coherence/entanglement monotones.

The entanglement quantities are reported as certified brackets because the
relative entropy of entanglement of a mixed operator has no closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .errors import ValidationError
from .measurement import Povm, Separability, effect_separability, random_incoherent_povm
from .tolerances import BRACKET_TOL, EIG_CUTOFF


@dataclass(frozen=True)
class Bracket:
    lower: float
    upper: float
    exact: bool

    def __post_init__(self):
        if self.lower > self.upper + 1e-9:
            raise ValueError(f"inverted bracket ({self.lower}, {self.upper})")

    @classmethod
    def from_bounds(cls, lower: float, upper: float, exact: bool | None = None) -> "Bracket":
        if exact is None:
            exact = upper - lower <= BRACKET_TOL
        return cls(float(lower), float(upper), bool(exact))

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact}


ZERO = Bracket(0.0, 0.0, True)


def measurement_relative_entropy(m: Povm, n: Povm) -> float:
    """``(1/d) sum_x D(M_x || N_x)`` with ``d`` the full Hilbert-space dimension."""
    if m.effects.shape != n.effects.shape:
        raise ValidationError(
            f"POVM shapes differ: {m.outcomes}x{m.dim} vs {n.outcomes}x{n.dim}"
        )
    return ops.direct_sum_relative_entropy(m.effects, n.effects) / m.dim


def coherence_contributions(m: Povm) -> list[float]:
    """Per-effect coherence ``S(Delta M_x) - S(M_x)``."""
    return [ops.von_neumann_entropy(ops.dephase(e)) - ops.von_neumann_entropy(e) for e in m.effects]


def coherence_monotone(m: Povm) -> float:
    """Closed-form coherence of a measurement, ``(1/d) sum_x [S(Delta M_x) - S(M_x)]``."""
    return max(math.fsum(coherence_contributions(m)) / m.dim, 0.0)


def coherence_oracle_check(m: Povm, trials: int, seed) -> bool:
    """Check the closed form against ``trials`` random incoherent POVMs.

    The closed form is a minimum over incoherent measurements, so it must
    not exceed the measurement relative entropy to any of them.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    c = coherence_monotone(m)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        f = random_incoherent_povm(m.dim, m.outcomes, rng, m.dims_split)
        if c > measurement_relative_entropy(m, f) + 1e-9:
            return False
    return True


def conditional_entropy_bound(x, dims=None) -> float:
    """``max{S(X_A) - S(X), S(X_B) - S(X), 0}``, a lower bound on E_R(X)."""
    s = ops.von_neumann_entropy(x)
    sa = ops.von_neumann_entropy(ops.partial_trace(x, "A", dims))
    sb = ops.von_neumann_entropy(ops.partial_trace(x, "B", dims))
    return max(sa - s, sb - s, 0.0)


def pure_entanglement(x, dims=None) -> float | None:
    """``p S(tr_B psi)`` when ``x = p |psi><psi|`` is rank one, else ``None``."""
    dA, dB = ops.dims_of(x, dims)
    w, v = np.linalg.eigh(ops.as_matrix(x))
    if len(w) > 1 and w[-2] > EIG_CUTOFF:
        return None
    p = w[-1]
    sv = np.linalg.svd(v[:, -1].reshape(dA, dB), compute_uv=False) ** 2
    return float(p * ops.von_neumann_entropy(np.diag(sv)))


def entanglement_relative_entropy_bracket(x, dims=None) -> Bracket:
    """Bracket on the relative entropy of entanglement of a PSD operator.

    The separable candidate for the upper bound is the fully dephased
    operator, which is trace matched by construction.
    """
    dims = ops.dims_of(x, dims)
    a = ops.as_matrix(x)
    if not np.any(np.linalg.eigvalsh(a) > EIG_CUTOFF):
        return ZERO
    pure = pure_entanglement(a, dims)
    if pure is not None:
        return Bracket.from_bounds(pure, pure, True)
    if effect_separability(a, dims) is Separability.DECIDED_TRUE:
        return ZERO
    lower = conditional_entropy_bound(a, dims)
    upper = ops.relative_entropy(a, ops.dephase(a))
    if lower - 1e-9 <= upper < lower:
        upper = lower
    return Bracket.from_bounds(lower, upper)


def effect_brackets(m: Povm) -> list[Bracket]:
    if m.dims_split is None:
        raise ValidationError("entanglement requires a bipartite POVM (dims_split)")
    return [entanglement_relative_entropy_bracket(e, m.dims_split) for e in m.effects]


def entanglement_monotone_bracket(m: Povm) -> Bracket:
    """Bracket on the entanglement of a bipartite measurement.

    The minimization over separable measurements is decoupled across
    effects, so the bracket is the sum of per-effect brackets over ``dim``.
    """
    parts = effect_brackets(m)
    lower = math.fsum(b.lower for b in parts) / m.dim
    upper = math.fsum(b.upper for b in parts) / m.dim
    return Bracket.from_bounds(lower, upper, all(b.exact for b in parts))
