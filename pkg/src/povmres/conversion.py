"""Conversion of measurement coherence into bipartite measurement entanglement.

A measurement ``M`` on ``d`` dimensions is paired with a canonical incoherent
ancilla measurement on a second ``d``-dimensional system, and the product is
pre-processed by a unital detection-incoherent (UDI) channel.  With the
CNOT-dagger channel the resulting entanglement equals the coherence of ``M``
whenever it has at least ``d`` outcomes.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import channels as chn
from . import operators as ops
from .errors import FreeOperationError, TheoremViolation
from .measurement import Povm, tensor_povm
from .monotones import (
    Bracket,
    coherence_monotone,
    entanglement_monotone_bracket,
    entanglement_relative_entropy_bracket,
)
from .rng import generator

log = logging.getLogger(__name__)

CNOT_ID = "cnot_dagger"


class Regime(enum.Enum):
    N_GE_D = "n_ge_d"
    N_LT_D = "n_lt_d"


@dataclass(frozen=True)
class ConversionResult:
    input_cm: float
    output_em: Bracket
    channel_id: str
    regime: Regime
    bound_lower: float
    bound_upper: float

    def to_json(self) -> dict:
        return {
            "input_cm": self.input_cm,
            "output_em": self.output_em.to_json(),
            "channel_id": self.channel_id,
            "regime": self.regime.value,
            "bound_lower": self.bound_lower,
            "bound_upper": self.bound_upper,
        }


def regime(d: int, n: int) -> Regime:
    return Regime.N_GE_D if n >= d else Regime.N_LT_D


def lower_bound_factor(d: int, n: int) -> float:
    """Guaranteed fraction of the coherence recovered by the CNOT conversion."""
    return 1.0 if n >= d else (n - 1) / d


def ancilla_incoherent_povm(d: int, n: int) -> Povm:
    """Canonical incoherent ancilla with ``n`` outcomes on ``d`` dimensions.

    For ``n >= d`` this is the computational basis padded with zero effects;
    for ``n < d`` the last effect collects the remaining basis projectors.
    """
    if d < 1 or n < 1:
        raise ValueError("need d >= 1 and n >= 1")
    e = np.zeros((n, d, d), dtype=complex)
    if n >= d:
        for x in range(d):
            e[x, x, x] = 1
    else:
        for x in range(n - 1):
            e[x, x, x] = 1
        e[n - 1] = np.eye(d) - e[: n - 1].sum(axis=0)
    return Povm(e)


def convert(m: Povm, ch: chn.KrausChannel, ancilla: Povm | None = None) -> Povm:
    """Bipartite POVM ``{E^dagger(M_x (x) E_y)}`` built with a free channel ``ch``."""
    d, n = m.dim, m.outcomes
    if ch.in_dim != d * d or ch.out_dim != d * d:
        raise FreeOperationError(f"channel must act on dimension {d * d}, got {ch.in_dim}->{ch.out_dim}")
    unital = chn.unitality_residual(ch)
    forward, adjoint = chn.detection_incoherence_residuals(ch)
    if max(unital, forward, adjoint) > 1e-9:
        raise FreeOperationError(
            "channel is not unital detection-incoherent "
            f"(unitality {unital:.3e}, detection-incoherence {forward:.3e}/{adjoint:.3e})"
        )
    if ancilla is None:
        ancilla = ancilla_incoherent_povm(d, n)
    elif ancilla.dim != d:
        raise ValueError("ancilla must act on the same dimension as the measurement")
    return chn.pre_process(tensor_povm(m, ancilla), ch).with_dims((d, d))


def cnot_conversion(m: Povm) -> Povm:
    return convert(m, chn.cnot_dagger_channel(m.dim))


def theorem1_sweep(m: Povm, trials: int, seed: int) -> list[tuple[int, float, Bracket]]:
    """``(trial, C_m, E_m bracket)`` for conversions with ``trials`` sampled UDI channels."""
    c = coherence_monotone(m)
    out = []
    for t in range(trials):
        ch = chn.random_udi_channel(m.dim**2, generator(seed, "udi", t))
        out.append((t, c, entanglement_monotone_bracket(convert(m, ch))))
    return out


def verify_theorem1(m: Povm, trials: int, seed: int) -> bool:
    """Entanglement of every sampled free conversion stays below the coherence."""
    if trials < 1:
        raise ValueError("trials must be positive")
    for t, c, b in theorem1_sweep(m, trials, seed):
        if b.lower > c + 1e-8 or (b.exact and b.upper > c + 1e-8):
            log.info("theorem 1 fails at trial %d: C_m=%.12g, E_m=%s", t, c, b)
            return False
    return True


def verify_theorem2(m: Povm) -> ConversionResult:
    """Convert with the CNOT-dagger channel and check the proven bounds.

    Raises :class:`TheoremViolation` if the equality (``n >= d``) or the
    sandwich (``n < d``) fails numerically.
    """
    d, n = m.dim, m.outcomes
    c = coherence_monotone(m)
    em = entanglement_monotone_bracket(cnot_conversion(m))
    reg = regime(d, n)
    result = ConversionResult(c, em, CNOT_ID, reg, lower_bound_factor(d, n) * c, c)
    if reg is Regime.N_GE_D:
        if not em.exact:
            raise TheoremViolation(f"bracket not exact for n >= d: {em}")
        if abs(em.lower - c) > 1e-7 or abs(em.upper - c) > 1e-7:
            raise TheoremViolation(f"E_m {em} differs from C_m {c}")
    else:
        if em.lower < result.bound_lower - 1e-8:
            raise TheoremViolation(f"E_m lower {em.lower} below {result.bound_lower}")
        if em.upper > c + 1e-8:
            raise TheoremViolation(f"E_m upper {em.upper} above C_m {c}")
    return result


def induced_coherence(m: Povm, sample_budget: int, seed: int) -> float:
    """Best certified entanglement over CNOT-dagger and ``sample_budget`` UDI conversions.

    This is a lower bound on the supremum over all UDI channels; with at
    least ``d`` outcomes it already equals the coherence.
    """
    if m.outcomes <= 1:
        raise ValueError("induced coherence needs more than one outcome")
    best = entanglement_monotone_bracket(cnot_conversion(m)).lower
    for t in range(sample_budget):
        ch = chn.random_udi_channel(m.dim**2, generator(seed, "induced", t))
        best = max(best, entanglement_monotone_bracket(convert(m, ch)).lower)
    return best


def shift_relabel_residual(m: Povm) -> float:
    """Spread of per-effect E_R brackets across ancilla outcomes ``y < d``.

    Conjugating ``M_x (x) |y><y|`` by the CNOT equals a local shift of the
    ``y = 0`` image, so the brackets must coincide.
    """
    d = m.dim
    u = chn.cnot_unitary(d).u
    worst = 0.0
    for mx in m.effects:
        vals = []
        for y in range(d):
            x = u @ np.kron(mx, ops.projector(ops.basis(d, y))) @ u.conj().T
            b = entanglement_relative_entropy_bracket(x, (d, d))
            vals.append((b.lower, b.upper))
        arr = np.array(vals)
        worst = max(worst, float(np.max(arr.max(axis=0) - arr.min(axis=0))))
    return worst


def maximally_correlated_violation(m: Povm) -> float:
    """Largest entry of a CNOT-converted effect outside the shifted correlated pattern."""
    d, n = m.dim, m.outcomes
    conv = cnot_conversion(m)
    anc = ancilla_incoherent_povm(d, n)
    worst = 0.0
    for x in range(n):
        for y in range(n):
            support = [k for k in range(d) if abs(anc.effects[y, k, k]) > 0]
            mask = np.zeros((d * d, d * d), dtype=bool)
            for s in support:
                idx = [ia * d + (ia + s) % d for ia in range(d)]
                mask[np.ix_(idx, idx)] = True
            eff = conv.effects[x * n + y]
            if (~mask).any():
                worst = max(worst, float(np.max(np.abs(eff[~mask]))))
    return worst


def sandwich_gap(m: Povm) -> float:
    """Observed ``E_m lower - (n-1)/d C_m`` for the CNOT conversion (diagnostic only)."""
    c = coherence_monotone(m)
    b = entanglement_monotone_bracket(cnot_conversion(m))
    return b.lower - lower_bound_factor(m.dim, m.outcomes) * c if math.isfinite(b.lower) else math.nan
