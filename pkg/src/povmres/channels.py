"""Quantum channels in Kraus form and their action on POVM effects."""
from __future__ import annotations

import math

import numpy as np

from . import operators as ops
from .errors import ValidationError
from .measurement import Povm
from .rng import random_unitary
from .tolerances import CHANNEL_TOL, PREDICATE_TOL


class KrausChannel:
    """CPTP map ``rho -> sum_k K_k rho K_k^dagger``.

    ``kraus`` has shape ``(k, out_dim, in_dim)``.
    """

    def __init__(self, kraus, tol: float = CHANNEL_TOL):
        k = np.array(kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3 or k.shape[0] == 0:
            raise ValidationError(f"Kraus family must have shape (k, out, in), got {k.shape}")
        resid = tp_residual(k)
        if resid > tol:
            raise ValidationError(f"Kraus family is not trace preserving (residual {resid:.3g})")
        k.setflags(write=False)
        self.kraus = k

    @property
    def in_dim(self) -> int:
        return self.kraus.shape[2]

    @property
    def out_dim(self) -> int:
        return self.kraus.shape[1]

    def __repr__(self):
        return f"{type(self).__name__}(in_dim={self.in_dim}, out_dim={self.out_dim}, rank={len(self.kraus)})"

    def to_json(self) -> dict:
        return {
            "in_dim": self.in_dim,
            "out_dim": self.out_dim,
            "kraus": [ops.matrix_entries_to_json(k) for k in self.kraus],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "KrausChannel":
        try:
            mats = [ops.matrix_entries_from_json(k["entries"] if isinstance(k, dict) else k) for k in obj["kraus"]]
        except (KeyError, TypeError):
            raise ValidationError("channel JSON must be an object with a 'kraus' list") from None
        if not mats or len({m.shape for m in mats}) != 1:
            raise ValidationError("Kraus operators must be a nonempty list of equally sized matrices")
        k = np.stack(mats)
        if obj.get("in_dim", k.shape[2]) != k.shape[2] or obj.get("out_dim", k.shape[1]) != k.shape[1]:
            raise ValidationError("declared in_dim/out_dim do not match the Kraus operators")
        return cls(k)


class UnitaryChannel(KrausChannel):
    """Single-Kraus channel ``rho -> U rho U^dagger``."""

    def __init__(self, u, tol: float = CHANNEL_TOL):
        u = np.array(u, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValidationError("unitary must be square")
        resid = float(np.max(np.abs(u.conj().T @ u - np.eye(len(u)))))
        if resid > tol:
            raise ValidationError(f"matrix is not unitary (residual {resid:.3g})")
        super().__init__(u[None], tol)

    @property
    def u(self) -> np.ndarray:
        return self.kraus[0]

    def dagger(self) -> "UnitaryChannel":
        return UnitaryChannel(self.u.conj().T)


def tp_residual(kraus) -> float:
    k = np.asarray(kraus)
    return float(np.max(np.abs(np.einsum("kji,kjl->il", k.conj(), k) - np.eye(k.shape[2]))))


def apply(ch: KrausChannel, rho) -> np.ndarray:
    r = ops.as_matrix(rho)
    if r.shape[0] != ch.in_dim:
        raise ValidationError(f"input dimension {r.shape[0]} does not match channel in_dim {ch.in_dim}")
    k = ch.kraus
    return np.einsum("kij,jl,kml->im", k, r, k.conj())


def adjoint_apply(ch: KrausChannel, effect) -> np.ndarray:
    """Heisenberg-picture action ``M -> sum_k K_k^dagger M K_k``."""
    m = ops.as_matrix(effect)
    if m.shape[0] != ch.out_dim:
        raise ValidationError(f"effect dimension {m.shape[0]} does not match channel out_dim {ch.out_dim}")
    k = ch.kraus
    return np.einsum("kji,jl,klm->im", k.conj(), m, k)


def pre_process(povm: Povm, ch: KrausChannel) -> Povm:
    """The POVM ``M o E`` with effects ``E^dagger(M_x)``.

    The bipartite split is kept only when the channel is square.
    """
    if ch.out_dim != povm.dim:
        raise ValidationError(f"channel out_dim {ch.out_dim} does not match POVM dimension {povm.dim}")
    effects = np.array([adjoint_apply(ch, m) for m in povm.effects])
    dims = povm.dims_split if ch.in_dim == ch.out_dim else None
    return Povm(effects, dims)


def unitality_residual(ch: KrausChannel) -> float:
    if ch.in_dim != ch.out_dim:
        return math.inf
    k = ch.kraus
    return float(np.max(np.abs(np.einsum("kij,klj->il", k, k.conj()) - np.eye(ch.out_dim))))


def is_unital(ch: KrausChannel, tol: float = PREDICATE_TOL) -> bool:
    return unitality_residual(ch) <= tol


def detection_incoherence_residuals(ch: KrausChannel) -> tuple[float, float]:
    """Residuals of the two equivalent detection-incoherence conditions.

    The first probes ``Delta o E = Delta o E o Delta`` on every matrix unit
    ``|i><j|`` (the right side vanishes for ``i != j``).  The second probes
    ``E^dagger o Delta = Delta o E^dagger o Delta`` on every diagonal unit.
    Both are zero exactly for detection-incoherent maps.
    """
    # diag of E(|i><j|) at output index a, for every matrix unit at once
    diag_out = np.einsum("kai,kaj->ija", ch.kraus, ch.kraus.conj())
    din, dout = ch.in_dim, ch.out_dim
    off = ~np.eye(din, dtype=bool)
    forward = float(np.max(np.abs(diag_out[off]))) if din > 1 else 0.0
    adjoint = 0.0
    for a in range(dout):
        unit = np.zeros((dout, dout), dtype=complex)
        unit[a, a] = 1
        lhs = adjoint_apply(ch, unit)
        adjoint = max(adjoint, float(np.max(np.abs(lhs - ops.dephase(lhs)))))
    return forward, adjoint


def is_detection_incoherent(ch: KrausChannel, tol: float = PREDICATE_TOL) -> bool:
    forward, adjoint = detection_incoherence_residuals(ch)
    return forward <= tol and adjoint <= tol


def is_udi(ch: KrausChannel, tol: float = PREDICATE_TOL) -> bool:
    return ch.in_dim == ch.out_dim and is_unital(ch, tol) and is_detection_incoherent(ch, tol)


def superoperator(ch: KrausChannel) -> np.ndarray:
    """Matrix ``S`` with ``vec(E(rho)) = S vec(rho)`` for row-major ``vec``."""
    return np.einsum("kij,klm->iljm", ch.kraus, ch.kraus.conj()).reshape(
        ch.out_dim**2, ch.in_dim**2
    )


def dephasing_superoperator(d: int) -> np.ndarray:
    return np.diag(np.eye(d).ravel()).astype(complex)


def measurement_channel(povm: Povm) -> KrausChannel:
    """Quantum-to-classical map ``X -> sum_x tr(M_x X) |x><x|``.

    Kraus operators are ``|x><k| sqrt(M_x)``.
    """
    n, d = povm.outcomes, povm.dim
    kraus = np.zeros((n * d, n, d), dtype=complex)
    for x, m in enumerate(povm.effects):
        root = ops.sqrt_psd(m)
        for k in range(d):
            kraus[x * d + k, x, :] = root[k, :]
    return KrausChannel(kraus)


def mix_channels(weights, channels) -> KrausChannel:
    """Convex combination of channels with equal input/output dimensions."""
    w = np.asarray(weights, dtype=float)
    if len(w) != len(channels) or np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
        raise ValueError("weights must be a probability vector matching the channels")
    parts = [np.sqrt(p) * ch.kraus for p, ch in zip(w, channels) if p > 0]
    return KrausChannel(np.concatenate(parts))


def identity_channel(d: int) -> UnitaryChannel:
    return UnitaryChannel(np.eye(d))


def dephasing_channel(d: int) -> KrausChannel:
    return KrausChannel(np.array([ops.projector(ops.basis(d, i)) for i in range(d)]))


def hadamard_channel() -> UnitaryChannel:
    return UnitaryChannel(np.array([[1, 1], [1, -1]]) / np.sqrt(2))


def amplitude_damping_channel(gamma: float) -> KrausChannel:
    if not 0 <= gamma <= 1:
        raise ValueError("gamma must lie in [0, 1]")
    k0 = np.diag([1, np.sqrt(1 - gamma)])
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]])
    return KrausChannel([k0, k1])


def cnot_unitary(d: int) -> UnitaryChannel:
    """Generalized CNOT ``|i, j> -> |i, j + i mod d>`` on ``d x d``."""
    if d < 1:
        raise ValueError("d must be positive")
    u = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            u[i * d + (j + i) % d, i * d + j] = 1
    return UnitaryChannel(u)


def cnot_dagger_channel(d: int) -> UnitaryChannel:
    """Pre-processing channel whose adjoint conjugates effects by the CNOT."""
    return cnot_unitary(d).dagger()


def shift_unitary(d: int, y: int) -> UnitaryChannel:
    """Cyclic shift ``|i> -> |i + y mod d>``."""
    if not 0 <= y < d:
        raise ValueError(f"shift {y} out of range for d={d}")
    return UnitaryChannel(np.roll(np.eye(d), y, axis=0))


def random_channel(d_in: int, d_out: int, seed, rank: int = 2) -> KrausChannel:
    """Random CPTP map from a Haar-random Stinespring isometry."""
    if d_out * rank < d_in:
        raise ValueError(f"rank {rank} too small for a {d_in} -> {d_out} channel")
    rng = np.random.default_rng(seed)
    v = random_unitary(d_out * rank, rng)[:, :d_in]
    return KrausChannel(v.reshape(rank, d_out, d_in))


def random_unital_channel(d: int, seed, terms: int = 3) -> KrausChannel:
    """Random mixture of Haar unitaries (unital, generally coherent)."""
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(terms))
    return mix_channels(w, [UnitaryChannel(random_unitary(d, rng)) for _ in range(terms)])


def _perm_phase(d: int, rng) -> UnitaryChannel:
    perm = rng.permutation(d)
    phases = np.exp(2j * np.pi * rng.random(d))
    return UnitaryChannel(np.eye(d)[perm] * phases)


def _cnot_family(s: int, rng) -> UnitaryChannel:
    choice = rng.integers(4)
    if choice == 0:
        u = cnot_unitary(s).u
    elif choice == 1:
        u = cnot_unitary(s).dagger().u
    elif choice == 2:
        u = np.kron(np.eye(s), shift_unitary(s, int(rng.integers(s))).u)
    else:
        u = np.kron(shift_unitary(s, int(rng.integers(s))).u, np.eye(s))
    phases = np.exp(2j * np.pi * rng.random(s * s))
    return UnitaryChannel(phases[:, None] * u)


def random_udi_channel(d: int, seed) -> KrausChannel:
    """Random unital detection-incoherent channel on dimension ``d``.

    Mixes phased permutations of the incoherent basis, full dephasing and,
    when ``d`` is a perfect square, phased CNOT/shift permutations.  Every
    member is UDI by construction.
    """
    if d < 1:
        raise ValueError("d must be positive")
    rng = np.random.default_rng(seed)
    s = math.isqrt(d)
    families = ["perm", "dephase"] + (["cnot"] if s * s == d and s > 1 else [])
    terms = int(rng.integers(1, 4))
    parts = []
    for _ in range(terms):
        kind = families[int(rng.integers(len(families)))]
        if kind == "perm":
            parts.append(_perm_phase(d, rng))
        elif kind == "dephase":
            parts.append(dephasing_channel(d))
        else:
            parts.append(_cnot_family(s, rng))
    return mix_channels(rng.dirichlet(np.ones(terms)), parts)
