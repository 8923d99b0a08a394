"""Dense Hermitian operator kernel.

Entropies and relative entropies are in bits and are defined for
unnormalized positive semidefinite operators.  Bipartite operators use
row-major subsystem ordering: basis index ``iA * dB + iB``.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, ValidationError
from .tolerances import EIG_CUTOFF, PSD_TOL, SUPP_TOL, TOL_HERM


class HermitianOperator:
    """Immutable Hermitian matrix with an optional bipartite split.

    Behaves as an array through ``__array__``, so every function in this
    module accepts it interchangeably with a plain ``ndarray``.
    """

    __slots__ = ("entries", "dims_split")

    def __init__(self, entries, dims_split: tuple[int, int] | None = None, tol: float = TOL_HERM):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"operator must be square, got shape {m.shape}")
        dev = hermiticity_deviation(m)
        if dev > tol:
            raise ValidationError(f"operator is not Hermitian (max deviation {dev:.3g})")
        if dims_split is not None:
            dims_split = (int(dims_split[0]), int(dims_split[1]))
            if dims_split[0] * dims_split[1] != m.shape[0]:
                raise ValidationError(f"dims_split {dims_split} does not factor dimension {m.shape[0]}")
        m = (m + m.conj().T) / 2
        m.setflags(write=False)
        self.entries = m
        self.dims_split = dims_split

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim}, dims_split={self.dims_split})"


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # columns


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    return a


def dims_of(m, dims=None) -> tuple[int, int]:
    if dims is None:
        dims = getattr(m, "dims_split", None)
    if dims is None:
        raise ValidationError("bipartite operation requires dims_split")
    return int(dims[0]), int(dims[1])


def hermiticity_deviation(m) -> float:
    a = np.asarray(m)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)))


def _hermitian(m, tol: float = TOL_HERM) -> np.ndarray:
    a = as_matrix(m)
    dev = hermiticity_deviation(a)
    if dev > tol:
        raise ValidationError(f"operator is not Hermitian (max deviation {dev:.3g})")
    return (a + a.conj().T) / 2


def spectrum(m) -> Spectrum:
    """Eigendecomposition with eigenvalues sorted in descending order."""
    w, v = np.linalg.eigh(_hermitian(m))
    return Spectrum(w[::-1], v[:, ::-1])


def _clamped_eigvals(m, tol: float = PSD_TOL) -> np.ndarray:
    w = np.linalg.eigvalsh(_hermitian(m))
    if w.size and w[0] < -tol:
        raise DomainError(f"operator has negative eigenvalue {w[0]:.3g}")
    return np.where(w > EIG_CUTOFF, w, 0.0)


def validate_psd(m, tol: float = PSD_TOL) -> bool:
    """True iff the Hermitian matrix ``m`` has no eigenvalue below ``-tol``."""
    w = np.linalg.eigvalsh(_hermitian(m))
    return bool(w.size == 0 or w[0] >= -tol)


def _xlogx(w: np.ndarray) -> float:
    w = w[w > EIG_CUTOFF]
    return float(np.sum(w * np.log2(w)))


def von_neumann_entropy(m) -> float:
    """-sum(l log2 l) over the eigenvalues of a PSD operator; not normalized."""
    s = -_xlogx(_clamped_eigvals(m))
    return 0.0 if s == 0 else s


def relative_entropy(m, n) -> float:
    """Quantum relative entropy tr M(log2 M - log2 N) of PSD operators.

    Returns ``math.inf`` when the image of ``m`` is not contained in the
    image of ``n``.
    """
    a, b = _hermitian(m), _hermitian(n)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    wa = _clamped_eigvals(a)
    if not np.any(wa):
        return 0.0
    wb, vb = np.linalg.eigh(b)
    if wb[0] < -PSD_TOL:
        raise DomainError(f"operator has negative eigenvalue {wb[0]:.3g}")
    support = wb > EIG_CUTOFF
    kernel = vb[:, ~support]
    if kernel.shape[1]:
        leak = kernel.conj().T @ a @ kernel
        if np.max(np.abs(leak)) > SUPP_TOL:
            return math.inf
    vs = vb[:, support]
    diag = np.einsum("ij,jk,ki->i", vs.conj().T, a, vs).real
    cross = float(np.sum(diag * np.log2(wb[support])))
    return _xlogx(wa) - cross


def dephase(m) -> np.ndarray:
    """Zero every off-diagonal entry in the computational basis."""
    a = as_matrix(m)
    return np.diag(np.diag(a))


def tensor(m, n) -> HermitianOperator:
    a, b = as_matrix(m), as_matrix(n)
    return HermitianOperator(np.kron(a, b), dims_split=(a.shape[0], b.shape[0]))


def partial_trace(m, keep="A", dims=None) -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    ``keep`` selects the surviving subsystem: ``"A"``/``0`` or ``"B"``/``1``.
    """
    dA, dB = dims_of(m, dims)
    t = as_matrix(m).reshape(dA, dB, dA, dB)
    if keep in ("A", 0):
        return np.einsum("ijkj->ik", t)
    if keep in ("B", 1):
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_transpose(m, dims=None, system="B") -> np.ndarray:
    dA, dB = dims_of(m, dims)
    t = as_matrix(m).reshape(dA, dB, dA, dB)
    if system in ("B", 1):
        t = t.transpose(0, 3, 2, 1)
    elif system in ("A", 0):
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"system must be 'A' or 'B', got {system!r}")
    return t.reshape(dA * dB, dA * dB)


def direct_sum_relative_entropy(ms: Sequence, ns: Sequence) -> float:
    """Relative entropy of block-diagonal operators, summed block by block."""
    if len(ms) != len(ns):
        raise ValidationError(f"length mismatch: {len(ms)} vs {len(ns)}")
    total = 0.0
    for a, b in zip(ms, ns):
        d = relative_entropy(a, b)
        if d == math.inf:
            return math.inf
        total += d
    return total


def projector(v) -> np.ndarray:
    """Rank-one projector |v><v| (``v`` is normalized first)."""
    v = np.asarray(v, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def basis(d: int, i: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[i] = 1
    return e


def inv_sqrt_psd(m) -> np.ndarray:
    w, v = np.linalg.eigh(_hermitian(m))
    if w[0] <= EIG_CUTOFF:
        raise DomainError("matrix is singular")
    return (v / np.sqrt(w)) @ v.conj().T


def sqrt_psd(m) -> np.ndarray:
    w, v = np.linalg.eigh(_hermitian(m))
    w = np.where(w > 0, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def to_json(m, dims_split=None) -> dict:
    """Serialize a matrix as ``{"dim", "dims_split", "entries"}`` with [re, im] pairs."""
    a = as_matrix(m)
    if dims_split is None:
        dims_split = getattr(m, "dims_split", None)
    return {
        "dim": a.shape[0],
        "dims_split": None if dims_split is None else [int(dims_split[0]), int(dims_split[1])],
        "entries": matrix_entries_to_json(a),
    }


def matrix_entries_to_json(a: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a, dtype=complex)]


def matrix_entries_from_json(entries) -> np.ndarray:
    """Row-major ``[re, im]`` pairs; a plain real matrix is also accepted."""
    arr = np.asarray(entries, dtype=float)
    if arr.ndim == 2:
        return arr.astype(complex)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValidationError("matrix entries must be a 2-D array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def from_json(obj: dict) -> HermitianOperator:
    a = matrix_entries_from_json(obj["entries"])
    if "dim" in obj and a.shape[0] != obj["dim"]:
        raise ValidationError(f"declared dim {obj['dim']} does not match entries {a.shape}")
    return HermitianOperator(a, dims_split=obj.get("dims_split"))
