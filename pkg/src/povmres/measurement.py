"""POVMs, classical post-processing and the free-set predicates."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import operators as ops
from .errors import ValidationError
from .rng import ginibre, random_stochastic
from .tolerances import COMPLETENESS_TOL, EIG_CUTOFF, PREDICATE_TOL, PSD_TOL, STOCHASTIC_TOL, TOL_HERM

log = logging.getLogger(__name__)


class Diagnostic(NamedTuple):
    """One violated POVM invariant."""

    invariant: str
    index: int | None
    residual: float

    def __str__(self):
        where = "" if self.index is None else f" (effect {self.index})"
        return f"{self.invariant}{where}: residual {self.residual:.3e}"


def diagnose(effects, dims_split=None, psd_tol: float = PSD_TOL) -> list[Diagnostic]:
    """List every POVM invariant violated by ``effects``; empty when valid."""
    e = np.asarray(effects, dtype=complex)
    out = []
    if e.ndim != 3 or e.shape[1] != e.shape[2] or e.shape[0] < 1:
        return [Diagnostic("shape", None, float("nan"))]
    d = e.shape[1]
    for x, m in enumerate(e):
        dev = ops.hermiticity_deviation(m)
        if dev > TOL_HERM:
            out.append(Diagnostic("hermiticity", x, dev))
            continue
        lo = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        if lo < -psd_tol:
            out.append(Diagnostic("positivity", x, -lo))
    resid = float(np.max(np.abs(e.sum(axis=0) - np.eye(d))))
    if resid > COMPLETENESS_TOL:
        out.append(Diagnostic("completeness", None, resid))
    if dims_split is not None and int(dims_split[0]) * int(dims_split[1]) != d:
        out.append(Diagnostic("dims_split", None, float(abs(int(dims_split[0]) * int(dims_split[1]) - d))))
    return out


@dataclass(frozen=True, eq=False)
class Povm:
    """Ordered list of ``outcomes`` PSD effects on a ``dim``-dimensional space."""

    effects: np.ndarray
    dims_split: tuple[int, int] | None = None

    def __post_init__(self):
        e = np.array(self.effects, dtype=complex)
        if e.ndim == 2 and e.shape[0] == e.shape[1] == 1:
            e = e.reshape(-1, 1, 1)
        problems = diagnose(e, self.dims_split)
        if problems:
            raise ValidationError("invalid POVM: " + "; ".join(map(str, problems)))
        e = (e + e.conj().transpose(0, 2, 1)) / 2
        e.setflags(write=False)
        object.__setattr__(self, "effects", e)
        if self.dims_split is not None:
            object.__setattr__(self, "dims_split", (int(self.dims_split[0]), int(self.dims_split[1])))

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    @property
    def outcomes(self) -> int:
        return self.effects.shape[0]

    def __len__(self):
        return self.outcomes

    def __iter__(self):
        return iter(self.effects)

    def __getitem__(self, x):
        return self.effects[x]

    def with_dims(self, dims_split) -> "Povm":
        return Povm(self.effects, dims_split)

    def allclose(self, other: "Povm", atol: float = 1e-9) -> bool:
        return self.effects.shape == other.effects.shape and bool(
            np.max(np.abs(self.effects - other.effects)) <= atol
        )

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "outcomes": self.outcomes,
            "dims_split": None if self.dims_split is None else list(self.dims_split),
            "effects": [ops.to_json(m, self.dims_split) for m in self.effects],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Povm":
        effects, dims = povm_arrays_from_json(obj)
        return cls(effects, dims)


def povm_arrays_from_json(obj: dict):
    """Parse POVM JSON into ``(effects, dims_split)`` without validating invariants."""
    try:
        raw = obj["effects"]
    except (KeyError, TypeError):
        raise ValidationError("POVM JSON must be an object with an 'effects' list") from None
    mats = []
    for m in raw:
        entries = m["entries"] if isinstance(m, dict) else m
        mats.append(ops.matrix_entries_from_json(entries))
    if not mats or len({a.shape for a in mats}) != 1:
        raise ValidationError("effects must be a nonempty list of equally sized matrices")
    effects = np.stack(mats)
    if "dim" in obj and obj["dim"] != effects.shape[1]:
        raise ValidationError(f"declared dim {obj['dim']} does not match effects {effects.shape[1:]}")
    if "outcomes" in obj and obj["outcomes"] != effects.shape[0]:
        raise ValidationError(f"declared outcomes {obj['outcomes']} but found {effects.shape[0]} effects")
    dims = obj.get("dims_split")
    return effects, None if dims is None else (int(dims[0]), int(dims[1]))


@dataclass(frozen=True, eq=False)
class StochasticMap:
    """Classical channel ``probs[y, x] = p(y|x)``; columns sum to one."""

    probs: np.ndarray = field()

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 2:
            raise ValidationError("stochastic map must be a matrix")
        if np.any(p < 0):
            raise ValidationError("stochastic map has negative entries")
        resid = np.max(np.abs(p.sum(axis=0) - 1)) if p.size else 0.0
        if resid > STOCHASTIC_TOL:
            raise ValidationError(f"columns of stochastic map do not sum to 1 (residual {resid:.3g})")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def rows(self) -> int:
        return self.probs.shape[0]

    @property
    def cols(self) -> int:
        return self.probs.shape[1]

    def __matmul__(self, other: "StochasticMap") -> "StochasticMap":
        """``s2 @ s1`` applies ``s1`` first."""
        p = self.probs @ other.probs
        return StochasticMap(p / p.sum(axis=0))

    @classmethod
    def identity(cls, n: int) -> "StochasticMap":
        return cls(np.eye(n))

    @classmethod
    def random(cls, rows: int, cols: int, seed) -> "StochasticMap":
        p = random_stochastic(rows, cols, np.random.default_rng(seed))
        return cls(p / p.sum(axis=0))


def apply_statistics(povm: Povm, rho) -> np.ndarray:
    """Born-rule outcome probabilities ``tr(rho M_x)``."""
    r = ops.as_matrix(rho)
    if r.shape[0] != povm.dim:
        raise ValidationError(f"state dimension {r.shape[0]} does not match POVM dimension {povm.dim}")
    if not ops.validate_psd(r) or abs(np.trace(r) - 1) > 1e-9:
        raise ValidationError("rho is not a density matrix")
    return np.einsum("xij,ji->x", povm.effects, r).real


def is_incoherent(povm: Povm, tol: float = PREDICATE_TOL) -> bool:
    return max_off_diagonal(povm) <= tol


def max_off_diagonal(povm: Povm) -> float:
    e = povm.effects
    off = e * (1 - np.eye(povm.dim))
    return float(np.max(np.abs(off))) if off.size else 0.0


class Separability(enum.Enum):
    DECIDED_TRUE = "decided-true"
    DECIDED_FALSE = "decided-false"
    UNDECIDED = "undecided"


def effect_separability(x, dims=None, tol: float = PSD_TOL) -> Separability:
    """Certify separability of one PSD bipartite operator.

    Zero and diagonal operators are separable outright.  A negative partial
    transpose decides entangled in any dimension; a PPT operator is decided
    separable in 2x2 and 2x3, or when it is rank one with Schmidt rank one.
    """
    dA, dB = ops.dims_of(x, dims)
    a = ops.as_matrix(x)
    tr = np.trace(a).real
    if tr <= EIG_CUTOFF:
        return Separability.DECIDED_TRUE
    a = a / tr
    if min(dA, dB) == 1 or np.max(np.abs(a - np.diag(np.diag(a)))) <= tol:
        return Separability.DECIDED_TRUE
    if np.linalg.eigvalsh(ops.partial_transpose(a, (dA, dB)))[0] < -tol:
        return Separability.DECIDED_FALSE
    w, v = np.linalg.eigh(a)
    if w[-2] <= EIG_CUTOFF:
        sv = np.linalg.svd(v[:, -1].reshape(dA, dB), compute_uv=False)
        return Separability.DECIDED_TRUE if sv[1] <= 1e-7 else Separability.DECIDED_FALSE
    if dA * dB <= 6:
        return Separability.DECIDED_TRUE
    return Separability.UNDECIDED


def is_separable_effectwise(povm: Povm, tol: float = PSD_TOL) -> Separability:
    """Combine per-effect certificates: any false wins, then any undecided."""
    if povm.dims_split is None:
        raise ValidationError("separability requires a bipartite POVM (dims_split)")
    verdicts = {effect_separability(m, povm.dims_split, tol) for m in povm.effects}
    for v in (Separability.DECIDED_FALSE, Separability.UNDECIDED):
        if v in verdicts:
            return v
    return Separability.DECIDED_TRUE


def post_process(povm: Povm, s: StochasticMap) -> Povm:
    """Mix effects: ``M'_y = sum_x p(y|x) M_x``."""
    if s.cols != povm.outcomes:
        raise ValidationError(f"stochastic map expects {s.cols} outcomes, POVM has {povm.outcomes}")
    return Povm(np.einsum("yx,xij->yij", s.probs, povm.effects), povm.dims_split)


def dephased(povm: Povm) -> Povm:
    """The incoherent POVM ``{Delta M_x}``."""
    return Povm(np.array([ops.dephase(m) for m in povm.effects]), povm.dims_split)


def tensor_povm(m: Povm, n: Povm) -> Povm:
    """Product measurement with effects ``M_x (x) N_y`` at index ``x * |N| + y``."""
    e = np.einsum("xij,ykl->xyikjl", m.effects, n.effects)
    e = e.reshape(m.outcomes * n.outcomes, m.dim * n.dim, m.dim * n.dim)
    return Povm(e, (m.dim, n.dim))


def mix_povms(p: float, m: Povm, n: Povm) -> Povm:
    if not 0 <= p <= 1:
        raise ValueError("mixing weight must lie in [0, 1]")
    if m.effects.shape != n.effects.shape:
        raise ValidationError("POVMs must have equal dimension and outcome count")
    return Povm(p * m.effects + (1 - p) * n.effects, m.dims_split)


def random_povm(d: int, n: int, seed, rank: int | None = None) -> Povm:
    """Random POVM ``S^-1/2 G_x G_x^dagger S^-1/2`` from Ginibre matrices ``G_x``.

    ``rank`` fixes the rank of every effect (``None`` for full rank).
    """
    if d < 1 or n < 1:
        raise ValueError("need d >= 1 and n >= 1")
    r = d if rank is None else rank
    if r * n < d:
        raise ValueError(f"{n} effects of rank {r} cannot span dimension {d}")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        gs = [ginibre(d, r, rng) for _ in range(n)]
        raw = np.array([g @ g.conj().T for g in gs])
        total = raw.sum(axis=0)
        if np.linalg.eigvalsh(total)[0] > 1e-8:
            break
        log.debug("singular frame operator, redrawing")
    else:
        raise RuntimeError("could not draw a nonsingular frame")
    t = ops.inv_sqrt_psd(total)
    return Povm(np.einsum("ij,xjk,kl->xil", t, raw, t))


def random_incoherent_povm(d: int, n: int, seed, dims_split=None) -> Povm:
    """Diagonal effects whose diagonals are random probability columns."""
    rng = np.random.default_rng(seed)
    p = random_stochastic(n, d, rng)
    p = p / p.sum(axis=0)
    e = np.zeros((n, d, d), dtype=complex)
    idx = np.arange(d)
    e[:, idx, idx] = p
    return Povm(e, dims_split)


def computational_povm(d: int, dims_split=None) -> Povm:
    return Povm(np.array([ops.projector(ops.basis(d, i)) for i in range(d)]), dims_split)


def trivial_povm(d: int) -> Povm:
    return Povm(np.eye(d)[None])


def plus_minus_povm() -> Povm:
    s = 1 / np.sqrt(2)
    return Povm(np.array([ops.projector([s, s]), ops.projector([s, -s])]))


def bell_vectors() -> dict[str, np.ndarray]:
    s = 1 / np.sqrt(2)
    return {
        "phi+": np.array([s, 0, 0, s]),
        "phi-": np.array([s, 0, 0, -s]),
        "psi+": np.array([0, s, s, 0]),
        "psi-": np.array([0, s, -s, 0]),
    }


def bell_povm() -> Povm:
    return Povm(np.array([ops.projector(v) for v in bell_vectors().values()]), (2, 2))


def fourier_povm(d: int, n: int) -> Povm:
    """Fourier-basis projectors grouped into ``n`` bins by ``k mod n``."""
    if not 1 <= n <= d:
        raise ValueError("need 1 <= n <= d")
    f = np.exp(2j * np.pi * np.outer(np.arange(d), np.arange(d)) / d) / np.sqrt(d)
    e = np.zeros((n, d, d), dtype=complex)
    for k in range(d):
        e[k % n] += np.outer(f[:, k], f[:, k].conj())
    return Povm(e)
