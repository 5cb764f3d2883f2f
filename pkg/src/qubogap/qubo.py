"""QUBO and Ising representations, energy evaluation and the QUBO text format.

Binary vectors are 0-based. When a state is packed into an integer, bit ``i``
holds variable ``z_i`` (variable 0 is the least significant bit); this packing
fixes the state order used throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class ContractError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


def _as_matrix(q, name="q") -> np.ndarray:
    m = np.array(q, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ContractError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractError(f"{name} has non-finite entries")
    return m


@dataclass(frozen=True)
class QuboInstance:
    """Upper-triangular coefficient matrix of ``f(z) = sum_{i<=j} Q_ij z_i z_j``."""

    q: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.q)
        if np.any(np.tril(m, -1) != 0.0):
            raise ContractError("QUBO matrix must be upper triangular")
        m.setflags(write=False)
        object.__setattr__(self, "q", m)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @classmethod
    def from_any(cls, m) -> "QuboInstance":
        """Fold an arbitrary square matrix onto its upper triangle (same energies)."""
        m = _as_matrix(m)
        return cls(np.triu(m) + np.triu(m.T, 1))

    def symmetric_offdiag(self) -> np.ndarray:
        """Matrix S with S_ij = S_ji = Q_min(i,j),max(i,j) for i != j and zero diagonal."""
        u = np.triu(self.q, 1)
        return u + u.T

    def __eq__(self, other):
        if not isinstance(other, QuboInstance):
            return NotImplemented
        return self.q.shape == other.q.shape and bool(np.array_equal(self.q, other.q))

    __hash__ = None


@dataclass(frozen=True)
class IsingInstance:
    """Spin form ``sum_{i<j} J_ij s_i s_j + sum_i h_i s_i + c`` over s in {-1,+1}^n."""

    j: np.ndarray
    h: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        j = _as_matrix(self.j, "j")
        h = np.array(self.h, dtype=np.float64).reshape(-1)
        if h.shape[0] != j.shape[0]:
            raise ContractError("h length must match coupling matrix size")
        if np.any(np.tril(j) != 0.0):
            raise ContractError("coupling matrix must be strictly upper triangular")
        if not (np.all(np.isfinite(h)) and math.isfinite(self.c)):
            raise ContractError("Ising parameters must be finite")
        j.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "c", float(self.c))

    @property
    def n(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True)
class SpectrumSummary:
    """Low end of the (distinct-valued) spectrum of a QUBO energy function.

    ``gap`` and ``second_energy`` are ``None`` when every state has the same
    energy. ``ground_state`` is the ground state with the smallest packed index.
    """

    min_energy: float
    second_energy: Optional[float]
    gap: Optional[float]
    ground_degeneracy: int
    ground_state: tuple = field(default=())

    def __post_init__(self):
        if (self.gap is None) != (self.second_energy is None):
            raise ContractError("gap present iff second_energy present")
        if self.gap is not None and not self.gap > 0:
            raise ContractError("gap must be positive")
        if self.ground_degeneracy < 1:
            raise ContractError("ground degeneracy must be at least 1")

    def as_dict(self) -> dict:
        return {
            "min_energy": self.min_energy,
            "second_energy": self.second_energy,
            "gap": self.gap,
            "ground_degeneracy": self.ground_degeneracy,
            "ground_state": list(self.ground_state),
        }


def _binary_vector(z, n: int) -> np.ndarray:
    v = np.asarray(z)
    if v.ndim != 1 or v.shape[0] != n:
        raise ContractError(f"expected binary vector of length {n}, got shape {v.shape}")
    if not np.all((v == 0) | (v == 1)):
        raise ContractError("binary vector entries must be 0 or 1")
    return v.astype(np.float64)


def energy(q: QuboInstance, z) -> float:
    """Evaluate ``sum_{i<=j} Q_ij z_i z_j``."""
    v = _binary_vector(z, q.n)
    return float(v @ q.q @ v)


def flip_delta(q: QuboInstance, z, i: int) -> float:
    """Energy change caused by flipping bit ``i`` of ``z``."""
    v = _binary_vector(z, q.n)
    if not 0 <= i < q.n:
        raise ContractError(f"index {i} out of range for n={q.n}")
    local = q.q[i, i] + q.q[:i, i] @ v[:i] + q.q[i, i + 1:] @ v[i + 1:]
    return float((1.0 - 2.0 * v[i]) * local)


def ising_energy(model: IsingInstance, s) -> float:
    v = np.asarray(s, dtype=np.float64)
    if v.shape != (model.n,) or not np.all(np.abs(v) == 1.0):
        raise ContractError(f"expected spin vector of length {model.n} with entries +-1")
    return float(v @ model.j @ v + model.h @ v + model.c)


def to_ising(q: QuboInstance) -> IsingInstance:
    """Substitute ``z = (s + 1) / 2``; the constant offset is kept in ``c``."""
    diag = np.diag(q.q)
    upper = np.triu(q.q, 1)
    sym = upper + upper.T
    h = diag / 2.0 + sym.sum(axis=1) / 4.0
    c = diag.sum() / 2.0 + upper.sum() / 4.0
    return IsingInstance(j=upper / 4.0, h=h, c=c)


def from_symmetric(m, linear=None, constant_discarded: bool = True) -> QuboInstance:
    """Build the QUBO whose energy equals ``z^T M z + linear^T z``.

    Any constant accompanying the symmetric form is not representable in a
    :class:`QuboInstance`; ``constant_discarded`` documents that it was dropped
    and must be true.
    """
    if not constant_discarded:
        raise ContractError("QuboInstance carries no constant; constant_discarded must be True")
    m = _as_matrix(m, "m")
    n = m.shape[0]
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.T)) > 1e-12 * scale:
        raise ContractError("matrix is not symmetric within tolerance")
    lin = np.zeros(n) if linear is None else np.asarray(linear, dtype=np.float64).reshape(-1)
    if lin.shape[0] != n:
        raise ContractError("linear term length must match matrix size")
    sym = (m + m.T) / 2.0
    q = 2.0 * np.triu(sym, 1)
    q[np.diag_indices(n)] = np.diag(sym) + lin
    return QuboInstance(q)


def max_abs_entry(q: QuboInstance) -> float:
    return float(np.max(np.abs(q.q)))


def normalize_inf(q: QuboInstance) -> QuboInstance:
    """Scale ``q`` so that its largest absolute entry is exactly 1."""
    scale = max_abs_entry(q)
    if scale == 0.0:
        raise ContractError("degenerate instance, cannot normalize")
    out = q.q / scale
    # division by the max entry itself is exact, so the peak entry lands on +-1
    return QuboInstance(out)


# -- text format -------------------------------------------------------------

def format_qubo(q: QuboInstance) -> str:
    lines = [str(q.n)]
    rows, cols = np.nonzero(q.q)
    for i, j in zip(rows.tolist(), cols.tolist()):
        lines.append(f"{i} {j} {float(q.q[i, j]):.17g}")
    return "\n".join(lines) + "\n"


def parse_qubo(text: str) -> QuboInstance:
    """Parse the ``n`` / ``i j value`` text format (0-based, ``#`` comments)."""
    n = None
    q = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if n is None:
                if len(parts) != 1:
                    raise ValueError("first line must hold n")
                n = int(parts[0])
                if n < 1:
                    raise ValueError("n must be positive")
                q = np.zeros((n, n))
                continue
            if len(parts) != 3:
                raise ValueError("expected 'i j value'")
            i, j, value = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ContractError(f"line {lineno}: {exc}") from None
        if not (0 <= i <= j < n):
            raise ContractError(f"line {lineno}: indices ({i}, {j}) must satisfy 0 <= i <= j < {n}")
        q[i, j] = value
    if q is None:
        raise ContractError("empty QUBO file")
    return QuboInstance(q)


def write_qubo(q: QuboInstance, path) -> None:
    Path(path).write_text(format_qubo(q))


def read_qubo(path) -> QuboInstance:
    return parse_qubo(Path(path).read_text())


def state_bits(index: int, n: int) -> tuple:
    """Unpack a state index into its binary vector (bit i -> variable i)."""
    return tuple((index >> i) & 1 for i in range(n))


def state_index(z: Sequence[int]) -> int:
    return sum(int(b) << i for i, b in enumerate(z))
