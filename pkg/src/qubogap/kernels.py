"""Gram matrices for the linear kernel and the circles feature-map kernel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datagen import DataSet
from .qubo import ContractError


@dataclass(frozen=True)
class KernelMatrix:
    k: np.ndarray
    centered: bool = False

    def __post_init__(self):
        k = np.array(self.k, dtype=np.float64)
        if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] < 1:
            raise ContractError(f"kernel matrix must be square, got shape {k.shape}")
        if not np.all(np.isfinite(k)):
            raise ContractError("kernel matrix has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(k))))
        if np.max(np.abs(k - k.T)) > 1e-12 * scale:
            raise ContractError("kernel matrix is not symmetric")
        k.setflags(write=False)
        object.__setattr__(self, "k", k)

    @property
    def n(self) -> int:
        return self.k.shape[0]


def gram_linear(data: DataSet) -> KernelMatrix:
    x = data.points
    k = x @ x.T
    return KernelMatrix((k + k.T) / 2.0)


def kernel_circles(x, y, a: float = 1.0) -> float:
    """``<x, y> + a^2 |x|^2 |y|^2``, the inner product of ``(x1, x2, a|x|^2)`` maps."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return float(x @ y + a * a * (x @ x) * (y @ y))


def gram_circles(data: DataSet, a: float = 1.0) -> KernelMatrix:
    if not a > 0:
        raise ContractError(f"a must be positive, got {a}")
    x = data.points
    sq = (x * x).sum(axis=1)
    k = x @ x.T + a * a * np.outer(sq, sq)
    return KernelMatrix((k + k.T) / 2.0)


def center_kernel(km: KernelMatrix) -> KernelMatrix:
    """Double centering ``H K H`` with ``H = I - 11^T / n``."""
    k = km.k
    row = k.mean(axis=1, keepdims=True)
    col = k.mean(axis=0, keepdims=True)
    out = k - row - col + k.mean()
    return KernelMatrix((out + out.T) / 2.0, centered=True)
