"""QUBO embeddings of kernel 2-means clustering and the binary-coefficient SVM dual."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .kernels import KernelMatrix
from .qubo import ContractError, QuboInstance, from_symmetric


@dataclass(frozen=True)
class SvmHyperparams:
    c: float
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise ContractError(f"C must be positive, got {self.c}")
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ContractError(f"lambda must be nonnegative, got {self.lam}")


def clustering_qubo(km: KernelMatrix) -> QuboInstance:
    """QUBO for ``min_z 1^T K z - z^T K z``.

    The energy of ``z`` is the total kernel similarity between the points with
    ``z_i = 1`` and those with ``z_i = 0``.
    """
    if km.n < 2:
        raise ContractError("clustering needs at least 2 points")
    if not km.centered:
        warnings.warn("clustering_qubo called with an uncentered kernel matrix", stacklevel=2)
    k = km.k
    return from_symmetric(-k, k.sum(axis=0))


def svm_qubo(km: KernelMatrix, labels, hp: SvmHyperparams) -> QuboInstance:
    """QUBO for ``min_z -1^T z + C z^T (0.5 (Y*K) + lam Y) z`` with ``Y = y y^T``."""
    y = np.asarray(labels)
    if y.shape != (km.n,):
        raise ContractError(f"expected {km.n} labels, got shape {y.shape}")
    if not np.all((y == -1) | (y == 1)):
        raise ContractError("labels must be -1 or +1")
    y = y.astype(np.float64)
    yy = np.outer(y, y)
    m = hp.c * (0.5 * yy * km.k + hp.lam * yy)
    return from_symmetric(m, -np.ones(km.n))
