"""Correlation coefficients and small least-squares polynomial fits."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from .qubo import ContractError


def _pair(xs, ys, min_len=2):
    x = np.asarray(xs, dtype=np.float64).reshape(-1)
    y = np.asarray(ys, dtype=np.float64).reshape(-1)
    if x.shape != y.shape:
        raise ContractError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < min_len:
        raise ContractError(f"need at least {min_len} points, got {x.size}")
    return x, y


def pearson(xs, ys) -> float:
    x, y = _pair(xs, ys)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ContractError("undefined correlation: constant input")
    r = float(dx @ dy) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


def spearman(xs, ys) -> float:
    """Spearman rank correlation, ties receive their average rank."""
    x, y = _pair(xs, ys)
    return pearson(rankdata(x, method="average"), rankdata(y, method="average"))


def fit_poly(xs, ys, degree: int) -> tuple[np.ndarray, float]:
    """Least-squares polynomial of degree 1 or 2 via the normal equations.

    Returns coefficients in ascending order (``c0 + c1 x + c2 x^2``) and r^2.
    ``x`` is mean-centered before solving; r^2 is 0 when ``y`` is constant.
    """
    if degree not in (1, 2):
        raise ContractError(f"degree must be 1 or 2, got {degree}")
    x, y = _pair(xs, ys, min_len=degree + 1)
    xm = x.mean()
    t = x - xm
    design = np.vander(t, degree + 1, increasing=True)
    gram = design.T @ design
    rhs = design.T @ y
    if np.linalg.matrix_rank(gram) < degree + 1:
        raise ContractError("singular system: not enough distinct x values")
    b = np.linalg.solve(gram, rhs)

    # re-expand sum b_k (x - xm)^k around zero
    coeffs = np.zeros(degree + 1)
    for k, bk in enumerate(b):
        poly = np.polynomial.polynomial.polypow([-xm, 1.0], k)
        coeffs[: len(poly)] += bk * poly

    resid = y - design @ b
    ss_res = float(resid @ resid)
    dy = y - y.mean()
    ss_tot = float(dy @ dy)
    r2 = 0.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return coeffs, r2
