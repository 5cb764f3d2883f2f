"""Seeded synthetic two-class datasets: Cones and Circles.

Randomness comes from numpy's Philox4x64 counter-based bit generator keyed by
the 64-bit seed (plus a stream number in the upper key word), so every draw is
a pure function of ``(seed, stream, counter)``. Gaussian noise is produced by
the inverse normal CDF (``scipy.special.ndtri``) applied to uniforms on the
open interval (0, 1).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from .qubo import ContractError

MASK64 = (1 << 64) - 1

STREAM_DATA = 0
STREAM_SWEEP = 1
STREAM_SWEEP2 = 2


def make_rng(seed: int, stream: int = STREAM_DATA) -> np.random.Generator:
    """Philox generator keyed by ``seed`` (low 64 bits) and ``stream`` (high 64 bits)."""
    if not 0 <= seed <= MASK64:
        raise ContractError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.Philox(key=(stream << 64) | seed))


def open_uniforms(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniforms on (0, 1) built from 53-bit integers: (k + 0.5) / 2^53."""
    k = rng.integers(0, 1 << 53, size=size, dtype=np.int64)
    return (k.astype(np.float64) + 0.5) / float(1 << 53)


@dataclass(frozen=True)
class DataSet:
    points: np.ndarray
    labels: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        lab = np.array(self.labels).astype(np.int64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ContractError(f"points must have shape (n, 2), got {pts.shape}")
        if lab.shape != (pts.shape[0],):
            raise ContractError("labels length must match number of points")
        if pts.shape[0] < 2:
            raise ContractError("a dataset needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise ContractError("points must be finite")
        if not np.all((lab == -1) | (lab == 1)):
            raise ContractError("labels must be -1 or +1")
        pts.setflags(write=False)
        lab.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class ConesParams:
    n: int
    rho: float
    w: float
    d: float
    seed: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ContractError(f"cones needs integer n >= 2, got {self.n}")
        if not 0.0 < self.rho < 1.0:
            raise ContractError(f"rho must lie in (0, 1), got {self.rho}")
        if not (math.isfinite(self.w) and self.w > 0.0):
            raise ContractError(f"w must be positive, got {self.w}")
        if not (math.isfinite(self.d) and self.d >= 0.0):
            raise ContractError(f"d must be nonnegative, got {self.d}")
        if not 0 <= self.seed <= MASK64:
            raise ContractError("seed must be a 64-bit unsigned integer")

    @property
    def n1(self) -> int:
        return cluster_size(self.n, self.rho)


@dataclass(frozen=True)
class CirclesParams:
    n: int
    r: float
    sigma: float
    a: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 4 or self.n % 2:
            raise ContractError(f"circles needs an even n >= 4, got {self.n}")
        if not 0.0 < self.r < 1.0:
            raise ContractError(f"r must lie in (0, 1), got {self.r}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0.0):
            raise ContractError(f"sigma must be nonnegative, got {self.sigma}")
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise ContractError(f"a must be positive, got {self.a}")
        if not 0 <= self.seed <= MASK64:
            raise ContractError("seed must be a 64-bit unsigned integer")


def cluster_size(n: int, rho: float) -> int:
    """Size of the first (label -1) cone cluster, clamped so both are nonempty."""
    return min(max(1, math.floor(rho * n)), n - 1)


def sample_triangular(u, w):
    """Inverse CDF of the symmetric triangular distribution on [0, 2w] with mode w."""
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any((u_arr < 0.0) | (u_arr > 1.0)) or not np.all(np.isfinite(u_arr)):
        raise ContractError("u must lie in [0, 1]")
    if not w > 0:
        raise ContractError(f"w must be positive, got {w}")
    lower = 2.0 * w * np.sqrt(u_arr / 2.0)
    upper = 2.0 * w * (1.0 - np.sqrt((1.0 - u_arr) / 2.0))
    out = np.where(u_arr <= 0.5, lower, upper)
    return float(out) if out.ndim == 0 else out


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def gen_cones(p: ConesParams) -> DataSet:
    n1 = p.n1
    rng = make_rng(p.seed)
    x = sample_triangular(rng.random(2 * p.n), p.w).reshape(p.n, 2)
    x[n1:, 0] += 2.0 * p.w + p.d
    theta = 2.0 * math.pi * rng.random()
    x = x @ rotation(theta)
    x -= x.mean(axis=0)
    labels = np.where(np.arange(p.n) < n1, -1, 1)
    meta = {"generator": "cones", "n": p.n, "rho": p.rho, "w": p.w, "D": p.d,
            "seed": p.seed, "theta": theta, "n1": n1}
    return DataSet(x, labels, meta)


def gen_circles(p: CirclesParams) -> DataSet:
    half = p.n // 2
    angles = 2.0 * math.pi * np.arange(half) / half
    unit = np.column_stack([np.cos(angles), np.sin(angles)])
    x = np.vstack([unit, p.r * unit])
    if p.sigma > 0:
        rng = make_rng(p.seed)
        x = x + p.sigma * ndtri(open_uniforms(rng, 2 * p.n)).reshape(p.n, 2)
    labels = np.concatenate([-np.ones(half, dtype=np.int64), np.ones(half, dtype=np.int64)])
    meta = {"generator": "circles", "n": p.n, "r": p.r, "sigma": p.sigma, "a": p.a,
            "seed": p.seed}
    return DataSet(x, labels, meta)


def min_cross_distance(data: DataSet) -> float:
    neg = data.points[data.labels == -1]
    pos = data.points[data.labels == 1]
    if len(neg) == 0 or len(pos) == 0:
        return math.inf
    diff = neg[:, None, :] - pos[None, :, :]
    return float(np.sqrt((diff ** 2).sum(axis=-1)).min())


def write_dataset_csv(data: DataSet, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("x1,x2,label\n")
        for (x1, x2), y in zip(data.points.tolist(), data.labels.tolist()):
            fh.write(f"{x1:.17g},{x2:.17g},{y}\n")


def read_dataset_csv(path) -> DataSet:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["x1", "x2", "label"]:
            raise ContractError(f"{path}: expected header x1,x2,label, got {header}")
        pts, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                x1, x2, y = row
                pts.append((float(x1), float(x2)))
                labels.append(int(y))
            except ValueError:
                raise ContractError(f"{path}:{lineno}: malformed row {row}") from None
    return DataSet(np.array(pts).reshape(-1, 2), np.array(labels), {"source": str(Path(path))})
