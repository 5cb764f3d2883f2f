"""Dense analysis of the annealing Hamiltonian ``H(s) = f(s) H_I + g(s) H_P``.

``H_I`` is the transverse field ``-sum_i sigma_x^(i)`` and ``H_P`` the diagonal
matrix of QUBO energies. Everything is real symmetric. Gaps here use the raw
convention: the two lowest eigenvalues counted with multiplicity, so a
degenerate ground space gives a gap of 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numba
import numpy as np

from .qubo import ContractError, QuboInstance
from .spectrum import all_energies

MAX_QUBITS = 12
BOUND_CHECK_MAX_QUBITS = 8
# above this dimension the s-sweep uses LAPACK; cyclic Jacobi is O(dim^3) per sweep
JACOBI_MAX_DIM = 64
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class ConvergenceError(RuntimeError):
    def __init__(self, sweeps: int, residual: float):
        super().__init__(f"Jacobi did not converge in {sweeps} sweeps (off-diagonal norm {residual:.3e})")
        self.sweeps = sweeps
        self.residual = residual


@dataclass(frozen=True)
class AnnealSchedule:
    f: Callable[[float], float]
    g: Callable[[float], float]
    descriptor: str = "custom"

    def validate(self, grid_points: int = 201) -> None:
        s = np.linspace(0.0, 1.0, grid_points)
        fv = np.array([self.f(x) for x in s])
        gv = np.array([self.g(x) for x in s])
        ok = (math.isclose(fv[0], 1.0) and math.isclose(gv[-1], 1.0)
              and abs(fv[-1]) < 1e-12 and abs(gv[0]) < 1e-12)
        if not ok:
            raise ContractError(f"schedule {self.descriptor!r} must satisfy f(0)=g(1)=1, f(1)=g(0)=0")
        if np.any((fv < 0) | (fv > 1) | (gv < 0) | (gv > 1)):
            raise ContractError(f"schedule {self.descriptor!r} must map into [0, 1]")
        if np.any(np.diff(fv) > 1e-12) or np.any(np.diff(gv) < -1e-12):
            raise ContractError(f"schedule {self.descriptor!r}: f must decrease and g increase")

    def is_complementary(self, grid_points: int = 201) -> bool:
        s = np.linspace(0.0, 1.0, grid_points)
        return all(abs(self.f(x) + self.g(x) - 1.0) <= 1e-12 for x in s)


def linear_schedule() -> AnnealSchedule:
    return AnnealSchedule(f=lambda s: 1.0 - s, g=lambda s: s, descriptor="linear")


@dataclass(frozen=True)
class DenseHamiltonian:
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ContractError(f"Hamiltonian must be square, got shape {m.shape}")
        dim = m.shape[0]
        if dim < 1 or dim & (dim - 1) or dim > (1 << MAX_QUBITS):
            raise ContractError(f"dimension must be 2^n with n <= {MAX_QUBITS}, got {dim}")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.T)) > 1e-12 * scale:
            raise ContractError("Hamiltonian is not symmetric")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def qubits(self) -> int:
        return self.dim.bit_length() - 1

    def __add__(self, other: "DenseHamiltonian") -> "DenseHamiltonian":
        return DenseHamiltonian(self.entries + other.entries)

    def scaled(self, factor: float) -> "DenseHamiltonian":
        return DenseHamiltonian(factor * self.entries)


def problem_hamiltonian(q: QuboInstance) -> DenseHamiltonian:
    if q.n > MAX_QUBITS:
        raise ContractError(f"dense Hamiltonians are limited to n <= {MAX_QUBITS}, got {q.n}")
    return DenseHamiltonian(np.diag(all_energies(q)))


def transverse_field(n: int) -> DenseHamiltonian:
    if not 1 <= n <= MAX_QUBITS:
        raise ContractError(f"transverse field needs 1 <= n <= {MAX_QUBITS}, got {n}")
    dim = 1 << n
    m = np.zeros((dim, dim))
    idx = np.arange(dim)
    for i in range(n):
        m[idx, idx ^ (1 << i)] = -1.0
    return DenseHamiltonian(m)


@numba.njit(cache=True, nogil=True)
def _jacobi(a, tol, max_sweeps):
    """Cyclic Jacobi on a copy-owned symmetric ``a``; returns (diag, sweeps, residual)."""
    n = a.shape[0]
    sweeps = 0
    while True:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j] * a[i, j]
        off = math.sqrt(off)
        if off < tol or sweeps >= max_sweeps:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
    d = np.empty(n)
    for i in range(n):
        d[i] = a[i, i]
    return d, sweeps, off


def eigenvalues_symmetric(m, max_sweeps: int = 100) -> np.ndarray:
    """All eigenvalues of a real symmetric matrix, ascending, by cyclic Jacobi.

    Iterates until the off-diagonal Frobenius norm drops below
    ``1e-12 * ||M||_F``.
    """
    a = np.array(m.entries if isinstance(m, DenseHamiltonian) else m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {a.shape}")
    norm = float(np.linalg.norm(a))
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12 * max(1.0, norm):
        raise ContractError("matrix is not symmetric")
    a = (a + a.T) / 2.0
    if norm == 0.0:
        return np.zeros(a.shape[0])
    d, sweeps, residual = _jacobi(a, 1e-12 * norm, max_sweeps)
    if residual >= 1e-12 * norm:
        raise ConvergenceError(sweeps, residual)
    return np.sort(d)


def _pencil_eigenvalues(h: np.ndarray) -> np.ndarray:
    if h.shape[0] <= JACOBI_MAX_DIM:
        return eigenvalues_symmetric(h)
    return np.linalg.eigvalsh(h)


def raw_gap(eigs: np.ndarray) -> float:
    if len(eigs) < 2:
        raise ContractError("gap needs at least two eigenvalues")
    return float(eigs[1] - eigs[0])


class _Pencil:
    """Caches H_I and H_P for repeated evaluation of H(s)."""

    def __init__(self, q: QuboInstance, sched: AnnealSchedule):
        if q.n > MAX_QUBITS:
            raise ContractError(f"dense Hamiltonians are limited to n <= {MAX_QUBITS}, got {q.n}")
        self.h_i = transverse_field(q.n).entries
        self.h_p = problem_hamiltonian(q).entries
        self.sched = sched

    def gap(self, s: float) -> float:
        if not 0.0 <= s <= 1.0:
            raise ContractError(f"s must lie in [0, 1], got {s}")
        h = self.sched.f(s) * self.h_i + self.sched.g(s) * self.h_p
        return raw_gap(_pencil_eigenvalues(h))


def gap_at(q: QuboInstance, sched: AnnealSchedule, s: float) -> float:
    """``lambda_2(s) - lambda_1(s)`` of ``H(s)`` (eigenvalues with multiplicity)."""
    return _Pencil(q, sched).gap(s)


def min_gap_schedule(q: QuboInstance, sched: AnnealSchedule = None, grid_points: int = 201,
                     resolution: float = 1e-6) -> tuple[float, float]:
    """Minimize the gap of ``H(s)`` over ``s``: uniform grid, then golden-section refinement."""
    if grid_points < 2:
        raise ContractError("grid_points must be at least 2")
    sched = sched or linear_schedule()
    pencil = _Pencil(q, sched)
    grid = np.linspace(0.0, 1.0, grid_points)
    gaps = np.array([pencil.gap(float(s)) for s in grid])
    k = int(np.argmin(gaps))
    best_s, best_gap = float(grid[k]), float(gaps[k])

    lo = float(grid[max(k - 1, 0)])
    hi = float(grid[min(k + 1, grid_points - 1)])
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = pencil.gap(x1), pencil.gap(x2)
    while hi - lo > resolution:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = pencil.gap(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = pencil.gap(x2)
    s_ref, g_ref = (x1, f1) if f1 <= f2 else (x2, f2)
    if g_ref < best_gap:
        best_s, best_gap = s_ref, g_ref
    return best_s, best_gap


@dataclass
class WeylReport:
    max_violation: float
    ok: bool
    spectral_range: float
    gap_sum: float
    gap_first: float
    gap_bound_ok: bool
    mu: np.ndarray = field(repr=False)
    nu: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)


def weyl_check(nu: DenseHamiltonian, rho: DenseHamiltonian, tol: float = 1e-8) -> WeylReport:
    """Check ``nu_i + rho_1 <= mu_i <= nu_i + rho_m`` for ``M = N + R``.

    Also evaluates the derived gap bound ``gap(M) <= gap(N) + (rho_m - rho_1)``.
    ``max_violation`` is the largest amount by which any inequality fails
    (negative when all hold with slack).
    """
    a = nu.entries if isinstance(nu, DenseHamiltonian) else np.asarray(nu, dtype=np.float64)
    b = rho.entries if isinstance(rho, DenseHamiltonian) else np.asarray(rho, dtype=np.float64)
    if a.shape != b.shape:
        raise ContractError(f"dimension mismatch: {a.shape} vs {b.shape}")
    ev_n = eigenvalues_symmetric(a)
    ev_r = eigenvalues_symmetric(b)
    ev_m = eigenvalues_symmetric(a + b)
    lower = ev_n + ev_r[0] - ev_m
    upper = ev_m - (ev_n + ev_r[-1])
    violation = float(max(lower.max(), upper.max()))
    spread = float(ev_r[-1] - ev_r[0])
    if len(ev_m) >= 2:
        gap_m, gap_n = raw_gap(ev_m), raw_gap(ev_n)
    else:
        gap_m = gap_n = 0.0
    return WeylReport(
        max_violation=violation,
        ok=violation <= tol,
        spectral_range=spread,
        gap_sum=gap_m,
        gap_first=gap_n,
        gap_bound_ok=gap_m <= gap_n + spread + tol,
        mu=ev_m, nu=ev_n, rho=ev_r,
    )


@dataclass
class GapBoundReport:
    s_star: float
    min_gap: float
    gap_problem: float
    gap_initial: float
    bound: float
    ok: bool


def gap_bound_check(q: QuboInstance, sched: AnnealSchedule = None, grid_points: int = 201,
                    max_qubits: int = BOUND_CHECK_MAX_QUBITS) -> GapBoundReport:
    """Check that the minimal annealing gap is at most ``min(gap(H_P), gap(H_I))``."""
    sched = sched or linear_schedule()
    if q.n > max_qubits:
        raise ContractError(f"gap bound check limited to n <= {max_qubits}, got {q.n}")
    sched.validate(grid_points)
    if not sched.is_complementary(grid_points):
        raise ContractError(f"schedule {sched.descriptor!r} violates f = 1 - g")
    s_star, min_gap = min_gap_schedule(q, sched, grid_points)
    gap_p = raw_gap(np.sort(all_energies(q))) if q.n >= 1 else 0.0
    gap_i = 2.0
    bound = min(gap_p, gap_i)
    return GapBoundReport(s_star, min_gap, gap_p, gap_i, bound, min_gap <= bound + 1e-8)
