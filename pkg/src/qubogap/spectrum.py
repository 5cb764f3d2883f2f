"""Exact spectrum statistics of QUBO instances by exhaustive enumeration.

States are split into blocks by their top bits. Each block is swept in
reflected Gray-code order over its low bits: the first state's energy is
evaluated directly, every following state is reached by a single bit flip
whose energy change costs O(n). Running energies use Neumaier-compensated
summation so long delta chains stay accurate.

Two passes are made. The first finds the global minimum; the second counts
the states within ``DEGENERACY_TOL`` of it and finds the lowest energy above
that band. Block size depends only on ``n``, never on the worker count, so
results are bit-identical however many threads are used.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numba
import numpy as np

from .qubo import ContractError, QuboInstance, SpectrumSummary, energy, state_bits

DEGENERACY_TOL = 1e-12
MAX_N = 32
LARGE_N = 28
BLOCK_BITS = 14


@numba.njit(cache=True, nogil=True)
def _sweep_block(diag, offdiag, low_bits, block, threshold):
    """Gray-code sweep of one block.

    Returns (block_min, count_le_threshold, first_index_le_threshold,
    min_above_threshold, index_of_min_above).
    """
    n = diag.shape[0]
    base = block << low_bits
    z = np.zeros(n, dtype=np.float64)
    for i in range(n):
        z[i] = (base >> i) & 1

    # direct evaluation of the block's first state
    e = 0.0
    for i in range(n):
        if z[i] != 0.0:
            e += diag[i]
            for j in range(i + 1, n):
                if z[j] != 0.0:
                    e += offdiag[i, j]
    comp = 0.0
    cur = base

    best = e
    count = 0
    first = -1
    above = np.inf
    above_idx = -1
    if e <= threshold:
        count = 1
        first = cur
    else:
        above = e
        above_idx = cur

    total = 1 << low_bits
    for t in range(1, total):
        # bit to flip is the number of trailing zeros of t
        i = 0
        tt = t
        while (tt & 1) == 0:
            tt >>= 1
            i += 1
        local = diag[i]
        for j in range(n):
            local += offdiag[i, j] * z[j]
        if z[i] != 0.0:
            delta = -local
            z[i] = 0.0
        else:
            delta = local
            z[i] = 1.0
        cur ^= 1 << i

        s = e + delta
        if abs(e) >= abs(delta):
            comp += (e - s) + delta
        else:
            comp += (delta - s) + e
        e = s
        val = e + comp

        if val < best:
            best = val
        if val <= threshold:
            count += 1
            if first < 0 or cur < first:
                first = cur
        elif val < above or (val == above and cur < above_idx):
            above = val
            above_idx = cur
    return best, count, first, above, above_idx


def default_workers() -> int:
    env = os.environ.get("QGL_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ContractError(f"QGL_THREADS must be an integer, got {env!r}") from None
        if value >= 1:
            return value
    return os.cpu_count() or 1


def _check_size(n: int, force_large: bool) -> None:
    if n < 1 or n > MAX_N:
        raise ContractError(f"enumeration supports 1 <= n <= {MAX_N}, got n={n}")
    if n > LARGE_N and not force_large:
        raise ContractError(
            f"n={n} exceeds {LARGE_N}; 2^{n} states need an explicit override (force_large)"
        )


def enumerate_spectrum(q: QuboInstance, workers: Optional[int] = None,
                       force_large: bool = False) -> SpectrumSummary:
    """Visit all 2^n states of ``q`` and summarize the bottom of its spectrum."""
    n = q.n
    _check_size(n, force_large)
    workers = default_workers() if workers is None else max(1, int(workers))

    diag = np.ascontiguousarray(np.diag(q.q), dtype=np.float64)
    offdiag = np.ascontiguousarray(q.symmetric_offdiag(), dtype=np.float64)
    low_bits = min(n, BLOCK_BITS)
    blocks = list(range(1 << (n - low_bits)))

    def run(threshold):
        def one(b):
            return _sweep_block(diag, offdiag, low_bits, b, threshold)
        if workers == 1 or len(blocks) == 1:
            return [one(b) for b in blocks]
        with ThreadPoolExecutor(max_workers=min(workers, len(blocks))) as pool:
            return list(pool.map(one, blocks))

    gmin = min(r[0] for r in run(-np.inf))
    parts = run(gmin + DEGENERACY_TOL)

    count = sum(r[1] for r in parts)
    first = min(r[2] for r in parts if r[2] >= 0)
    above = [(r[3], r[4]) for r in parts if r[4] >= 0]

    ground = state_bits(first, n)
    min_energy = energy(q, ground)
    if above:
        _, second_idx = min(above)
        second_energy = energy(q, state_bits(second_idx, n))
        gap = second_energy - min_energy
        if not gap > 0:
            # compensated running sums and direct evaluation disagree at round-off level
            gap = min(above)[0] - gmin
    else:
        second_energy = None
        gap = None
    return SpectrumSummary(
        min_energy=min_energy,
        second_energy=second_energy,
        gap=gap,
        ground_degeneracy=int(count),
        ground_state=ground,
    )


def spectral_gap(q: QuboInstance, workers: Optional[int] = None,
                 force_large: bool = False) -> Optional[float]:
    """Difference between the two lowest distinct energies, ``None`` if constant."""
    return enumerate_spectrum(q, workers=workers, force_large=force_large).gap


def all_energies(q: QuboInstance) -> np.ndarray:
    """Energies of every state in packed-index order (vectorized, n <= 24)."""
    n = q.n
    if n > 24:
        raise ContractError(f"dense energy table limited to n <= 24, got n={n}")
    idx = np.arange(1 << n, dtype=np.int64)
    bits = ((idx[:, None] >> np.arange(n)) & 1).astype(np.float64)
    return np.einsum("ki,ij,kj->k", bits, q.q, bits)
