"""Seeded parameter sweeps: dataset -> kernel -> QUBO -> spectral gap.

Sample ``k`` of a sweep uses the seed ``mix_seed(master_seed, k)``: the
SplitMix64 finalizer applied to ``master_seed + (k + 1) * 0x9E3779B97F4A7C15``
(mod 2^64), i.e. the ``k``-th output of a SplitMix64 stream started at
``master_seed``. Each sample depends only on its own index, so samples can be
evaluated in any order or in parallel.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import stats
from .datagen import (
    MASK64, STREAM_SWEEP, STREAM_SWEEP2, CirclesParams, ConesParams, DataSet,
    cluster_size, gen_circles, gen_cones, make_rng,
)
from .embeddings import SvmHyperparams, clustering_qubo, svm_qubo
from .kernels import KernelMatrix, center_kernel, gram_circles, gram_linear
from .qubo import ContractError, QuboInstance, max_abs_entry, normalize_inf
from .spectrum import default_workers, enumerate_spectrum

PROBLEMS = ("clustering", "svm")
GENERATORS = ("cones", "circles")
PARAM_NAMES = ("rho", "w", "D", "r", "sigma", "a", "C", "lambda")
GENERATOR_PARAMS = {"cones": ("rho", "w", "D"), "circles": ("r", "sigma", "a")}
SVM_PARAMS = ("C", "lambda")
DEFAULTS = {"a": 1.0}

CSV_COLUMNS = (
    "sample_index", "seed", "problem", "generator", "n",
    *PARAM_NAMES,
    "swept_name", "swept_value", "sg", "min_energy", "ground_degeneracy",
)

_GOLDEN64 = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_seed(master_seed: int, index: int) -> int:
    return splitmix64((master_seed + (index + 1) * _GOLDEN64) & MASK64)


def required_params(problem: str, generator: str) -> tuple:
    names = GENERATOR_PARAMS[generator]
    return names + SVM_PARAMS if problem == "svm" else names


@dataclass(frozen=True)
class SweepConfig:
    problem: str
    generator: str
    n: int
    fixed: dict
    swept: str
    interval: tuple
    samples: int = 1
    master_seed: int = 0
    normalize: bool = True
    swept2: Optional[str] = None
    interval2: Optional[tuple] = None

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ContractError(f"problem must be one of {PROBLEMS}, got {self.problem!r}")
        if self.generator not in GENERATORS:
            raise ContractError(f"generator must be one of {GENERATORS}, got {self.generator!r}")
        if self.samples < 1:
            raise ContractError("samples must be at least 1")
        if not 0 <= self.master_seed <= MASK64:
            raise ContractError("master_seed must be a 64-bit unsigned integer")
        fixed = {k: float(v) for k, v in self.fixed.items()}
        unknown = set(fixed) - set(PARAM_NAMES)
        if unknown:
            raise ContractError(f"unknown parameters {sorted(unknown)}")
        needed = set(required_params(self.problem, self.generator))
        stray = set(fixed) - needed
        if stray:
            raise ContractError(f"parameters {sorted(stray)} do not apply to {self.problem}/{self.generator}")
        sweeps = [(self.swept, self.interval)]
        if self.swept2 is not None:
            sweeps.append((self.swept2, self.interval2))
            if self.swept2 == self.swept:
                raise ContractError("swept2 must differ from swept")
        swept_names = {name for name, _ in sweeps}
        for name, interval in sweeps:
            if name not in needed:
                raise ContractError(f"cannot sweep {name!r} for {self.problem}/{self.generator}")
            if interval is None or len(interval) != 2 or not interval[0] <= interval[1]:
                raise ContractError(f"interval for {name!r} must satisfy lo <= hi, got {interval}")
            if name in fixed:
                raise ContractError(f"swept parameter {name!r} also appears in fixed")
        for name, value in DEFAULTS.items():
            if name in needed and name not in swept_names:
                fixed.setdefault(name, value)
        missing = needed - set(fixed) - swept_names
        if missing:
            raise ContractError(f"missing fixed parameters {sorted(missing)}")
        object.__setattr__(self, "fixed", {k: fixed[k] for k in PARAM_NAMES if k in fixed})
        object.__setattr__(self, "interval", tuple(float(v) for v in self.interval))
        if self.interval2 is not None:
            object.__setattr__(self, "interval2", tuple(float(v) for v in self.interval2))


@dataclass
class SweepRecord:
    sample_index: int
    seed: int
    problem: str
    generator: str
    n: int
    params: dict
    swept_name: str
    swept_value: float
    sg: Optional[float]
    min_energy: float
    ground_degeneracy: int


def _draw(seed: int, stream: int, interval: tuple) -> float:
    lo, hi = interval
    u = float(make_rng(seed, stream).random())
    return lo + (hi - lo) * u


def make_dataset(generator: str, n: int, params: dict, seed: int) -> DataSet:
    if generator == "cones":
        return gen_cones(ConesParams(n=n, rho=params["rho"], w=params["w"], d=params["D"], seed=seed))
    return gen_circles(CirclesParams(n=n, r=params["r"], sigma=params["sigma"],
                                     a=params.get("a", 1.0), seed=seed))


def kernel_for(problem: str, kernel: str, data: DataSet, a: float = 1.0) -> KernelMatrix:
    """Linear or circles kernel; clustering gets the double-centered version."""
    if kernel == "linear":
        km = gram_linear(data)
    elif kernel == "circles":
        km = gram_circles(data, a)
    else:
        raise ContractError(f"unknown kernel {kernel!r}")
    return center_kernel(km) if problem == "clustering" else km


def build_instance(problem: str, km: KernelMatrix, labels, params: dict,
                   normalize: bool) -> QuboInstance:
    if problem == "clustering":
        q = clustering_qubo(km)
    elif problem == "svm":
        q = svm_qubo(km, labels, SvmHyperparams(c=params["C"], lam=params["lambda"]))
    else:
        raise ContractError(f"unknown problem {problem!r}")
    # an all-zero instance has a constant spectrum either way
    if normalize and max_abs_entry(q) > 0.0:
        q = normalize_inf(q)
    return q


def evaluate_sample(cfg: SweepConfig, index: int) -> SweepRecord:
    seed = mix_seed(cfg.master_seed, index)
    params = dict(cfg.fixed)
    value = _draw(seed, STREAM_SWEEP, cfg.interval)
    params[cfg.swept] = value
    if cfg.swept2 is not None:
        params[cfg.swept2] = _draw(seed, STREAM_SWEEP2, cfg.interval2)

    data = make_dataset(cfg.generator, cfg.n, params, seed)
    kernel = "linear" if cfg.generator == "cones" else "circles"
    km = kernel_for(cfg.problem, kernel, data, params.get("a", 1.0))
    q = build_instance(cfg.problem, km, data.labels, params, cfg.normalize)
    summary = enumerate_spectrum(q, workers=1)
    return SweepRecord(
        sample_index=index,
        seed=seed,
        problem=cfg.problem,
        generator=cfg.generator,
        n=cfg.n,
        params={k: params[k] for k in PARAM_NAMES if k in params},
        swept_name=cfg.swept,
        swept_value=value,
        sg=summary.gap,
        min_energy=summary.min_energy,
        ground_degeneracy=summary.ground_degeneracy,
    )


def run_sweep(cfg: SweepConfig, workers: Optional[int] = None) -> list[SweepRecord]:
    """Evaluate every sample of ``cfg``; records come back ordered by sample index."""
    workers = default_workers() if workers is None else max(1, int(workers))
    indices = range(cfg.samples)
    if workers == 1:
        records = [evaluate_sample(cfg, k) for k in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda k: evaluate_sample(cfg, k), indices))
    return sorted(records, key=lambda r: r.sample_index)


# -- statistics --------------------------------------------------------------

@dataclass
class CorrelationReport:
    x_name: str
    count: int
    count_excluded: int
    pearson: Optional[float]
    spearman: Optional[float]
    lin_fit: Optional[tuple]
    quad_fit: Optional[tuple]
    r2_lin: Optional[float]
    r2_quad: Optional[float]

    def lines(self) -> list[str]:
        def fmt(v):
            if v is None:
                return "undefined"
            if isinstance(v, tuple):
                return " ".join(f"{c:.17g}" for c in v)
            if isinstance(v, float):
                return f"{v:.17g}"
            return str(v)
        return [f"{k}: {fmt(getattr(self, k))}" for k in (
            "x_name", "count", "count_excluded", "pearson", "spearman",
            "lin_fit", "quad_fit", "r2_lin", "r2_quad")]


def margin_axis(record: SweepRecord) -> float:
    """Data-separation axis: ``1 - r`` for inner-radius sweeps, the swept value otherwise."""
    if record.swept_name == "r":
        return 1.0 - record.swept_value
    return record.swept_value


def _safe(fn, *args):
    try:
        return fn(*args)
    except ContractError:
        return None


def summarize(records: Sequence[SweepRecord],
              x: Optional[Callable[[SweepRecord], float]] = None,
              x_name: Optional[str] = None) -> CorrelationReport:
    """Correlate the spectral gap with ``x`` (default: :func:`margin_axis`)."""
    if x is None:
        x = margin_axis
        if x_name is None and records:
            x_name = "1-r" if records[0].swept_name == "r" else records[0].swept_name
    kept = [r for r in records if r.sg is not None]
    xs = np.array([x(r) for r in kept], dtype=np.float64)
    ys = np.array([r.sg for r in kept], dtype=np.float64)
    lin = _safe(stats.fit_poly, xs, ys, 1) if len(kept) >= 2 else None
    quad = _safe(stats.fit_poly, xs, ys, 2) if len(kept) >= 3 else None
    return CorrelationReport(
        x_name=x_name or "x",
        count=len(kept),
        count_excluded=len(records) - len(kept),
        pearson=_safe(stats.pearson, xs, ys) if len(kept) >= 2 else None,
        spearman=_safe(stats.spearman, xs, ys) if len(kept) >= 2 else None,
        lin_fit=tuple(float(c) for c in lin[0]) if lin else None,
        quad_fit=tuple(float(c) for c in quad[0]) if quad else None,
        r2_lin=lin[1] if lin else None,
        r2_quad=quad[1] if quad else None,
    )


# -- CSV ---------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def record_row(r: SweepRecord) -> list[str]:
    row = [r.sample_index, r.seed, r.problem, r.generator, r.n]
    row += [r.params.get(k) for k in PARAM_NAMES]
    row += [r.swept_name, r.swept_value, r.sg, r.min_energy, r.ground_degeneracy]
    return [_fmt(v) for v in row]


def format_csv(records: Iterable[SweepRecord]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines += [",".join(record_row(r)) for r in records]
    return "\n".join(lines) + "\n"


def write_csv(records: Iterable[SweepRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(records))


def read_csv(path) -> list[SweepRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ContractError(f"{path}:1: unexpected header {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_COLUMNS):
                raise ContractError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} fields, got {len(row)}")
            cell = dict(zip(CSV_COLUMNS, row))
            try:
                params = {k: float(cell[k]) for k in PARAM_NAMES if cell[k] != ""}
                records.append(SweepRecord(
                    sample_index=int(cell["sample_index"]),
                    seed=int(cell["seed"]),
                    problem=cell["problem"],
                    generator=cell["generator"],
                    n=int(cell["n"]),
                    params=params,
                    swept_name=cell["swept_name"],
                    swept_value=float(cell["swept_value"]),
                    sg=float(cell["sg"]) if cell["sg"] != "" else None,
                    min_energy=float(cell["min_energy"]),
                    ground_degeneracy=int(cell["ground_degeneracy"]),
                ))
            except ValueError as exc:
                raise ContractError(f"{path}:{lineno}: malformed row ({exc})") from None
    return records


def gnuplot_script(csv_path: str, report: CorrelationReport) -> str:
    """Plot-ready gnuplot text: scatter of the CSV plus the fitted quadratic."""
    xcol = CSV_COLUMNS.index("swept_value") + 1
    ycol = CSV_COLUMNS.index("sg") + 1
    xexpr = f"(1-${xcol})" if report.x_name == "1-r" else f"${xcol}"
    lines = [
        "set datafile separator ','",
        f"set xlabel '{report.x_name}'",
        "set ylabel 'spectral gap'",
    ]
    plot = f"plot '{csv_path}' skip 1 using {xexpr}:{ycol} with points pt 7 ps 0.4 title 'samples'"
    if report.quad_fit:
        c0, c1, c2 = report.quad_fit
        lines.append(f"fit_q(x) = {c0:.17g} + {c1:.17g}*x + {c2:.17g}*x**2")
        plot += ", fit_q(x) with lines lw 2 title 'quadratic fit'"
    lines.append(plot)
    return "\n".join(lines) + "\n"
