"""Command-line interface.

Exit codes: 0 success, 1 invalid arguments or contract violation, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import annealing, datagen, harness
from .qubo import ContractError, normalize_inf, read_qubo, write_qubo
from .spectrum import enumerate_spectrum

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _threads(args) -> int | None:
    if getattr(args, "threads", None) is not None:
        if args.threads < 1:
            raise ContractError("--threads must be at least 1")
        return args.threads
    return None


# -- gen ---------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.family == "cones":
        _require(args, "gen --family cones", "n", "rho", "w", "D")
        data = datagen.gen_cones(datagen.ConesParams(args.n, args.rho, args.w, args.D, args.seed))
    else:
        _require(args, "gen --family circles", "n", "r", "sigma")
        a = 1.0 if args.a is None else args.a
        data = datagen.gen_circles(datagen.CirclesParams(args.n, args.r, args.sigma, a, args.seed))
    datagen.write_dataset_csv(data, args.out)
    neg = int((data.labels == -1).sum())
    print(f"n: {data.n}")
    print(f"labels: -1={neg} +1={data.n - neg}")
    print(f"min_cross_distance: {datagen.min_cross_distance(data):.17g}")
    return EXIT_OK


def _require(args, what, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{what} requires {', '.join(missing)}")


# -- qubo --------------------------------------------------------------------

def cmd_qubo(args) -> int:
    if (args.data is None) == (args.qubo_in is None):
        raise UsageError("qubo needs exactly one of --in DATASET.csv or --qubo-in QUBO.txt")
    if args.qubo_in is not None:
        q = read_qubo(args.qubo_in)
    else:
        if args.problem is None:
            raise UsageError("qubo --in requires --problem")
        data = datagen.read_dataset_csv(args.data)
        params = {}
        if args.problem == "svm":
            _require(args, "qubo --problem svm", "C", "lam")
            params = {"C": args.C, "lambda": args.lam}
        km = harness.kernel_for(args.problem, args.kernel, data, args.a)
        q = harness.build_instance(args.problem, km, data.labels, params, normalize=False)
    if args.normalize:
        q = normalize_inf(q)
    write_qubo(q, args.out)
    print(f"n: {q.n}")
    return EXIT_OK


# -- gap / ahgap -------------------------------------------------------------

def cmd_gap(args) -> int:
    q = read_qubo(args.data)
    summary = enumerate_spectrum(q, workers=_threads(args), force_large=args.force_large)
    print(json.dumps(summary.as_dict()))
    return EXIT_OK


def cmd_ahgap(args) -> int:
    q = read_qubo(args.data)
    if q.n > annealing.MAX_QUBITS:
        raise ContractError(f"dense annealing analysis limited to n <= {annealing.MAX_QUBITS}, got n={q.n}")
    report = annealing.gap_bound_check(q, annealing.linear_schedule(), args.grid,
                                       max_qubits=annealing.MAX_QUBITS)
    print(json.dumps({
        "s_star": report.s_star,
        "min_gap": report.min_gap,
        "gap_problem": report.gap_problem,
        "gap_initial": report.gap_initial,
        "bound_ok": report.ok,
    }))
    return EXIT_OK


# -- sweep -------------------------------------------------------------------

def read_config_tokens(path) -> list[str]:
    """Turn a flat ``key=value`` file into argv tokens (``--key value``)."""
    tokens = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ContractError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "normalize":
            flag = value.lower()
            if flag not in ("true", "false", "1", "0", "yes", "no"):
                raise ContractError(f"{path}:{lineno}: normalize must be true or false")
            tokens.append("--normalize" if flag in ("true", "1", "yes") else "--no-normalize")
        else:
            tokens += [f"--{key}", value]
    return tokens


def cmd_sweep(args) -> int:
    _require(args, "sweep", "problem", "generator", "n", "sweep", "lo", "hi", "out")
    given = {"rho": args.rho, "w": args.w, "D": args.D, "r": args.r, "sigma": args.sigma,
             "a": args.a, "C": args.C, "lambda": args.lam}
    fixed = {k: v for k, v in given.items() if v is not None}
    interval2 = None
    if args.sweep2 is not None:
        _require(args, "sweep --sweep2", "lo2", "hi2")
        interval2 = (args.lo2, args.hi2)
    cfg = harness.SweepConfig(
        problem=args.problem, generator=args.generator, n=args.n, fixed=fixed,
        swept=args.sweep, interval=(args.lo, args.hi), samples=args.samples,
        master_seed=args.seed, normalize=args.normalize,
        swept2=args.sweep2, interval2=interval2,
    )
    records = harness.run_sweep(cfg, workers=_threads(args))
    harness.write_csv(records, args.out)
    report = harness.summarize(records)
    text = "\n".join([f"records: {len(records)}", *report.lines()]) + "\n"
    if args.summary:
        Path(args.summary).write_text(text)
    if args.gnuplot:
        Path(args.gnuplot).write_text(harness.gnuplot_script(args.out, report))
    sys.stdout.write(text)
    return EXIT_OK


def cmd_weyl(args) -> int:
    if args.dim < 1 or args.trials < 1:
        raise ContractError("--dim and --trials must be positive")
    rng = datagen.make_rng(args.seed)
    violations = 0
    worst = -np.inf
    for _ in range(args.trials):
        a = rng.normal(size=(args.dim, args.dim))
        b = rng.normal(size=(args.dim, args.dim))
        report = annealing.weyl_check((a + a.T) / 2.0, (b + b.T) / 2.0)
        worst = max(worst, report.max_violation)
        violations += (not report.ok) + (not report.gap_bound_ok)
    print(f"{violations} violations")
    print(f"trials: {args.trials}")
    print(f"max_violation: {worst:.17g}")
    return EXIT_OK if violations == 0 else EXIT_INVALID


# -- parser ------------------------------------------------------------------

def _add_data_params(p):
    p.add_argument("--n", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--w", type=float)
    p.add_argument("--d", "--D", dest="D", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--a", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qubogap", description="QUBO embeddings and exact spectral gaps.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a Cones or Circles dataset CSV")
    p.add_argument("--family", choices=("cones", "circles"), required=True)
    _add_data_params(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("qubo", help="build a clustering or SVM QUBO from a dataset")
    p.add_argument("--problem", choices=harness.PROBLEMS)
    p.add_argument("--in", dest="data")
    p.add_argument("--qubo-in", dest="qubo_in")
    p.add_argument("--kernel", choices=("linear", "circles"), default="linear")
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--c", "--C", dest="C", type=float)
    p.add_argument("--lam", "--lambda", dest="lam", type=float)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_qubo)

    p = sub.add_parser("gap", help="exact spectral gap by enumeration")
    p.add_argument("--in", dest="data", required=True)
    p.add_argument("--force-large", action="store_true")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("ahgap", help="minimal gap of the annealing Hamiltonian")
    p.add_argument("--in", dest="data", required=True)
    p.add_argument("--grid", type=int, default=201)
    p.set_defaults(func=cmd_ahgap)

    p = sub.add_parser("sweep", help="seeded parameter sweep")
    p.add_argument("--config")
    p.add_argument("--problem", choices=harness.PROBLEMS)
    p.add_argument("--generator", choices=harness.GENERATORS)
    _add_data_params(p)
    p.add_argument("--c", "--C", dest="C", type=float)
    p.add_argument("--lam", "--lambda", dest="lam", type=float)
    p.add_argument("--sweep", choices=harness.PARAM_NAMES)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--sweep2", choices=harness.PARAM_NAMES)
    p.add_argument("--lo2", type=float)
    p.add_argument("--hi2", type=float)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--out")
    p.add_argument("--summary")
    p.add_argument("--gnuplot")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("weyl-check", help="Weyl inequality on random symmetric pairs")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_weyl)
    return parser


def _expand_config(argv: list[str]) -> list[str]:
    """Splice ``sweep --config FILE`` entries in front of the explicit flags."""
    if not argv or argv[0] != "sweep":
        return argv
    rest = argv[1:]
    for i, tok in enumerate(rest):
        path = None
        if tok == "--config" and i + 1 < len(rest):
            path, drop = rest[i + 1], 2
        elif tok.startswith("--config="):
            path, drop = tok.split("=", 1)[1], 1
        if path is not None:
            explicit = rest[:i] + rest[i + drop:]
            return ["sweep", *read_config_tokens(path), *explicit]
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_expand_config(argv))
        if getattr(args, "threads", None) is None and os.environ.get("QGL_THREADS"):
            args.threads = int(os.environ["QGL_THREADS"])
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        build_parser().print_usage(sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"qubogap: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ContractError, ValueError) as exc:
        print(f"qubogap: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
