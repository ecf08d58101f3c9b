"""Command-line front end: ``mosoo run | indicators | list-problems``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional, Sequence

from .indicators import (ReferenceFront, additive_epsilon, conflict_dimension, default_hv_reference,
                         hypervolume_2d, indicator_curve, sample_reference_front)
from .optimizer import HMaxPolicy, RunTrace, mosoo_run, soo_run
from .pareto import DimensionMismatchError, nd_filter
from .partition import SPLIT_POLICIES, SEQUENTIAL
from .problems import REGISTRY, NonFiniteObjectiveError, Problem, make_problem
from .theory import BoundModel, indicator_bound, loss_bound, recorded_multipliers

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

FRONT_SEED = 0


class ConfigError(Exception):
    pass


class InputFileError(Exception):
    pass


def fmt(value: float) -> str:
    """17 significant digits: parses back to the identical double."""
    return format(float(value), ".17g")


@dataclass
class RunConfig:
    problem: str = "worked_example"
    algorithm: str = "mosoo"
    K: int = 3
    budget: int = 10_000
    hmax: str = "power"
    hmax_p: float = 0.5
    hmax_depth: int = 10
    split: str = SEQUENTIAL
    seed: Optional[int] = 0
    front_samples: int = 100_000
    front_seed: int = FRONT_SEED
    bounds: bool = False
    delta_form: str = "cell"
    problem_params: dict = field(default_factory=dict)

    def policy(self) -> HMaxPolicy:
        if self.hmax == "power":
            return HMaxPolicy.power(self.hmax_p)
        if self.hmax == "constant":
            return HMaxPolicy.constant(self.hmax_depth)
        return HMaxPolicy.unbounded()

    def validate(self) -> Problem:
        if self.budget < 1:
            raise ConfigError("--budget must be >= 1")
        if self.K < 2:
            raise ConfigError("--k must be >= 2")
        if self.front_samples < 0:
            raise ConfigError("--front-samples must be >= 0")
        try:
            self.policy()
            problem = make_problem(self.problem)
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc.args[0] if exc.args else exc)) from None
        if self.algorithm == "soo" and problem.m != 1:
            raise ConfigError(f"soo needs a single-objective problem; {problem.name} has m={problem.m}")
        if self.bounds and problem.name != "holder":
            raise ConfigError("--bounds is only available for holder problems")
        self.problem_params = dict(problem.params)
        return problem

    def manifest(self) -> dict:
        return asdict(self)


# CSV helpers ---------------------------------------------------------------

def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def read_table(path: Path) -> tuple[list[str], list[list[float]]]:
    """Header and float rows of a numeric CSV file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFileError(f"cannot read {path}: {exc.strerror}") from None
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise InputFileError(f"{path} is empty")
    header, body = rows[0], [r for r in rows[1:] if r]
    try:
        values = [[float(v) for v in r] for r in body]
    except ValueError:
        raise InputFileError(f"{path} contains a non-numeric entry") from None
    if any(len(r) != len(header) for r in values):
        raise InputFileError(f"{path} has rows that do not match its header")
    return header, values


def read_vectors(path: Path) -> list[tuple[float, ...]]:
    """Objective vectors from a CSV; uses the ``y*`` columns when present."""
    header, rows = read_table(path)
    cols = [i for i, name in enumerate(header) if name.startswith("y")] or list(range(len(header)))
    vectors = [tuple(r[i] for i in cols) for r in rows]
    if not vectors:
        raise InputFileError(f"{path} holds no vectors")
    if not all(math.isfinite(v) for vec in vectors for v in vec):
        raise InputFileError(f"{path} contains non-finite values")
    return vectors


def write_set(path: Path, vectors: Sequence[Sequence[float]],
              points: Optional[Sequence[Sequence[float]]] = None) -> None:
    m = len(vectors[0]) if vectors else 0
    header = [f"y{j + 1}" for j in range(m)]
    rows = [list(map(float, y)) for y in vectors]
    if points is not None:
        n = len(points[0]) if points else 0
        header = [f"x{i + 1}" for i in range(n)] + header
        rows = [list(map(float, x)) + r for x, r in zip(points, rows)]
    write_csv(path, header, rows)


# run -----------------------------------------------------------------------

def reference_front(problem: Problem, samples: int, seed: int = FRONT_SEED) -> ReferenceFront:
    return sample_reference_front(problem, samples, seed=seed, include_extrema=True)


def execute(config: RunConfig, out: Path) -> RunTrace:
    """Run the configured optimizer and write every artifact into ``out``."""
    problem = config.validate()
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from None

    runner = mosoo_run if config.algorithm == "mosoo" else soo_run
    *_, trace = runner(problem, config.K, config.budget, config.policy(), config.split, config.seed)

    front = reference_front(problem, config.front_samples, config.front_seed) if config.front_samples else None
    hv_ref = default_hv_reference(front.members) if front is not None and problem.m == 2 else None
    curve = indicator_curve(trace, front.members if front else None, problem.ideal, hv_ref)

    manifest = config.manifest()
    manifest["result"] = {
        "evaluations": trace.evaluations,
        "expansions": len(trace.expanded),
        "iterations": len(trace.records),
        "stop_reason": trace.stop_reason,
        "hv_reference": list(hv_ref) if hv_ref is not None else None,
        "front_size": len(front) if front is not None else None,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")

    xs = [f"x{i + 1}" for i in range(problem.n)]
    ys = [f"y{j + 1}" for j in range(problem.m)]
    write_csv(out / "evaluations.csv", ["index", *xs, *ys],
              [[i, *x, *y] for i, x, y in trace.log])
    write_csv(out / "trace.csv",
              ["t", "sweep", "depth", "leaves", "expanded", "expanded_nodes", "evaluations", "sweep_depths"],
              [[r.t, r.sweep, r.depth, r.n_leaves, len(r.expanded),
                ";".join(f"{d}:{i}" for d, i in r.expanded_keys), r.evaluations, r.sweep_depths]
               for r in trace.records])
    write_set(out / "archive.csv", trace.archive, trace.archive_points)
    loss_cols = [f"r{j + 1}" for j in range(problem.m)]
    write_csv(out / "curve.csv", ["t", "evaluations", "archive_size", "epsilon", "hypervolume", *loss_cols],
              [[c.t, c.evaluations, c.archive_size, _opt(c.epsilon), _opt(c.hypervolume),
                *(c.loss if c.loss is not None else [""] * problem.m)] for c in curve])

    if config.bounds:
        if front is None:
            raise ConfigError("--bounds needs a reference front (--front-samples > 0)")
        write_bounds(out / "bounds.csv", config, problem, trace, front, curve)
    return trace


def _opt(value: Optional[float]):
    return "" if value is None else float(value)


def write_bounds(path: Path, config: RunConfig, problem: Problem, trace: RunTrace,
                 front: ReferenceFront, curve) -> None:
    params = problem.params
    psi = conflict_dimension(problem.extrema, front.members)
    model = BoundModel.holder([params["alpha1"], params["alpha2"]], config.K, problem.n,
                              psi=psi, form=config.delta_form, recorded=recorded_multipliers(trace))
    hmax = config.policy()
    rows = []
    for c in curve:
        rb = loss_bound(c.t, model, hmax(c.t))
        eb = indicator_bound(c.t, model, hmax(c.t))
        rows.append([c.t, *map(float, rb), float(eb), *map(float, c.loss), float(c.epsilon)])
    write_csv(path, ["t", "r1_bound", "r2_bound", "epsilon_bound", "r1", "r2", "epsilon"], rows)


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.from_manifest:
        try:
            data = json.loads(Path(args.from_manifest).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputFileError(f"cannot read {args.from_manifest}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise InputFileError(f"{args.from_manifest} is not valid JSON: {exc}") from None
        data.pop("result", None)
        try:
            return RunConfig(**data)
        except TypeError as exc:
            raise ConfigError(f"manifest has unexpected fields: {exc}") from None
    return RunConfig(problem=args.problem, algorithm=args.algo, K=args.k, budget=args.budget,
                     hmax=args.hmax, hmax_p=args.hmax_p, hmax_depth=args.hmax_depth,
                     split=args.split, seed=args.seed, front_samples=args.front_samples,
                     bounds=args.bounds, delta_form=args.delta_form)


def cmd_run(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    trace = execute(config, Path(args.out))
    print(f"{trace.algorithm}: {trace.evaluations} evaluations, {len(trace.expanded)} expansions, "
          f"archive of {len(trace.archive)} ({trace.stop_reason}); artifacts in {args.out}")
    return EXIT_OK


# indicators -----------------------------------------------------------------

def cmd_indicators(args: argparse.Namespace) -> int:
    approx = read_vectors(Path(args.set))
    if args.front:
        front = nd_filter(read_vectors(Path(args.front)))
    else:
        try:
            problem = make_problem(args.problem)
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc.args[0] if exc.args else exc)) from None
        front = list(reference_front(problem, args.front_samples).members)
    if len(approx[0]) != len(front[0]):
        raise DimensionMismatchError(f"set has m={len(approx[0])} but front has m={len(front[0])}")
    eps = additive_epsilon(approx, front)
    header, row = ["epsilon"], [eps]
    if len(front[0]) == 2:
        ref = default_hv_reference(front)
        inside = [y for y in approx if y[0] < ref[0] and y[1] < ref[1]]
        header.append("hypervolume")
        row.append(hypervolume_2d(inside, ref) if inside else 0.0)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(header)
    out.writerow([fmt(v) for v in row])
    return EXIT_OK


# list-problems --------------------------------------------------------------

def cmd_list_problems(args: argparse.Namespace) -> int:
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["id", "n", "m", "optima", "ideal", "parameters"])
    for name, (factory, doc) in REGISTRY.items():
        p = factory()
        out.writerow([name, p.n, p.m, "yes" if p.optima is not None else "no",
                      "yes" if p.ideal is not None else "no", doc or "-"])
    return EXIT_OK


# entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mosoo", description="Deterministic multi-objective "
                                     "optimistic optimization on box-bounded problems.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an optimizer and write its artifacts")
    run.add_argument("--problem", default="worked_example",
                     help='registry id with optional parameters, e.g. "holder:n=2,a1=0.21,a2=0.81"')
    run.add_argument("--algo", choices=("mosoo", "soo"), default="mosoo")
    run.add_argument("--k", type=int, default=3, help="partition factor")
    run.add_argument("--budget", type=int, default=10_000, help="evaluation budget")
    run.add_argument("--hmax", choices=("power", "constant", "unbounded"), default="power")
    run.add_argument("--hmax-p", type=float, default=0.5, help="exponent of hmax(t) = floor(t^p)")
    run.add_argument("--hmax-depth", type=int, default=10, help="depth for --hmax constant")
    run.add_argument("--split", choices=SPLIT_POLICIES, default=SEQUENTIAL)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--front-samples", type=int, default=100_000,
                     help="uniform samples for the reference front (0 disables epsilon/hv)")
    run.add_argument("--bounds", action="store_true", help="also write bounds.csv (holder only)")
    run.add_argument("--delta-form", choices=("cell", "triple"), default="cell")
    run.add_argument("--from-manifest", metavar="FILE",
                     help="take the whole configuration from a previous manifest.json")
    run.set_defaults(func=cmd_run)

    ind = sub.add_parser("indicators", help="epsilon and hypervolume of an approximation set")
    ind.add_argument("--set", required=True, help="CSV of objective vectors")
    src = ind.add_mutually_exclusive_group(required=True)
    src.add_argument("--front", help="CSV of reference front vectors")
    src.add_argument("--problem", help="registry id; the front is sampled as in `run`")
    ind.add_argument("--front-samples", type=int, default=100_000)
    ind.set_defaults(func=cmd_indicators)

    lst = sub.add_parser("list-problems", help="show the problem registry")
    lst.set_defaults(func=cmd_list_problems)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DimensionMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InputFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NonFiniteObjectiveError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
