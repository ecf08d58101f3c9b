"""Benchmark problems and evaluation accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .partition import Box, BudgetExhausted


class NonFiniteObjectiveError(ArithmeticError):
    """An objective evaluated to NaN or infinity."""

    def __init__(self, x: Sequence[float], y: Sequence[float]) -> None:
        self.x = tuple(float(v) for v in x)
        self.y = tuple(float(v) for v in y)
        super().__init__(f"non-finite objective {self.y} at decision point {self.x}")


@dataclass(frozen=True)
class Problem:
    """Box-bounded vector objective with optional ground truth.

    ``optima`` holds one minimizer per objective and ``ideal`` the ideal
    point; either may be ``None`` when unknown. ``params`` records whatever
    is needed to rebuild the problem from the registry.
    """

    name: str
    n: int
    m: int
    box: Box
    func: Callable[[np.ndarray], Sequence[float]] = field(repr=False)
    optima: Optional[tuple[tuple[float, ...], ...]] = None
    ideal: Optional[tuple[float, ...]] = None
    params: dict = field(default_factory=dict)

    def __call__(self, x: Sequence[float]) -> tuple[float, ...]:
        y = tuple(float(v) for v in self.func(np.asarray(x, dtype=float)))
        if len(y) != self.m:
            raise ValueError(f"{self.name} returned {len(y)} objectives, expected {self.m}")
        return y

    @property
    def extrema(self) -> Optional[list[tuple[float, ...]]]:
        """Objective vectors at the per-objective optimizers."""
        if self.optima is None:
            return None
        return [self(x) for x in self.optima]


class BudgetedEvaluator:
    """Counts evaluations of a problem and refuses to exceed ``cap``.

    Every accepted call is logged as ``(index, x, y)`` with a 1-based index.
    """

    def __init__(self, problem: Problem, cap: int) -> None:
        if cap < 1:
            raise ValueError("evaluation budget must be >= 1")
        self.problem = problem
        self.cap = int(cap)
        self.count = 0
        self.log: list[tuple[int, tuple[float, ...], tuple[float, ...]]] = []

    @property
    def remaining(self) -> int:
        return self.cap - self.count

    def __call__(self, x: Sequence[float]) -> tuple[float, ...]:
        if self.count >= self.cap:
            raise BudgetExhausted(f"budget of {self.cap} evaluations exhausted")
        x = tuple(float(v) for v in x)
        y = self.problem(x)
        if not all(math.isfinite(v) for v in y):
            raise NonFiniteObjectiveError(x, y)
        self.count += 1
        self.log.append((self.count, x, y))
        return y


def worked_example() -> Problem:
    """Two squared distances to (0.25, 0.66) and (-0.25, 0.66) on [-1, 1]^2."""

    def f(x: np.ndarray) -> tuple[float, float]:
        f1 = (x[0] - 0.25) ** 2 + (x[1] - 0.66) ** 2
        f2 = (x[0] + 0.25) ** 2 + (x[1] - 0.66) ** 2
        return (f1, f2)

    return Problem("worked_example", 2, 2, Box((-1.0, -1.0), (1.0, 1.0)), f,
                   optima=((0.25, 0.66), (-0.25, 0.66)), ideal=(0.0, 0.0))


def _as_point(a: float | Sequence[float], n: int) -> tuple[float, ...]:
    if np.isscalar(a):
        return (float(a),) * n
    pt = tuple(float(v) for v in a)
    if len(pt) != n:
        raise ValueError(f"optimum {pt} does not have dimension {n}")
    return pt


def holder_family(n: int = 1, alpha1: float = 2.0, alpha2: float = 2.0,
                  a1: float | Sequence[float] = 0.25,
                  a2: float | Sequence[float] = 0.75) -> Problem:
    """``f_j(x) = max_d |x_d - a_j,d| ** alpha_j`` on ``[0, 1]^n``.

    Scalar optima are broadcast to every coordinate.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if alpha1 < 1 or alpha2 < 1:
        raise ValueError("Hölder exponents must be >= 1")
    p1, p2 = _as_point(a1, n), _as_point(a2, n)
    for p in (p1, p2):
        if any(not 0.0 <= v <= 1.0 for v in p):
            raise ValueError(f"optimum {p} lies outside [0, 1]^{n}")
    c1, c2 = np.asarray(p1), np.asarray(p2)

    def f(x: np.ndarray) -> tuple[float, float]:
        return (float(np.max(np.abs(x - c1))) ** alpha1,
                float(np.max(np.abs(x - c2))) ** alpha2)

    params = {"n": n, "alpha1": alpha1, "alpha2": alpha2, "a1": list(p1), "a2": list(p2)}
    return Problem("holder", n, 2, Box((0.0,) * n, (1.0,) * n), f,
                   optima=(p1, p2), ideal=(0.0, 0.0), params=params)


def _schaffer() -> Problem:
    return Problem("schaffer", 1, 2, Box((-5.0,), (5.0,)),
                   lambda x: (x[0] ** 2, (x[0] - 2.0) ** 2),
                   optima=((0.0,), (2.0,)), ideal=(0.0, 0.0))


def _fonseca_fleming(n: int = 2) -> Problem:
    s = 1.0 / math.sqrt(n)

    def f(x: np.ndarray) -> tuple[float, float]:
        return (1.0 - math.exp(-float(np.sum((x - s) ** 2))),
                1.0 - math.exp(-float(np.sum((x + s) ** 2))))

    return Problem("fonseca_fleming", n, 2, Box((-4.0,) * n, (4.0,) * n), f,
                   optima=((s,) * n, (-s,) * n), ideal=(0.0, 0.0), params={"n": n})


def _sphere_pair(n: int = 3) -> Problem:
    """Squared distances to the points 0.2*1 and 0.7*1 in [0, 1]^n."""

    def f(x: np.ndarray) -> tuple[float, float]:
        return (float(np.sum((x - 0.2) ** 2)), float(np.sum((x - 0.7) ** 2)))

    return Problem("sphere_pair", n, 2, Box((0.0,) * n, (1.0,) * n), f,
                   optima=((0.2,) * n, (0.7,) * n), ideal=(0.0, 0.0), params={"n": n})


CLASSIC = {
    "schaffer": _schaffer,
    "fonseca_fleming": _fonseca_fleming,
    "sphere_pair": _sphere_pair,
}


def classic_biobjective(name: str, **params) -> Problem:
    try:
        factory = CLASSIC[name]
    except KeyError:
        raise KeyError(f"unknown classic problem {name!r}") from None
    return factory(**params)


def scalar_problem(func: Callable[[np.ndarray], float], lower: Sequence[float],
                   upper: Sequence[float], name: str = "scalar",
                   optimum: Optional[Sequence[float]] = None,
                   minimum: Optional[float] = None) -> Problem:
    """Wrap a real-valued function as a one-objective :class:`Problem`."""
    return Problem(name, len(lower), 1, Box.from_bounds(lower, upper),
                   lambda x: (func(x),),
                   optima=None if optimum is None else (tuple(map(float, optimum)),),
                   ideal=None if minimum is None else (float(minimum),))


def _shifted_sphere(n: int = 1, c: float = 0.3) -> Problem:
    """Single-objective ``||x - c||^2`` on ``[0, 1]^n``."""
    if not 0.0 <= c <= 1.0:
        raise ValueError("c must lie in [0, 1]")
    problem = scalar_problem(lambda x: float(np.sum((x - c) ** 2)), [0.0] * n, [1.0] * n,
                             "shifted_sphere", optimum=[c] * n, minimum=0.0)
    return replace(problem, params={"n": n, "c": c})


# id -> (factory, parameter documentation)
REGISTRY: dict[str, tuple[Callable[..., Problem], str]] = {
    "worked_example": (worked_example, ""),
    "holder": (holder_family,
               "n=int (1), alpha1=float>=1 (2), alpha2=float>=1 (2), "
               "a1=float|f;f;.. in [0,1] (0.25), a2=... (0.75)"),
    "schaffer": (_schaffer, ""),
    "fonseca_fleming": (_fonseca_fleming, "n=int (2)"),
    "sphere_pair": (_sphere_pair, "n=int (3)"),
    "shifted_sphere": (_shifted_sphere, "n=int (1), c=float in [0,1] (0.3)"),
}


def _parse_value(raw: str) -> float | int | list[float]:
    if ";" in raw:
        return [float(v) for v in raw.split(";") if v]
    try:
        return int(raw)
    except ValueError:
        return float(raw)


def parse_problem_id(spec: str) -> tuple[str, dict]:
    """Split ``"holder:n=2,a1=0.21"`` into the id and keyword parameters."""
    name, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, sep, raw = item.partition("=")
        if not sep:
            raise ValueError(f"malformed problem parameter {item!r}")
        try:
            params[key.strip()] = _parse_value(raw.strip())
        except ValueError:
            raise ValueError(f"malformed value in problem parameter {item!r}") from None
    return name.strip(), params


def make_problem(spec: str) -> Problem:
    """Build a registered problem from its textual id."""
    name, params = parse_problem_id(spec)
    if name not in REGISTRY:
        raise KeyError(f"unknown problem {name!r}; known: {', '.join(REGISTRY)}")
    factory, _ = REGISTRY[name]
    try:
        return factory(**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {name!r}: {exc}") from None
