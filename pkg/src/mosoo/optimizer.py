"""MO-SOO and SOO main loops with run tracing.

Both optimizers sweep the partition tree from the root down to
``min(hmax(t), depth(tree))``. SOO expands at most one leaf per depth (the
best one, if it is no worse than every node already expanded in the sweep);
MO-SOO expands every leaf at the current depth that is non-dominated with
respect to the leaves at that depth and the non-dominated nodes carried down
from shallower depths of the sweep.

The iteration counter ``t`` differs between the two on purpose: MO-SOO
advances it once per depth visited, SOO once per node expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .pareto import Archive, DimensionMismatchError, ObjectiveVector, empirical_ideal, nd_filter, nd_indices
from .partition import SEQUENTIAL, BudgetExhausted, Node, Tree
from .problems import BudgetedEvaluator, Problem


@dataclass(frozen=True)
class HMaxPolicy:
    """Maximal expandable depth as a function of the iteration counter."""

    kind: str = "power"
    value: float = 0.5

    def __post_init__(self) -> None:
        if self.kind == "power" and not 0.0 < self.value < 1.0:
            raise ValueError("power policy exponent must lie in (0, 1)")
        if self.kind == "constant" and (self.value < 0 or self.value != int(self.value)):
            raise ValueError("constant policy needs a non-negative integer depth")
        if self.kind not in ("power", "constant", "unbounded"):
            raise ValueError(f"unknown hmax policy {self.kind!r}")

    @classmethod
    def power(cls, p: float = 0.5) -> "HMaxPolicy":
        return cls("power", p)

    @classmethod
    def constant(cls, depth: int) -> "HMaxPolicy":
        return cls("constant", depth)

    @classmethod
    def unbounded(cls) -> "HMaxPolicy":
        return cls("unbounded", 0.0)

    def __call__(self, t: int) -> float:
        if self.kind == "power":
            return math.floor(t ** self.value)
        if self.kind == "constant":
            return int(self.value)
        return math.inf


@dataclass
class IterationRecord:
    """One depth step of a sweep.

    ``evaluations`` is the cumulative evaluation count once the step's
    expansions are done; ``sweep_depths`` is filled in when the sweep ends
    with the number of depths that sweep visited.
    """

    t: int
    sweep: int
    depth: int
    n_leaves: int
    expanded: list[Node]
    evaluations: int
    sweep_depths: int = 0

    @property
    def expanded_keys(self) -> list[tuple[int, int]]:
        return [node.key for node in self.expanded]


@dataclass
class RunTrace:
    algorithm: str
    problem: Problem
    K: int
    budget: int
    hmax: HMaxPolicy
    split: str
    seed: Optional[int]
    tree: Tree
    records: list[IterationRecord] = field(default_factory=list)
    log: list[tuple[int, tuple[float, ...], tuple[float, ...]]] = field(default_factory=list)
    stop_reason: str = ""

    @property
    def expanded(self) -> list[Node]:
        return self.tree.expanded

    @property
    def box(self):
        return self.tree.box

    @property
    def evaluations(self) -> int:
        return len(self.log)

    @property
    def archive(self) -> list[ObjectiveVector]:
        return nd_filter(y for _, _, y in self.log)

    @property
    def archive_points(self) -> list[tuple[float, ...]]:
        ys = [y for _, _, y in self.log]
        return [self.log[i][1] for i in nd_indices(ys)]

    def sweeps(self) -> list[list[IterationRecord]]:
        out: list[list[IterationRecord]] = []
        for rec in self.records:
            if not out or out[-1][0].sweep != rec.sweep:
                out.append([])
            out[-1].append(rec)
        return out

    def archive_history(self) -> Iterator[tuple[IterationRecord, Archive]]:
        """Yield each record with the archive as it stood after that record.

        The same :class:`Archive` object is updated in place between yields.
        """
        archive = Archive()
        pos = 0
        for rec in self.records:
            while pos < rec.evaluations:
                _, x, y = self.log[pos]
                archive.add(y, x)
                pos += 1
            yield rec, archive


def _start(problem: Problem, K: int, budget: int, split: str, seed: Optional[int]):
    if budget < 1:
        raise ValueError("evaluation budget must be >= 1")
    evaluator = BudgetedEvaluator(problem, budget)
    tree = Tree(problem.box, K, split, seed)
    tree.init_root(evaluator)
    return evaluator, tree


def _close_sweep(records: list[IterationRecord], first: int) -> None:
    count = len(records) - first
    for rec in records[first:]:
        rec.sweep_depths = count


def mosoo_run(problem: Problem, K: int = 3, budget: int = 1000,
              hmax: HMaxPolicy = HMaxPolicy.power(0.5), split: str = SEQUENTIAL,
              seed: Optional[int] = None) -> tuple[list[ObjectiveVector], RunTrace]:
    """Run MO-SOO and return the final approximation set with its trace.

    An expansion is only started when the remaining budget covers all of its
    fresh evaluations; the run stops at the first expansion it cannot fund.
    """
    evaluator, tree = _start(problem, K, budget, split, seed)
    trace = RunTrace("mosoo", problem, K, budget, hmax, split, seed, tree)
    need = tree.fresh_evaluations_per_expansion()
    t, sweep = 1, 0
    exhausted = evaluator.remaining < need
    while not exhausted:
        first = len(trace.records)
        grew = False
        nondominated: list[Node] = []
        h = 0
        while h <= min(hmax(t), tree.depth):
            leaves = tree.leaves_at(h)
            pool = leaves + nondominated
            keep = nd_indices([node.value for node in pool]) if pool else []
            nondominated = [pool[i] for i in keep]
            selected = [pool[i] for i in keep if i < len(leaves)]
            done = []
            for node in selected:
                try:
                    tree.expand(node, evaluator, evaluator.remaining)
                except BudgetExhausted:
                    exhausted = True
                    break
                done.append(node)
            grew = grew or bool(done)
            trace.records.append(IterationRecord(t, sweep, h, len(leaves), done, evaluator.count))
            t += 1
            h += 1
            if exhausted or evaluator.remaining < need:
                exhausted = True
                break
        _close_sweep(trace.records, first)
        sweep += 1
        if not grew and not exhausted and hmax.kind == "constant":
            trace.stop_reason = "stalled"
            break
    trace.stop_reason = trace.stop_reason or "budget"
    trace.log = evaluator.log
    return trace.archive, trace


def soo_run(problem: Problem, K: int = 3, budget: int = 1000,
            hmax: HMaxPolicy = HMaxPolicy.power(0.5), split: str = SEQUENTIAL,
            seed: Optional[int] = None) -> tuple[float, tuple[float, ...], RunTrace]:
    """Run SOO on a single-objective problem.

    Returns the best value, the point where it was found and the trace. Ties
    among leaves of one depth go to the lowest node index.
    """
    if problem.m != 1:
        raise DimensionMismatchError("SOO needs a single-objective problem")
    evaluator, tree = _start(problem, K, budget, split, seed)
    trace = RunTrace("soo", problem, K, budget, hmax, split, seed, tree)
    need = tree.fresh_evaluations_per_expansion()
    t, sweep = 1, 0
    exhausted = evaluator.remaining < need
    while not exhausted:
        first = len(trace.records)
        grew = False
        threshold = math.inf
        h = 0
        while h <= min(hmax(t), tree.depth):
            leaves = tree.leaves_at(h)
            step_t = t
            done = []
            if leaves:
                best = min(leaves, key=lambda node: (node.value[0], node.index))
                if best.value[0] <= threshold:
                    try:
                        tree.expand(best, evaluator, evaluator.remaining)
                    except BudgetExhausted:
                        exhausted = True
                    else:
                        t += 1
                        threshold = best.value[0]
                        done.append(best)
            grew = grew or bool(done)
            trace.records.append(IterationRecord(step_t, sweep, h, len(leaves), done, evaluator.count))
            h += 1
            if exhausted or evaluator.remaining < need:
                exhausted = True
                break
        _close_sweep(trace.records, first)
        sweep += 1
        if not grew and not exhausted and hmax.kind == "constant":
            trace.stop_reason = "stalled"
            break
    trace.stop_reason = trace.stop_reason or "budget"
    trace.log = evaluator.log
    best_idx = min(range(len(trace.log)), key=lambda i: trace.log[i][2][0])
    _, x, y = trace.log[best_idx]
    return y[0], x, trace


def loss_vector(source: RunTrace | Sequence[Sequence[float]],
                ideal: Sequence[float]) -> ObjectiveVector:
    """Empirical ideal of an archive minus the true ideal point."""
    archive = source.archive if isinstance(source, RunTrace) else source
    found = empirical_ideal(archive)
    if len(found) != len(ideal):
        raise DimensionMismatchError("ideal point dimension mismatch")
    return tuple(a - b for a, b in zip(found, ideal))


def deepest_j_optimal_depth(source: RunTrace | Tree, x_opt: Sequence[float]) -> int:
    """Depth of the deepest expanded node whose cell contains ``x_opt``.

    Returns -1 when nothing has been expanded yet.
    """
    if not source.box.contains(x_opt):
        raise ValueError(f"point {tuple(x_opt)} lies outside the decision box")
    x = np.asarray(x_opt, dtype=float)
    return max((node.depth for node in source.expanded if node.cell.contains(x)), default=-1)
