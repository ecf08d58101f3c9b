"""Quality indicators for approximation sets and reference fronts."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .pareto import Archive, DimensionMismatchError, ObjectiveVector, as_matrix, nd_filter
from .problems import Problem

_CHUNK = 1 << 22  # max elements of one broadcast block


@dataclass(frozen=True)
class ReferenceFront:
    """Stand-in for the Pareto front, tagged with how it was obtained.

    ``provenance`` is ``"analytic"`` or ``"sampled"``; sampled fronts also
    carry the sample count and seed.
    """

    members: tuple[ObjectiveVector, ...]
    provenance: str = "analytic"
    count: Optional[int] = None
    seed: Optional[int] = None

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @classmethod
    def from_vectors(cls, ys: Sequence[Sequence[float]], **tags) -> "ReferenceFront":
        return cls(tuple(nd_filter(ys)), **tags)


def _matrices(a, b) -> tuple[np.ndarray, np.ndarray]:
    A = as_matrix(a)
    B = as_matrix(b)
    if A.size == 0 or B.size == 0:
        raise ValueError("epsilon indicator needs two non-empty sets")
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatchError(f"sets have dimensions {A.shape[1]} and {B.shape[1]}")
    return A, B


def additive_epsilon(a: Sequence[Sequence[float]], b: Sequence[Sequence[float]]) -> float:
    """Smallest shift ``eps`` such that every ``b`` is weakly dominated by some ``a - eps``.

    Evaluated exactly as ``max_b min_a max_j (a_j - b_j)``.
    """
    A, B = _matrices(a, b)
    rows = max(1, _CHUNK // (A.shape[0] * A.shape[1]))
    worst = -np.inf
    for start in range(0, B.shape[0], rows):
        block = B[start:start + rows]
        gaps = (A[None, :, :] - block[:, None, :]).max(axis=2).min(axis=1)
        worst = max(worst, float(gaps.max()))
    return worst


def unary_epsilon(a: Sequence[Sequence[float]], front: Sequence[Sequence[float]]) -> float:
    return additive_epsilon(a, list(front))


class EpsilonTracker:
    """Running unary epsilon of a growing point set against a fixed front.

    Keeps, for every front member, the best gap seen so far; adding a point
    costs one pass over the front. Dominated points never lower a gap below
    what their dominator gives, so feeding every evaluated point yields the
    indicator of the non-dominated archive.
    """

    def __init__(self, front: Sequence[Sequence[float]]) -> None:
        self.front = as_matrix(list(front))
        if self.front.size == 0:
            raise ValueError("reference front is empty")
        self._columns = [np.ascontiguousarray(col) for col in self.front.T]
        self._scratch = np.empty(self.front.shape[0])
        self._other = np.empty(self.front.shape[0])
        self.gaps = np.full(self.front.shape[0], np.inf)

    def add(self, y: Sequence[float]) -> None:
        if len(y) != len(self._columns):
            raise DimensionMismatchError("point and front dimensions differ")
        gap, other = self._scratch, self._other
        np.subtract(float(y[0]), self._columns[0], out=gap)
        for value, col in zip(y[1:], self._columns[1:]):
            np.subtract(float(value), col, out=other)
            np.maximum(gap, other, out=gap)
        np.minimum(self.gaps, gap, out=self.gaps)

    @property
    def value(self) -> float:
        return float(self.gaps.max())


def hypervolume_2d(a: Sequence[Sequence[float]], ref: Sequence[float]) -> float:
    """Area dominated by ``a`` and bounded above by ``ref`` (two objectives).

    Members that do not strictly dominate ``ref`` are dropped with a warning.
    """
    A = as_matrix(a)
    r = np.asarray(ref, dtype=float)
    if r.shape != (2,) or (A.size and A.shape[1] != 2):
        raise NotImplementedError("hypervolume is only implemented for two objectives")
    if A.size == 0:
        return 0.0
    inside = np.all(A < r, axis=1)
    if not inside.all():
        warnings.warn(f"discarding {int((~inside).sum())} points that do not strictly dominate "
                      f"the reference point", RuntimeWarning, stacklevel=2)
        A = A[inside]
    order = np.lexsort((A[:, 1], A[:, 0]))
    area = 0.0
    level = r[1]
    for y1, y2 in A[order]:
        if y2 < level:
            area += (r[0] - y1) * (level - y2)
            level = y2
    return float(area)


def sample_reference_front(problem: Problem, count: int = 100_000, seed: Optional[int] = 0,
                           include_extrema: bool = False, chunk: int = 20_000) -> ReferenceFront:
    """Non-dominated layer of ``count`` uniformly drawn decision points.

    With ``include_extrema`` the objective vectors at the problem's known
    per-objective optimizers are added to the sample, so the front contains
    the exact extreme points. Evaluations here are not budgeted.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    lo = np.asarray(problem.box.lower, dtype=float)
    hi = np.asarray(problem.box.upper, dtype=float)
    front: list[ObjectiveVector] = []
    if include_extrema and problem.extrema is not None:
        front.extend(problem.extrema)
    done = 0
    while done < count:
        size = min(chunk, count - done)
        xs = lo + (hi - lo) * rng.random((size, problem.n))
        ys = [problem(x) for x in xs]
        front = nd_filter(front + ys)
        done += size
    return ReferenceFront(tuple(front), "sampled", count, seed)


def conflict_dimension(extrema: Sequence[Sequence[float]], front: Sequence[Sequence[float]]) -> float:
    """Epsilon indicator of the front's extreme points against the front."""
    return additive_epsilon(extrema, list(front))


def front_extrema(front: Sequence[Sequence[float]]) -> list[ObjectiveVector]:
    """Per-objective argmin members of a front (first one on ties)."""
    F = as_matrix(list(front))
    if F.size == 0:
        raise ValueError("front is empty")
    picks = []
    for j in range(F.shape[1]):
        idx = int(np.argmin(F[:, j]))
        row = tuple(float(v) for v in F[idx])
        if row not in picks:
            picks.append(row)
    return picks


def default_hv_reference(front: Sequence[Sequence[float]]) -> tuple[float, float]:
    """Front nadir pushed out by 10% of the front's range (1.0 if degenerate)."""
    F = as_matrix(list(front))
    lo, hi = F.min(axis=0), F.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    ref = hi + 0.1 * span
    return (float(ref[0]), float(ref[1]))


@dataclass
class CurveRow:
    t: int
    evaluations: int
    archive_size: int
    epsilon: Optional[float]
    hypervolume: Optional[float]
    loss: Optional[tuple[float, ...]]


def indicator_curve(trace, front: Optional[Sequence[Sequence[float]]] = None,
                    ideal: Optional[Sequence[float]] = None,
                    hv_ref: Optional[Sequence[float]] = None) -> list[CurveRow]:
    """Replay a run and measure its archive after every iteration record.

    Epsilon needs ``front``, the loss vector needs ``ideal`` and the
    hypervolume needs ``hv_ref`` (two objectives only); missing inputs give
    ``None`` columns. Archive members not strictly inside ``hv_ref`` are left
    out of the hypervolume silently.
    """
    tracker = EpsilonTracker(front) if front is not None else None
    ref = None if hv_ref is None else np.asarray(hv_ref, dtype=float)
    rows: list[CurveRow] = []
    best: Optional[np.ndarray] = None
    hv = None
    for rec, archive, fresh in _replay(trace):
        for y in fresh:
            if tracker is not None:
                tracker.add(y)
            best = np.asarray(y) if best is None else np.minimum(best, y)
        if ref is not None and (fresh or hv is None):
            inside = [y for y in archive.vectors if all(a < b for a, b in zip(y, ref))]
            hv = hypervolume_2d(inside, ref) if inside else 0.0
        loss = None
        if ideal is not None:
            loss = tuple(float(b - i) for b, i in zip(best, ideal))
        rows.append(CurveRow(rec.t, rec.evaluations, len(archive),
                             tracker.value if tracker is not None else None, hv, loss))
    return rows


def _replay(trace):
    """Yield ``(record, archive, points that entered the archive)`` per record."""
    archive = Archive()
    pos = 0
    pending = [trace.log[0][2]] if trace.log else []
    if pending:
        archive.add(pending[0])
        pos = 1
    for rec in trace.records:
        fresh = pending
        pending = []
        while pos < rec.evaluations:
            y = trace.log[pos][2]
            if archive.add(y):
                fresh.append(y)
            pos += 1
        yield rec, archive, fresh
