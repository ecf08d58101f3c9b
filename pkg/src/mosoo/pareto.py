"""Pareto dominance relations and non-dominated filtering (minimization)."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

ObjectiveVector = tuple[float, ...]


class DimensionMismatchError(ValueError):
    """Raised when objective vectors of different lengths are compared."""


def _pair(y1: Sequence[float], y2: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(y1, dtype=float)
    b = np.asarray(y2, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatchError(f"cannot compare vectors of shape {a.shape} and {b.shape}")
    return a, b


def dominates(y1: Sequence[float], y2: Sequence[float]) -> bool:
    """True if ``y1`` is no worse than ``y2`` everywhere and better somewhere."""
    a, b = _pair(y1, y2)
    return bool(np.all(a <= b) and np.any(a < b))


def strictly_dominates(y1: Sequence[float], y2: Sequence[float]) -> bool:
    a, b = _pair(y1, y2)
    return bool(np.all(a < b))


def weakly_dominates(y1: Sequence[float], y2: Sequence[float]) -> bool:
    a, b = _pair(y1, y2)
    return bool(np.all(a <= b))


def as_matrix(ys: Iterable[Sequence[float]]) -> np.ndarray:
    """Stack objective vectors into an ``(N, m)`` float array.

    Rejects ragged input and non-finite entries. An empty input gives a
    ``(0, 0)`` array.
    """
    rows = [tuple(float(v) for v in y) for y in ys]
    if not rows:
        return np.empty((0, 0))
    m = len(rows[0])
    if m == 0 or any(len(r) != m for r in rows):
        raise DimensionMismatchError("objective vectors must share one non-zero dimension")
    arr = np.array(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("objective vectors must be finite")
    return arr


def nd_indices(ys: Iterable[Sequence[float]]) -> list[int]:
    """Indices of the non-dominated, duplicate-free subset of ``ys``.

    Among equal vectors only the first occurrence survives. Indices are
    returned in ascending (first-occurrence) order.

    Works by visiting the points in lexicographic order: a point can only be
    dominated by (or equal to) a point that sorts before it, so each point
    needs checking against the survivors found so far. With two objectives
    that check reduces to a running minimum of the second coordinate.
    """
    arr = as_matrix(ys)
    n = arr.shape[0]
    if n == 0:
        return []
    # np.lexsort keys are last-is-primary; the sort is stable so that
    # duplicates are visited in first-occurrence order.
    order = np.lexsort(arr.T[::-1])
    if arr.shape[1] == 1:
        return [int(order[0])]
    if arr.shape[1] == 2:
        second = arr[order, 1]
        best_before = np.minimum.accumulate(np.concatenate(([np.inf], second[:-1])))
        return sorted(int(i) for i in order[second < best_before])
    kept = np.empty_like(arr)
    kept_idx: list[int] = []
    k = 0
    for i in order:
        p = arr[i]
        if k and np.any(np.all(kept[:k] <= p, axis=1)):
            continue
        kept[k] = p
        k += 1
        kept_idx.append(int(i))
    kept_idx.sort()
    return kept_idx


def nd_filter(ys: Iterable[Sequence[float]]) -> list[ObjectiveVector]:
    """Non-dominated layer of ``ys`` as an approximation set.

    >>> nd_filter([(1, 3), (3, 1), (2, 2), (4, 4)])
    [(1.0, 3.0), (3.0, 1.0), (2.0, 2.0)]
    """
    rows = [tuple(float(v) for v in y) for y in ys]
    return [rows[i] for i in nd_indices(rows)]


def nd_min(ys: Iterable[Sequence[float]]) -> list[ObjectiveVector]:
    """Union over objectives of the vectors attaining that objective's minimum.

    Ties are all kept, then duplicates dropped; output is in
    first-occurrence order.
    """
    rows = [tuple(float(v) for v in y) for y in ys]
    arr = as_matrix(rows)
    if arr.size == 0:
        return []
    hit = np.any(arr == arr.min(axis=0), axis=1)
    out: list[ObjectiveVector] = []
    for row, flag in zip(rows, hit):
        if flag and row not in out:
            out.append(row)
    return out


def empirical_ideal(a: Iterable[Sequence[float]]) -> ObjectiveVector:
    arr = as_matrix(a)
    if arr.size == 0:
        raise ValueError("ideal point of an empty set is undefined")
    return tuple(float(v) for v in arr.min(axis=0))


def nadir(ys: Iterable[Sequence[float]]) -> ObjectiveVector:
    arr = as_matrix(ys)
    if arr.size == 0:
        raise ValueError("nadir point of an empty set is undefined")
    return tuple(float(v) for v in arr.max(axis=0))


class Archive:
    """Incrementally maintained approximation set.

    Each member keeps an optional payload (e.g. the decision point). A
    candidate weakly dominated by a member is rejected, so the first of
    several equal vectors is the one kept. Members stay in insertion order.
    """

    def __init__(self) -> None:
        self._data = np.empty((0, 0))
        self._size = 0
        self._payloads: list[object] = []

    def __len__(self) -> int:
        return self._size

    @property
    def vectors(self) -> list[ObjectiveVector]:
        return [tuple(float(v) for v in row) for row in self._data[:self._size]]

    @property
    def payloads(self) -> list[object]:
        return list(self._payloads)

    def add(self, y: Sequence[float], payload: object = None) -> bool:
        """Insert ``y``; return True if it entered the archive."""
        v = np.asarray(y, dtype=float)
        if self._size == 0 and self._data.shape[1] != v.shape[0]:
            self._data = np.empty((16, v.shape[0]))
        elif v.shape != (self._data.shape[1],):
            raise DimensionMismatchError("archive dimension mismatch")
        live = self._data[:self._size]
        if self._size and np.any(np.all(live <= v, axis=1)):
            return False
        if self._size:
            beaten = np.all(v <= live, axis=1)
            if beaten.any():
                keep = ~beaten
                kept = live[keep]
                self._size = kept.shape[0]
                self._data[:self._size] = kept
                self._payloads = [p for p, k in zip(self._payloads, keep) if k]
        if self._size == self._data.shape[0]:
            grown = np.empty((2 * self._data.shape[0], self._data.shape[1]))
            grown[:self._size] = self._data[:self._size]
            self._data = grown
        self._data[self._size] = v
        self._size += 1
        self._payloads.append(payload)
        return True
